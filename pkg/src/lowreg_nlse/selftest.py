"""Small-grid self-checks wired to the ``selftest`` CLI subcommand.

Every check replays one of the package's load-bearing equivalences at N <= 16:
scheme steps against brute-force convolution oracles, symmetric schemes
against time reversal, constant data against the zero-mode ODE integrators,
and the serialization round trips.  The whole battery is meant to run in
seconds, as a deployment smoke test rather than a substitute for the pytest
suite.
"""
from __future__ import annotations

import math
import os
import tempfile
from typing import Callable

import numpy as np

from .cubic import (
    CubicScheme,
    CubicSchemeConfig,
    ResonanceWeights,
    nrli1_step,
    nrsli2_step,
    os18_step,
    strang_step,
)
from .harness import Equation, SweepRecord, read_records_csv, write_records_csv
from .oracles import (
    band_limit,
    cubic_nrli1_oracle_step,
    euler_zero_mode_square,
    quad_conj_oracle_step,
    quad_square_oracle_step,
    rotation_zero_mode_cubic,
    trapezoid_zero_mode_cubic,
    trapezoid_zero_mode_square,
)
from .quadratic import (
    QuadNonlinearity,
    QuadSchemeConfig,
    li1_conj_step,
    li1_step,
    sli2_conj_step,
    sli2_step,
)
from .spectral import (
    OperatorSymbols,
    SpectralField,
    TorusGrid,
    field_from_text,
    field_to_text,
    phi1,
    random_initial_data,
    sobolev_norm,
)

__all__ = ["run_selftest", "CheckResult"]

CheckResult = tuple[str, bool, str]


def _h1_diff(a: SpectralField, b: SpectralField) -> float:
    return sobolev_norm(SpectralField(a.grid, a.coeffs - b.coeffs), 1.0)


def _constant_field(grid: TorusGrid, value: complex) -> SpectralField:
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    coeffs[grid.n_modes // 2] = value
    return SpectralField(grid, coeffs)


def _check_quadratic_oracles() -> str:
    eps, tau = 0.5, 0.1
    worst = 0.0
    for n, k in ((8, 1), (16, 3)):
        grid = TorusGrid(n)
        ops = OperatorSymbols.build(grid, tau)
        cfg_sq = QuadSchemeConfig(eps, tau)
        cfg_cj = QuadSchemeConfig(eps, tau, QuadNonlinearity.MODULUS_SQUARE)
        for seed in range(5):
            w = band_limit(random_initial_data(grid, 1.0, seed), k)
            worst = max(worst, _h1_diff(li1_step(w, cfg_sq, ops),
                                        quad_square_oracle_step(w, eps, tau)))
            worst = max(worst, _h1_diff(li1_conj_step(w, cfg_cj, ops),
                                        quad_conj_oracle_step(w, eps, tau)))
    if worst > 1e-10:
        raise AssertionError(f"worst H1 gap {worst:.3e} exceeds 1e-10")
    return f"worst H1 gap {worst:.1e}"


def _check_cubic_oracle() -> str:
    eps, tau = 0.5, 0.1
    worst = 0.0
    for n in (8, 12, 16):
        grid = TorusGrid(n)
        ops = OperatorSymbols.build(grid, tau)
        cfg = CubicSchemeConfig(eps, tau, CubicScheme.NRLI1)
        for seed in range(3):
            w = random_initial_data(grid, 1.0, seed)
            worst = max(worst, _h1_diff(nrli1_step(w, cfg, ops),
                                        cubic_nrli1_oracle_step(w, eps, tau)))
    if worst > 1e-10:
        raise AssertionError(f"worst H1 gap {worst:.3e} exceeds 1e-10")
    return f"worst H1 gap {worst:.1e}"


def _round_trip_residual(step: Callable, cfg_fwd, cfg_bwd, ops_fwd, ops_bwd, w) -> float:
    forward = step(w, cfg_fwd, ops_fwd)
    return _h1_diff(step(forward, cfg_bwd, ops_bwd), w)


def _check_symmetry() -> str:
    grid = TorusGrid(16)
    eps, tau, tol = 0.5, 0.05, 1e-12
    ops_f = OperatorSymbols.build(grid, tau)
    ops_b = OperatorSymbols.build(grid, -tau)
    worst = 0.0
    for seed in range(3):
        w = random_initial_data(grid, 1.0, seed)
        for step, nonlin in ((sli2_step, QuadNonlinearity.SQUARE),
                             (sli2_conj_step, QuadNonlinearity.MODULUS_SQUARE)):
            cf = QuadSchemeConfig(eps, tau, nonlin, fp_tol=tol)
            cb = QuadSchemeConfig(eps, -tau, nonlin, fp_tol=tol)
            worst = max(worst, _round_trip_residual(step, cf, cb, ops_f, ops_b, w))
        cf = CubicSchemeConfig(eps, tau, CubicScheme.NRSLI2, fp_tol=tol)
        cb = CubicSchemeConfig(eps, -tau, CubicScheme.NRSLI2, fp_tol=tol)
        worst = max(worst, _round_trip_residual(nrsli2_step, cf, cb, ops_f, ops_b, w))
    if worst > 10 * tol:
        raise AssertionError(f"round-trip residual {worst:.3e} exceeds {10 * tol:.0e}")
    # the explicit one-endpoint map must NOT pass the same gate, or the
    # round trip is vacuous
    w = random_initial_data(grid, 1.0, 5)
    cf = QuadSchemeConfig(eps, tau)
    cb = QuadSchemeConfig(eps, -tau)
    asym = _round_trip_residual(li1_step, cf, cb, ops_f, ops_b, w)
    if asym < 1e-6:
        raise AssertionError(f"li1 round trip suspiciously tight: {asym:.3e}")
    return f"residual {worst:.1e}, one-endpoint control {asym:.1e}"


def _check_zero_mode_reductions() -> str:
    grid = TorusGrid(8)
    eps, tau = 0.5, 0.1
    ops = OperatorSymbols.build(grid, tau)
    v0 = 0.6 - 0.4j
    w = _constant_field(grid, v0)
    n0 = grid.n_modes // 2
    checks = [
        (li1_step(w, QuadSchemeConfig(eps, tau), ops).coeffs[n0],
         euler_zero_mode_square(v0, eps, tau)),
        (sli2_step(w, QuadSchemeConfig(eps, tau), ops).coeffs[n0],
         trapezoid_zero_mode_square(v0, eps, tau)),
        (nrsli2_step(w, CubicSchemeConfig(eps, tau, CubicScheme.NRSLI2), ops).coeffs[n0],
         trapezoid_zero_mode_cubic(v0, eps, tau)),
        (strang_step(w, CubicSchemeConfig(eps, tau, CubicScheme.STRANG), ops).coeffs[n0],
         rotation_zero_mode_cubic(v0, eps, tau)),
    ]
    worst = max(abs(got - want) for got, want in checks)
    if worst > 1e-12:
        raise AssertionError(f"zero-mode mismatch {worst:.3e} exceeds 1e-12")
    return f"worst mismatch {worst:.1e}"


def _check_resonance_classification() -> str:
    count = 0
    for l1 in range(-6, 7):
        for l2 in range(-6, 7):
            for l3 in range(-6, 7):
                l = -l1 + l2 + l3
                defect = ResonanceWeights.phase_defect(l, l1, l2, l3)
                resonant = ResonanceWeights.is_resonant(l, l2, l3)
                if (defect == 0) != resonant:
                    raise AssertionError(
                        f"classification disagrees with the phase defect at "
                        f"(l1, l2, l3) = ({l1}, {l2}, {l3})"
                    )
                count += 1
    return f"{count} interaction triples"


def _check_phi1_identity() -> str:
    rng = np.random.default_rng(12)
    zs = rng.uniform(-30, 30, 40) + 1j * rng.uniform(-30, 30, 40)
    worst = 0.0
    for z in zs:
        lhs = z * phi1(z)
        rhs = np.expm1(z.real) * math.cos(z.imag) - 2 * math.sin(z.imag / 2) ** 2
        rhs = rhs + 1j * math.exp(z.real) * math.sin(z.imag)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    if worst > 1e-13:
        raise AssertionError(f"phi1 identity residual {worst:.3e}")
    return f"residual {worst:.1e}"


def _check_serialization() -> str:
    grid = TorusGrid(16)
    w = random_initial_data(grid, 1.5, 9)
    back = field_from_text(field_to_text(w))
    if not np.array_equal(back.coeffs, w.coeffs):
        raise AssertionError("field text round trip is not bit-exact")

    record = SweepRecord(
        equation=Equation.CUBIC, scheme="nrli1", eps=0.5, tau=0.05, theta=2.0,
        seed=1, n_modes=16, t_final=0.4, error_norm_r=1.0, error=1.25e-3,
        ref_tau=5e-4, wall_seconds=0.01, fp_iter_max=None, fp_iter_mean=None,
    )
    fd, path = tempfile.mkstemp(suffix=".csv")
    os.close(fd)
    try:
        write_records_csv(path, [record])
        back_rec = read_records_csv(path)[0]
    finally:
        os.unlink(path)
    if (back_rec.error, back_rec.scheme, back_rec.fp_iter_max) != (
        record.error, record.scheme, None,
    ):
        raise AssertionError("CSV round trip altered a record")
    return "field text and CSV round trips exact"


_CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("quadratic convolution oracles (N=8,16)", _check_quadratic_oracles),
    ("cubic convolution oracle (N=8,12,16)", _check_cubic_oracle),
    ("time-reversal symmetry of two-endpoint maps", _check_symmetry),
    ("constant-data zero-mode reductions", _check_zero_mode_reductions),
    ("resonance classification vs phase defect", _check_resonance_classification),
    ("phi1 against expm1 decomposition", _check_phi1_identity),
    ("serialization round trips", _check_serialization),
]


def run_selftest() -> list[CheckResult]:
    """Run every check; never raises, failures come back as (name, False, why)."""
    results: list[CheckResult] = []
    for name, check in _CHECKS:
        try:
            detail = check()
            results.append((name, True, detail))
        except Exception as exc:  # noqa: BLE001 - report, don't crash the battery
            results.append((name, False, f"{type(exc).__name__}: {exc}"))
    return results
