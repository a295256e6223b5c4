"""Spectral core: discrete torus, transforms, Fourier multipliers, norms, random data.

Everything downstream (the integrators and the experiment harness) works on
``SpectralField`` objects, i.e. complex fields on the torus (-pi, pi) stored as
Fourier coefficients in ascending wavenumber order l = -N/2 .. N/2-1 under the
convention

    f_hat[l] = (1/N) * sum_j f(x_j) exp(-i l x_j),   x_j = -pi + 2 pi j / N,

so that f(x_j) = sum_l f_hat[l] exp(i l x_j) and the zero mode is the mean of
the field.  The free Schroedinger group exp(i t dxx) acts diagonally as
exp(-i t l^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "TorusGrid",
    "SpectralField",
    "OperatorSymbols",
    "forward_transform",
    "inverse_transform",
    "free_propagate",
    "antiderivative",
    "apply_phi1_laplacian",
    "conjugate_field",
    "sobolev_norm",
    "phi1",
    "random_initial_data",
    "field_to_text",
    "field_from_text",
    "truncate_two_thirds",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform collocation grid on (-pi, pi) with ``n_modes`` retained wavenumbers.

    ``n_modes`` must be even and >= 4 (powers of two transform fastest, but
    any even size is valid).  Collocation points are x_j = -pi + 2 pi j / N
    and the wavenumber set is {-N/2, ..., N/2 - 1}.
    """

    n_modes: int

    def __post_init__(self) -> None:
        n = self.n_modes
        if not isinstance(n, (int, np.integer)) or n < 4 or n % 2 != 0:
            raise ValueError(f"n_modes must be an even integer >= 4, got {n!r}")

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        k = np.arange(-self.n_modes // 2, self.n_modes // 2)
        k.setflags(write=False)
        return k

    @cached_property
    def points(self) -> np.ndarray:
        x = -np.pi + 2.0 * np.pi * np.arange(self.n_modes) / self.n_modes
        x.setflags(write=False)
        return x

    @cached_property
    def _grid_phase(self) -> np.ndarray:
        # (-1)^l, compensating the -pi origin offset relative to numpy's DFT
        s = np.where(self.wavenumbers % 2 == 0, 1.0, -1.0)
        s.setflags(write=False)
        return s

    @cached_property
    def _inv_ik(self) -> np.ndarray:
        # symbol of the regularized antiderivative: 1/(i l), zero at l = 0
        k = self.wavenumbers
        out = np.zeros(self.n_modes, dtype=np.complex128)
        nz = k != 0
        out[nz] = 1.0 / (1j * k[nz])
        out.setflags(write=False)
        return out

    @cached_property
    def _two_thirds_keep(self) -> np.ndarray:
        keep = np.abs(self.wavenumbers) <= self.n_modes // 3
        keep.setflags(write=False)
        return keep


def coeffs_from_values(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """DFT of grid samples to ascending-l coefficients (array level)."""
    return grid._grid_phase * np.fft.fftshift(np.fft.fft(values)) / grid.n_modes


def values_from_coeffs(coeffs: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Grid samples of the trigonometric interpolant (array level)."""
    return np.fft.ifft(np.fft.ifftshift(coeffs * grid._grid_phase)) * grid.n_modes


def conjugate_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Spectrum of the complex conjugate field: conj(f)_hat[l] = conj(f_hat[-l]).

    The l = -N/2 row maps to itself (N/2 and -N/2 coincide on the grid), which
    is exactly what pointwise conjugation in physical space produces.
    """
    return np.conj(np.concatenate((coeffs[:1], coeffs[:0:-1])))


@dataclass(frozen=True)
class SpectralField:
    """Complex field on a torus grid, stored as ascending-l Fourier coefficients."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.shape != (self.grid.n_modes,):
            raise ValueError(
                f"coeffs must have shape ({self.grid.n_modes},), got {arr.shape}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def values(self) -> np.ndarray:
        """Samples at the collocation points (new array)."""
        return values_from_coeffs(self.coeffs, self.grid)


def forward_transform(values: np.ndarray, grid: TorusGrid) -> SpectralField:
    """Transform N complex samples at the collocation points to a SpectralField."""
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (grid.n_modes,):
        raise ValueError(
            f"expected {grid.n_modes} samples, got shape {values.shape}"
        )
    return SpectralField(grid, coeffs_from_values(values, grid))


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Samples f(x_j) = sum_l f_hat[l] exp(i l x_j); inverse of forward_transform."""
    return field.values()


def free_propagate(field: SpectralField, t: float) -> SpectralField:
    """Apply exp(i t dxx): multiply mode l by exp(-i t l^2)."""
    k = field.grid.wavenumbers
    return SpectralField(field.grid, field.coeffs * np.exp(-1j * t * (k * k)))


def antiderivative(field: SpectralField) -> SpectralField:
    """Regularized antiderivative: divide mode l by (i l), zero the mean mode."""
    return SpectralField(field.grid, field.coeffs * field.grid._inv_ik)


def conjugate_field(field: SpectralField) -> SpectralField:
    """The pointwise complex conjugate of the field (computed spectrally)."""
    return SpectralField(field.grid, conjugate_coeffs(field.coeffs))


_SERIES_CUTOFF = 1e-6


def _expm1_complex(z: np.ndarray) -> np.ndarray:
    # exp(z) - 1 without cancellation for small |z|:
    # Re = expm1(a) cos b - 2 sin^2(b/2),  Im = exp(a) sin b,  z = a + i b
    a = z.real
    b = z.imag
    s = np.sin(0.5 * b)
    return (np.expm1(a) * np.cos(b) - 2.0 * s * s) + 1j * (np.exp(a) * np.sin(b))


def phi1(z):
    """phi1(z) = (exp(z) - 1)/z with phi1(0) = 1, stable near z = 0.

    Below |z| = 1e-6 the truncated series 1 + z/2 + z^2/6 + z^3/24 is used;
    elsewhere the direct quotient with an accurate complex expm1.  Accepts
    scalars or arrays.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out = np.empty_like(z_arr)
    small = np.abs(z_arr) < _SERIES_CUTOFF
    zs = z_arr[small]
    out[small] = 1.0 + zs * (0.5 + zs * (1.0 / 6.0 + zs * (1.0 / 24.0)))
    zb = z_arr[~small]
    out[~small] = _expm1_complex(zb) / zb
    if np.isscalar(z) or np.ndim(z) == 0:
        return complex(out[0])
    return out


def apply_phi1_laplacian(field: SpectralField, a: complex) -> SpectralField:
    """Apply phi1(a * dxx): multiply mode l by phi1(-a l^2)."""
    k = field.grid.wavenumbers
    return SpectralField(field.grid, field.coeffs * phi1(-a * (k * k).astype(np.float64)))


def sobolev_weights(grid: TorusGrid, r: float) -> np.ndarray:
    """The H^r weights (1 + |l|)^r in ascending l order."""
    return (1.0 + np.abs(grid.wavenumbers)) ** float(r)


def sobolev_norm(field: SpectralField, r: float) -> float:
    """H^r norm: sqrt(sum_l (1+|l|)^{2r} |f_hat[l]|^2).  r = 0 is the L2/Parseval norm."""
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    w = sobolev_weights(field.grid, r)
    c = field.coeffs
    return math.sqrt(float(np.sum((w * np.abs(c)) ** 2)))


_U64 = (1 << 64) - 1


class _SplitMix64:
    """splitmix64 counter generator; the pinned random stream for initial data."""

    def __init__(self, seed: int):
        self._state = int(seed) & _U64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _U64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        # 53 high bits -> uniform on [0, 1)
        return (self.next_u64() >> 11) * 2.0**-53


def random_initial_data(grid: TorusGrid, theta: float, seed: int) -> SpectralField:
    """H^theta-rough random field: u_hat[l] = <l>^{-theta} (a + i b), a,b ~ U[0,1).

    <l> = |l| for l != 0 and <0> = 1.  The stream draws coefficients in
    ascending l, real part before imaginary part, from a splitmix64 generator
    seeded with ``seed`` — bit-identical across runs and platforms.
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    rng = _SplitMix64(seed)
    k = grid.wavenumbers
    bracket = np.where(k == 0, 1.0, np.abs(k)).astype(np.float64)
    coeffs = np.empty(grid.n_modes, dtype=np.complex128)
    for i in range(grid.n_modes):
        a = rng.next_double()
        b = rng.next_double()
        coeffs[i] = complex(a, b)
    coeffs *= bracket ** (-float(theta))
    return SpectralField(grid, coeffs)


def field_to_text(field: SpectralField) -> str:
    """Serialize as N lines "l,re,im" in ascending l with 18 significant digits."""
    lines = [
        f"{int(l)},{c.real:.17e},{c.imag:.17e}"
        for l, c in zip(field.grid.wavenumbers, field.coeffs)
    ]
    return "\n".join(lines) + "\n"


def field_from_text(text: str) -> SpectralField:
    """Parse the ``field_to_text`` format back into a SpectralField."""
    rows = [line for line in text.strip().splitlines() if line.strip()]
    n = len(rows)
    grid = TorusGrid(n)
    coeffs = np.empty(n, dtype=np.complex128)
    for i, line in enumerate(rows):
        l_str, re_str, im_str = line.split(",")
        if int(l_str) != grid.wavenumbers[i]:
            raise ValueError(
                f"wavenumber mismatch on line {i}: got {l_str}, "
                f"expected {grid.wavenumbers[i]}"
            )
        coeffs[i] = complex(float(re_str), float(im_str))
    return SpectralField(grid, coeffs)


def truncate_two_thirds(field: SpectralField) -> SpectralField:
    """2/3-rule dealiasing filter: zero all modes with |l| > N/3 (diagnostic)."""
    return SpectralField(field.grid, np.where(field.grid._two_thirds_keep, field.coeffs, 0.0))


@dataclass(frozen=True)
class OperatorSymbols:
    """Per-mode multipliers for a fixed time step tau.

    prop             exp(-i tau l^2)        — symbol of exp(i tau dxx)
    inv_dx           1/(i l), 0 at l = 0    — regularized antiderivative
    phi1_2           phi1(2 i tau l^2)      — symbol of phi1(-2 i tau dxx)
    phi1_1           phi1(i tau l^2)        — symbol of phi1(-i tau dxx)
    phi1_1c          phi1(-i tau l^2)       — symbol of phi1(i tau dxx)
    one_minus_phi1_2 1 - phi1(2 i tau l^2)
    """

    tau: float
    grid: TorusGrid
    prop: np.ndarray
    inv_dx: np.ndarray
    phi1_2: np.ndarray
    phi1_1: np.ndarray
    phi1_1c: np.ndarray
    one_minus_phi1_2: np.ndarray

    @classmethod
    def build(cls, grid: TorusGrid, tau: float) -> "OperatorSymbols":
        lsq = (grid.wavenumbers * grid.wavenumbers).astype(np.float64)
        prop = np.exp(-1j * tau * lsq)
        phi1_2 = phi1(2j * tau * lsq)
        phi1_1 = phi1(1j * tau * lsq)
        phi1_1c = phi1(-1j * tau * lsq)
        arrays = dict(
            prop=prop,
            inv_dx=grid._inv_ik.copy(),
            phi1_2=phi1_2,
            phi1_1=phi1_1,
            phi1_1c=phi1_1c,
            one_minus_phi1_2=1.0 - phi1_2,
        )
        for a in arrays.values():
            a.setflags(write=False)
        return cls(tau=float(tau), grid=grid, **arrays)
