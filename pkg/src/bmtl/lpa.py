"""Littlewood-Paley machinery: annulus profiles, dyadic partitions, band filters,
Bessel potentials, and the auxiliary Sobolev / Holder-Zygmund norms.

Profiles are radial functions of |xi| built from the C-infinity bump
exp(-1/(t(1-t))): the analysis profile is 1 on [3/5, 5/3] and supported in
[1/2, 2]; its dual satisfies F(psi) = F(phi) / sum_v |F(phi_v)|^2, which makes
the dyadic reproducing sum identically 1 away from 0.

Cube-paired machinery (norms, phi-transform) associates cube level j with the
profile dilated to the band (2^(j-3), 2^(j-1)): with the cyclic Fourier
convention, that is the widest dyadic band whose cube-corner samples at spacing
2^-j stay alias-free, so analysis followed by synthesis is exact.  The offset
between cube level and profile dilation is BAND_LEVEL_OFFSET.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SampledField, SpectralField, from_spectral, to_spectral
from .grid import TorusGrid

#: cube level j pairs with profile argument 2^(BAND_LEVEL_OFFSET - j) * xi
BAND_LEVEL_OFFSET = 2

_SUPPORT_TOL = 1e-14
_LOWER_BOUND = 0.1  # admissibility floor on the inner annulus [3/5, 5/3]


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


class RadialProfile:
    """A radial spectral profile rho -> g(rho) given by a callable."""

    def __init__(self, fn, name=""):
        self._fn = fn
        self.name = name

    def __call__(self, rho) -> np.ndarray:
        return self._fn(np.asarray(rho, dtype=float))


def _phi_profile(rho: np.ndarray) -> np.ndarray:
    up = _smooth_step((rho - 0.5) / (0.6 - 0.5))
    down = _smooth_step((2.0 - rho) / (2.0 - 5.0 / 3.0))
    return up * down


def _dyadic_square_sum(rho: np.ndarray) -> np.ndarray:
    """sum_v phi(2^-v rho)^2; at most three dyadic dilates meet any rho > 0."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    pos = rho > 0
    if np.any(pos):
        v0 = np.floor(np.log2(rho[pos])).astype(int)
        acc = np.zeros(v0.shape)
        for dv in (-1, 0, 1, 2):
            acc += _phi_profile(rho[pos] * 2.0 ** (-(v0 + dv))) ** 2
        out[pos] = acc
    return out


@dataclass
class AdmissiblePair:
    """Analysis/synthesis profiles with supp in the annulus [1/2, 2] and
    sum_v conj(phi_v) psi_v = 1 for all xi != 0."""

    phi: RadialProfile
    psi: RadialProfile
    lower_bound: float = _LOWER_BOUND

    def calderon_sum(self, rho, levels) -> np.ndarray:
        """sum over v in levels of conj(phi(2^-v rho)) * psi(2^-v rho)."""
        rho = np.asarray(rho, dtype=float)
        acc = np.zeros_like(rho)
        for v in levels:
            acc += np.conj(self.phi(rho * 2.0 ** (-v))) * self.psi(rho * 2.0 ** (-v))
        return acc


def make_admissible_pair(smoothness_scale: float = 1.0) -> AdmissiblePair:
    """Standard bump-based admissible pair.

    smoothness_scale sharpens (>1) or relaxes (<1) the transition regions while
    keeping the support and plateau; the dual profile is recomputed accordingly.
    """
    if smoothness_scale == 1.0:
        phi_fn = _phi_profile
    else:
        s = float(smoothness_scale)

        def phi_fn(rho, _s=s):
            up = _smooth_step(((rho - 0.5) / (0.6 - 0.5)) ** (1.0 / _s))
            down = _smooth_step(((2.0 - rho) / (2.0 - 5.0 / 3.0)) ** (1.0 / _s))
            return up * down

    def sq_sum(rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        pos = rho > 0
        if np.any(pos):
            v0 = np.floor(np.log2(rho[pos])).astype(int)
            acc = np.zeros(v0.shape)
            for dv in (-1, 0, 1, 2):
                acc += phi_fn(rho[pos] * 2.0 ** (-(v0 + dv))) ** 2
            out[pos] = acc
        return out

    def psi_fn(rho):
        rho = np.asarray(rho, dtype=float)
        num = phi_fn(rho)
        den = sq_sum(rho)
        out = np.zeros_like(rho)
        nz = num != 0.0
        out[nz] = num[nz] / den[nz]
        return out

    return AdmissiblePair(RadialProfile(phi_fn, "phi"), RadialProfile(psi_fn, "psi"))


@dataclass
class InhomPartition:
    """Dyadic partition of unity: phi0 = 1 on |xi|<=1, supported in |xi|<=2;
    phi_j = phi0(2^-j xi) - phi0(2^-j+1 xi) for j >= 1; sums telescope to 1."""

    phi0: RadialProfile

    def level(self, j: int) -> RadialProfile:
        if j < 0:
            raise ValueError("partition levels start at 0")
        if j == 0:
            return self.phi0
        p0 = self.phi0

        def fn(rho, _j=j):
            return p0(rho * 2.0 ** (-_j)) - p0(rho * 2.0 ** (-_j + 1))

        return RadialProfile(fn, f"phi_{j}")

    def tilde(self, j: int) -> RadialProfile:
        """phi~_j = phi_(j-1) + phi_j + phi_(j+1) (phi~_0 = phi_0 + phi_1)."""
        lo = max(j - 1, 0)
        parts = [self.level(k) for k in range(lo, j + 2)]

        def fn(rho):
            return sum(p(rho) for p in parts)

        return RadialProfile(fn, f"phitilde_{j}")

    def cumulative(self, j: int) -> RadialProfile:
        """sum_{k<=j} phi_k = phi0(2^-j xi), the low-pass through level j."""
        p0 = self.phi0

        def fn(rho, _j=j):
            return p0(rho * 2.0 ** (-_j))

        return RadialProfile(fn, f"lowpass_{j}")

    def _square_sum(self, rho: np.ndarray) -> np.ndarray:
        """sum_k phi_k(rho)^2; at most two levels are active, so it is >= 1/2."""
        rho = np.asarray(rho, dtype=float)
        out = self.level(0)(rho) ** 2
        k_max = int(np.ceil(np.log2(np.max(rho) + 1e-300))) + 2 if np.max(rho) > 1 else 1
        for k in range(1, max(k_max, 1) + 1):
            out = out + self.level(k)(rho) ** 2
        return out

    def dual(self, j: int) -> RadialProfile:
        """phi_j / sum_k phi_k^2: supported exactly on phi_j's band and summing
        against the partition to 1, the sampling-safe synthesis profile."""
        def fn(rho, _j=j):
            num = self.level(_j)(rho)
            out = np.zeros_like(num)
            nz = num != 0.0
            if np.any(nz):
                out[nz] = num[nz] / self._square_sum(np.asarray(rho, dtype=float)[nz])
            return out

        return RadialProfile(fn, f"dual_{j}")


def make_inhom_partition() -> InhomPartition:
    def phi0(rho):
        return _smooth_step(2.0 - np.asarray(rho, dtype=float))

    return InhomPartition(RadialProfile(phi0, "phi_0"))


def band_filter(f: SampledField, profile: RadialProfile, j: int) -> SampledField:
    """Spectral multiplication by profile(2^-j |xi|), channelwise."""
    F = to_spectral(f)
    mult = profile(F.grid.freq_radius() * 2.0 ** (-j))
    out = from_spectral(SpectralField(F.grid, F.coeffs * mult[..., None]))
    if not f.is_complex:
        out = SampledField(f.grid, out.values.real)
    return out


def level_filter(f: SampledField, profile: RadialProfile, j: int) -> SampledField:
    """Band output paired with cube level j: profile dilated by the alias-safe offset."""
    return band_filter(f, profile, j - BAND_LEVEL_OFFSET)


def level_multiplier(grid: TorusGrid, profile: RadialProfile, j: int) -> np.ndarray:
    """The lattice multiplier used by level_filter (FFT order)."""
    return profile(grid.freq_radius() * 2.0 ** (BAND_LEVEL_OFFSET - j))


def covered_band(range_levels) -> tuple:
    """(lo, hi): |xi| interval on which cube levels range_levels reproduce exactly.

    Cube level j carries the band 2^(j - BAND_LEVEL_OFFSET) * [1/2, 2]; the
    truncated reproducing sum is exactly 1 on [2^(jmin - off), 2^(jmax - off)].
    """
    levels = list(range_levels)
    off = BAND_LEVEL_OFFSET
    return (2.0 ** (min(levels) - off), 2.0 ** (max(levels) - off))


def check_admissible(pair: AdmissiblePair, grid: TorusGrid, levels) -> dict:
    """Support, lower-bound, and reproducing-sum diagnostics on the lattice."""
    rho = grid.freq_radius().ravel()
    report = {}
    for name, prof in (("phi", pair.phi), ("psi", pair.psi)):
        vals = prof(rho)
        outside = (rho < 0.5 - 1e-12) | (rho > 2.0 + 1e-12)
        report[f"{name}_support_leak"] = float(np.max(np.abs(vals[outside]), initial=0.0))
        inner = (rho >= 0.6) & (rho <= 5.0 / 3.0)
        report[f"{name}_inner_min"] = float(np.min(vals[inner])) if np.any(inner) else float("nan")
    levels = list(levels)
    lo, hi = 2.0 ** min(levels), 2.0 ** max(levels)
    covered = (rho >= lo) & (rho <= hi)
    if np.any(covered):
        s = pair.calderon_sum(rho[covered], levels)
        report["calderon_max_err"] = float(np.max(np.abs(s - 1.0)))
    else:
        report["calderon_max_err"] = 0.0
    return report


def bessel_potential(f: SampledField, gamma: float) -> SampledField:
    """Spectral multiplication by (1+|xi|^2)^(-gamma/2)."""
    F = to_spectral(f)
    mult = (1.0 + F.grid.freq_radius() ** 2) ** (-gamma / 2.0)
    out = from_spectral(SpectralField(F.grid, F.coeffs * mult[..., None]))
    if not f.is_complex:
        out = SampledField(f.grid, out.values.real)
    return out


def h2_sobolev_norm(g: SampledField, s: float) -> float:
    """(sum_xi (1+|xi|^2)^s |F g(xi)|^2 / L^n)^(1/2) for a scalar field."""
    G = to_spectral(g)
    w = (1.0 + G.grid.freq_radius() ** 2) ** s
    total = np.sum(w * np.abs(G.coeffs[..., 0]) ** 2) / G.grid.side ** G.grid.dim
    return float(np.sqrt(total))


def h2_profile_norm(grid: TorusGrid, profile_vals: np.ndarray, s: float) -> float:
    """h2_sobolev_norm of the field whose Fourier coefficients are profile_vals."""
    w = (1.0 + grid.freq_radius() ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(profile_vals) ** 2) / grid.side ** grid.dim))


def holder_zygmund_norm(g: SampledField, ell: float, partition: InhomPartition = None,
                        j_cut: int = None) -> float:
    """sup_j 2^(j*ell) * max_x |phi_j(D) g| with the (literal) dyadic partition."""
    vals = g.scalar()
    if partition is None:
        partition = make_inhom_partition()
    grid = g.grid
    if j_cut is None:
        # highest level whose ring [2^(j-1), 2^(j+1)] meets the lattice
        j_cut = grid.side_log2 + grid.res_log2
    G = np.fft.fftn(vals)
    rho = grid.freq_radius()
    best = 0.0
    for j in range(0, j_cut + 1):
        mult = partition.level(j)(rho)
        if not np.any(mult):
            continue
        block = np.fft.ifftn(G * mult)
        best = max(best, 2.0 ** (j * ell) * float(np.max(np.abs(block))))
    return best
