"""Norm functionals: Bourgain-Morrey norms, the four Triebel-Lizorkin style norms,
maximal operators, and the Peetre / Lusin / g-lambda-star / approximation variants.

Outer norms aggregate |Q|^(1/t - 1/p) ||. chi_Q||_Lp over every cube of the level
window in l^r (sup at r = infinity).  Inner level sums follow the cube <-> band
pairing of lpa.level_filter.  Balls for the maximal operator are sup-metric
windows with grid-multiple radii, wrapped on the torus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import maximum_filter1d, uniform_filter1d

from .coeffseq import CoeffSequence
from .dyadic import CubeRange, cube_sums, level_block_view, spread_to_grid
from .fields import SampledField, SpectralField, to_spectral
from .grid import TorusGrid
from .lpa import BAND_LEVEL_OFFSET, AdmissiblePair, InhomPartition
from .weights import MatrixWeight, ReducingFamily


@dataclass(frozen=True)
class SpaceParams:
    s: float
    p: float
    q: float
    t: float
    r: float
    homogeneous: bool = True

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")
        check_nontrivial(self.p, self.t, self.r)


def check_nontrivial(p: float, t: float, r: float):
    """Admissible exponents: 0 < p < t < r < inf, or 0 < p <= t < r = inf."""
    if np.isinf(r):
        ok = 0 < p <= t
    else:
        ok = 0 < p < t < r
    if not ok:
        raise ValueError(f"(p, t, r) = ({p}, {t}, {r}) gives a trivial space")


@dataclass
class NormReport:
    value: float
    per_level: dict = field(default_factory=dict)
    truncation: float = None

    def __post_init__(self):
        if not (self.value >= 0.0):
            raise ValueError(f"norm value must be nonnegative, got {self.value}")


class PointwiseWeighting:
    """Apply W^(1/p)(x) at every sample."""

    def __init__(self, W: MatrixWeight, p: float):
        self.W = W
        self.p = p
        self._root = None

    @property
    def channels(self) -> int:
        return self.W.channels

    def magnitude(self, j: int, vectors: np.ndarray) -> np.ndarray:
        if self._root is None:
            self._root = self.W.power(1.0 / self.p)
        out = np.einsum("...ab,...b->...a", self._root, vectors)
        return np.linalg.norm(out, axis=-1)


class CubewiseWeighting:
    """Apply the cube-constant reducing matrix A_Q on each level-j cube."""

    def __init__(self, family: ReducingFamily):
        self.family = family

    @property
    def channels(self) -> int:
        mat = next(iter(self.family.matrices.values()))
        return mat.shape[-1]

    def magnitude(self, j: int, vectors: np.ndarray) -> np.ndarray:
        grid = self.family.grid
        A = self.family.level_array(j)
        blocks = level_block_view(grid, vectors, j)
        if grid.dim == 1:
            out = np.einsum("cab,cwb->cwa", A, blocks)
        else:
            out = np.einsum("cdab,cwdvb->cwdva", A, blocks)
        return np.linalg.norm(out, axis=-1).reshape(grid.shape)


def _check_weighting(w, f_channels: int):
    if w.channels != f_channels:
        raise ValueError(f"weighting has {w.channels} channels, field has {f_channels}")


class _QAccumulator:
    """Pointwise (sum_j x_j^q)^(1/q), with sup at q = infinity."""

    def __init__(self, q: float, shape):
        self.q = q
        self.acc = np.zeros(shape)

    def add(self, x: np.ndarray):
        if np.isinf(self.q):
            np.maximum(self.acc, x, out=self.acc)
        else:
            self.acc += x ** self.q

    def result(self) -> np.ndarray:
        if np.isinf(self.q):
            return self.acc
        return self.acc ** (1.0 / self.q)


def _nonneg_scalar(g: SampledField) -> np.ndarray:
    vals = g.scalar()
    if np.iscomplexobj(vals):
        if np.max(np.abs(vals.imag)) > 1e-12 * max(np.max(np.abs(vals.real)), 1.0):
            raise ValueError("expected a real, nonnegative field")
        vals = vals.real
    if np.min(vals) < -1e-12:
        raise ValueError("expected a nonnegative field")
    return np.maximum(vals, 0.0)


def bm_array_norm(grid: TorusGrid, vals: np.ndarray, p: float, t: float, r: float,
                  levels) -> float:
    """Bourgain-Morrey aggregation of a nonnegative grid array over cube levels."""
    powed = vals ** p
    cell = grid.cell_measure
    if np.isinf(r):
        best = 0.0
        for j in levels:
            sums = cube_sums(grid, powed, j) * cell
            term = 2.0 ** (-j * grid.dim * (1.0 / t - 1.0 / p)) * np.max(sums) ** (1.0 / p)
            best = max(best, float(term))
        return best
    total = 0.0
    for j in levels:
        sums = cube_sums(grid, powed, j) * cell
        terms = 2.0 ** (-j * grid.dim * (1.0 / t - 1.0 / p)) * sums ** (1.0 / p)
        total += float(np.sum(terms ** r))
    return total ** (1.0 / r)


def bm_norm(g: SampledField, p: float, t: float, r: float, cube_range: CubeRange) -> float:
    """|| { |Q|^(1/t-1/p) ||g chi_Q||_Lp } ||_lr over the cubes of the range."""
    check_nontrivial(p, t, r)
    cube_range.validate(g.grid, margin=0)
    return bm_array_norm(g.grid, _nonneg_scalar(g), p, t, r, cube_range.cube_levels())


def bm_seq_norm(gs, p: float, t: float, r: float, q: float, cube_range: CubeRange) -> float:
    """bm_norm of the pointwise l^q aggregation of a list of nonnegative fields."""
    gs = list(gs)
    if not gs:
        return 0.0
    check_nontrivial(p, t, r)
    grid = gs[0].grid
    acc = _QAccumulator(q, grid.shape)
    for g in gs:
        acc.add(_nonneg_scalar(g))
    return bm_array_norm(grid, acc.result(), p, t, r, cube_range.cube_levels())


def hl_maximal(g: SampledField, eta: float = 1.0) -> SampledField:
    """Uncentered Hardy-Littlewood maximal function, powered by eta.

    Balls are sup-metric windows of radius k*h, k = 0..N/2, wrapped on the
    torus; uncentered sup over balls containing x equals a running max-filter
    of the ball averages.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    grid = g.grid
    arr = _nonneg_scalar(g) ** eta
    best = arr.copy()
    N = grid.points_per_axis
    for k in range(1, N // 2 + 1):
        size = 2 * k + 1
        avg = arr
        for ax in range(grid.dim):
            avg = uniform_filter1d(avg, size=size, axis=ax, mode="wrap")
        cand = avg
        for ax in range(grid.dim):
            cand = maximum_filter1d(cand, size=size, axis=ax, mode="wrap")
        np.maximum(best, cand, out=best)
    return SampledField(grid, (best ** (1.0 / eta))[..., None])


def averaging(g: SampledField, j: int) -> SampledField:
    """E_j: replace g on each level-j cube by its mean."""
    grid = g.grid
    vals = g.scalar()
    blocks = level_block_view(grid, vals, j)
    means = blocks.mean(axis=(1,) if grid.dim == 1 else (1, 3))
    return SampledField(grid, spread_to_grid(grid, means, j)[..., None])


def _level_multiplier(grid: TorusGrid, bank, j: int, homogeneous: bool) -> np.ndarray:
    rho = grid.freq_radius()
    if homogeneous:
        return bank.phi(rho * 2.0 ** (BAND_LEVEL_OFFSET - j))
    return bank.level(j)(rho * 2.0 ** BAND_LEVEL_OFFSET)


def _band_values(F: SpectralField, mult: np.ndarray) -> np.ndarray:
    axes = tuple(range(F.grid.dim))
    return np.fft.ifftn(F.coeffs * mult[..., None], axes=axes) / F.grid.cell_measure


def _resolve_bank(bank, sp: SpaceParams):
    if sp.homogeneous and not isinstance(bank, AdmissiblePair):
        raise ValueError("homogeneous norms need an AdmissiblePair")
    if not sp.homogeneous and not isinstance(bank, InhomPartition):
        raise ValueError("inhomogeneous norms need an InhomPartition")


def tl_norm(f: SampledField, w, sp: SpaceParams, bank, cube_range: CubeRange,
            truncation_check: bool = False) -> NormReport:
    """The function-side norm: l^q over levels of weighted band outputs, then bm_norm.

    Pointwise weighting gives the W-version; Cubewise gives the A_Q-version
    (matrix locked per cube of the band's level).
    """
    _check_weighting(w, f.channels)
    _resolve_bank(bank, sp)
    cube_range.validate(f.grid)
    grid = f.grid
    F = to_spectral(f)
    acc = _QAccumulator(sp.q, grid.shape)
    per_level = {}
    for j in cube_range.band_levels():
        mult = _level_multiplier(grid, bank, j, sp.homogeneous)
        mag = w.magnitude(j, _band_values(F, mult))
        weighted = 2.0 ** (j * sp.s) * mag
        acc.add(weighted)
        per_level[j] = bm_array_norm(grid, weighted, sp.p, sp.t, sp.r,
                                     cube_range.cube_levels())
    value = bm_array_norm(grid, acc.result(), sp.p, sp.t, sp.r, cube_range.cube_levels())
    trunc = None
    if truncation_check:
        wide = cube_range.widened(grid)
        if wide != cube_range:
            wide_val = tl_norm(f, w, sp, bank, wide).value
            trunc = wide_val / value if value > 0 else 1.0
    return NormReport(value, per_level, trunc)


def seq_norm(coeffs: CoeffSequence, w, sp: SpaceParams, cube_range: CubeRange,
             masks: dict = None, truncation_check: bool = False) -> NormReport:
    """The sequence-side norm of cube coefficients.

    masks, when given, replaces chi_Q by chi_{E_Q}: a dict cube -> boolean block
    (cube-shaped) marking the retained samples.
    """
    _check_weighting(w, coeffs.channels)
    cube_range.validate(coeffs.grid)
    grid = coeffs.grid
    bad = [c for c in coeffs.entries if not (cube_range.band_levels().start <= c.level
                                             <= cube_range.band_levels().stop - 1)]
    if bad:
        raise ValueError(f"coefficients outside the range window: {bad[:3]}")
    acc = _QAccumulator(sp.q, grid.shape)
    per_level = {}
    for j in cube_range.band_levels():
        dense = coeffs.level_array(j)
        if isinstance(w, CubewiseWeighting):
            A = w.family.level_array(j)
            per_cube = np.linalg.norm(np.einsum("...ab,...b->...a", A, dense), axis=-1)
            mag = spread_to_grid(grid, per_cube, j)
        else:
            spread = spread_to_grid(grid, dense, j)
            mag = w.magnitude(j, spread)
        if masks:
            keep = np.ones(grid.shape, dtype=bool)
            level_masks = [(c, mk) for c, mk in masks.items() if c.level == j]
            for cube, mk in level_masks:
                keep[cube.grid_slices(grid)] = mk
            mag = mag * keep
        weighted = 2.0 ** (j * (sp.s + grid.dim / 2.0)) * mag
        acc.add(weighted)
        per_level[j] = bm_array_norm(grid, weighted, sp.p, sp.t, sp.r,
                                     cube_range.cube_levels())
    value = bm_array_norm(grid, acc.result(), sp.p, sp.t, sp.r, cube_range.cube_levels())
    trunc = None
    if truncation_check:
        wide = cube_range.widened(grid)
        if wide != cube_range:
            trunc_val = seq_norm(coeffs, w, sp, wide, masks).value
            trunc = trunc_val / value if value > 0 else 1.0
    return NormReport(value, per_level, trunc)


# ---------------------------------------------------------------------------
# characterization norms (Pointwise weighting only)


def _pointwise_sq_mats(w: PointwiseWeighting) -> np.ndarray:
    """W^(2/p)(x) flattened to (npts, m*m): |W^(1/p)(x) v|^2 = P(x) . (v vbar)."""
    W = w.W
    m = W.channels
    return W.power(2.0 / w.p).reshape(-1, m * m)


def _gram(v_flat: np.ndarray) -> np.ndarray:
    """(npts, m*m) real Gram entries v_a conj(v_b); pairing with W^(2/p) is real."""
    outer = np.einsum("ya,yb->yab", v_flat, np.conj(v_flat))
    m = v_flat.shape[1]
    return outer.real.reshape(-1, m * m)


def _axis_dist_matrix(grid: TorusGrid, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    d = np.abs(xs[:, None] - ys[None, :])
    return np.minimum(d, grid.side - d)


def peetre_norm(f: SampledField, w: PointwiseWeighting, sp: SpaceParams, a: float,
                bank, cube_range: CubeRange, tail_tol: float = 1e-6,
                chunk: int = 512) -> NormReport:
    """Translation-penalized maximal variant: per level, sup over y of
    |W^(1/p)(x) band(y)| / (1 + 2^j |x-y|)^a, then the usual aggregation."""
    if a <= 0:
        raise ValueError("a must be positive")
    _check_weighting(w, f.channels)
    _resolve_bank(bank, sp)
    cube_range.validate(f.grid)
    grid = f.grid
    F = to_spectral(f)
    m = f.channels
    P = _pointwise_sq_mats(w)
    acc = _QAccumulator(sp.q, grid.shape)
    per_level = {}
    xs = grid.axis_coords()
    for j in cube_range.band_levels():
        mult = _level_multiplier(grid, bank, j, sp.homogeneous)
        v = _band_values(F, mult).reshape(-1, m)
        if grid.dim == 1:
            G = _gram(v)
            n = v.shape[0]
            out = np.empty(n)
            for lo in range(0, n, chunk):
                hi = min(lo + chunk, n)
                sq = P[lo:hi] @ G.T
                np.maximum(sq, 0.0, out=sq)
                dist = _axis_dist_matrix(grid, xs[lo:hi], xs)
                pen = (1.0 + 2.0 ** j * dist) ** a
                out[lo:hi] = np.max(np.sqrt(sq) / pen, axis=1)
            sup = out.reshape(grid.shape)
        else:
            sup = _peetre_sup_2d(grid, w, v.reshape(grid.shape + (m,)), j, a, tail_tol)
        weighted = 2.0 ** (j * sp.s) * sup
        acc.add(weighted)
        per_level[j] = bm_array_norm(grid, weighted, sp.p, sp.t, sp.r,
                                     cube_range.cube_levels())
    value = bm_array_norm(grid, acc.result(), sp.p, sp.t, sp.r, cube_range.cube_levels())
    return NormReport(value, per_level)


def _offsets_within(grid: TorusGrid, radius: float) -> list:
    """Distinct torus offsets delta with |delta * h| <= radius (euclidean).

    When the ball wraps the whole axis, +N/2 and -N/2 are the same point; the
    enumeration keeps each torus offset once.
    """
    N = grid.points_per_axis
    kmax = min(int(np.floor(radius / grid.spacing)), N // 2)
    axis = range(-kmax, kmax + 1) if 2 * kmax + 1 <= N else range(-(N // 2), N - N // 2)
    if grid.dim == 1:
        return [(d,) for d in axis]
    out = []
    r2 = (radius / grid.spacing) ** 2
    for d1 in axis:
        for d2 in axis:
            if d1 * d1 + d2 * d2 <= r2 + 1e-9:
                out.append((d1, d2))
    return out


def _peetre_sup_2d(grid: TorusGrid, w: PointwiseWeighting, v: np.ndarray, j: int,
                   a: float, tail_tol: float) -> np.ndarray:
    root = w.W.power(1.0 / w.p)
    radius = min((tail_tol ** (-1.0 / a) - 1.0) * 2.0 ** (-j), grid.side / 2.0 * np.sqrt(2.0))
    sup = np.zeros(grid.shape)
    for delta in _offsets_within(grid, radius):
        shifted = np.roll(v, shift=[-d for d in delta], axis=tuple(range(grid.dim)))
        mag = np.linalg.norm(np.einsum("...ab,...b->...a", root, shifted), axis=-1)
        dist = grid.spacing * np.sqrt(sum(d * d for d in delta))
        np.maximum(sup, mag / (1.0 + 2.0 ** j * dist) ** a, out=sup)
    return sup


def _shifted_magnitudes_sum(grid: TorusGrid, root: np.ndarray, v: np.ndarray,
                            offsets: list, q: float, batch: int = 256) -> np.ndarray:
    """sum over offsets of |root(x) v(x + delta)|^q; root is grid.shape + (m, m)."""
    N = grid.points_per_axis
    m = v.shape[-1]
    flat_v = v.reshape(-1, m)
    npts = flat_v.shape[0]
    out = np.zeros(npts)
    if grid.dim == 1:
        flat_root = root.reshape(npts, m, m)
        base = np.arange(N)
        for lo in range(0, len(offsets), batch):
            sel = offsets[lo:lo + batch]
            idx = (base[:, None] + np.array([d[0] for d in sel])[None, :]) % N
            sh = flat_v[idx]                       # (N, nb, m)
            mags = np.linalg.norm(np.einsum("xab,xdb->xda", flat_root, sh), axis=-1)
            out += (mags ** q).sum(axis=1)
        return out.reshape(grid.shape)
    for delta in offsets:
        sh = np.roll(v, shift=[-d for d in delta], axis=tuple(range(grid.dim)))
        mags = np.linalg.norm(np.einsum("...ab,...b->...a", root, sh), axis=-1)
        out += (mags ** q).ravel()
    return out.reshape(grid.shape)


def lusin_norm(f: SampledField, w: PointwiseWeighting, sp: SpaceParams, bank,
               cube_range: CubeRange) -> NormReport:
    """Ball-average variant: 2^(jn) mean over B(x, 2^-j) of the q-th power with
    the weight frozen at the center."""
    if np.isinf(sp.q):
        raise ValueError("lusin norm needs q < infinity")
    _check_weighting(w, f.channels)
    _resolve_bank(bank, sp)
    cube_range.validate(f.grid)
    grid = f.grid
    F = to_spectral(f)
    root = w.W.power(1.0 / w.p)
    acc = _QAccumulator(sp.q, grid.shape)
    per_level = {}
    for j in cube_range.band_levels():
        radius = 2.0 ** (-j)
        if radius < grid.spacing:
            continue
        mult = _level_multiplier(grid, bank, j, sp.homogeneous)
        v = _band_values(F, mult)
        offsets = _offsets_within(grid, radius)
        total = _shifted_magnitudes_sum(grid, root, v, offsets, sp.q)
        u = 2.0 ** (j * grid.dim) * grid.cell_measure * total
        weighted = (2.0 ** (j * sp.s * sp.q) * u) ** (1.0 / sp.q)
        acc.add(weighted)
        per_level[j] = bm_array_norm(grid, weighted, sp.p, sp.t, sp.r,
                                     cube_range.cube_levels())
    value = bm_array_norm(grid, acc.result(), sp.p, sp.t, sp.r, cube_range.cube_levels())
    return NormReport(value, per_level)


def glambda_norm(f: SampledField, w: PointwiseWeighting, sp: SpaceParams, lam: float,
                 bank, cube_range: CubeRange, delta_cap: float = 0.0,
                 chunk: int = 512) -> NormReport:
    """Full-torus polynomially weighted variant of the Lusin norm."""
    if np.isinf(sp.q):
        raise ValueError("g-lambda-star norm needs q < infinity")
    if lam <= 1.0 / min(1.0, sp.p, sp.q) + delta_cap / f.grid.dim:
        warnings.warn("lambda below the boundedness threshold; value still computed",
                      stacklevel=2)
    _check_weighting(w, f.channels)
    _resolve_bank(bank, sp)
    cube_range.validate(f.grid)
    grid = f.grid
    F = to_spectral(f)
    m = f.channels
    n = grid.dim
    acc = _QAccumulator(sp.q, grid.shape)
    per_level = {}
    coords = np.stack(grid.coords(), axis=-1).reshape(-1, n)
    dist0 = grid.torus_dist(coords, np.zeros(n)).reshape(grid.shape)
    for j in cube_range.band_levels():
        mult = _level_multiplier(grid, bank, j, sp.homogeneous)
        v = _band_values(F, mult)
        if sp.q == 2.0:
            # kernel is a function of x - y: contract via cyclic convolution
            kern = (1.0 + 2.0 ** j * dist0) ** (-lam * n * sp.q) * grid.cell_measure
            Kf = np.fft.fftn(kern)
            P = w.W.power(2.0 / w.p)
            G = np.einsum("...a,...b->...ab", v, np.conj(v)).real
            axes = tuple(range(n))
            conv = np.fft.ifftn(np.fft.fftn(G, axes=axes) * Kf[..., None, None],
                                axes=axes).real
            u = 2.0 ** (j * n) * np.maximum(np.einsum("...ab,...ab->...", P, conv), 0.0)
        else:
            flat_v = v.reshape(-1, m)
            P = _pointwise_sq_mats(w)
            G = _gram(flat_v)
            npts = flat_v.shape[0]
            xs = grid.axis_coords()
            u = np.empty(npts)
            if n == 1:
                for lo in range(0, npts, chunk):
                    hi = min(lo + chunk, npts)
                    sq = np.maximum(P[lo:hi] @ G.T, 0.0)
                    dist = _axis_dist_matrix(grid, xs[lo:hi], xs)
                    pen = (1.0 + 2.0 ** j * dist) ** (-lam * n * sp.q)
                    u[lo:hi] = np.sum(sq ** (sp.q / 2.0) * pen, axis=1)
            else:
                allc = coords
                for lo in range(0, npts, chunk):
                    hi = min(lo + chunk, npts)
                    sq = np.maximum(P[lo:hi] @ G.T, 0.0)
                    d = grid.torus_dist(allc[lo:hi][:, None, :], allc[None, :, :])
                    pen = (1.0 + 2.0 ** j * d) ** (-lam * n * sp.q)
                    u[lo:hi] = np.sum(sq ** (sp.q / 2.0) * pen, axis=1)
            u = 2.0 ** (j * n) * grid.cell_measure * u.reshape(grid.shape)
        weighted = (2.0 ** (j * sp.s * sp.q) * u) ** (1.0 / sp.q)
        acc.add(weighted)
        per_level[j] = bm_array_norm(grid, weighted, sp.p, sp.t, sp.r,
                                     cube_range.cube_levels())
    value = bm_array_norm(grid, acc.result(), sp.p, sp.t, sp.r, cube_range.cube_levels())
    return NormReport(value, per_level)


def approx_norm(f: SampledField, w: PointwiseWeighting, sp: SpaceParams,
                bank: InhomPartition, cube_range: CubeRange,
                threshold_delta: float = 0.0) -> NormReport:
    """Approximation variant with the canonical cumulative low-pass sequence.

    Returns ||W^(1/p) u_0||_bm + ||(sum_k 2^(ksq) |W^(1/p)(f - u_k)|^q)^(1/q)||_bm,
    an upper bound for the infimum over admissible approximating sequences.
    """
    if sp.homogeneous:
        raise ValueError("approximation norm is defined on inhomogeneous spaces")
    thresh = f.grid.dim / min(1.0, sp.q, sp.p) + threshold_delta
    if sp.s <= thresh:
        warnings.warn(f"s = {sp.s} below the approximation threshold {thresh}",
                      stacklevel=2)
    _check_weighting(w, f.channels)
    cube_range.validate(f.grid)
    grid = f.grid
    F = to_spectral(f)
    acc = _QAccumulator(sp.q, grid.shape)
    u = np.zeros_like(f.values, dtype=complex)
    term1 = None
    per_level = {}
    for k in cube_range.band_levels():
        mult = _level_multiplier(grid, bank, k, homogeneous=False)
        u = u + _band_values(F, mult)
        if term1 is None:
            term1 = bm_array_norm(grid, w.magnitude(k, u), sp.p, sp.t, sp.r,
                                  cube_range.cube_levels())
        tail = w.magnitude(k, f.values - u)
        weighted = 2.0 ** (k * sp.s) * tail
        acc.add(weighted)
        per_level[k] = bm_array_norm(grid, weighted, sp.p, sp.t, sp.r,
                                     cube_range.cube_levels())
    tail_norm = bm_array_norm(grid, acc.result(), sp.p, sp.t, sp.r,
                              cube_range.cube_levels())
    return NormReport((term1 or 0.0) + tail_norm, per_level)
