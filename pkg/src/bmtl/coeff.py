"""Discrete side of the analysis: phi-transform analysis/synthesis, almost-diagonal
operators on cube-indexed sequences, molecule condition measurement, and the
atomic rearrangement of wavelet expansions.

Coefficients for cube level j are corner samples of the level-j band output
(see lpa.BAND_LEVEL_OFFSET): s_Q = |Q|^(1/2) * (conj-reflected analysis filter
applied to f)(x_Q).  With the alias-safe band pairing, synthesis after analysis
is the identity on fields whose spectrum lies in the covered annuli.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .coeffseq import CoeffSequence
from .dyadic import CubeRange, DyadicCube, cubes_at_level
from .fields import (SampledField, SpectralField, from_spectral,
                     spectral_derivative, to_spectral)
from .grid import TorusGrid
from .lpa import BAND_LEVEL_OFFSET, AdmissiblePair


def _corner_view(grid: TorusGrid, values: np.ndarray, j: int) -> np.ndarray:
    step = 1 << (grid.res_log2 - j)
    if grid.dim == 1:
        return values[::step]
    return values[::step, ::step]


def _analysis_multiplier(bank, rho: np.ndarray, j: int, inhomogeneous: bool) -> np.ndarray:
    from .lpa import InhomPartition

    if isinstance(bank, InhomPartition):
        if not inhomogeneous:
            raise ValueError("partition banks go with inhomogeneous ranges")
        return bank.level(j)(rho * 2.0 ** BAND_LEVEL_OFFSET)
    return np.conj(bank.phi(rho * 2.0 ** (BAND_LEVEL_OFFSET - j)))


def _synthesis_multiplier(bank, rho: np.ndarray, j: int, inhomogeneous: bool) -> np.ndarray:
    from .lpa import InhomPartition

    if isinstance(bank, InhomPartition):
        # the dual stays inside phi_j's band, so comb replicas cannot leak in
        return bank.dual(j)(rho * 2.0 ** BAND_LEVEL_OFFSET)
    return bank.psi(rho * 2.0 ** (BAND_LEVEL_OFFSET - j))


def phi_transform(f: SampledField, bank, cube_range: CubeRange) -> CoeffSequence:
    """s_Q = |Q|^(1/2) (analysis band at Q's level)(x_Q).

    bank is an AdmissiblePair (homogeneous, conj-reflected phi) or an
    InhomPartition for an inhomogeneous range, whose level-0 slot carries the
    low-pass part.
    """
    grid = f.grid
    cube_range.validate(grid)
    F = to_spectral(f)
    rho = grid.freq_radius()
    entries = {}
    for j in cube_range.band_levels():
        mult = _analysis_multiplier(bank, rho, j, cube_range.inhomogeneous)
        band = from_spectral(SpectralField(grid, F.coeffs * mult[..., None]))
        samples = _corner_view(grid, band.values, j) * 2.0 ** (-j * grid.dim / 2.0)
        for k in np.ndindex(samples.shape[: grid.dim]):
            entries[DyadicCube(j, k)] = samples[k]
    return CoeffSequence(grid, entries, f.channels)


def phi_synthesis(coeffs: CoeffSequence, bank, levels=None,
                  inhomogeneous: bool = False) -> SampledField:
    """sum_Q s_Q psi_Q, realized per level as a spectral product with the comb of coefficients."""
    grid = coeffs.grid
    if levels is None:
        levels = coeffs.levels()
    rho = grid.freq_radius()
    acc = None
    for j in levels:
        dense = coeffs.level_array(j)          # (count,)*n + (m,)
        step = 1 << (grid.res_log2 - j)
        comb = np.zeros(grid.shape + (coeffs.channels,), dtype=complex)
        scale = 2.0 ** (-j * grid.dim / 2.0) / grid.cell_measure
        if grid.dim == 1:
            comb[::step] = dense * scale
        else:
            comb[::step, ::step] = dense * scale
        C = np.fft.fftn(comb, axes=tuple(range(grid.dim))) * grid.cell_measure
        mult = _synthesis_multiplier(bank, rho, j, inhomogeneous)
        piece = np.fft.ifftn(C * mult[..., None], axes=tuple(range(grid.dim))) / grid.cell_measure
        acc = piece if acc is None else acc + piece
    if acc is None:
        acc = np.zeros(grid.shape + (coeffs.channels,), dtype=complex)
    return SampledField(grid, acc)


# ---------------------------------------------------------------------------
# almost-diagonal machinery


@dataclass
class ADProfile:
    """Parameters of the almost-diagonal decay profile omega_QP."""

    s: float
    p: float
    q: float
    epsilon: float
    d: float = 0.0
    d_tilde: float = 0.0
    delta_cap: float = 0.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def J(self) -> float:
        return min(1.0, self.q, self.p)


def _omega_arrays(grid: TorusGrid, sideQ: float, sideP: float, dist: np.ndarray,
                  prof: ADProfile, variant: str) -> np.ndarray:
    n = grid.dim
    J = prof.J
    eps = prof.epsilon
    if variant == "plain":
        up_exp = (n + eps) / 2.0 + n / J - n
        down_exp = (n + eps) / 2.0
        pen_exp = n / J + eps
    elif variant == "weighted":
        from .weights import dtilde_over_pprime
        up_exp = (n + eps) / 2.0 + n / J - n + dtilde_over_pprime(prof.d_tilde, prof.p)
        down_exp = (n + eps) / 2.0 + prof.d / prof.p
        pen_exp = n / J + eps + prof.delta_cap
    else:
        raise ValueError(f"variant must be 'plain' or 'weighted', got {variant!r}")
    ratio = sideQ / sideP
    rise = min(ratio ** (-up_exp), ratio ** down_exp)  # min over the two branches
    penalty = (1.0 + dist / max(sideQ, sideP)) ** (-pen_exp)
    return ratio ** prof.s * rise * penalty


def ad_weight(grid: TorusGrid, Q: DyadicCube, P: DyadicCube, prof: ADProfile,
              variant: str = "plain") -> float:
    """The decay weight omega_QP with torus distance between cube corners."""
    dist = grid.torus_dist(Q.corner, P.corner)
    return float(_omega_arrays(grid, Q.side, P.side, np.asarray(dist), prof, variant))


def ad_enumerate(grid: TorusGrid, cube_range: CubeRange, prof: ADProfile,
                 variant: str = "plain", drop_tol: float = 1e-12) -> tuple:
    """All (Q, P, omega_QP) with omega above drop_tol * max, plus the dropped mass.

    The profile's distance decay makes the operator banded; entries below the
    threshold are discarded and their total omega mass is returned for audit.
    """
    levels = list(cube_range.band_levels())
    kept = {}
    dropped = 0.0
    for jQ in levels:
        cQ = np.array([c.corner for c in cubes_at_level(grid, jQ)])
        cubesQ = cubes_at_level(grid, jQ)
        for jP in levels:
            cP = np.array([c.corner for c in cubes_at_level(grid, jP)])
            cubesP = cubes_at_level(grid, jP)
            diff = grid.wrap_delta(cQ[:, None, :] - cP[None, :, :])
            dist = np.sqrt(np.sum(diff * diff, axis=-1))
            om = _omega_arrays(grid, 2.0 ** (-jQ), 2.0 ** (-jP), dist, prof, variant)
            keep = om >= drop_tol
            dropped += float(np.sum(om[~keep]))
            for a, b in zip(*np.nonzero(keep)):
                kept[(cubesQ[a], cubesP[b])] = float(om[a, b])
    return kept, dropped


def ad_random_operator(grid: TorusGrid, cube_range: CubeRange, prof: ADProfile,
                       variant: str = "plain", seed: int = 0,
                       drop_tol: float = 1e-12) -> dict:
    """Random entries dominated by omega_QP: b_QP = u * omega_QP, u ~ U[-1, 1]."""
    weights, _ = ad_enumerate(grid, cube_range, prof, variant, drop_tol)
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, size=len(weights))
    return {qp: float(c) * w for (qp, w), c in zip(weights.items(), u)}


def ad_apply(entries: dict, coeffs: CoeffSequence) -> CoeffSequence:
    """t_Q = sum_P b_QP s_P, per component."""
    out = {}
    for (Q, P), b in entries.items():
        s = coeffs.entries.get(P)
        if s is None:
            continue
        if Q in out:
            out[Q] = out[Q] + b * s
        else:
            out[Q] = b * s
    return CoeffSequence(coeffs.grid, out, coeffs.channels)


# ---------------------------------------------------------------------------
# molecules and atoms


@dataclass
class MoleculeParams:
    N: int
    K: int
    M: float
    delta: float = 1.0
    epsilon: float = 0.01

    def __post_init__(self):
        if self.M <= 0 or not (0.0 < self.delta <= 1.0):
            raise ValueError("need M > 0 and delta in (0, 1]")


@dataclass
class AtomParams:
    b: float
    L: int
    N: int
    derivative_consts: dict = None


def _multi_indices(n: int, order: int) -> list:
    return [g for g in product(range(order + 1), repeat=n) if sum(g) <= order]


def _centered_coords(grid: TorusGrid, center: np.ndarray) -> list:
    return [grid.wrap_delta(c - mu) for c, mu in zip(grid.coords(), center)]


def molecule_check(family: dict, params: MoleculeParams, eps: float = 1e-8,
                   pair_samples: int = 256, seed: int = 17) -> dict:
    """Measure the molecule conditions for each cube -> field in the family.

    Returns per-condition summary constants: the moment maximum (checked against
    eps), and the smallest envelope constants supporting the decay, derivative,
    and Lipschitz bounds on the grid.
    """
    report = {"m1_max": 0.0, "m2_const": 0.0, "m3_const": 0.0, "m4_const": 0.0,
              "m1_pass": True, "cubes": len(family)}
    if not family:
        return report
    rng = np.random.default_rng(seed)
    for cube, fld in family.items():
        grid = fld.grid
        vals = fld.scalar()
        rel = _centered_coords(grid, cube.corner)
        dist = np.sqrt(sum(r * r for r in rel))
        ell = cube.side
        if params.N >= 0:
            for gamma in _multi_indices(grid.dim, params.N):
                mono = np.ones(grid.shape)
                for r, g in zip(rel, gamma):
                    mono = mono * r ** g
                mom = abs(np.sum(mono * vals) * grid.cell_measure)
                report["m1_max"] = max(report["m1_max"], float(mom))
        m2_exp = max(params.M, params.N + 1 + grid.dim + params.epsilon)
        env2 = (1.0 + dist / ell) ** (-m2_exp)
        report["m2_const"] = max(report["m2_const"],
                                 float(np.max(np.abs(vals) * cube.measure ** 0.5 / env2)))
        if params.K >= 0:
            envM = (1.0 + dist / ell) ** (-params.M)
            for gamma in _multi_indices(grid.dim, params.K):
                if sum(gamma) == 0:
                    continue
                dv = spectral_derivative(fld, gamma).scalar()
                scale = cube.measure ** (0.5 + sum(gamma) / grid.dim)
                report["m3_const"] = max(report["m3_const"],
                                         float(np.max(np.abs(dv) * scale / envM)))
            for gamma in [g for g in _multi_indices(grid.dim, params.K) if sum(g) == params.K]:
                dv = spectral_derivative(fld, gamma).scalar().ravel()
                flat_dist = dist.ravel()
                npts = dv.size
                xi = rng.integers(npts, size=pair_samples)
                yi = rng.integers(npts, size=pair_samples)
                coords = np.stack([c.ravel() for c in grid.coords()], axis=-1)
                sep = grid.torus_dist(coords[xi], coords[yi])
                ok = sep > 0
                xi, yi, sep = xi[ok], yi[ok], sep[ok]
                # sup over |z| <= |x-y| of the shifted envelope
                best_dist = np.maximum(flat_dist[xi] - sep, 0.0)
                env = (1.0 + best_dist / ell) ** (-params.M)
                scale = cube.measure ** (0.5 + params.K / grid.dim + params.delta / grid.dim)
                ratio = np.abs(dv[xi] - dv[yi]) * scale / (sep ** params.delta * env)
                if ratio.size:
                    report["m4_const"] = max(report["m4_const"], float(np.max(ratio)))
    report["m1_pass"] = report["m1_max"] <= eps
    return report


class AtomDictionary:
    """Lazy cube -> SampledField map of rearranged wavelet atoms (built on access)."""

    def __init__(self, grid: TorusGrid, db_order: int, j_min: int, sources: dict):
        self.grid = grid
        self.db_order = db_order
        self.j_min = j_min
        self.sources = sources  # child cube -> (generator, parent cube) or None

    def __contains__(self, cube):
        return cube in self.sources

    def __len__(self):
        return len(self.sources)

    def keys(self):
        return self.sources.keys()

    def __getitem__(self, cube) -> SampledField:
        from .wavelets import wavelet_basis_field
        src = self.sources[cube]
        if src is None:
            return SampledField(self.grid, np.zeros(self.grid.shape + (1,)))
        gen, parent = src
        return wavelet_basis_field(self.grid, self.db_order, gen, parent, self.j_min)


def measure_atom_params(atom: SampledField, cube: DyadicCube, L_max: int = 3,
                        N_max: int = 2, tol: float = 1e-8) -> AtomParams:
    """Measured (b, L, N) data of one atom: support factor relative to the cube,
    the largest vanishing-moment order below tol, and derivative sup constants
    scaled by l(Q)^(|gamma| + n/2)."""
    grid = atom.grid
    vals = atom.scalar()
    rel = _centered_coords(grid, cube.corner)
    dist = np.sqrt(sum(r * r for r in rel))
    nz = np.abs(vals) > 1e-12 * max(float(np.max(np.abs(vals))), 1e-300)
    b = float(np.max(dist[nz]) / cube.side) if np.any(nz) else 0.0
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    L = -1
    for order in range(L_max + 1):
        moments = []
        for gamma in _multi_indices(grid.dim, order):
            if sum(gamma) != order:
                continue
            mono = np.ones(grid.shape)
            for r, g in zip(rel, gamma):
                mono = mono * r ** g
            moments.append(abs(np.sum(mono * vals) * grid.cell_measure))
        if max(moments) <= tol * scale:
            L = order
        else:
            break
    consts = {}
    for gamma in _multi_indices(grid.dim, N_max):
        dv = spectral_derivative(atom, gamma).scalar()
        consts[gamma] = float(np.max(np.abs(dv)) * cube.side ** (sum(gamma) + grid.dim / 2.0))
    return AtomParams(b=b, L=L, N=N_max, derivative_consts=consts)


def atom_rearrange(coeffs: dict, db_order: int, cube_range: CubeRange,
                   const: float = 1.0) -> tuple:
    """Reindex generator-i wavelet coefficients of Q onto Q's i-th child.

    Child i of Q carries the atom const * psi_Q^(i) with coefficient
    coeff / const; the 2^n-th child carries the zero atom.  The approximation
    part (generator 0) is left on its own cubes unchanged so synthesis is
    reproduced exactly.
    """
    grid = coeffs[0].grid
    channels = coeffs[0].channels
    n_det = 2 ** grid.dim - 1
    entries = {}
    sources = {}
    max_level = grid.res_log2
    for i in range(1, n_det + 1):
        for cube, vec in coeffs[i].entries.items():
            if cube.level + 1 > max_level:
                raise ValueError(f"child level of {cube} overflows the grid")
            if cube.level + 1 > cube_range.j_max + 1:
                raise ValueError(f"child of {cube} leaves the range window")
            child = cube.children()[i - 1]
            entries[child] = vec / const
            sources[child] = (i, cube)
    j_min = min((c.level for c in coeffs[0].entries), default=cube_range.j_min)
    atoms = AtomDictionary(grid, db_order, j_min, sources)
    return atoms, CoeffSequence(grid, entries, channels)


def atom_synthesis(atoms: AtomDictionary, coeffs: CoeffSequence, approx: CoeffSequence,
                   db_order: int, const: float = 1.0) -> SampledField:
    """sum_P t_P a_P plus the untouched approximation part."""
    from .wavelets import empty_coeffs, wavelet_synthesize
    grid = coeffs.grid
    acc = np.zeros(grid.shape + (coeffs.channels,), dtype=complex)
    for cube, vec in coeffs.entries.items():
        a = atoms[cube].scalar()
        acc += const * a[..., None] * vec
    base = empty_coeffs(grid, coeffs.channels)
    base[0] = approx
    acc += wavelet_synthesize(base, db_order).values
    return SampledField(grid, acc)
