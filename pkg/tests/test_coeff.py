import numpy as np
import pytest

from bmtl.coeff import (ADProfile, MoleculeParams, ad_apply, ad_enumerate,
                        ad_random_operator, ad_weight, atom_rearrange,
                        atom_synthesis, molecule_check, phi_synthesis, phi_transform)
from bmtl.coeffseq import CoeffSequence
from bmtl.dyadic import CubeRange, DyadicCube, cubes_at_level
from bmtl.fields import SampledField, l2_norm, scalar_field
from bmtl.grid import TorusGrid
from bmtl.harness import band_limited_noise
from bmtl.lpa import BAND_LEVEL_OFFSET, make_admissible_pair
from bmtl.spaces import CubewiseWeighting, SpaceParams, seq_norm
from bmtl.wavelets import (parseval_defect, wavelet_analyze, wavelet_basis_field,
                           wavelet_synthesize)
from bmtl.weights import oscillating_weight, reducing_operators

GRID = TorusGrid(1, 2, 8)
RANGE = CubeRange(-1, 6)
PAIR = make_admissible_pair()


def test_phi_transform_zero_and_linearity():
    zero = SampledField(GRID, np.zeros(GRID.shape + (2,)))
    assert all(np.all(v == 0) for v in phi_transform(zero, PAIR, RANGE).entries.values())
    rng = np.random.default_rng(0)
    f = band_limited_noise(GRID, 2, 0.5, 8.0, rng)
    g = band_limited_noise(GRID, 2, 0.5, 8.0, rng)
    combo = SampledField(GRID, 1.5 * f.values - 0.5 * g.values)
    cf = phi_transform(f, PAIR, RANGE)
    cg = phi_transform(g, PAIR, RANGE)
    cc = phi_transform(combo, PAIR, RANGE)
    for cube in cc.entries:
        expect = 1.5 * cf.get(cube) - 0.5 * cg.get(cube)
        assert np.max(np.abs(cc.get(cube) - expect)) < 1e-12


def test_phi_round_trip_band_limited():
    rng = np.random.default_rng(1)
    for _ in range(3):
        f = band_limited_noise(GRID, 2, 0.5, 8.0, rng)
        rec = phi_synthesis(phi_transform(f, PAIR, RANGE), PAIR)
        err = l2_norm(SampledField(GRID, rec.values - f.values)) / l2_norm(f)
        assert err < 1e-8


def test_phi_synthesis_single_coefficient_matches_direct_sum():
    j, k = 3, 5
    cube = DyadicCube(j, (k,))
    coeffs = CoeffSequence(GRID, {cube: np.array([1.0])}, 1)
    out = phi_synthesis(coeffs, PAIR).values[:, 0]
    # reference: |Q|^(1/2) * (1/L) sum_xi psi^(2^(off-j) xi) e^(2 pi i (x-x_Q) xi)
    xs = GRID.axis_coords()
    xi = GRID.axis_freqs()
    psi_hat = PAIR.psi(np.abs(xi) * 2.0 ** (BAND_LEVEL_OFFSET - j))
    phase = np.exp(2j * np.pi * np.outer(xs - cube.corner[0], xi))
    ref = cube.measure ** 0.5 * (phase @ psi_hat) / GRID.side
    assert np.max(np.abs(out - ref)) < 1e-10


def test_phi_round_trip_inhomogeneous():
    # partition analysis with its band-limited dual reproduces low frequencies too
    from bmtl.lpa import make_inhom_partition
    part = make_inhom_partition()
    rng = np.random.default_rng(30)
    f = band_limited_noise(GRID, 2, 0.0, 8.0, rng)   # includes DC
    cr = CubeRange(0, 6, inhomogeneous=True)
    rec = phi_synthesis(phi_transform(f, part, cr), part, inhomogeneous=True)
    err = l2_norm(SampledField(GRID, rec.values - f.values)) / l2_norm(f)
    assert err < 1e-12


def test_partition_dual_identity():
    from bmtl.lpa import make_inhom_partition
    part = make_inhom_partition()
    rho = np.linspace(0.0, 64.0, 4001)
    total = sum(part.level(j)(rho) * part.dual(j)(rho) for j in range(0, 9))
    covered = rho <= 2.0 ** 7
    assert np.max(np.abs(total[covered] - 1.0)) < 1e-12
    # dual support stays inside the level band
    d3 = part.dual(3)(rho)
    assert np.all(d3[(rho < 4.0) | (rho > 16.0)] == 0.0)


def test_inhomogeneous_four_norm_spread():
    from bmtl.harness import four_norms
    from bmtl.lpa import make_inhom_partition
    part = make_inhom_partition()
    rng = np.random.default_rng(31)
    W = oscillating_weight(GRID)
    sp = SpaceParams(0.5, 1.5, 1.5, 2.0, np.inf, homogeneous=False)
    cr = CubeRange(0, 6, inhomogeneous=True)
    f = band_limited_noise(GRID, 2, 0.0, 8.0, rng)
    norms = four_norms(f, W, sp.p, sp, part, cr)
    spread = max(norms.values()) / min(norms.values())
    assert spread <= 50.0


def test_ad_weight_hand_values():
    prof = ADProfile(s=0.0, p=1.0, q=1.0, epsilon=0.5)
    n = GRID.dim
    Q = DyadicCube(2, (3,))
    assert ad_weight(GRID, Q, Q, prof) == pytest.approx(1.0)
    # same level, separation k * side
    for k in (1, 3, 7):
        P = DyadicCube(2, (3 + k,))
        expect = (1.0 + k) ** (-(n / 1.0) - prof.epsilon)
        assert ad_weight(GRID, Q, P, prof) == pytest.approx(expect, rel=1e-12)
    # parent with the same corner, s = 0, J = 1: min picks (l(Q)/l(P))^((n+eps)/2)
    Q = DyadicCube(3, (0,))
    P = DyadicCube(2, (0,))
    assert ad_weight(GRID, Q, P, prof) == pytest.approx(2.0 ** (-(n + prof.epsilon) / 2.0), rel=1e-12)


def test_ad_weight_weighted_variant_decays_faster():
    plain = ADProfile(s=0.0, p=1.5, q=1.2, epsilon=0.5)
    weighted = ADProfile(s=0.0, p=1.5, q=1.2, epsilon=0.5, d=0.5, d_tilde=0.3,
                         delta_cap=0.5 / 1.5 + 0.3 / 3.0)
    Q = DyadicCube(2, (0,))
    P = DyadicCube(2, (9,))
    assert ad_weight(GRID, Q, P, weighted, "weighted") < ad_weight(GRID, Q, P, plain, "plain")
    # torus wrap: index 15 of 16 is one cube away from index 0
    P_wrap = DyadicCube(2, (15,))
    P_near = DyadicCube(2, (1,))
    assert ad_weight(GRID, Q, P_wrap, plain) == pytest.approx(ad_weight(GRID, Q, P_near, plain))


def test_ad_apply_identity_and_zero():
    rng = np.random.default_rng(2)
    entries = {c: rng.standard_normal(1) for c in cubes_at_level(GRID, 2)}
    coeffs = CoeffSequence(GRID, entries, 1)
    ident = {(c, c): 1.0 for c in cubes_at_level(GRID, 2)}
    out = ad_apply(ident, coeffs)
    for c in entries:
        assert out.get(c) == pytest.approx(entries[c])
    zero = CoeffSequence(GRID, {}, 1)
    assert ad_apply(ident, zero).entries == {}


def test_ad_single_column_bound():
    prof = ADProfile(s=0.2, p=1.5, q=1.2, epsilon=0.4)
    small = CubeRange(0, 3)
    ops = ad_random_operator(GRID, small, prof, seed=3)
    P0 = DyadicCube(2, (5,))
    coeffs = CoeffSequence(GRID, {P0: np.array([1.0])}, 1)
    out = ad_apply(ops, coeffs)
    for Q, v in out.entries.items():
        assert np.abs(v[0]) <= ad_weight(GRID, Q, P0, prof) + 1e-12


def test_ad_enumerate_drop_accounting():
    prof = ADProfile(s=0.0, p=1.0, q=1.0, epsilon=1.0)
    kept, dropped = ad_enumerate(GRID, CubeRange(0, 4), prof, drop_tol=1e-6)
    total = sum(kept.values())
    assert dropped <= 1e-4 * total
    kept_all, dropped_all = ad_enumerate(GRID, CubeRange(0, 4), prof, drop_tol=0.0)
    assert dropped_all == 0.0
    assert len(kept_all) >= len(kept)


def test_ad_boundedness_ratio():
    # random |b_QP| <= omega_QP (weighted profile) acts boundedly on the A_Q side
    rng = np.random.default_rng(4)
    W = oscillating_weight(GRID)
    p, q, s = 1.5, 1.2, 0.4
    small = CubeRange(0, 4)
    fam = reducing_operators(W, p, small)
    from bmtl.weights import ap_dimensions
    d, dt, delta = ap_dimensions(W, p, small, i_max=2)
    prof = ADProfile(s=s, p=p, q=q, epsilon=0.5, d=d, d_tilde=dt, delta_cap=delta)
    sp = SpaceParams(s, p, q, 2.0, np.inf)
    w = CubewiseWeighting(fam)
    for seed in range(3):
        ops = ad_random_operator(GRID, small, prof, variant="weighted", seed=seed)
        entries = {c: rng.standard_normal(2) for c in cubes_at_level(GRID, 3)}
        coeffs = CoeffSequence(GRID, entries, 2)
        num = seq_norm(ad_apply(ops, coeffs), w, sp, small).value
        den = seq_norm(coeffs, w, sp, small).value
        assert num / den <= 50.0


def test_synthesis_bound_ratio():
    # tl(phi_synthesis(s)) / seq_norm(s) stays bounded on sparse random input
    from bmtl.spaces import tl_norm
    rng = np.random.default_rng(5)
    W = oscillating_weight(GRID)
    sp = SpaceParams(0.5, 1.5, 1.5, 2.0, np.inf)
    fam = reducing_operators(W, sp.p, RANGE)
    w = CubewiseWeighting(fam)
    for _ in range(3):
        entries = {}
        for j in (1, 2, 3, 4):
            for c in cubes_at_level(GRID, j):
                if rng.random() < 0.2:
                    entries[c] = rng.standard_normal(2)
        coeffs = CoeffSequence(GRID, entries, 2)
        f = phi_synthesis(coeffs, PAIR)
        num = tl_norm(SampledField(GRID, f.values), w, sp, PAIR, RANGE).value
        den = seq_norm(coeffs, w, sp, RANGE).value
        assert num / den <= 50.0


def test_sup_cube_surrogate_bounded():
    # replacing |A_Q band(x)| by its sup over Q changes tl by a bounded factor
    from bmtl.dyadic import level_block_view, spread_to_grid
    from bmtl.fields import to_spectral
    from bmtl.spaces import _band_values, _level_multiplier, bm_array_norm
    rng = np.random.default_rng(6)
    W = oscillating_weight(GRID)
    sp = SpaceParams(0.5, 1.5, 1.5, 2.0, np.inf)
    fam = reducing_operators(W, sp.p, RANGE)
    w = CubewiseWeighting(fam)
    f = band_limited_noise(GRID, 2, 0.5, 8.0, rng)
    F = to_spectral(f)
    plain_acc = np.zeros(GRID.shape)
    sup_acc = np.zeros(GRID.shape)
    for j in RANGE.band_levels():
        mag = w.magnitude(j, _band_values(F, _level_multiplier(GRID, PAIR, j, True)))
        blocks = level_block_view(GRID, mag, j)
        sup_per_cube = blocks.max(axis=1)
        sup_mag = spread_to_grid(GRID, sup_per_cube, j)
        plain_acc += (2.0 ** (j * sp.s) * mag) ** sp.q
        sup_acc += (2.0 ** (j * sp.s) * sup_mag) ** sp.q
    lo = bm_array_norm(GRID, plain_acc ** (1 / sp.q), sp.p, sp.t, sp.r, RANGE.cube_levels())
    hi = bm_array_norm(GRID, sup_acc ** (1 / sp.q), sp.p, sp.t, sp.r, RANGE.cube_levels())
    assert 1.0 - 1e-12 <= hi / lo <= 10.0


# ---------------------------------------------------------------------------
# molecules


def test_molecule_zero_family_passes():
    rep = molecule_check({}, MoleculeParams(N=1, K=1, M=3.0))
    assert rep["m1_pass"] and rep["m1_max"] == 0.0


def test_molecule_gaussian_fails_moments():
    g = TorusGrid(1, 2, 7)
    cube = DyadicCube(1, (2,))
    x = g.coords()[0]
    bump = np.exp(-((x - cube.center[0]) / (0.5 * cube.side)) ** 2)
    fam = {cube: scalar_field(g, bump)}
    rep = molecule_check(fam, MoleculeParams(N=0, K=0, M=3.0), eps=1e-8)
    assert not rep["m1_pass"]


def test_molecule_db6_wavelets_pass_moments():
    g = TorusGrid(1, 2, 8)
    fam = {}
    for j, k in [(4, 7), (5, 13)]:
        cube = DyadicCube(j, (k,))
        fam[cube] = wavelet_basis_field(g, 6, 1, cube, j_min=2)
    rep = molecule_check(fam, MoleculeParams(N=5, K=0, M=2.0), eps=1e-8)
    assert rep["m1_pass"], rep["m1_max"]
    assert rep["m2_const"] > 0


# ---------------------------------------------------------------------------
# wavelets


def test_wavelet_parseval_random():
    rng = np.random.default_rng(7)
    for dim, K, J in [(1, 2, 8), (2, 1, 4)]:
        g = TorusGrid(dim, K, J)
        f = SampledField(g, rng.standard_normal(g.shape + (2,)))
        coeffs = wavelet_analyze(f, 6, CubeRange(-K, J - 2))
        assert parseval_defect(f, coeffs) < 1e-10


def test_wavelet_round_trip():
    rng = np.random.default_rng(8)
    for dim, K, J in [(1, 2, 7), (2, 1, 4)]:
        g = TorusGrid(dim, K, J)
        f = SampledField(g, rng.standard_normal(g.shape + (1,)))
        coeffs = wavelet_analyze(f, 4, CubeRange(0, J - 2))
        back = wavelet_synthesize(coeffs, 4)
        assert np.max(np.abs(back.values - f.values)) < 1e-10


def test_wavelet_orthonormal_basis_roundtrip():
    g = TorusGrid(1, 2, 7)
    cube = DyadicCube(3, (5,))
    basis = wavelet_basis_field(g, 6, 1, cube, j_min=1)
    coeffs = wavelet_analyze(basis, 6, CubeRange(1, g.res_log2 - 2))
    got = coeffs[1].get(cube)
    assert got[0] == pytest.approx(1.0, abs=1e-10)
    total = sum(np.sum(np.abs(v) ** 2) for seq in coeffs.values() for v in seq.entries.values())
    assert total == pytest.approx(1.0, abs=1e-10)


def test_wavelet_linearity():
    rng = np.random.default_rng(9)
    g = TorusGrid(1, 1, 6)
    f1 = SampledField(g, rng.standard_normal(g.shape + (1,)))
    f2 = SampledField(g, rng.standard_normal(g.shape + (1,)))
    combo = SampledField(g, 2.0 * f1.values + 3.0 * f2.values)
    r = CubeRange(0, 3)
    ca, cb, cc = (wavelet_analyze(x, 5, r) for x in (f1, f2, combo))
    for i in cc:
        for cube in cc[i].entries:
            expect = 2.0 * ca[i].get(cube) + 3.0 * cb[i].get(cube)
            assert np.max(np.abs(cc[i].get(cube) - expect)) < 1e-10


def test_wavelet_annihilates_local_polynomials():
    # degree < vanishing moments: interior detail coefficients vanish
    g = TorusGrid(1, 2, 9)
    x = g.coords()[0]
    patch = (x >= 1.0) & (x < 3.0)
    vals = np.where(patch, 0.3 + 0.8 * x - 0.2 * x ** 2 + 0.05 * x ** 3, 0.0)
    f = SampledField(g, vals[..., None])
    coeffs = wavelet_analyze(f, 6, CubeRange(0, g.res_log2 - 2))
    # cascade footprint of the coefficient at cube Q: about (2*order) sides of Q
    peak = max(np.max(np.abs(v)) for v in coeffs[1].entries.values())
    interior = 0
    for cube, v in coeffs[1].entries.items():
        lo = cube.corner[0]
        hi = lo + 2 * 6 * cube.side
        if lo >= 1.0 and hi <= 3.0:
            interior += 1
            assert np.max(np.abs(v)) < 1e-8 * max(peak, 1.0), cube
    assert interior > 20


def test_wavelet_depth_rejected():
    g = TorusGrid(1, 1, 4)
    f = SampledField(g, np.zeros(g.shape + (1,)))
    with pytest.raises(ValueError):
        wavelet_analyze(f, 4, CubeRange(-2, 2))


def test_db_order_validation():
    g = TorusGrid(1, 1, 4)
    f = SampledField(g, np.zeros(g.shape + (1,)))
    with pytest.raises(ValueError):
        wavelet_analyze(f, 11, CubeRange(0, 2))


# ---------------------------------------------------------------------------
# atoms


def test_atom_rearrange_zero_input():
    g = TorusGrid(1, 1, 5)
    from bmtl.wavelets import empty_coeffs
    coeffs = empty_coeffs(g, 1)
    coeffs[0].entries[DyadicCube(0, (0,))] = np.zeros(1)
    atoms, seq = atom_rearrange(coeffs, 4, CubeRange(0, 3))
    assert len(seq.entries) == 0


def test_atom_single_coefficient_support_and_synthesis():
    g = TorusGrid(1, 2, 8)
    from bmtl.wavelets import empty_coeffs
    coeffs = empty_coeffs(g, 1)
    j_min = 1
    coeffs[0].entries[DyadicCube(j_min, (0,))] = np.zeros(1)
    src = DyadicCube(4, (9,))
    coeffs[1].entries[src] = np.array([0.8])
    atoms, seq = atom_rearrange(coeffs, 6, CubeRange(j_min, 6))
    child = src.children()[0]
    assert child in atoms
    assert seq.get(child)[0] == pytest.approx(0.8)
    a = atoms[child].scalar()
    nz = np.abs(a) > 1e-12
    dist = g.torus_dist(np.stack([g.coords()[0][nz]], axis=-1), src.corner)
    b = float(np.max(dist) / child.side)
    assert np.isfinite(b) and b > 0
    rec = atom_synthesis(atoms, seq, coeffs[0], 6)
    direct = wavelet_synthesize(coeffs, 6)
    assert np.max(np.abs(rec.values - direct.values)) < 1e-10
    # measured atom data: db6 kills moments through order 5, support is finite
    from bmtl.coeff import measure_atom_params
    params = measure_atom_params(atoms[child], child, L_max=5, N_max=1)
    assert params.L == 5
    assert 0.0 < params.b < 60.0
    assert all(np.isfinite(v) for v in params.derivative_consts.values())


def test_atom_rearrange_sparse_gallery_synthesis():
    rng = np.random.default_rng(10)
    g = TorusGrid(1, 2, 7)
    from bmtl.wavelets import empty_coeffs
    coeffs = empty_coeffs(g, 1)
    j_min = 0
    for k in range(2 ** (j_min + g.side_log2)):
        coeffs[0].entries[DyadicCube(j_min, (k,))] = rng.standard_normal(1)
    for j in (2, 3, 4):
        for c in cubes_at_level(g, j):
            if rng.random() < 0.2:
                coeffs[1].entries[c] = rng.standard_normal(1)
    atoms, seq = atom_rearrange(coeffs, 4, CubeRange(j_min, 4))
    rec = atom_synthesis(atoms, seq, coeffs[0], 4)
    direct = wavelet_synthesize(coeffs, 4)
    assert np.max(np.abs(rec.values - direct.values)) < 1e-10


def test_atom_child_overflow_rejected():
    g = TorusGrid(1, 1, 3)
    from bmtl.wavelets import empty_coeffs
    coeffs = empty_coeffs(g, 1)
    coeffs[0].entries[DyadicCube(0, (0,))] = np.zeros(1)
    coeffs[1].entries[DyadicCube(3, (0,))] = np.ones(1)
    with pytest.raises(ValueError):
        atom_rearrange(coeffs, 4, CubeRange(0, 1))


def test_synthesis_dictionary_molecular_moments():
    # psi_Q has spectrum off zero, so its moments vanish up to torus
    # periodization tails, which shrink geometrically with depth
    g = TorusGrid(1, 2, 9)
    errs = []
    for j in (4, 5, 6):
        cube = DyadicCube(j, (2 ** (j + 1),))
        coeffs = CoeffSequence(g, {cube: np.array([1.0])}, 1)
        fld = phi_synthesis(coeffs, PAIR)
        fam = {cube: SampledField(g, fld.values.real[..., 0:1])}
        rep = molecule_check(fam, MoleculeParams(N=2, K=0, M=2.0), eps=1e-6)
        errs.append(rep["m1_max"])
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5
