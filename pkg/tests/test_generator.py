import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from archcal import generator as g
from archcal.generator import (
    ParametricGumbel,
    PiecewisePhi,
    RadialAtoms,
    copula_diagonal,
    copula_diagonal_quantile,
    fit_generator_gnz,
    fit_generator_pairwise,
    fit_radial_atoms,
    phi_eval,
    psi_eval,
    radial_to_piecewise,
)
from archcal.kendall import KendallDF, empirical_kendall_df, pseudo_observations
from archcal.mtp import calibrate
from archcal.rng import derive
from archcal.sampling import sample_gumbel

HAND = RadialAtoms(2, [1.0, 0.25, 0.1], [1 / 3, 1 / 3, 1 / 3])
HAND_K = KendallDF([0.0, 0.25, 0.5], [1 / 3, 2 / 3, 1.0])


# strategies -------------------------------------------------------------------

@st.composite
def radial(draw, zero_atom=None):
    d = draw(st.integers(2, 8))
    k = draw(st.integers(1, 10))
    atoms = draw(st.lists(st.floats(0.02, 5.0), min_size=k, max_size=k, unique=True))
    atoms = sorted(atoms, reverse=True)
    if zero_atom is None:
        zero_atom = draw(st.booleans())
    if zero_atom:
        atoms.append(0.0)
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=len(atoms), max_size=len(atoms))))
    return RadialAtoms(d, atoms, w / w.sum())


@st.composite
def piecewise(draw, start_at_zero=False):
    r = draw(st.integers(1, 12))
    inner = sorted(draw(st.lists(st.floats(0.01, 0.99), min_size=r, max_size=r, unique=True)))
    t0 = 0.0 if start_at_zero else draw(st.sampled_from([0.0, inner[0] / 2]))
    knots = np.array([t0] + inner + [1.0])
    # slopes become less negative from left to right: convex and decreasing
    slopes = -np.sort(np.array(draw(st.lists(st.floats(0.1, 20.0), min_size=r + 1, max_size=r + 1))))[::-1]
    values = np.zeros(knots.size)
    for i in range(knots.size - 2, -1, -1):
        values[i] = values[i + 1] - slopes[i] * (knots[i + 1] - knots[i])
    below = draw(st.sampled_from(["constant", "infinite"]))
    return PiecewisePhi(knots, values, below)


def representable(gen, n=400):
    """Grid inside the range of psi on (0, inf), where psi(phi(t)) = t must hold."""
    if isinstance(gen, RadialAtoms):
        top = gen._knots[3]
        return np.linspace(0, top, n, endpoint=gen.atoms[-1] > 0)
    if isinstance(gen, PiecewisePhi):
        return np.linspace(gen.knots[0], 1, n)[1:]
    return np.concatenate([np.geomspace(1e-8, 0.1, 50), np.linspace(0.1, 1, n)])


PROP = settings(max_examples=250, deadline=None, suppress_health_check=[HealthCheck.too_slow])


# evaluation examples ---------------------------------------------------------

def test_psi_examples():
    assert psi_eval(ParametricGumbel(2.0), 4.0) == pytest.approx(np.exp(-2), abs=1e-15)
    assert psi_eval(HAND, 0.1) == pytest.approx(0.5, abs=1e-15)
    for gen in (ParametricGumbel(3.0), HAND, radial_to_piecewise(HAND)):
        assert psi_eval(gen, 0.0) == 1.0
    with pytest.raises(ValueError):
        psi_eval(HAND, -1e-3)


def test_phi_examples():
    assert phi_eval(ParametricGumbel(2.0), np.exp(-2)) == pytest.approx(4.0, abs=1e-12)
    assert phi_eval(HAND, 0.25) == pytest.approx(0.25, abs=1e-15)
    for gen in (ParametricGumbel(3.0), HAND, radial_to_piecewise(HAND)):
        assert phi_eval(gen, 1.0) == 0.0
    assert phi_eval(ParametricGumbel(2.0), 0.0) == np.inf
    with pytest.raises(ValueError):
        phi_eval(HAND, 1.5)


def test_diagonal_examples():
    assert copula_diagonal(ParametricGumbel(2.0), 6, 0.5) == pytest.approx(0.5 ** np.sqrt(6), abs=1e-14)
    assert copula_diagonal(HAND, 2, 0.25) == pytest.approx(1 / 6, abs=1e-15)
    for gen in (ParametricGumbel(2.0), HAND):
        assert copula_diagonal(gen, 4, 1.0) == 1.0
        assert copula_diagonal(gen, 4, 0.0) == 0.0


def test_quantile_examples():
    assert copula_diagonal_quantile(ParametricGumbel(2.0), 6, 0.95) == pytest.approx(0.95 ** (6 ** -0.5), abs=1e-14)
    assert copula_diagonal_quantile(HAND, 2, 1 / 6) == pytest.approx(0.25, abs=1e-15)
    assert copula_diagonal(HAND, 2, copula_diagonal_quantile(HAND, 2, 1 / 6)) == pytest.approx(1 / 6, abs=1e-15)
    assert copula_diagonal_quantile(HAND, 3, 1.0) == 1.0
    assert copula_diagonal_quantile(HAND, 3, 0.0) == 0.0


def test_radial_validation():
    with pytest.raises(ValueError):
        RadialAtoms(2, [0.5, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        RadialAtoms(2, [1.0, 0.5], [0.7, 0.7])
    with pytest.raises(ValueError):
        RadialAtoms(1, [1.0], [1.0])


def test_radial_zero_atom_jump():
    gen = RadialAtoms(3, [1.0, 0.0], [0.6, 0.4])
    assert gen.psi(0.0) == 1.0
    assert gen.psi(1e-12) == pytest.approx(0.6)
    assert phi_eval(gen, 0.8) == 0.0


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewisePhi([0, 0.5, 0.9], [1, 0.5, 0])
    with pytest.raises(ValueError):
        PiecewisePhi([0, 0.5, 1], [1, 1.5, 0])
    with pytest.raises(ValueError):
        PiecewisePhi([0, 1], [1, 0], below="linear")


def test_piecewise_infinite_below():
    gen = PiecewisePhi([0.2, 1.0], [2.0, 0.0], below="infinite")
    assert gen.phi(0.1) == np.inf
    assert gen.psi(5.0) == 0.2
    assert PiecewisePhi([0.2, 1.0], [2.0, 0.0]).psi(5.0) == 0.0


def test_json_round_trip():
    for gen in (ParametricGumbel(2.5), HAND, radial_to_piecewise(HAND)):
        back = g.loads(g.dumps(gen))
        t = np.linspace(0, 1, 11)
        assert_allclose(phi_eval(back, t), phi_eval(gen, t))
    with pytest.raises(ValueError):
        g.generator_from_dict({"repr": "radial", "d": 2})


# fitting ---------------------------------------------------------------------

def test_fit_hand_recursion():
    fit = fit_radial_atoms(HAND_K, 2)
    assert_allclose(fit.atoms, [1.0, 0.25, 0.1], rtol=0, atol=1e-15)
    assert fit.folded == 0
    assert fit.psi(0.25) == pytest.approx(0.25, abs=1e-12)
    assert fit.psi(0.1) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("d", [3, 4, 6])
def test_fit_hand_higher_dimension(d):
    fit = fit_radial_atoms(HAND_K, d)
    assert_allclose(fit.psi(fit.atoms), HAND_K.atoms, atol=1e-9)


def test_fit_comonotone_sample():
    x = np.arange(20.0)
    fit = fit_generator_gnz(np.column_stack([x, x, 2 * x]))
    # every row dominates the smaller ones: W are distinct, psi has n atoms
    assert fit.atoms.size == 20
    same = np.ones((10, 3))
    fit = fit_generator_gnz(same)
    assert_array_equal(fit.atoms, [1.0])
    xs = np.linspace(0, 1.5, 7)
    assert_allclose(fit.psi(xs), np.where(xs == 0, 1, np.clip(1 - xs, 0, None) ** 2))


def test_fit_fold_when_mass_exhausted():
    k = KendallDF([0.0, 0.5, 0.8], [0.5, 0.8, 1.0])
    fit = fit_radial_atoms(k, 2)
    assert fit.folded == 2
    assert_array_equal(fit.atoms, [1.0, 0.0])
    assert_allclose(fit.masses, [0.5, 0.5])


def test_fit_requires_atom_at_zero():
    with pytest.raises(ValueError):
        fit_radial_atoms(KendallDF([0.2, 0.5], [0.5, 1.0]), 2)


@pytest.mark.parametrize("d", [2, 3, 6])
def test_fit_interpolates_kendall_atoms(d):
    x = sample_gumbel(2.0, d, 300, 40 + d)
    k = empirical_kendall_df(pseudo_observations(x))
    fit = fit_radial_atoms(k, d)
    kept = fit.atoms > 0
    assert_allclose(fit.psi(fit.atoms[kept]), k.atoms[: kept.sum()], atol=1e-9)
    assert_allclose(fit.masses[kept], k.masses[: kept.sum()])


def test_fit_gumbel_diagonal_bivariate():
    u = np.linspace(0, 1, 201)
    truth = copula_diagonal(ParametricGumbel(2.0), 2, u)
    sup = [np.max(np.abs(copula_diagonal(fit_generator_gnz(sample_gumbel(2.0, 2, 1000, derive(50, s))), 2, u) - truth))
           for s in range(7)]
    assert np.median(sup) <= 0.05


def test_pairwise_equals_gnz_for_two_columns():
    x = sample_gumbel(2.0, 2, 400, 61)
    ref = fit_generator_gnz(x, d=2)
    u = np.linspace(0, 1, 301)
    for gen in (fit_generator_pairwise(x, "all_pairs"), fit_generator_pairwise(x, "monte_carlo", 7, 3)):
        assert_allclose(copula_diagonal(gen, 2, u), copula_diagonal(ref, 2, u), atol=1e-9)
        assert_allclose(copula_diagonal(gen, 5, u), copula_diagonal(ref, 5, u), atol=1e-9)


def test_pairwise_identical_pairs():
    x = sample_gumbel(2.0, 2, 200, 62)
    three = np.column_stack([x[:, 0], x[:, 1], x[:, 1] * 3 + 1])  # pairs share rank patterns
    three[:, 0] = x[:, 1]
    gen = fit_generator_pairwise(three, "all_pairs")
    single = radial_to_piecewise(fit_generator_gnz(three[:, :2], d=2))
    single = single.scaled(1 / single.phi(0.5))
    t = np.linspace(0, 1, 101)
    assert_allclose(gen.phi(t), single.phi(t), atol=1e-12)


def test_pairwise_monte_carlo_pairs():
    pairs = g._select_pairs(6, "monte_carlo", 500, 4)
    assert len(pairs) == 500
    assert all(a != b and 0 <= a < 6 and 0 <= b < 6 for a, b in pairs)
    assert len(set(pairs)) == 30
    assert pairs == g._select_pairs(6, "monte_carlo", 500, 4)
    with pytest.raises(ValueError):
        g._select_pairs(6, "monte_carlo", 0, 4)
    with pytest.raises(ValueError):
        fit_generator_pairwise(np.zeros((5, 1)))


def test_pairwise_tracks_gnz_in_six_dimensions():
    u = np.linspace(0, 1, 102)
    truth = copula_diagonal(ParametricGumbel(2.0), 6, u)
    mad_gnz, mad_pw = [], []
    for s in range(10):
        x = sample_gumbel(2.0, 6, 100, derive(70, s))
        mad_gnz.append(np.mean(np.abs(copula_diagonal(fit_generator_gnz(x), 6, u) - truth)))
        pw = fit_generator_pairwise(x, "monte_carlo", 100, derive(71, s))
        mad_pw.append(np.mean(np.abs(copula_diagonal(pw, 6, u) - truth)))
    ratio = np.mean(mad_pw) / np.mean(mad_gnz)
    assert 1 / 3 < ratio < 3


def test_pairwise_output_is_a_generator():
    x = sample_gumbel(1.5, 5, 150, 80)
    gen = fit_generator_pairwise(x, "monte_carlo", 40, 1)
    t = np.linspace(0, 1, 500)
    phi = gen.phi(t)
    assert gen.phi(0.5) == pytest.approx(1.0)
    assert phi[-1] == 0 and np.all(np.diff(phi) < 0)
    assert np.all(np.diff(phi, 2) >= -1e-12)


# properties ------------------------------------------------------------------

@PROP
@given(st.one_of(radial(), piecewise(), st.floats(1.0, 12.0).map(ParametricGumbel)))
def test_inverse_round_trip(gen):
    t = representable(gen)
    assert np.max(np.abs(psi_eval(gen, phi_eval(gen, t)) - t)) <= 1e-9


@PROP
@given(st.one_of(radial(zero_atom=False), piecewise(start_at_zero=True),
                 st.floats(1.0, 12.0).map(ParametricGumbel)), st.integers(2, 12))
def test_quantile_round_trip(gen, m):
    v = np.linspace(0, 1, 101)[1:]
    q = copula_diagonal_quantile(gen, m, v)
    assert np.max(np.abs(copula_diagonal(gen, m, q) - v)) <= 1e-9


@PROP
@given(st.one_of(radial(), piecewise()), st.floats(0.05, 20.0), st.integers(2, 10),
       st.floats(0.001, 0.5))
def test_scale_equivalence(gen, c, m, alpha):
    other = gen.scaled(c)
    u = np.linspace(0, 1, 41)
    assert_allclose(copula_diagonal(other, m, u), copula_diagonal(gen, m, u), atol=1e-12, rtol=0)
    assert_allclose(copula_diagonal_quantile(other, m, u), copula_diagonal_quantile(gen, m, u), atol=1e-12, rtol=0)
    a1 = calibrate(gen, m, alpha).alpha_loc
    a2 = calibrate(other, m, alpha).alpha_loc
    assert abs(a1 - a2) <= 1e-12


@PROP
@given(st.one_of(radial(), piecewise(), st.floats(1.0, 12.0).map(ParametricGumbel)))
def test_phi_convex_decreasing(gen):
    t = np.linspace(0.01, 1, 300)
    phi = phi_eval(gen, t)
    if isinstance(gen, PiecewisePhi):
        keep = t >= gen.knots[0]
        t, phi = t[keep], phi[keep]
    assert np.all(np.diff(phi, 2) >= -1e-12)
    pos = phi[:-1] > 0
    assert np.all(np.diff(phi)[pos] < 0)
    assert phi_eval(gen, 1.0) == 0.0
