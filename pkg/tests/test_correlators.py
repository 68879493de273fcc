"""Spin-spin correlators: Pfaffian machinery, Toeplitz route, closed-form
anchors for the critical chain, and scaling-limit decay structure."""

import math

import numpy as np
import pytest

from isingrg.correlators import (
    QuasiFreeState,
    SkewMatrix,
    pair_matrix,
    pfaffian,
    pfaffian_matchings,
    self_dual_two_point,
    self_dual_two_point_expanded,
    spin_spin_correlation,
    toeplitz_correlation,
    toeplitz_symbol,
    transverse_field_expectation,
)
from isingrg.kernels import Couplings, SelfDualVector


# ---------------------------------------------------------------------------
# shared states (module scope so the per-state pair cache is reused)


@pytest.fixture(scope="module")
def lattice_state():
    return QuasiFreeState.lattice(Couplings.critical())


@pytest.fixture(scope="module")
def limit_state(d8):
    return QuasiFreeState.critical_limit(d8)


@pytest.fixture(scope="module")
def limit_decay(limit_state):
    """|sigma-sigma(d)| of the smeared critical limit for d = 1..12."""
    return {d: abs(complex(toeplitz_correlation(limit_state, d)))
            for d in range(1, 13)}


# ---------------------------------------------------------------------------
# Pfaffian


def _random_skew(rng, n):
    r = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return r - r.T


def test_pfaffian_matches_matching_recursion():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 5)) * 2  # 2, 4, 6, 8
        a = _random_skew(rng, n)
        fast = pfaffian(a)
        ref = pfaffian_matchings(a)
        assert abs(fast - ref) <= 1e-10 * max(1.0, abs(ref))
        assert fast ** 2 == pytest.approx(np.linalg.det(a), rel=1e-9)


def test_pfaffian_small_closed_forms():
    rng = np.random.default_rng(3)
    a = _random_skew(rng, 2)
    assert pfaffian(a) == pytest.approx(a[0, 1], rel=1e-14)
    b = _random_skew(rng, 4)
    closed = b[0, 1] * b[2, 3] - b[0, 2] * b[1, 3] + b[0, 3] * b[1, 2]
    assert pfaffian(b) == pytest.approx(closed, rel=1e-12)
    assert pfaffian_matchings(b) == pytest.approx(closed, rel=1e-12)
    assert pfaffian(np.zeros((0, 0))) == 1
    assert pfaffian(_random_skew(rng, 5)) == 0
    assert pfaffian_matchings(_random_skew(rng, 3)) == 0


def test_pfaffian_rank_deficient_is_zero():
    a = np.zeros((4, 4), dtype=complex)
    a[0, 1], a[1, 0] = 1.0, -1.0
    assert pfaffian(a) == 0
    assert pfaffian_matchings(a) == 0


def test_pfaffian_validation():
    with pytest.raises(ValueError):
        pfaffian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        pfaffian_matchings(np.zeros((14, 14)))


def test_skew_matrix_validation():
    ok = SkewMatrix(np.array([[0.0, 2.0], [-2.0, 0.0]]))
    assert ok.dim == 2
    with pytest.raises(ValueError):
        SkewMatrix(np.ones((2, 2)))
    with pytest.raises(ValueError):
        SkewMatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):  # nonzero diagonal is not antisymmetric
        SkewMatrix(np.diag([1.0, 1.0]))


def test_pair_matrix_is_skew_and_feeds_pfaffian(lattice_state):
    factors = [SelfDualVector.position_diff(0), SelfDualVector.position_sum(1),
               SelfDualVector.position_diff(1), SelfDualVector.position_sum(2)]
    M = pair_matrix(lattice_state, factors)
    assert M.dim == 4
    assert np.abs(M.data + M.data.T).max() == 0.0
    assert pfaffian(M) == pytest.approx(pfaffian_matchings(M), abs=1e-12)


# ---------------------------------------------------------------------------
# state handles


def test_state_validation(d8):
    with pytest.raises(ValueError):
        QuasiFreeState(kind="bogus")
    with pytest.raises(ValueError):
        QuasiFreeState(kind="lattice")  # needs couplings
    with pytest.raises(ValueError):
        QuasiFreeState(kind="critical_limit")  # needs a filter
    st = QuasiFreeState.massive_thermal(d8, 0.5, 2.0, t=0.7)
    assert (st.kind, st.mu0, st.beta0, st.t) == ("massive_thermal", 0.5, 2.0, 0.7)


def test_dual_route_pairings_agree(lattice_state, limit_state, d4, d8):
    # covariance-kernel route vs the four-term scalar expansion
    pairs = [(SelfDualVector.position_diff(1), SelfDualVector.position_sum(0)),
             (SelfDualVector.position_diff(0), SelfDualVector.position_diff(2))]
    states = [lattice_state,
              QuasiFreeState.renormalized(Couplings.critical(), d4, 2),
              limit_state,
              QuasiFreeState.massive_thermal(d8, 0.5, 2.0)]
    for st in states:
        for v1, v2 in pairs:
            a = self_dual_two_point(st, v1, v2)
            b = self_dual_two_point_expanded(st, v1, v2)
            assert abs(a - b) < 1e-12


def test_pair_cache_reused(d8):
    st = QuasiFreeState.critical_limit(d8)
    assert len(st._pair_cache) == 0
    toeplitz_correlation(st, 2)
    n1 = len(st._pair_cache)
    assert n1 > 0
    toeplitz_correlation(st, 2)
    assert len(st._pair_cache) == n1  # warm: no new integrals
    spin_spin_correlation(st, [0, 2])  # adds diff-diff / sum-sum tags
    assert len(st._pair_cache) > n1


# ---------------------------------------------------------------------------
# critical-chain closed forms


def test_lattice_symbol_closed_form(lattice_state):
    # mixed-pair symbol of the critical chain: C3(s) = -2 / (pi (2 s + 1))
    sym = toeplitz_symbol(lattice_state, 4)
    for s, value in sym.lags.items():
        assert value == pytest.approx(-2.0 / (math.pi * (2 * s + 1)), abs=1e-12)
    assert sym.lags[1] != pytest.approx(sym.lags[-1], abs=1e-3)  # asymmetric


def test_toeplitz_matrix_layout(lattice_state):
    sym = toeplitz_symbol(lattice_state, 3)
    mat = sym.matrix()
    for r in range(3):
        for c in range(3):
            assert mat[r, c] == sym.lags[c - r - 1]
    with pytest.raises(ValueError):
        toeplitz_symbol(lattice_state, 0)


def test_lattice_sigma_closed_forms(lattice_state):
    # <s3_0 s3_1> = 2/pi and <s3_0 s3_2> = 16 / (3 pi^2), by both routes
    assert complex(toeplitz_correlation(lattice_state, 1)) == \
        pytest.approx(2.0 / math.pi, abs=1e-12)
    assert complex(toeplitz_correlation(lattice_state, 2)) == \
        pytest.approx(16.0 / (3.0 * math.pi ** 2), abs=1e-12)
    assert complex(spin_spin_correlation(lattice_state, [0, 1])) == \
        pytest.approx(2.0 / math.pi, abs=1e-12)
    assert complex(spin_spin_correlation(lattice_state, [0, 2])) == \
        pytest.approx(16.0 / (3.0 * math.pi ** 2), abs=1e-12)


def test_spin_product_parity_and_contraction(lattice_state):
    assert spin_spin_correlation(lattice_state, [0, 1, 5]) == 0j
    assert spin_spin_correlation(lattice_state, [4, 4]) == 1 + 0j
    a = spin_spin_correlation(lattice_state, [0, 1, 1, 3])
    b = spin_spin_correlation(lattice_state, [0, 3])
    assert a == pytest.approx(b, rel=1e-12)
    with pytest.raises(ValueError):
        spin_spin_correlation(lattice_state, [0, 100])


def test_four_point_factorization_limit(lattice_state):
    # widely separated pairs nearly factorize: <s s s s> ~ <s s><s s>
    four = complex(spin_spin_correlation(lattice_state, [0, 1, 20, 21]))
    two = complex(spin_spin_correlation(lattice_state, [0, 1]))
    assert four == pytest.approx(two * two, rel=2e-2)
    assert abs(four) < abs(two)


def test_transverse_field_expectation_values(lattice_state, limit_state, d8):
    assert transverse_field_expectation(lattice_state) == \
        pytest.approx(2.0 / math.pi, abs=1e-10)
    # smeared limit state has half-filled modes: expectation 0
    assert transverse_field_expectation(limit_state) == pytest.approx(0.0, abs=1e-8)
    # deep in the disordered regime the transverse field saturates
    deep = QuasiFreeState.massive_thermal(d8, 50.0, float("inf"))
    assert transverse_field_expectation(deep) == pytest.approx(1.0, abs=1e-2)


# ---------------------------------------------------------------------------
# scaling-limit correlators


def test_limit_nearest_neighbour_anchor(limit_decay):
    assert limit_decay[1] == pytest.approx(0.5684013490414332, abs=1e-9)


def test_pfaffian_equals_toeplitz(limit_state, lattice_state):
    for sep in (1, 2, 3, 5):
        a = complex(spin_spin_correlation(limit_state, [0, sep]))
        b = complex(toeplitz_correlation(limit_state, sep))
        assert abs(a - b) < 1e-10
    for sep in (1, 2, 3, 4):
        a = complex(spin_spin_correlation(lattice_state, [0, sep]))
        b = complex(toeplitz_correlation(lattice_state, sep))
        assert abs(a - b) < 1e-12


def test_limit_correlations_real_bounded_decreasing(limit_state, limit_decay):
    prev = 1.0
    for d in range(1, 13):
        val = complex(toeplitz_correlation(limit_state, d))
        assert abs(val.imag) < 1e-9
        assert 0.0 < val.real < 1.0
        assert val.real < prev
        prev = val.real
    assert limit_decay[12] < limit_decay[6] < limit_decay[1]


def test_limit_decay_structure(limit_decay):
    # raw log-log slope over d in [6, 12] is steepened by the exponential
    # factor the wavelet smearing introduces in the symbol
    ds = np.arange(6, 13, dtype=float)
    vals = np.array([limit_decay[int(d)] for d in ds])
    naive = np.polyfit(np.log(ds), np.log(vals), 1)[0]
    assert -3.3 < naive < -2.9
    # three-parameter model |ss(d)| = c G^d d^x separates the exponential
    # factor from the power law; the power matches the chain's -1/4
    X = np.column_stack([np.ones_like(ds), ds, np.log(ds)])
    coef, *_ = np.linalg.lstsq(X, np.log(vals), rcond=None)
    G_fit, x_fit = math.exp(coef[1]), coef[2]
    assert 0.70 < G_fit < 0.74
    assert -0.30 < x_fit < -0.15


def test_lattice_control_exponent(lattice_state):
    # the bare chain has no smearing factor: direct fit recovers -1/4
    ds = np.arange(6, 13, dtype=float)
    vals = np.array([abs(complex(toeplitz_correlation(lattice_state, int(d))))
                     for d in ds])
    slope = np.polyfit(np.log(ds), np.log(vals), 1)[0]
    assert slope == pytest.approx(-0.25, abs=0.05)


def test_massive_thermal_decays_faster_than_limit(limit_decay, d8):
    massive = QuasiFreeState.massive_thermal(d8, 0.5, 2.0)
    prev = 1.0
    for d in (1, 2, 3):
        vm = abs(complex(toeplitz_correlation(massive, d)))
        assert vm < limit_decay[d]
        assert vm < prev
        prev = vm
