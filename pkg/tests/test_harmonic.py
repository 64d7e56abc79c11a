import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasifrag import CapExceeded, ModeSet, SpecError
from quasifrag.boson import boson_entropy
from quasifrag.hafnian import hafnian
from quasifrag.harmonic import (
    HarmonicModel,
    excited_norm,
    harmonic_excited_renyi2,
    harmonic_ground_renyi2,
    replica_moment,
)


def test_model_validation():
    with pytest.raises(SpecError):
        HarmonicModel(8, 0.0)
    with pytest.raises(SpecError):
        HarmonicModel(8, -1.0)
    assert np.min(HarmonicModel(9, 0.3).omega) == pytest.approx(0.3)


def test_ground_state_examples():
    values = [harmonic_ground_renyi2(HarmonicModel(16, m), 8).value for m in (1.0, 5.0, 10.0)]
    assert values[2] > 0
    assert values[2] < 1e-3
    assert values[0] > values[1] > values[2]
    model = HarmonicModel(16, 10.0)
    assert harmonic_ground_renyi2(model, 0).value == 0.0
    assert harmonic_ground_renyi2(model, 16).value == 0.0


def test_ground_covariances_satisfy_uncertainty():
    X, P = HarmonicModel(10, 0.5).covariances()
    np.testing.assert_allclose(X @ P, 0.25 * np.eye(10), atol=1e-12)


@pytest.mark.parametrize("L, m", [(4, 1.0), (7, 0.5), (12, 10.0)])
def test_no_excitation_equals_ground(L, m):
    model = HarmonicModel(L, m)
    for L_A in range(L + 1):
        a = harmonic_excited_renyi2(model, (), L_A).value
        b = harmonic_ground_renyi2(model, L_A).value
        assert abs(a - b) < 1e-10


def test_excited_norm_is_one():
    assert abs(excited_norm(HarmonicModel(8, 2.0), ModeSet(8, (0, 3, 5))) - 1.0) < 1e-12


def test_single_excitation_near_free_boson():
    model = HarmonicModel(12, 10.0)
    S = harmonic_excited_renyi2(model, (0,), 6).value
    ref = boson_entropy(12, 6, (0,), 2) + harmonic_ground_renyi2(model, 6).value
    assert abs(S - ref) < 0.05 * ref


def test_full_pattern_minus_ground_near_free_boson():
    model = HarmonicModel(12, 10.0)
    K = tuple(range(0, 12, 2))
    excess = harmonic_excited_renyi2(model, K, 6).value - harmonic_ground_renyi2(model, 6).value
    ref = boson_entropy(12, 6, K, 2)
    assert abs(excess - ref) < 0.10 * ref


def test_large_mass_trend():
    K = (0, 4)
    gaps = []
    for m in (2.0, 5.0, 10.0, 20.0):
        model = HarmonicModel(8, m)
        gaps.append(
            max(
                abs(
                    harmonic_excited_renyi2(model, K, L_A).value
                    - harmonic_ground_renyi2(model, L_A).value
                    - boson_entropy(8, L_A, K, 2)
                )
                for L_A in range(1, 8)
            )
        )
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_cap():
    model = HarmonicModel(16, 2.0)
    with pytest.raises(CapExceeded):
        harmonic_excited_renyi2(model, tuple(range(7)), 8)
    with pytest.raises(SpecError):
        harmonic_excited_renyi2(model, ModeSet(8, (0,)), 4)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 9), st.sampled_from([0.5, 2.0, 10.0]), st.data())
def test_complement_symmetry(L, m, data):
    K = tuple(sorted(data.draw(st.sets(st.integers(0, L - 1), max_size=3))))
    L_A = data.draw(st.integers(0, L))
    model = HarmonicModel(L, m)
    a = harmonic_excited_renyi2(model, K, L_A).value
    b = harmonic_excited_renyi2(model, K, L - L_A).value
    assert abs(a - b) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_wick_sum_order_independent(seed):
    model = HarmonicModel(8, 2.0)
    M = replica_moment(model, ModeSet(8, (0, 3)), 3).matching_matrix()
    perm = np.random.default_rng(seed).permutation(M.shape[0])
    base = hafnian(M)
    assert abs(hafnian(M[np.ix_(perm, perm)]) - base) < 1e-12 * max(1.0, abs(base))
