from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasifrag import Block, CapExceeded, OccupancySpec, SpecError, UnitPattern
from quasifrag.experiments import fermion_prediction
from quasifrag.ising import (
    EVEN,
    ODD,
    IsingExcitation,
    IsingModel,
    degenerate_partners,
    ed_oracle_entropy,
    excitation_catalog,
    ising_correlation_entropy,
    is_physical,
    pattern_excitation,
    physical_excitation,
    sector_modes,
    spin_hamiltonian,
    translation_operator,
)


def test_model_validation():
    with pytest.raises(SpecError):
        IsingModel(7, 1.0)
    with pytest.raises(SpecError):
        IsingModel(8, -0.5)
    with pytest.raises(SpecError):
        IsingExcitation("middle", ())


def test_paramagnet_limit():
    model = IsingModel(10, 1e4)
    for L_A in range(11):
        assert ising_correlation_entropy(model, IsingExcitation.ground(), L_A, 1).value < 1e-6


def test_ground_state_matches_ed():
    model = IsingModel(8, 1.0)
    a = ising_correlation_entropy(model, IsingExcitation.ground(), 4, 1).value
    b = ed_oracle_entropy(model, IsingExcitation.ground(), 4, 1).value
    assert a > 0.1
    assert abs(a - b) < 1e-8


def test_full_pattern_matches_ed():
    model = IsingModel(8, 1.0)
    exc = pattern_excitation(model, OccupancySpec.full(UnitPattern(2, (0,)), 4))
    a = ising_correlation_entropy(model, exc, 4, 1).value
    b = ed_oracle_entropy(model, exc, 4, 1).value
    assert abs(a - b) < 1e-8


def test_single_excitation_matches_ed():
    model = IsingModel(10, 2.0)
    exc = physical_excitation(model, ODD, (1,))
    a = ising_correlation_entropy(model, exc, 5, 2).value
    b = ed_oracle_entropy(model, exc, 5, 2).value
    assert abs(a - b) < 1e-8


def test_empty_subsystem():
    model = IsingModel(8, 1.0)
    assert ising_correlation_entropy(model, IsingExcitation.ground(), 0, 1).value == 0.0
    assert ed_oracle_entropy(model, IsingExcitation.ground(), 0, 1).value < 1e-14


def test_parity_rejection():
    model = IsingModel(8, 1.0)
    with pytest.raises(SpecError, match="parity"):
        physical_excitation(model, EVEN, (0,))
    with pytest.raises(SpecError):
        physical_excitation(model, EVEN, (0, 9))


def test_vacuum_parity_flips_at_critical_field():
    # the odd-sector vacuum carries odd parity only in the ordered phase
    assert sector_modes(IsingModel(8, 0.5), ODD).vacuum_parity == -1
    assert sector_modes(IsingModel(8, 2.0), ODD).vacuum_parity == 1
    assert sector_modes(IsingModel(8, 2.0), EVEN).vacuum_parity == 1


def test_ed_cap():
    model = IsingModel(14, 1.0)
    with pytest.raises(CapExceeded):
        ed_oracle_entropy(model, IsingExcitation.ground(), 7, 1)


def test_catalog_is_unambiguous():
    model = IsingModel(8, 1.0)
    catalog = excitation_catalog(model)
    assert len(catalog) == 8
    for name, exc in catalog:
        assert is_physical(model, exc)
        assert degenerate_partners(model, exc) == 1


def test_catalog_drops_degenerate_state():
    # the full l=2 pattern at L=12 shares energy, momentum and parity with five other states
    model = IsingModel(12, 1.0)
    exc = IsingExcitation(EVEN, tuple(range(0, 12, 2)))
    assert degenerate_partners(model, exc) == 6
    assert "l2_full_even" not in dict(excitation_catalog(model))


def test_spin_hamiltonian_commutes_with_translation():
    model = IsingModel(6, 0.7)
    H = spin_hamiltonian(model)
    T = translation_operator(6)
    np.testing.assert_allclose(H @ T, T @ H, atol=1e-12)


def test_catalog_agreement_small():
    for h in (0.5, 1.0, 2.0):
        model = IsingModel(8, h)
        for name, exc in excitation_catalog(model):
            for L_A in range(9):
                for n in (1, 2):
                    a = ising_correlation_entropy(model, exc, L_A, n).value
                    b = ed_oracle_entropy(model, exc, L_A, n).value
                    assert abs(a - b) < 1e-7, (h, name, L_A, n)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([8, 10, 16, 24]),
    st.sampled_from([0.3, 1.0, 2.5]),
    st.data(),
)
def test_complement_symmetry(L, h, data):
    model = IsingModel(L, h)
    sector = data.draw(st.sampled_from([EVEN, ODD]))
    occ = data.draw(st.sets(st.integers(0, L - 1), max_size=L // 2))
    exc = IsingExcitation(sector, tuple(occ))
    L_A = data.draw(st.integers(0, L))
    n = data.draw(st.sampled_from([1.0, 2.0]))
    a = ising_correlation_entropy(model, exc, L_A, n).value
    b = ising_correlation_entropy(model, exc, L - L_A, n).value
    assert abs(a - b) < 1e-9


def _deviation(L, spec_builder, x):
    spec = spec_builder(L)
    model = IsingModel(L, 1.0)
    exc = pattern_excitation(model, spec)
    S = ising_correlation_entropy(model, exc, int(x * L), 1).value
    return abs(S / L - fermion_prediction(spec, 1.0, x))


def test_full_pattern_at_critical_field_is_exact():
    full = lambda L: OccupancySpec.full(UnitPattern(2, (0,)), L // 2)
    for L in (12, 24, 48):
        for x in (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)):
            assert _deviation(L, full, x) < 1e-12


def test_mixed_pattern_deviation_shrinks():
    def mixed(L):
        return OccupancySpec(
            L, (Block(UnitPattern(2, (0,)), L // 6, 0), Block(UnitPattern(3, (0, 1)), L // 6, L // 3))
        )

    for x in (Fraction(1, 4), Fraction(1, 2)):
        devs = [_deviation(L, mixed, x) for L in (24, 48)]
        assert devs[0] > devs[1]
