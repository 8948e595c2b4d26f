import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gelkit import (
    FunctionalityVector,
    MonomerDistribution,
    SpecificationError,
    SystemSpec,
    WeightMatrix,
    moment_set,
    partial_moment,
    require_valid,
    validate_spec,
)
from conftest import build_system, single_2_5_system, three_type_system


def test_functionality_vector_coerces_and_validates():
    fv = FunctionalityVector((2, 5))
    assert fv.counts == (2, 5)
    assert fv.r == 2
    assert fv[1] == 5
    with pytest.raises(SpecificationError):
        FunctionalityVector(())
    with pytest.raises(SpecificationError):
        FunctionalityVector((2, -1))
    with pytest.raises(SpecificationError):
        FunctionalityVector((1.5,))


def test_distribution_rejects_mixed_dimensions():
    with pytest.raises(SpecificationError):
        MonomerDistribution(((FunctionalityVector((2,)), 0.5), (FunctionalityVector((1, 1)), 0.5)))


def test_from_dict_round_trip():
    dist = MonomerDistribution.from_dict({(2, 0): 0.25, (0, 5): 0.75})
    assert dist.r == 2
    assert dist.fractions() == (0.25, 0.75)
    assert dist.species()[1].counts == (0, 5)


def test_moment_set_single_2_5():
    ms = moment_set(single_2_5_system().distribution)
    assert ms.nu1 == (2.0, 5.0)
    assert ms.nu2 == ((4.0, 10.0), (10.0, 25.0))
    assert ms.nu_10 == 2.0 and ms.nu_01 == 5.0
    assert ms.nu_20 == 4.0 and ms.nu_02 == 25.0 and ms.nu_11 == 10.0


def test_moment_set_three_type_mixture():
    # alpha (2,0), beta (0,2), rest (0,5): nu built per species
    a, b = 0.25, 0.25
    ms = moment_set(three_type_system(a, b).distribution)
    assert ms.nu1 == pytest.approx((2 * a, 2 * b + 5 * (1 - a - b)))
    assert ms.nu2[0][0] == pytest.approx(4 * a)
    assert ms.nu2[1][1] == pytest.approx(4 * b + 25 * (1 - a - b))
    assert ms.nu2[0][1] == 0.0


def test_partial_moment_exponent_checks():
    dist = single_2_5_system().distribution
    assert partial_moment(dist, (0, 0)) == 1.0
    assert partial_moment(dist, (1, 1)) == 10.0
    with pytest.raises(SpecificationError):
        partial_moment(dist, (1,))
    with pytest.raises(SpecificationError):
        partial_moment(dist, (3, 0))


def test_validate_flags_bad_fractions_and_weights():
    spec = build_system((((2, 0), 0.6), ((0, 5), 0.6)), ((0.0, 1.0), (1.0, 0.0)))
    report = validate_spec(spec)
    assert not report.ok
    assert any("sum to" in v for v in report.violations)

    asym = build_system((((2, 5), 1.0),), ((0.0, 1.0), (0.5, 1.0)))
    report = validate_spec(asym)
    assert any("asymmetric" in v for v in report.violations)
    with pytest.raises(SpecificationError):
        require_valid(asym)


def test_validate_rejects_inert_species_and_zero_matrix():
    spec = build_system((((0, 0), 1.0),), ((0.0, 1.0), (1.0, 1.0)))
    assert not validate_spec(spec).ok

    dead = build_system((((2, 5), 1.0),), ((0.0, 0.0), (0.0, 0.0)))
    report = validate_spec(dead)
    assert any("identically zero" in v for v in report.violations)


def test_row_scale_is_advisory_not_violation():
    report = validate_spec(single_2_5_system())
    assert report.ok
    assert any("time unit" in a for a in report.advisories)


@st.composite
def small_distributions(draw):
    r = draw(st.integers(min_value=1, max_value=3))
    n_species = draw(st.integers(min_value=1, max_value=3))
    seen = set()
    entries = []
    for _ in range(n_species):
        counts = tuple(draw(st.integers(min_value=0, max_value=4)) for _ in range(r))
        if counts in seen or all(c == 0 for c in counts):
            continue
        seen.add(counts)
        entries.append(counts)
    if not entries:
        entries = [tuple(1 for _ in range(r))]
    raw = [draw(st.integers(min_value=1, max_value=9)) for _ in entries]
    total = sum(raw)
    return MonomerDistribution(
        tuple((FunctionalityVector(c), w / total) for c, w in zip(entries, raw))
    )


@given(small_distributions())
def test_moments_match_direct_sums(dist):
    ms = moment_set(dist)
    r = dist.r
    for k in range(r):
        direct = sum(frac * fv[k] for fv, frac in dist.entries)
        assert math.isclose(ms.nu1[k], direct, rel_tol=0, abs_tol=1e-12)
    nu2 = np.array(ms.nu2)
    assert np.allclose(nu2, nu2.T)
    for m in range(r):
        for n in range(r):
            direct = sum(frac * fv[m] * fv[n] for fv, frac in dist.entries)
            assert math.isclose(nu2[m][n], direct, rel_tol=0, abs_tol=1e-12)


@given(small_distributions())
def test_second_moment_dominates_first_squared(dist):
    # E[I_k^2] >= (E[I_k])^2 for every group type
    ms = moment_set(dist)
    for k in range(dist.r):
        assert ms.nu2[k][k] >= ms.nu1[k] ** 2 - 1e-12


def test_weight_matrix_must_be_square():
    with pytest.raises(SpecificationError):
        WeightMatrix.from_rows(((0.0, 1.0),))
