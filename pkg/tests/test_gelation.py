import numpy as np
import pytest

from gelkit import (
    ConversionState,
    CriterionKind,
    CriterionUndefined,
    KappaMix,
    SpecificationError,
    criterion_general,
    criterion_two_type_polynomial,
    criterion_two_type_structural,
    find_gel_time,
    integrate_moments,
    k_matrix,
    kappa_mix,
    moment_set,
)
from conftest import a2b5_system, flory_system, single_2_5_system, three_type_system


def test_flory_homopolymer_anchor(flory3):
    # f interchangeable groups per monomer gel at conversion 1/(f - 1)
    traj = integrate_moments(flory3)
    report = find_gel_time(traj)
    assert report.gelled
    assert report.conversions_at_gel.p[0] == pytest.approx(0.5, abs=1e-10)


def test_directed_balanced_product_anchor():
    # equal numbers of A- and B-ends: transition at p_A p_B = 1/4
    traj = integrate_moments(a2b5_system(5.0 / 7.0, 0.0))
    report = find_gel_time(traj)
    pa, pb = report.conversions_at_gel.p
    assert pa * pb == pytest.approx(0.25, abs=1e-9)
    assert pa == pytest.approx(pb, abs=1e-9)


def test_three_criteria_share_the_root():
    for spec in (
        single_2_5_system(),
        single_2_5_system(0.5),
        a2b5_system(0.5, 1.0),
        three_type_system(0.25, 0.25),
    ):
        traj = integrate_moments(spec)
        roots = {}
        for kind in CriterionKind:
            report = find_gel_time(traj, kind)
            assert report.gelled, f"{kind} found no transition"
            roots[kind] = report.t_gel
        spread = max(roots.values()) - min(roots.values())
        assert spread < 1e-8, f"criterion roots spread {spread}"


def test_polynomial_equals_scaled_structural():
    spec = single_2_5_system()
    moments = moment_set(spec.distribution)
    for pa, pb in ((0.05, 0.02), (0.1, 0.15), (0.3, 0.4), (0.9, 0.7)):
        conv = ConversionState(t=0.0, p=(pa, pb))
        kap = kappa_mix(spec, conv)
        structural = criterion_two_type_structural(moments, conv, kap).residual
        poly = criterion_two_type_polynomial(moments, conv, kap).residual
        assert poly == pytest.approx(moments.nu_10 * moments.nu_01 * structural, rel=1e-12)


def test_general_matches_structural_sign_flip():
    spec = a2b5_system(0.6, 0.5)
    moments = moment_set(spec.distribution)
    for pa, pb in ((0.1, 0.05), (0.4, 0.3), (0.8, 0.6)):
        conv = ConversionState(t=0.0, p=(pa, pb))
        kap = kappa_mix(spec, conv)
        structural = criterion_two_type_structural(moments, conv, kap).residual
        general = criterion_general(moments, conv, spec.weights).residual
        assert general == pytest.approx(-structural, rel=1e-12)


def test_zero_conversion_limits():
    spec = single_2_5_system()
    moments = moment_set(spec.distribution)
    at_zero = ConversionState(t=0.0, p=(0.0, 0.0))

    # the determinant extends continuously: an empty bond set cannot branch
    assert criterion_general(moments, at_zero, spec.weights).residual == 1.0

    # the polynomial form is defined everywhere; at p = 0 it collapses to
    # -nu_10 nu_01 regardless of the mixing weight
    value = criterion_two_type_polynomial(moments, at_zero, KappaMix(0.5)).residual
    assert value == pytest.approx(-moments.nu_10 * moments.nu_01, rel=1e-12)

    # the structural ratios need bonds in both lanes
    with pytest.raises(CriterionUndefined):
        criterion_two_type_structural(moments, at_zero, KappaMix(0.5))
    with pytest.raises(CriterionUndefined):
        kappa_mix(spec, at_zero)

    # approaching zero conversion the structural residual tends to -1
    tiny = ConversionState(t=0.0, p=(1e-9, 1e-9))
    kap = kappa_mix(spec, tiny)
    assert criterion_two_type_structural(moments, tiny, kap).residual == pytest.approx(-1.0, abs=1e-7)


def test_kappa_mix_weighted_ratio():
    spec = single_2_5_system(0.5)
    conv = ConversionState(t=0.0, p=(0.2, 0.1))
    # mu = (0.4, 0.5); self-rate ratio 0.5 discounts the type-1 pool
    assert kappa_mix(spec, conv).kappa == pytest.approx(0.4 / (0.4 + 0.5 * 0.5))
    with pytest.raises(SpecificationError):
        kappa_mix(flory_system(3), conv)


def test_kappa_bounds_enforced():
    with pytest.raises(SpecificationError):
        KappaMix(-0.1)
    with pytest.raises(SpecificationError):
        KappaMix(1.1)
    assert KappaMix(1.0).kappa == 1.0


def test_k_matrix_rows_are_distributions(single_2_5):
    conv = ConversionState(t=0.0, p=(0.2, 0.1))
    km = k_matrix(single_2_5, conv)
    rows = np.array(km.rows)
    assert rows.shape == (2, 2)
    assert np.allclose(rows.sum(axis=1), 1.0)
    assert rows[0, 0] == 0.0  # type 0 cannot self-bond
    # row 1 mixes partners in proportion to weighted bond counts
    assert rows[1, 0] == pytest.approx(kappa_mix(single_2_5, conv).kappa)


def test_no_gel_within_horizon_reported():
    traj = integrate_moments(a2b5_system(0.999, 0.0))
    report = find_gel_time(traj)
    assert not report.gelled
    assert report.status == "none within horizon"
    assert report.t_gel is None


def test_directed_infeasible_compositions_do_not_gel():
    # too few A-ends: nu_01/nu_10 > 4 keeps the branching product below 1
    for alpha in (0.2, 0.3, 0.95):
        traj = integrate_moments(a2b5_system(alpha, 0.0))
        assert not find_gel_time(traj).gelled


def test_report_bracket_and_residuals(single_2_5):
    traj = integrate_moments(single_2_5)
    report = find_gel_time(traj)
    lo, hi = report.bracket
    assert lo < report.t_gel < hi or report.t_gel in (lo, hi)
    assert report.width == pytest.approx(hi - lo)
    assert report.width <= 1e-9
    assert report.horizon == traj.t_end
    # recorded residual samples must straddle the root
    values = np.array(report.residual_values)
    assert values.min() < 0.0 < values.max()
