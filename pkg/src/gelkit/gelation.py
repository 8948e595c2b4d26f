"""Gel-point criteria and the gel-time search along a moment trajectory.

A gel transition appears when the expected size of the component found by
following a random bond end diverges.  Three equivalent detectors are
provided: a structural criterion and a closed polynomial for two-type
systems where type-0 groups bond only to type-1 ("in" bonds) while type-1
groups may also bond among themselves, and a determinant criterion for any
number of group types built from the size-biased branching matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .chemistry import MomentSet, SystemSpec
from .degrees import mu_from_p
from .errors import CriterionUndefined, SpecificationError
from .kinetics import ConversionState, MomentTrajectory, conversion

#: criteria are evaluated only once every active mu_k exceeds this times nu_k
MU_FLOOR = 1e-14

#: gel brackets are bisected to this relative width in t
BISECT_REL_WIDTH = 1e-10

_SCAN_POINTS = 513


class CriterionKind(str, Enum):
    TWO_TYPE_POLYNOMIAL = "two_type_polynomial"
    TWO_TYPE_STRUCTURAL = "two_type_structural"
    GENERAL_DETERMINANT = "general_determinant"


@dataclass(frozen=True)
class GelCriterionValue:
    """A criterion residual at one time; the root marks the transition."""

    t: float
    residual: float
    kind: CriterionKind


@dataclass(frozen=True)
class KappaMix:
    """Mixing weight between the two branch kinds behind a type-1 bond end.

    Following a converted type-1 group, the partner is a type-0 group with
    probability kappa and another type-1 group otherwise.  For bonding
    weights [[0, 1], [1, w]] this is mu_0 / (mu_0 + w mu_1).
    """

    kappa: float

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 1.0:
            raise SpecificationError(f"kappa must lie in [0, 1], got {self.kappa!r}")


@dataclass(frozen=True)
class KMatrix:
    """Row-stochastic partner-type kernel over the active group types.

    Entry (m, j) is the probability that the partner of a converted type-m
    group is a type-j group: proportional to the bonding weight w_mj times
    the concentration of converted type-j ends.
    """

    rows: tuple[tuple[float, ...], ...]
    active: tuple[int, ...]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


@dataclass(frozen=True, eq=False)
class GelReport:
    """Outcome of a gel-time search along one trajectory."""

    t_gel: float | None
    conversions_at_gel: ConversionState | None
    criterion: CriterionKind
    bracket: tuple[float, float] | None
    width: float | None
    horizon: float
    residual_times: tuple[float, ...]
    residual_values: tuple[float, ...]

    @property
    def gelled(self) -> bool:
        return self.t_gel is not None

    @property
    def status(self) -> str:
        return "gel" if self.gelled else "none within horizon"


def _active_lanes(nu1: np.ndarray, w: np.ndarray) -> list[int]:
    """Group types that exist and can still reach a partner.

    Types with nu_k = 0 are absent; a type whose weight row vanishes on the
    remaining active set can never bond and is removed as well, iterating
    until stable (removals can strand former partners).
    """
    active = [k for k in range(len(nu1)) if nu1[k] > 0.0]
    changed = True
    while changed:
        changed = False
        for k in list(active):
            if all(w[k, j] == 0.0 for j in active):
                active.remove(k)
                changed = True
    return active


def _mu_gate(nu1: np.ndarray, p: np.ndarray, active) -> np.ndarray:
    mu = p * nu1
    for k in active:
        if mu[k] <= MU_FLOOR * nu1[k]:
            raise CriterionUndefined(f"no converted type-{k} groups yet, criterion undefined")
    return mu


def _derivative_matrix(moments: MomentSet, p: np.ndarray, active) -> np.ndarray:
    """Excess-distribution derivative block D_mj on the active lanes.

    D_mj is the expected number of additional type-j bonds on a monomer
    reached through one of its type-m bonds: p_j nu2_mj / nu_m, less p_j on
    the diagonal for the bond already used.
    """
    nu1 = moments.nu1_array
    nu2 = moments.nu2_array
    idx = np.asarray(active, dtype=int)
    sub1 = nu1[idx]
    sub2 = nu2[np.ix_(idx, idx)]
    pa = p[idx]
    d = pa[None, :] * sub2 / sub1[:, None]
    d[np.diag_indices_from(d)] -= pa
    return d


def _k_rows(w: np.ndarray, mu: np.ndarray, active) -> np.ndarray:
    idx = np.asarray(active, dtype=int)
    raw = w[np.ix_(idx, idx)] * mu[idx][None, :]
    sums = raw.sum(axis=1)
    if np.any(sums <= 0.0):
        k = active[int(np.argmin(sums))]
        raise CriterionUndefined(f"active type {k} has no converted partner ends")
    return raw / sums[:, None]


def k_matrix(spec: SystemSpec, conv: ConversionState) -> KMatrix:
    """Partner-type kernel at the given conversion state."""
    moments_nu1 = _spec_moments(spec).nu1_array
    w = spec.weights.array
    active = _active_lanes(moments_nu1, w)
    p = conv.p_array
    mu = _mu_gate(moments_nu1, p, active)
    rows = _k_rows(w, mu, active)
    return KMatrix(rows=tuple(tuple(row) for row in rows), active=tuple(active))


def _spec_moments(spec: SystemSpec) -> MomentSet:
    from .chemistry import moment_set

    return moment_set(spec.distribution)


def kappa_mix(spec: SystemSpec, conv: ConversionState) -> KappaMix:
    """Mixing weight for the two-type criteria, from the weight matrix.

    Requires the two-type bond structure: type 0 never self-bonds and the
    cross rate is positive.  The self-rate enters through its ratio to the
    cross rate, so any overall scale of W drops out.
    """
    if spec.r != 2:
        raise SpecificationError("kappa_mix requires exactly two group types")
    w = spec.weights.array
    if w[0, 0] != 0.0 or w[0, 1] <= 0.0:
        raise SpecificationError(
            "kappa_mix requires bonding weights of the form [[0, a], [a, b]] with a > 0"
        )
    w_self = w[1, 1] / w[0, 1]
    nu1 = _spec_moments(spec).nu1_array
    mu = conv.p_array * nu1
    denom = mu[0] + w_self * mu[1]
    if denom <= 0.0:
        raise CriterionUndefined("no converted groups yet, kappa undefined")
    return KappaMix(kappa=float(mu[0] / denom))


def criterion_two_type_structural(
    moments: MomentSet, conv: ConversionState, kappa: KappaMix
) -> GelCriterionValue:
    """Structural two-type criterion from the excess-distribution slopes.

    Builds the slopes of the generating functions for the monomer reached
    through an in-bond and through a type-1 bond, mixes the latter with
    weight kappa, and returns the determinant-like residual whose first
    root is the gel point.  Negative before the transition (-1 at p -> 0).
    """
    if moments.r != 2:
        raise SpecificationError("structural criterion requires exactly two group types")
    dm = mu_from_p(moments, conv)
    mu10, mu01 = dm.mu_10, dm.mu_01
    if mu10 <= 0.0 or mu01 <= 0.0:
        raise CriterionUndefined("criterion undefined until both group types have bonds")
    ux_in = dm.mu_20 / mu10 - 1.0
    uy_in = dm.mu_11 / mu10
    ux_bi = dm.mu_11 / mu01
    uy_bi = dm.mu_02 / mu01 - 1.0
    k = kappa.kappa
    ux_plus = k * ux_in + (1.0 - k) * ux_bi
    uy_plus = k * uy_in + (1.0 - k) * uy_bi
    residual = ux_plus * uy_bi - (uy_plus - 1.0) * (ux_bi - 1.0)
    return GelCriterionValue(t=conv.t, residual=float(residual), kind=CriterionKind.TWO_TYPE_STRUCTURAL)


def criterion_two_type_polynomial(
    moments: MomentSet, conv: ConversionState, kappa: KappaMix
) -> GelCriterionValue:
    """Closed polynomial form of the two-type criterion.

    Algebraically this equals nu_10 nu_01 times the structural residual, so
    the two share their roots; keeping both guards against transcription
    drift in either.
    """
    if moments.r != 2:
        raise SpecificationError("polynomial criterion requires exactly two group types")
    nu10, nu01 = moments.nu_10, moments.nu_01
    nu20, nu02, nu11 = moments.nu_20, moments.nu_02, moments.nu_11
    pa, pb = conv.p
    k = kappa.kappa
    residual = (
        (nu01 - nu02) * (k * (1.0 + pa) - 1.0) * nu10
        - ((nu01 * nu20 - nu02 * nu20 + nu11**2) * pa - nu01 * nu11) * k
    ) * pb + nu10 * (nu11 * pa - nu01)
    return GelCriterionValue(t=conv.t, residual=float(residual), kind=CriterionKind.TWO_TYPE_POLYNOMIAL)


def criterion_general(
    moments: MomentSet, conv: ConversionState, weights
) -> GelCriterionValue:
    """Determinant criterion det(I - K D) for any number of group types.

    K is the partner-type kernel, D the excess derivative block; their
    product is the mean offspring matrix of the size-biased branching
    process, which loses positivity exactly at the transition.  Equals +1
    at p -> 0 and changes sign at the gel point.
    """
    w = weights.array if hasattr(weights, "array") else np.asarray(weights, dtype=float)
    nu1 = moments.nu1_array
    p = conv.p_array
    active = _active_lanes(nu1, w)
    if not active or all(p[k] * nu1[k] <= MU_FLOOR * nu1[k] for k in active):
        # no types can bond, or nothing has bonded yet: the branching matrix
        # is zero and the determinant extends continuously to 1
        return GelCriterionValue(t=conv.t, residual=1.0, kind=CriterionKind.GENERAL_DETERMINANT)
    mu = _mu_gate(nu1, p, active)
    kmat = _k_rows(w, mu, active)
    d = _derivative_matrix(moments, p, active)
    b = kmat @ d
    residual = float(np.linalg.det(np.eye(len(active)) - b))
    return GelCriterionValue(t=conv.t, residual=residual, kind=CriterionKind.GENERAL_DETERMINANT)


def _residual_fn(traj: MomentTrajectory, kind: CriterionKind):
    moments = traj.moments
    spec = traj.spec

    def evaluate(t: float) -> float:
        conv = conversion(traj, t)
        if kind is CriterionKind.GENERAL_DETERMINANT:
            return criterion_general(moments, conv, spec.weights).residual
        kappa = kappa_mix(spec, conv)
        if kind is CriterionKind.TWO_TYPE_STRUCTURAL:
            return criterion_two_type_structural(moments, conv, kappa).residual
        return criterion_two_type_polynomial(moments, conv, kappa).residual

    return evaluate


def find_gel_time(
    traj: MomentTrajectory, kind: CriterionKind = CriterionKind.GENERAL_DETERMINANT
) -> GelReport:
    """Locate the first sign change of a criterion residual along a trajectory.

    Scans the accepted integrator steps merged with a uniform refinement,
    skipping early times where the criterion is undefined, then bisects the
    bracketing interval to a relative width of 1e-10 using the dense
    trajectory output.  Reports "none within horizon" when the residual
    never changes sign before the trajectory ends.
    """
    kind = CriterionKind(kind)
    evaluate = _residual_fn(traj, kind)
    grid = np.unique(np.concatenate([traj.times, np.linspace(0.0, traj.t_end, _SCAN_POINTS)]))

    ts: list[float] = []
    rs: list[float] = []
    for t in grid:
        try:
            rs.append(evaluate(float(t)))
        except CriterionUndefined:
            continue
        ts.append(float(t))
    if not ts:
        raise CriterionUndefined("criterion undefined over the whole trajectory")

    root_bracket = None
    for i in range(len(ts) - 1):
        if rs[i] == 0.0:
            root_bracket = (ts[i], ts[i])
            break
        if rs[i] * rs[i + 1] < 0.0:
            root_bracket = (ts[i], ts[i + 1])
            break
    else:
        if rs and rs[-1] == 0.0:
            root_bracket = (ts[-1], ts[-1])

    if root_bracket is None:
        return GelReport(
            t_gel=None,
            conversions_at_gel=None,
            criterion=kind,
            bracket=None,
            width=None,
            horizon=traj.t_end,
            residual_times=tuple(ts),
            residual_values=tuple(rs),
        )

    lo, hi = root_bracket
    if lo < hi:
        r_lo = evaluate(lo)
        while hi - lo > BISECT_REL_WIDTH * max(hi, 1e-300):
            mid = 0.5 * (lo + hi)
            r_mid = evaluate(mid)
            if r_mid == 0.0:
                lo = hi = mid
                break
            if (r_mid > 0.0) == (r_lo > 0.0):
                lo, r_lo = mid, r_mid
            else:
                hi = mid
    t_gel = 0.5 * (lo + hi)
    return GelReport(
        t_gel=float(t_gel),
        conversions_at_gel=conversion(traj, t_gel),
        criterion=kind,
        bracket=(float(lo), float(hi)),
        width=float(hi - lo),
        horizon=traj.t_end,
        residual_times=tuple(ts),
        residual_values=tuple(rs),
    )
