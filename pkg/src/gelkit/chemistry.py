"""Monomer systems: functionality vectors, bonding weights, initial moments.

A polymerizing system is described by a list of monomer species, each
carrying a fixed number of functional groups of r distinct types, together
with a symmetric r x r matrix of relative bonding rates between group types.
Everything downstream (moment kinetics, degree distributions, gel criteria,
size statistics) consumes the first and second partial moments of the
initial functionality distribution computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpecificationError

#: total species fraction must match 1 this closely
MASS_TOLERANCE = 1e-12

#: partial moments take exponents 0, 1 or 2; higher moments are never needed
ALLOWED_EXPONENTS = (0, 1, 2)


@dataclass(frozen=True)
class FunctionalityVector:
    """Counts of functional groups of each type carried by one monomer.

    Entry k is the number of groups of type k.  Counts are non-negative
    integers; a species may carry zero groups of every type, in which case
    it never reacts.
    """

    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) == 0:
            raise SpecificationError("functionality vector must have at least one slot")
        coerced = []
        for c in self.counts:
            if isinstance(c, bool) or float(c) != int(c):
                raise SpecificationError(f"functionality counts must be integers, got {c!r}")
            if int(c) < 0:
                raise SpecificationError(f"functionality counts must be non-negative, got {c!r}")
            coerced.append(int(c))
        object.__setattr__(self, "counts", tuple(coerced))

    @property
    def r(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __getitem__(self, k: int) -> int:
        return self.counts[k]


@dataclass(frozen=True)
class MonomerDistribution:
    """Initial distribution of monomer species over functionality vectors.

    Each entry pairs a functionality vector with the fraction of monomers
    of that species.  Fractions must be positive and sum to one; species
    must be pairwise distinct.  Those conditions are reported (not assumed)
    by :func:`validate_spec`.
    """

    entries: tuple[tuple[FunctionalityVector, float], ...]

    def __post_init__(self):
        if len(self.entries) == 0:
            raise SpecificationError("monomer distribution must contain at least one species")
        norm = []
        for fv, frac in self.entries:
            if not isinstance(fv, FunctionalityVector):
                fv = FunctionalityVector(tuple(fv))
            norm.append((fv, float(frac)))
        r = norm[0][0].r
        for fv, _ in norm:
            if fv.r != r:
                raise SpecificationError(
                    f"all species must list the same number of group types, got {fv.r} and {r}"
                )
        object.__setattr__(self, "entries", tuple(norm))

    @classmethod
    def from_dict(cls, table: dict) -> "MonomerDistribution":
        """Build from a mapping of functionality tuples to fractions."""
        return cls(tuple((FunctionalityVector(tuple(k)), v) for k, v in table.items()))

    @property
    def r(self) -> int:
        return self.entries[0][0].r

    def species(self) -> tuple[FunctionalityVector, ...]:
        return tuple(fv for fv, _ in self.entries)

    def fractions(self) -> tuple[float, ...]:
        return tuple(frac for _, frac in self.entries)


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric matrix of relative bonding rates between group types.

    Entry (m, n) scales the rate at which a free group of type m bonds with
    a free group of type n.  A zero entry forbids that bond; a zero diagonal
    entry forbids self-bonding within the type.
    """

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        norm = tuple(tuple(float(x) for x in row) for row in self.rows)
        if len(norm) == 0 or any(len(row) != len(norm) for row in norm):
            raise SpecificationError("weight matrix must be square and non-empty")
        object.__setattr__(self, "rows", norm)

    @classmethod
    def from_rows(cls, rows) -> "WeightMatrix":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


@dataclass(frozen=True)
class SystemSpec:
    """A monomer distribution together with its bonding weight matrix."""

    distribution: MonomerDistribution
    weights: WeightMatrix

    @property
    def r(self) -> int:
        return self.distribution.r


@dataclass(frozen=True)
class MomentSet:
    """First and second partial moments of a functionality distribution.

    ``nu1[k]`` is the mean number of type-k groups per monomer and
    ``nu2[m][n]`` the mean of the product of type-m and type-n counts.
    """

    nu1: tuple[float, ...]
    nu2: tuple[tuple[float, ...], ...]

    @property
    def r(self) -> int:
        return len(self.nu1)

    @property
    def nu1_array(self) -> np.ndarray:
        return np.array(self.nu1, dtype=float)

    @property
    def nu2_array(self) -> np.ndarray:
        return np.array(self.nu2, dtype=float)

    def _two_type_only(self):
        if self.r != 2:
            raise SpecificationError("named two-type aliases require exactly two group types")

    @property
    def nu_10(self) -> float:
        self._two_type_only()
        return self.nu1[0]

    @property
    def nu_01(self) -> float:
        self._two_type_only()
        return self.nu1[1]

    @property
    def nu_20(self) -> float:
        self._two_type_only()
        return self.nu2[0][0]

    @property
    def nu_02(self) -> float:
        self._two_type_only()
        return self.nu2[1][1]

    @property
    def nu_11(self) -> float:
        self._two_type_only()
        return self.nu2[0][1]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of structural validation: hard violations and advisories."""

    ok: bool
    violations: tuple[str, ...]
    advisories: tuple[str, ...]


def partial_moment(dist: MonomerDistribution, exponents) -> float:
    """Weighted power sum of group counts over the species distribution.

    Args:
        dist: the monomer distribution.
        exponents: one exponent per group type, each 0, 1 or 2.

    Returns:
        sum over species of fraction * prod_k count_k ** exponent_k.
    """
    exps = tuple(exponents)
    if len(exps) != dist.r:
        raise SpecificationError(
            f"exponent vector has {len(exps)} slots but the distribution has {dist.r} group types"
        )
    for e in exps:
        if e not in ALLOWED_EXPONENTS:
            raise SpecificationError(f"partial-moment exponents must be 0, 1 or 2, got {e!r}")
    total = 0.0
    for fv, frac in dist.entries:
        total += frac * math.prod(c**e for c, e in zip(fv.counts, exps))
    return total


def moment_set(dist: MonomerDistribution) -> MomentSet:
    """All first and second partial moments of the distribution."""
    r = dist.r
    nu1 = tuple(partial_moment(dist, tuple(1 if j == k else 0 for j in range(r))) for k in range(r))
    nu2 = []
    for m in range(r):
        row = []
        for n in range(r):
            exps = [0] * r
            exps[m] += 1
            exps[n] += 1
            row.append(partial_moment(dist, tuple(exps)))
        nu2.append(tuple(row))
    return MomentSet(nu1=nu1, nu2=tuple(nu2))


def validate_spec(spec: SystemSpec) -> ValidationReport:
    """Structural validation of a system description.

    Hard violations make the spec unusable (wrong dimensions, asymmetric or
    negative weights, fractions that do not form a distribution).  Advisories
    flag legal but unusual choices, such as weight rows that do not sum to
    one (the matrix scale only redefines the unit of time) or group types
    that can never react.
    """
    violations: list[str] = []
    advisories: list[str] = []
    dist, wm = spec.distribution, spec.weights

    if wm.r != dist.r:
        violations.append(
            f"dimension mismatch: weight matrix is {wm.r}x{wm.r} but species list {dist.r} group types"
        )

    fracs = dist.fractions()
    for fv, frac in dist.entries:
        if not math.isfinite(frac) or frac <= 0.0 or frac > 1.0:
            violations.append(f"species fraction {frac!r} for {fv.counts} is outside (0, 1]")
    if abs(sum(fracs) - 1.0) > MASS_TOLERANCE:
        violations.append(f"species fractions sum to {sum(fracs)!r}, not 1")
    seen = set()
    for fv, _ in dist.entries:
        if fv.counts in seen:
            violations.append(f"duplicate species {fv.counts}")
        seen.add(fv.counts)
    for fv, frac in dist.entries:
        if frac > 0.0 and all(c == 0 for c in fv.counts):
            violations.append(f"species {fv.counts} carries no functional groups but has fraction {frac}")

    w = wm.rows
    for m in range(wm.r):
        for n in range(wm.r):
            if not math.isfinite(w[m][n]) or w[m][n] < 0.0:
                violations.append(f"weight entry ({m}, {n}) = {w[m][n]!r} must be finite and non-negative")
            if w[m][n] != w[n][m]:
                violations.append(f"weight matrix is asymmetric at ({m}, {n}): {w[m][n]!r} != {w[n][m]!r}")
    if all(w[m][n] == 0.0 for m in range(wm.r) for n in range(wm.r)):
        violations.append("weight matrix is identically zero, no bond can ever form")

    if not violations:
        nu1 = moment_set(dist).nu1
        for m in range(wm.r):
            row_sum = sum(w[m])
            if abs(row_sum - 1.0) > MASS_TOLERANCE:
                advisories.append(
                    f"row {m} of the weight matrix sums to {row_sum!r}; scale is a choice of time unit"
                )
            if nu1[m] > 0.0 and all(x == 0.0 for x in w[m]):
                advisories.append(f"group type {m} is present but inert: its weight row is all zero")

    return ValidationReport(ok=not violations, violations=tuple(violations), advisories=tuple(advisories))


def require_valid(spec: SystemSpec) -> None:
    """Raise SpecificationError listing every violation, if there are any."""
    report = validate_spec(spec)
    if not report.ok:
        raise SpecificationError("; ".join(report.violations))
