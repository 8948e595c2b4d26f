"""Degree and species distributions at a given conversion state.

Given conversions p_k, every group of type k has reacted independently with
probability p_k, so the bond counts of a monomer with functionality vector I
are a product of binomials.  Sums over species give the monomer degree
distribution; weighted sums recover the mu moments in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .chemistry import FunctionalityVector, MomentSet, SystemSpec, require_valid
from .errors import DomainError, SpecificationError
from .kinetics import ConversionState


def _binomial_pmf(n: int, prob: float) -> np.ndarray:
    """Probabilities of 0..n successes; coefficients by the multiplicative recurrence."""
    out = np.empty(n + 1)
    coef = 1.0
    q = 1.0 - prob
    for k in range(n + 1):
        out[k] = coef * prob**k * q ** (n - k)
        coef = coef * (n - k) / (k + 1)
    return out


def _check_conversion(r: int, conv: ConversionState) -> np.ndarray:
    p = conv.p_array
    if p.shape != (r,):
        raise SpecificationError(f"conversion state has {p.shape[0]} types, system has {r}")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise DomainError("conversions must lie in [0, 1]")
    return p


@dataclass(frozen=True, eq=False)
class SpeciesDistribution:
    """Joint distribution of bond counts and species: one array per species.

    The array for a species with functionality vector I has shape I + 1 and
    entry [i] is the probability that a random monomer belongs to that
    species and carries exactly i bonds of each type.  Arrays sum to the
    species fractions; the grand total is one.
    """

    entries: tuple[tuple[FunctionalityVector, np.ndarray], ...]
    conversion: ConversionState

    def array_for(self, fv: FunctionalityVector) -> np.ndarray:
        for sp, arr in self.entries:
            if sp == fv:
                return arr
        raise KeyError(fv)

    def value(self, degree, fv: FunctionalityVector) -> float:
        return float(self.array_for(fv)[tuple(degree)])


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Distribution u(i) of bond-count vectors over all species."""

    probs: np.ndarray
    conversion: ConversionState

    def prob(self, degree) -> float:
        idx = tuple(degree)
        if any(d >= s for d, s in zip(idx, self.probs.shape)):
            return 0.0
        return float(self.probs[idx])

    def rows(self):
        """Yield (degree tuple, probability) over the support rectangle."""
        for idx in np.ndindex(self.probs.shape):
            yield idx, float(self.probs[idx])


@dataclass(frozen=True)
class DegreeMoments:
    """First and second moments of the degree distribution.

    By convention the zeroth moment mu_00 is one.  For two group types the
    named aliases mu_10, mu_01, mu_20, mu_02, mu_11 resolve into the arrays.
    """

    mu1: tuple[float, ...]
    mu2: tuple[tuple[float, ...], ...]

    @property
    def r(self) -> int:
        return len(self.mu1)

    @property
    def mu1_array(self) -> np.ndarray:
        return np.array(self.mu1, dtype=float)

    @property
    def mu2_array(self) -> np.ndarray:
        return np.array(self.mu2, dtype=float)

    @property
    def mu_00(self) -> float:
        return 1.0

    def _two_type_only(self):
        if self.r != 2:
            raise SpecificationError("named two-type aliases require exactly two group types")

    @property
    def mu_10(self) -> float:
        self._two_type_only()
        return self.mu1[0]

    @property
    def mu_01(self) -> float:
        self._two_type_only()
        return self.mu1[1]

    @property
    def mu_20(self) -> float:
        self._two_type_only()
        return self.mu2[0][0]

    @property
    def mu_02(self) -> float:
        self._two_type_only()
        return self.mu2[1][1]

    @property
    def mu_11(self) -> float:
        self._two_type_only()
        return self.mu2[0][1]


def species_dist(spec: SystemSpec, conv: ConversionState) -> SpeciesDistribution:
    """Joint bond-count/species distribution at the given conversions."""
    require_valid(spec)
    p = _check_conversion(spec.r, conv)
    entries = []
    for fv, frac in spec.distribution.entries:
        pmfs = [_binomial_pmf(c, p[k]) for k, c in enumerate(fv.counts)]
        arr = frac * reduce(np.multiply.outer, pmfs)
        entries.append((fv, arr))
    return SpeciesDistribution(entries=tuple(entries), conversion=conv)


def degree_dist(spec: SystemSpec, conv: ConversionState) -> DegreeDistribution:
    """Bond-count distribution u(i), species summed out."""
    joint = species_dist(spec, conv)
    shape = tuple(
        max(fv.counts[k] for fv, _ in joint.entries) + 1 for k in range(spec.r)
    )
    probs = np.zeros(shape)
    for fv, arr in joint.entries:
        corner = tuple(slice(0, c + 1) for c in fv.counts)
        probs[corner] += arr
    return DegreeDistribution(probs=probs, conversion=conv)


def mu_from_p(moments: MomentSet, conv: ConversionState) -> DegreeMoments:
    """Closed-form degree moments from conversions and initial moments.

    mu_k = p_k nu_k; diagonal second moments pick up the binomial variance
    term p (1 - p) nu; mixed ones are simply p_m p_n nu2_mn.
    """
    p = _check_conversion(moments.r, conv)
    nu1 = moments.nu1_array
    nu2 = moments.nu2_array
    mu1 = p * nu1
    mu2 = np.outer(p, p) * nu2
    np.fill_diagonal(mu2, p * p * np.diag(nu2) + p * (1.0 - p) * nu1)
    return DegreeMoments(mu1=tuple(mu1), mu2=tuple(tuple(row) for row in mu2))


def brute_force_moments(dist: DegreeDistribution, m: int, n: int) -> float:
    """Exact weighted sum sum_i i_m i_n u(i) over the full support."""
    r = dist.probs.ndim
    if not (0 <= m < r and 0 <= n < r):
        raise SpecificationError(f"moment indices ({m}, {n}) out of range for {r} group types")
    grids = np.indices(dist.probs.shape)
    return float(np.sum(grids[m] * grids[n] * dist.probs))


def unreacted_fraction(spec: SystemSpec, conv: ConversionState) -> float:
    """Fraction of monomers carrying no bonds at all, u(0, ..., 0)."""
    require_valid(spec)
    p = _check_conversion(spec.r, conv)
    total = 0.0
    for fv, frac in spec.distribution.entries:
        total += frac * np.prod((1.0 - p) ** np.array(fv.counts, dtype=float))
    return float(total)
