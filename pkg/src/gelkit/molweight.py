"""Component-size statistics from the branching generating functions.

A random monomer's component is explored as a multi-type branching process:
each converted group leads to a partner whose type follows the row-stochastic
kernel K, and the partner monomer is size-biased by the entered group type.
The module evaluates the resulting generating functions pointwise, solves the
derivative system at x = 1 for the weight-average molecular weight, and
extracts the component-size probabilities as a truncated power series.

All masses are monomer counts: a size-s component weighs s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chemistry import MomentSet, SystemSpec, moment_set
from .errors import ConvergenceError, DomainError, SpecificationError
from .gelation import KappaMix, _derivative_matrix
from .kinetics import ConversionState

DAMPING = 0.5
FIXED_POINT_TOL = 1e-12
MAX_ITERATIONS = 100_000


@dataclass(frozen=True)
class GfValues:
    """Generating-function values at one point x.

    w is the monomer-rooted component-size GF; branch[m] is the GF of the
    subtree hanging behind a converted type-m group.  Lanes with no bonds
    carry the continuous-limit value x.
    """

    x: float
    w: float
    branch: tuple[float, ...]
    converged: bool
    iterations: int
    residual: float

    @property
    def w_bi(self) -> float:
        """Two-type alias: subtree behind a converted type-0 group."""
        self._require_two_type()
        return self.branch[0]

    @property
    def w_plus(self) -> float:
        """Two-type alias: subtree behind a converted type-1 group."""
        self._require_two_type()
        return self.branch[1]

    def _require_two_type(self):
        if len(self.branch) != 2:
            raise SpecificationError("two-type aliases need exactly two group types")


@dataclass(frozen=True)
class MwReport:
    t: float
    mw: float
    converged: bool


@dataclass(frozen=True, eq=False)
class SizeDistribution:
    """Truncated component-size probabilities w(s), s = 1..S.

    w[s-1] is the probability that a random monomer belongs to a component
    of exactly s monomers; tail_mass is whatever probability the truncation
    (plus any gel) leaves unaccounted for.
    """

    w: np.ndarray
    t: float
    tail_mass: float

    @property
    def order(self) -> int:
        return len(self.w)

    def prob(self, s: int) -> float:
        if s < 1:
            raise DomainError(f"component size must be >= 1, got {s}")
        if s > len(self.w):
            raise DomainError(f"series truncated at order {len(self.w)}, got size {s}")
        return float(self.w[s - 1])

    def mean_size(self) -> float:
        """Sum of s*w(s) over the truncated range."""
        sizes = np.arange(1, len(self.w) + 1, dtype=float)
        return float(sizes @ self.w)

    def rows(self):
        """Yield (s, w_s, cumulative) for export."""
        total = 0.0
        for s, value in enumerate(self.w, start=1):
            total += float(value)
            yield s, float(value), total


def _species_arrays(spec: SystemSpec):
    dist = spec.distribution
    imat = np.array([list(fv.counts) for fv, _ in dist.entries], dtype=float)
    fracs = np.array([frac for _, frac in dist.entries], dtype=float)
    return imat, fracs


def _live_lanes(nu1: np.ndarray, p: np.ndarray) -> list[int]:
    return [k for k in range(len(nu1)) if nu1[k] > 0.0 and p[k] > 0.0]


def _partner_kernel(spec: SystemSpec, conv: ConversionState, kappa, live, nu1) -> np.ndarray:
    """Row-stochastic partner-type kernel restricted to the live lanes.

    When a KappaMix is supplied and the system has the standard two-type
    bond layout, the kernel is [[0, 1], [kappa, 1 - kappa]]; otherwise it is
    built from the bonding weights and the converted-end concentrations.
    """
    w = spec.weights.array
    if (
        kappa is not None
        and spec.r == 2
        and live == [0, 1]
        and w[0, 0] == 0.0
        and w[0, 1] > 0.0
    ):
        k = kappa.kappa
        return np.array([[0.0, 1.0], [k, 1.0 - k]])
    mu = conv.p_array * nu1
    idx = np.asarray(live, dtype=int)
    raw = w[np.ix_(idx, idx)] * mu[idx][None, :]
    sums = raw.sum(axis=1)
    if np.any(sums <= 0.0):
        bad = live[int(np.argmin(sums))]
        raise SpecificationError(
            f"type {bad} has bonds but no compatible converted partner ends"
        )
    return raw / sums[:, None]


def _branching_matrix(spec, conv, kappa, moments):
    p = conv.p_array
    live = _live_lanes(moments.nu1_array, p)
    if not live:
        return live, None
    kernel = _partner_kernel(spec, conv, kappa, live, moments.nu1_array)
    d = _derivative_matrix(moments, p, live)
    return live, kernel @ d


def _entry_value(imat, fracs, factors, j, nu_j):
    """Size-biased GF of a monomer entered through one of its type-j groups."""
    exponents = imat.copy()
    exponents[:, j] = np.maximum(exponents[:, j] - 1.0, 0.0)
    prods = (factors[None, :] ** exponents).prod(axis=1)
    return float((fracs * imat[:, j] * prods).sum() / nu_j)


def gf_fixed_point(spec: SystemSpec, conv: ConversionState, kappa: KappaMix | None, x: float) -> GfValues:
    """Evaluate the component-size generating functions at a point x in [0, 1).

    Solves branch_m = x * sum_j K_mj * U_j(branch) by damped fixed-point
    iteration started at branch = x, then roots the result through the
    monomer distribution.  With no bonds the component of any monomer is
    itself, so the rooted value is exactly x.
    """
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x must lie in [0, 1), got {x!r}")
    moments = moment_set(spec.distribution)
    nu1 = moments.nu1_array
    p = conv.p_array
    live = _live_lanes(nu1, p)
    r = spec.r
    if not live:
        return GfValues(x=x, w=x, branch=(x,) * r, converged=True, iterations=0, residual=0.0)

    kernel = _partner_kernel(spec, conv, kappa, live, nu1)
    imat, fracs = _species_arrays(spec)
    q = 1.0 - p

    z = np.full(r, x, dtype=float)

    def apply_map(vec):
        factors = q + p * vec
        u = np.array([_entry_value(imat, fracs, factors, j, nu1[j]) for j in live])
        out = vec.copy()
        out[live] = x * (kernel @ u)
        return out

    iterations = 0
    defect = np.inf
    while iterations < MAX_ITERATIONS:
        mapped = apply_map(z)
        defect = float(np.max(np.abs(mapped - z)))
        if defect < FIXED_POINT_TOL:
            z = mapped
            break
        z = z + DAMPING * (mapped - z)
        iterations += 1
    else:
        raise ConvergenceError(
            f"generating-function iteration did not converge at x = {x}",
            residual=defect,
        )

    factors = q + p * z
    w = x * float((fracs * (factors[None, :] ** imat).prod(axis=1)).sum())
    branch = tuple(float(z[k]) if k in live else x for k in range(r))
    return GfValues(x=x, w=w, branch=branch, converged=True, iterations=iterations, residual=defect)


def weight_avg_mw(spec: SystemSpec, conv: ConversionState, kappa: KappaMix | None = None) -> MwReport:
    """Weight-average molecular weight from the derivative system at x = 1.

    The branch-derivative vector rho solves (I - K D) rho = 1 and the mean
    component size of a random monomer is 1 + sum_k mu_k rho_k.  The system
    matrix is the same one whose determinant locates the gel point, so the
    report flags divergence (mw = inf) at and past the transition.
    """
    moments = moment_set(spec.distribution)
    live, b = _branching_matrix(spec, conv, kappa, moments)
    if not live:
        return MwReport(t=conv.t, mw=1.0, converged=True)
    radius = float(np.max(np.abs(np.linalg.eigvals(b))))
    if radius >= 1.0:
        return MwReport(t=conv.t, mw=np.inf, converged=False)
    rho = np.linalg.solve(np.eye(len(live)) - b, np.ones(len(live)))
    mu = conv.p_array * moments.nu1_array
    mw = 1.0 + float(mu[live] @ rho)
    return MwReport(t=conv.t, mw=mw, converged=True)


def size_series(
    spec: SystemSpec,
    conv: ConversionState,
    kappa: KappaMix | None = None,
    s_max: int = 256,
) -> SizeDistribution:
    """Component-size probabilities w(1..s_max) by truncated-series iteration.

    The branch generating functions are filled coefficient by coefficient:
    the factor x in branch = x * K U(branch) makes order s of the right-hand
    side depend only on orders below s, so a single forward pass fills the
    whole triangle.  Per-lane powers and per-species partial products are
    convolved with numpy dot products, giving O(s_max^2) work overall.

    States at or past the gel transition are refused: the truncated series
    then silently drops the gel mass and every downstream consistency check
    would be comparing against the wrong total.
    """
    s_top = int(s_max)
    if s_top < 2:
        raise SpecificationError(f"series order must be at least 2, got {s_max!r}")
    moments = moment_set(spec.distribution)
    nu1 = moments.nu1_array
    p = conv.p_array
    q = 1.0 - p
    r = spec.r
    live = _live_lanes(nu1, p)

    w = np.zeros(s_top + 1)
    if not live:
        w[1] = 1.0
        return SizeDistribution(w=w[1:].copy(), t=conv.t, tail_mass=0.0)

    _, b = _branching_matrix(spec, conv, kappa, moments)
    radius = float(np.max(np.abs(np.linalg.eigvals(b))))
    if radius >= 1.0:
        raise DomainError(
            f"conversion state at t = {conv.t} is at or past the gel transition; "
            "the size series is only defined pre-gel"
        )
    kernel = _partner_kernel(spec, conv, kappa, live, nu1)

    dist = spec.distribution
    species = [tuple(fv.counts) for fv, _ in dist.entries]
    fracs = [frac for _, frac in dist.entries]

    # per-lane series A_k = q_k + p_k * branch_k, one coefficient per order
    a = [np.zeros(s_top) for _ in range(r)]
    for k in range(r):
        a[k][0] = q[k]
    branch = np.zeros((r, s_top))

    emax = [max(counts[k] for counts in species) for k in range(r)]
    powers = []
    for k in range(r):
        lane = [np.zeros(s_top) for _ in range(emax[k] + 1)]
        lane[0][0] = 1.0
        powers.append(lane)

    # partial products over lane prefixes, shared between species; a key of
    # length L is the series prod_{k<L} A_k^{key[k]}
    entry_tuples = {}
    for counts, frac in zip(species, fracs):
        for j in live:
            if counts[j] >= 1:
                reduced = list(counts)
                reduced[j] -= 1
                entry_tuples.setdefault((j, tuple(reduced)), None)
    root_tuples = [tuple(counts) for counts in species]
    needed = set(root_tuples) | {key for _, key in entry_tuples}
    prefixes = {}
    for full in needed:
        for length in range(2, r + 1):
            prefixes.setdefault(full[:length], np.zeros(s_top))

    def node_view(full):
        if r == 1:
            return powers[0][full[0]]
        return prefixes[full]

    prefix_keys = sorted(prefixes, key=len)

    for s in range(1, s_top + 1):
        order = s - 1
        if order >= 1:
            for k in live:
                a[k][order] = p[k] * branch[k][order]
        for k in range(r):
            rev = a[k][order::-1]
            lane = powers[k]
            for e in range(1, emax[k] + 1):
                lane[e][order] = float(lane[e - 1][: order + 1] @ rev)
        for key in prefix_keys:
            length = len(key)
            left = powers[0][key[0]] if length == 2 else prefixes[key[:-1]]
            rev = powers[length - 1][key[-1]][order::-1]
            prefixes[key][order] = float(left[: order + 1] @ rev)

        entry = {}
        for j in live:
            total = 0.0
            for counts, frac in zip(species, fracs):
                if counts[j] >= 1:
                    reduced = list(counts)
                    reduced[j] -= 1
                    total += frac * counts[j] * node_view(tuple(reduced))[order]
            entry[j] = total / nu1[j]
        if s < s_top:
            u_vec = np.array([entry[j] for j in live])
            grown = kernel @ u_vec
            for pos, m in enumerate(live):
                branch[m][s] = grown[pos]
        w[s] = sum(
            frac * node_view(counts)[order] for counts, frac in zip(root_tuples, fracs)
        )

    tail = 1.0 - float(w.sum())
    return SizeDistribution(w=w[1:].copy(), t=conv.t, tail_mass=tail)
