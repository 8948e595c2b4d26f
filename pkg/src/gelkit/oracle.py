"""Independent validators: exact master-equation integration and stochastic
network growth.

Both artifacts answer the same questions as the closed forms in degrees,
kinetics, and gelation, but through entirely different mechanics, so
agreement is evidence rather than tautology.  The master-equation route
integrates the full per-species state distribution on its finite rectangle;
the stochastic route grows one random network bond by bond.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .chemistry import SystemSpec, moment_set
from .errors import DomainError, IntegrationError, SpecificationError, StateSpaceError
from .kinetics import DEFAULT_ATOL, DEFAULT_RTOL

MASTER_STATE_LIMIT = 10_000

#: attempts at rejection-sampling a bond on two distinct monomers before
#: falling back to a linear scan
_PAIR_ATTEMPTS = 64


@dataclass(frozen=True, eq=False)
class MasterState:
    """Per-species degree-state concentrations at one time.

    blocks maps a functionality vector to the dense array over its degree
    rectangle; entry [i_1, ..., i_r] is the concentration of monomers of
    that species carrying exactly that many bonds of each type.
    """

    t: float
    blocks: dict

    def array_for(self, counts) -> np.ndarray:
        key = tuple(counts)
        if key not in self.blocks:
            raise DomainError(f"no species with functionalities {key}")
        return self.blocks[key]

    def value(self, degree, counts) -> float:
        block = self.array_for(counts)
        idx = tuple(degree)
        if len(idx) != block.ndim or any(not 0 <= i < n for i, n in zip(idx, block.shape)):
            raise DomainError(f"degree {idx} outside the rectangle of species {tuple(counts)}")
        return float(block[idx])

    def species_total(self, counts) -> float:
        return float(self.array_for(counts).sum())

    def mu(self) -> np.ndarray:
        r = len(next(iter(self.blocks))) if self.blocks else 0
        total = np.zeros(r)
        for block in self.blocks.values():
            grids = np.indices(block.shape)
            for k in range(r):
                total[k] += float((grids[k] * block).sum())
        return total


class MasterTrajectory:
    """Dense solution of the per-species master equation."""

    def __init__(self, spec, times, interpolant, shapes, slices, stopped):
        self.spec = spec
        self.times = times
        self._interpolant = interpolant
        self._shapes = shapes
        self._slices = slices
        self.stopped = stopped

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def state_at(self, t: float) -> MasterState:
        if not 0.0 <= t <= self.t_end:
            raise DomainError(f"t = {t} outside [0, {self.t_end}]")
        flat = self._interpolant(t)
        blocks = {}
        for key, shape, sl in zip(self._shapes.keys(), self._shapes.values(), self._slices):
            blocks[key] = flat[sl].reshape(shape)
        return MasterState(t=float(t), blocks=blocks)

    def mu_at(self, t: float) -> np.ndarray:
        return self.state_at(t).mu()

    def conservation_drift(self, t: float) -> float:
        """Largest deviation of a per-species total from its initial fraction."""
        state = self.state_at(t)
        worst = 0.0
        for fv, frac in self.spec.distribution.entries:
            worst = max(worst, abs(state.species_total(fv.counts) - frac))
        return worst


def integrate_master(
    spec: SystemSpec,
    t_end: float,
    tolerance: float = DEFAULT_RTOL,
    absolute_tolerance: float = DEFAULT_ATOL,
) -> MasterTrajectory:
    """Integrate the full degree-state distribution for every species.

    State: concentration M of monomers of species I holding i bonds of each
    type, on the rectangle 0 <= i <= I.  Bonds of type k form at the global
    rate (W (nu1 - mu))_k per free group, moving mass from i to i + e_k in
    proportion to the free groups I_k - i_k.  The only nonlinearity enters
    through mu(t), read off the state itself at every evaluation.
    """
    if t_end <= 0.0:
        raise SpecificationError(f"t_end must be positive, got {t_end!r}")
    dist = spec.distribution
    r = spec.r
    shapes = {}
    for fv, _ in dist.entries:
        shapes[tuple(fv.counts)] = tuple(c + 1 for c in fv.counts)
    total_states = sum(int(np.prod(shape)) for shape in shapes.values())
    if total_states > MASTER_STATE_LIMIT:
        raise StateSpaceError(
            f"master equation would need {total_states} states "
            f"(limit {MASTER_STATE_LIMIT}); use the moment ODE route instead"
        )

    slices = []
    offset = 0
    for shape in shapes.values():
        n = int(np.prod(shape))
        slices.append(slice(offset, offset + n))
        offset += n

    nu1 = moment_set(dist).nu1_array
    w = spec.weights.array

    index_grids = []
    free_grids = []
    for key, shape in shapes.items():
        grids = np.indices(shape, dtype=float)
        index_grids.append(grids)
        free_grids.append(np.array(key, dtype=float).reshape((r,) + (1,) * r) - grids)

    y0 = np.zeros(offset)
    for sl, (fv, frac) in zip(slices, dist.entries):
        block = np.zeros(shapes[tuple(fv.counts)])
        block[(0,) * r] = frac
        y0[sl] = block.ravel()

    def rhs(_t, y):
        mu = np.zeros(r)
        for sl, shape, grids in zip(slices, shapes.values(), index_grids):
            block = y[sl].reshape(shape)
            for k in range(r):
                mu[k] += float((grids[k] * block).sum())
        rates = np.maximum(w @ (nu1 - mu), 0.0)
        out = np.empty_like(y)
        for sl, shape, free in zip(slices, shapes.values(), free_grids):
            block = y[sl].reshape(shape)
            deriv = np.zeros(shape)
            for k in range(r):
                flux = rates[k] * free[k] * block
                deriv -= flux
                donor = [slice(None)] * r
                target = [slice(None)] * r
                donor[k] = slice(0, shape[k] - 1)
                target[k] = slice(1, shape[k])
                deriv[tuple(target)] += flux[tuple(donor)]
            out[sl] = deriv.ravel()
        return out

    sol = solve_ivp(
        rhs,
        (0.0, float(t_end)),
        y0,
        method="RK45",
        rtol=tolerance,
        atol=absolute_tolerance,
        dense_output=True,
    )
    if sol.status < 0:
        raise IntegrationError(
            f"master-equation integration failed: {sol.message}",
            last_t=float(sol.t[-1]),
            last_state=sol.y[:, -1].copy(),
        )
    return MasterTrajectory(
        spec=spec,
        times=sol.t.copy(),
        interpolant=sol.sol,
        shapes=shapes,
        slices=slices,
        stopped="t_end",
    )


class _UnionFind:
    __slots__ = ("parent", "size", "largest", "sum_sq")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.largest = 1 if n else 0
        self.sum_sq = float(n)

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        size = self.size
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.sum_sq += 2.0 * size[ra] * size[rb]
        size[ra] += size[rb]
        if size[ra] > self.largest:
            self.largest = size[ra]
        return True


@dataclass(frozen=True, eq=False)
class McRun:
    """One stochastic network-growth realization, sampled on a time grid."""

    spec: SystemSpec
    n_monomers: int
    seed: int
    t_end: float
    sample_times: tuple
    mu_hat: tuple
    largest_fraction: tuple
    susceptibility: tuple
    bonds_per_type: tuple
    threshold_size: float
    threshold_time: float | None
    percent_time: float | None
    chi_peak_time: float
    chi_peak_value: float
    component_histogram: dict
    events: tuple | None

    def size_fraction(self, s: int) -> float:
        """Fraction of monomers sitting in components of exactly s monomers."""
        return self.component_histogram.get(s, 0) * s / self.n_monomers


@dataclass(frozen=True)
class OnsetReport:
    observed: bool
    t_threshold: float | None
    t_susceptibility_peak: float
    threshold_size: float

    @property
    def status(self) -> str:
        return "gel observed" if self.observed else "no gel observed"


def _allocate_species(dist, n: int) -> list[int]:
    """Integer monomer counts per species by largest remainder."""
    raw = [frac * n for frac in dist.fractions()]
    counts = [math.floor(x) for x in raw]
    short = n - sum(counts)
    by_remainder = sorted(range(len(raw)), key=lambda i: raw[i] - counts[i], reverse=True)
    for i in by_remainder[:short]:
        counts[i] += 1
    return counts


def _swap_pop(lst: list, idx: int):
    lst[idx] = lst[-1]
    lst.pop()


def simulate(
    spec: SystemSpec,
    n_monomers: int,
    t_end: float,
    seed: int,
    sample_times=None,
    record_events: bool = False,
) -> McRun:
    """Grow one random network by continuous-time bond formation.

    Each compatible group-type pair (m, n) is a reaction channel with
    propensity w_mn G_m G_n / N (or w_mm G_m (G_m - 1) / 2N within a type),
    G_k being the count of free type-k groups.  A bond consumes one free
    group at each end; the two ends must sit on distinct monomers, while
    parallel bonds between monomers are allowed.  Time is scaled so that
    mu_hat_k = bond-ends of type k per monomer tracks the moment ODE as N
    grows.
    """
    if n_monomers < 10:
        raise SpecificationError(f"need at least 10 monomers, got {n_monomers}")
    if t_end <= 0.0:
        raise SpecificationError(f"t_end must be positive, got {t_end!r}")
    dist = spec.distribution
    r = spec.r
    w = spec.weights.array
    n = int(n_monomers)

    if sample_times is None:
        sample_times = np.linspace(0.0, t_end, 41)
    sample_times = np.sort(np.asarray(sample_times, dtype=float))
    if len(sample_times) and (sample_times[0] < 0.0 or sample_times[-1] > t_end):
        raise SpecificationError("sample times must lie within [0, t_end]")

    counts = _allocate_species(dist, n)
    stubs: list[list[int]] = [[] for _ in range(r)]
    monomer = 0
    for (fv, _), how_many in zip(dist.entries, counts):
        for _ in range(how_many):
            for k in range(r):
                stubs[k].extend([monomer] * fv.counts[k])
            monomer += 1

    channels = []
    for m in range(r):
        for nn in range(m, r):
            if w[m, nn] > 0.0:
                channels.append((m, nn, float(w[m, nn])))
    blocked = [False] * len(channels)

    rng = random.Random(seed)
    uf = _UnionFind(n)
    ends = [0] * r
    threshold_size = n ** (2.0 / 3.0)
    threshold_time = None
    percent_time = None
    chi_peak_value = (uf.sum_sq - uf.largest**2) / n
    chi_peak_time = 0.0
    events = [] if record_events else None

    rec_t: list[float] = []
    rec_mu: list[tuple] = []
    rec_largest: list[float] = []
    rec_chi: list[float] = []
    sample_idx = 0

    def flush(limit: float, inclusive: bool):
        nonlocal sample_idx
        while sample_idx < len(sample_times):
            tau = sample_times[sample_idx]
            if tau < limit or (inclusive and tau <= limit):
                rec_t.append(float(tau))
                rec_mu.append(tuple(e / n for e in ends))
                rec_largest.append(uf.largest / n)
                rec_chi.append((uf.sum_sq - uf.largest**2) / n)
                sample_idx += 1
            else:
                break

    t = 0.0
    while True:
        total = 0.0
        props = []
        for idx, (m, nn, rate) in enumerate(channels):
            if blocked[idx]:
                props.append(0.0)
                continue
            if m == nn:
                gm = len(stubs[m])
                a = rate * gm * (gm - 1) / (2.0 * n)
            else:
                a = rate * len(stubs[m]) * len(stubs[nn]) / n
            props.append(a)
            total += a
        if total <= 0.0:
            flush(t_end, inclusive=True)
            break
        t_next = t + rng.expovariate(total)
        if t_next > t_end:
            flush(t_end, inclusive=True)
            break
        flush(t_next, inclusive=False)

        pick = rng.random() * total
        chosen = len(channels) - 1
        acc = 0.0
        for idx, a in enumerate(props):
            acc += a
            if pick <= acc:
                chosen = idx
                break
        m, nn, _ = channels[chosen]

        if m == nn:
            lst = stubs[m]
            length = len(lst)
            i = j = 0
            found = False
            for _ in range(_PAIR_ATTEMPTS):
                i = rng.randrange(length)
                j = rng.randrange(length - 1)
                if j >= i:
                    j += 1
                if lst[i] != lst[j]:
                    found = True
                    break
            if not found:
                base = lst[0]
                alt = next((k for k in range(1, length) if lst[k] != base), None)
                if alt is None:
                    # every remaining group of this type sits on one monomer;
                    # the channel can never fire again
                    blocked[chosen] = True
                    t = t_next
                    continue
                i, j = 0, alt
            mono_a, mono_b = lst[i], lst[j]
            if i < j:
                i, j = j, i
            _swap_pop(lst, i)
            _swap_pop(lst, j)
        else:
            lst_m, lst_n = stubs[m], stubs[nn]
            i = j = 0
            found = False
            for _ in range(_PAIR_ATTEMPTS):
                i = rng.randrange(len(lst_m))
                j = rng.randrange(len(lst_n))
                if lst_m[i] != lst_n[j]:
                    found = True
                    break
            if not found:
                first_n = lst_n[0]
                alt_m = next((k for k in range(len(lst_m)) if lst_m[k] != first_n), None)
                if alt_m is not None:
                    i, j = alt_m, 0
                else:
                    first_m = lst_m[0]
                    alt_n = next((k for k in range(len(lst_n)) if lst_n[k] != first_m), None)
                    if alt_n is None:
                        blocked[chosen] = True
                        t = t_next
                        continue
                    i, j = 0, alt_n
            mono_a, mono_b = lst_m[i], lst_n[j]
            _swap_pop(lst_m, i)
            _swap_pop(lst_n, j)

        uf.union(mono_a, mono_b)
        ends[m] += 1
        ends[nn] += 1
        t = t_next
        if events is not None:
            events.append((t, m, nn, mono_a, mono_b))

        chi = (uf.sum_sq - uf.largest**2) / n
        if chi > chi_peak_value:
            chi_peak_value = chi
            chi_peak_time = t
        if threshold_time is None and uf.largest > threshold_size:
            threshold_time = t
        if percent_time is None and uf.largest >= 0.01 * n:
            percent_time = t

    histogram: Counter = Counter()
    for node in range(n):
        if uf.find(node) == node:
            histogram[uf.size[node]] += 1

    return McRun(
        spec=spec,
        n_monomers=n,
        seed=seed,
        t_end=float(t_end),
        sample_times=tuple(rec_t),
        mu_hat=tuple(rec_mu),
        largest_fraction=tuple(rec_largest),
        susceptibility=tuple(rec_chi),
        bonds_per_type=tuple(ends),
        threshold_size=threshold_size,
        threshold_time=threshold_time,
        percent_time=percent_time,
        chi_peak_time=chi_peak_time,
        chi_peak_value=chi_peak_value,
        component_histogram=dict(histogram),
        events=tuple(events) if events is not None else None,
    )


def giant_onset(run: McRun) -> OnsetReport:
    """Finite-size estimate of the transition time from one realization.

    Primary estimator: first time the largest component exceeds N^(2/3),
    the usual critical-window size scale.  Secondary: the time the
    susceptibility (sum of squared component sizes, largest excluded, per
    monomer) peaked.
    """
    return OnsetReport(
        observed=run.threshold_time is not None,
        t_threshold=run.threshold_time,
        t_susceptibility_peak=run.chi_peak_time,
        threshold_size=run.threshold_size,
    )
