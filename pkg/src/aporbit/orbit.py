"""Orbit generation, grid shadowing, transition tables and periodic chains.

The pipeline: iterate a map to get an orbit, snap each sample to the grid
(the "shadow"), record observed state transitions in a table, then run the
table as a deterministic finite-state chain from the quantized initial
state.  The chain is eventually periodic; its pre-period T and period L
are certified by first-visit cycle detection.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from .core import GridSpec, GridState, OrbitSeries, Point, quantize
from .errors import (
    DanglingState,
    DimensionMismatch,
    NoCycleWithinHorizon,
    RangeViolation,
)
from .maps import MapDefinition, _raw_output, ar_map, evaluate


def generate_orbit(m: MapDefinition, y0: Point, horizon: int) -> OrbitSeries:
    """Iterate the map from y0 for `horizon` steps; errors if the orbit escapes."""
    if y0.d != m.d:
        raise DimensionMismatch(f"y0 dimension {y0.d} != map dimension {m.d}")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    samples = [y0]
    current = y0
    for t in range(1, horizon + 1):
        try:
            current = evaluate(m, current)
        except RangeViolation as exc:
            raise RangeViolation(f"orbit left the box at t={t}: {exc}", t=t) from exc
        samples.append(current)
    return OrbitSeries(samples)


def discretize_orbit(orbit, g: GridSpec) -> list[GridState]:
    """Quantize every orbit sample (accepts an OrbitSeries or a point list)."""
    samples = orbit.samples if isinstance(orbit, OrbitSeries) else orbit
    return [quantize(p, g) for p in samples]


@dataclass
class TransitionTable:
    """Observed next-state function over the visited grid states.

    `states` lists, in first-seen order, every visited state that has an
    outgoing observation; the successor of each state is fixed by its
    earliest occurrence.  Later occurrences that disagree are recorded in
    `conflicts` (the discretized dynamics is then not a function of the
    state at this resolution).  A state first seen at the final shadow
    position has no outgoing observation and is excluded from `states`.
    """

    states: tuple[GridState, ...]
    successor: dict = field(repr=False)
    first_seen: dict = field(repr=False)
    conflicts: tuple = ()

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def index(self) -> dict:
        return {s: n for n, s in enumerate(self.states)}

    @property
    def dangling(self) -> GridState | None:
        """The successor state without an outgoing edge, if any."""
        for s in self.successor.values():
            if s not in self.successor:
                return s
        return None

    def next_index(self) -> dict:
        """Index form n -> k(n); None marks an edge into the dangling state."""
        idx = self.index
        return {
            idx[s]: idx.get(nxt) for s, nxt in self.successor.items()
        }


def build_transition_table(shadow) -> TransitionTable:
    """Extract the earliest-occurrence transition table from a shadow sequence."""
    shadow = list(shadow)
    if len(shadow) < 2:
        raise ValueError("need at least two shadow states to observe a transition")
    states = []
    successor = {}
    first_seen = {}
    conflicts = []
    last = len(shadow) - 1
    for t, s in enumerate(shadow):
        if s not in first_seen:
            first_seen[s] = t
        if t < last:
            nxt = shadow[t + 1]
            if s not in successor:
                successor[s] = nxt
                states.append(s)
            elif successor[s] != nxt:
                conflicts.append((s, t, nxt))
    return TransitionTable(
        states=tuple(states),
        successor=successor,
        first_seen=first_seen,
        conflicts=tuple(conflicts),
    )


@dataclass
class ChainResult:
    """The approximating chain: eventually periodic states y*(0), y*(1), ...

    `seq` stores the distinct prefix up to the point where the cycle
    closes (length pre_period + period); any later value follows by
    periodic extension, so the chain is evaluable at every t >= 0.
    """

    grid: GridSpec
    seq: tuple[GridState, ...] = field(repr=False)
    pre_period: int
    period: int
    horizon: int
    table: TransitionTable | None = field(default=None, repr=False)

    def state_at(self, t: int) -> GridState:
        if t < 0:
            raise ValueError("t must be >= 0")
        if t < len(self.seq):
            return self.seq[t]
        return self.seq[self.pre_period + (t - self.pre_period) % self.period]

    def value_at(self, t: int) -> np.ndarray:
        return self.state_at(t).decode_array()

    def values(self, t_start: int, t_end: int) -> np.ndarray:
        """Decoded chain values for t_start..t_end inclusive, shape (n, d)."""
        return np.array([self.value_at(t) for t in range(t_start, t_end + 1)])

    @property
    def y_star(self) -> tuple[GridState, ...]:
        return tuple(self.state_at(t) for t in range(self.horizon + 1))

    @property
    def d(self) -> int:
        return self.grid.d

    def summary(self) -> dict:
        return {
            "K": self.grid.K,
            "d": self.grid.d,
            "T": self.pre_period,
            "L": self.period,
            "N": self.table.n_states if self.table is not None else None,
            "conflicts": len(self.table.conflicts) if self.table is not None else None,
        }


def build_chain(table: TransitionTable, initial: GridState, horizon: int) -> ChainResult:
    """Run the table from the initial state until its cycle closes.

    Termination is guaranteed by the finite state count unless the walk
    reaches a state with no outgoing observation, which is reported as
    DanglingState (possible under horizon truncation, never patched over).
    """
    if initial not in table.successor:
        raise ValueError("initial state has no outgoing observation in the table")
    visit = {initial: 0}
    seq = [initial]
    current = initial
    t = 0
    while True:
        nxt = table.successor.get(current)
        if nxt is None:
            raise DanglingState(
                f"chain reached a state with no outgoing edge at t={t + 1}",
                state=current,
                t=t + 1,
            )
        t += 1
        if nxt in visit:
            pre_period = visit[nxt]
            period = t - visit[nxt]
            break
        visit[nxt] = t
        seq.append(nxt)
        current = nxt
    return ChainResult(
        grid=initial.grid,
        seq=tuple(seq),
        pre_period=pre_period,
        period=period,
        horizon=horizon,
        table=table,
    )


def detect_cycle(seq) -> tuple[int, int]:
    """Minimal (pre-period, period) of an eventually periodic sequence.

    First-visit hash map over exact states; the candidate is then checked
    against the periodicity definition on the whole available window.
    """
    seq = list(seq)
    first = {}
    for t, s in enumerate(seq):
        if s in first:
            pre_period = first[s]
            period = t - first[s]
            for u in range(pre_period, len(seq) - period):
                if seq[u + period] != seq[u]:
                    raise NoCycleWithinHorizon(
                        "window is inconsistent with the first-repeat cycle; "
                        "sequence is not an iterated-function trace"
                    )
            return pre_period, period
        first[s] = t
    raise NoCycleWithinHorizon(
        f"no state repeats within the {len(seq)}-step window"
    )


def try_detect_cycle(seq):
    """detect_cycle, but None instead of an error when uncertifiable."""
    try:
        return detect_cycle(seq)
    except NoCycleWithinHorizon:
        return None


def shadow_periodicity(seq, max_window: int = 8192):
    """Minimal (T, L) consistent with eventual periodicity of the window.

    Shadows are not function traces (the true orbit can distinguish states
    the grid merges), so first-repeat detection does not apply; this scans
    periods directly and requires at least two full tail periods in view.
    Diagnostic only: a longer window could still refute the verdict.  Long
    sequences are examined over their trailing `max_window` entries; the
    reported T is then the earliest time within that suffix, an upper
    bound for the true pre-period.
    """
    seq = list(seq)
    offset = 0
    if len(seq) > max_window:
        offset = len(seq) - max_window
        seq = seq[offset:]
    n = len(seq)
    for L in range(1, n // 2 + 1):
        t = n - 1 - L
        while t >= 0 and seq[t + L] == seq[t]:
            t -= 1
        T = t + 1
        if T + 2 * L <= n:
            return T + offset, L
    return None


def default_horizon(g: GridSpec) -> int:
    """10 * (K+1)^d, capped at 10^7."""
    return min(10 * g.state_count, 10 ** 7)


def run_pipeline(m: MapDefinition, y0: Point, g: GridSpec, horizon: int):
    """orbit -> shadow -> table -> chain; returns all four."""
    orbit = generate_orbit(m, y0, horizon)
    shadow = discretize_orbit(orbit, g)
    table = build_transition_table(shadow)
    chain = build_chain(table, shadow[0], horizon)
    return orbit, shadow, table, chain


@dataclass(frozen=True)
class CensusReport:
    d: int
    K: int
    generator: str
    ensemble: int
    seed: int
    pairs: tuple  # (pre_period, period) per sample
    redraws: int = 0

    @property
    def periods(self) -> list[int]:
        return [L for _, L in self.pairs]

    @property
    def histogram(self) -> dict:
        hist = {}
        for L in self.periods:
            hist[L] = hist.get(L, 0) + 1
        return dict(sorted(hist.items()))

    def to_json(self):
        Ls = self.periods
        return {
            "d": self.d,
            "K": self.K,
            "generator": self.generator,
            "ensemble": self.ensemble,
            "seed": self.seed,
            "state_count": (self.K + 1) ** self.d,
            "mean_L": statistics.fmean(Ls),
            "median_L": statistics.median(Ls),
            "max_L": max(Ls),
            "mean_T": statistics.fmean(T for T, _ in self.pairs),
            "histogram_L": {str(k): v for k, v in self.histogram.items()},
            "redraws": self.redraws,
        }


def _census_random_map(d: int, K: int, rng) -> tuple[int, int]:
    # Lazy random next-first-coordinate function respecting the shift
    # structure; only visited states draw randomness.
    memo = {}

    def step(s):
        if s not in memo:
            memo[s] = (int(rng.integers(0, K + 1)),) + s[:-1]
        return memo[s]

    state = tuple(int(i) for i in rng.integers(0, K + 1, d))
    visit = {state: 0}
    t = 0
    while True:
        state = step(state)
        t += 1
        if state in visit:
            return visit[state], t - visit[state]
        visit[state] = t


def _random_stable_ar(d: int, rng, radius: float = 0.9):
    """Coefficients of a recurrence whose roots all lie within `radius`."""
    roots = []
    remaining = d
    while remaining > 0:
        if remaining >= 2 and rng.random() < 0.5:
            r = radius * np.sqrt(rng.random())
            theta = rng.uniform(0.0, np.pi)
            mu = r * np.exp(1j * theta)
            roots.extend([mu, np.conj(mu)])
            remaining -= 2
        else:
            roots.append(complex(rng.uniform(-radius, radius)))
            remaining -= 1
    coeffs = np.real(np.poly(np.array(roots)))  # monic, highest power first
    return tuple(float(-c) for c in coeffs[1:])


def _census_random_ar(d: int, K: int, rng, horizon: int) -> tuple[int, int] | None:
    p = _random_stable_ar(d, rng)
    m = ar_map(p)
    z0 = rng.uniform(-1.0, 1.0, d)
    # The recurrence is linear, so rescaling the initial data rescales the
    # whole trajectory; halve against the observed max to keep the orbit
    # safely inside the box.
    peak = float(np.max(np.abs(z0)))
    coords = tuple(z0)
    for _ in range(horizon):
        coords = _raw_output(m, coords)
        peak = max(peak, abs(coords[0]))
    if peak > 1.0:
        z0 = z0 / (2.0 * peak)
    g = GridSpec(K=K, d=d)
    try:
        _, _, _, chain = run_pipeline(m, Point(z0), g, horizon)
    except DanglingState:
        return None
    return chain.pre_period, chain.period


def period_census(
    d: int,
    K: int,
    ensemble: int,
    seed: int = 0,
    generator: str = "random_map",
    horizon: int | None = None,
) -> CensusReport:
    """Sample (pre-period, period) statistics over a random ensemble.

    "random_map" draws a uniformly random new-first-coordinate function on
    the grid states (the shift fills the remaining coordinates);
    "random_ar" draws stable recurrence coefficients and runs the full
    quantization pipeline.
    """
    if ensemble < 1:
        raise ValueError("ensemble must be >= 1")
    if generator not in ("random_map", "random_ar"):
        raise ValueError(f"unknown generator {generator!r}")
    g = GridSpec(K=K, d=d)
    if horizon is None:
        horizon = default_horizon(g)
    rng = np.random.default_rng(seed)
    pairs = []
    redraws = 0
    attempts_left = 10 * ensemble
    while len(pairs) < ensemble:
        if attempts_left <= 0:
            raise RuntimeError("census generator kept failing; giving up")
        attempts_left -= 1
        if generator == "random_map":
            result = _census_random_map(d, K, rng)
        else:
            result = _census_random_ar(d, K, rng, horizon)
        if result is None:
            redraws += 1
            continue
        pairs.append(result)
    return CensusReport(
        d=d,
        K=K,
        generator=generator,
        ensemble=ensemble,
        seed=seed,
        pairs=tuple(pairs),
        redraws=redraws,
    )
