"""Monte Carlo experiments on normalized row sums of dependent arrays.

Two sampling semantics share one engine: ``triangular`` draws a fresh row for
every row length, ``sequence`` draws one sequence per replication and reuses
its prefixes across the schedule.  Replication streams are derived from
(seed, row, replication) — (seed, replication) in sequence mode — so results
are bit-identical no matter how many workers run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .bounds import (BoundInputs, FukNagaevInputs, bennett_bound,
                     bernstein_bound, fuk_nagaev_bound)
from .dependence import TriangularArrayModel, rng_for, sample_rows
from .norming import NormingScheme

__all__ = [
    "ConvergenceRow",
    "ExperimentPlan",
    "MonteCarloEstimate",
    "PathRow",
    "SweepParams",
    "SweepRow",
    "TruncationSplit",
    "WeightRule",
    "bound_validity_sweep",
    "complete_convergence_diagnostic",
    "estimate_tail",
    "normalized_row_sum",
    "row_stat_matrix",
    "strong_law_path_diagnostic",
    "tail_table",
    "truncate_split",
    "worker_count",
]

DEFAULT_SCHEDULE = tuple(2 ** k for k in range(4, 17))


def worker_count() -> int:
    """Thread cap from ENDLAB_THREADS (0 or unset means auto)."""
    raw = os.environ.get("ENDLAB_THREADS", "0").strip() or "0"
    value = int(raw)
    if value < 0:
        raise ValueError("ENDLAB_THREADS must be >= 0")
    return value if value > 0 else min(os.cpu_count() or 1, 8)


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightRule:
    """Deterministic weight array c_{n,k}: constant or alternating signs."""

    kind: str = "const"
    value: float = 1.0

    def __post_init__(self):
        if self.kind not in ("const", "alternating"):
            raise ValueError(f"unknown weight rule {self.kind!r}")

    def vector(self, n: int) -> np.ndarray:
        w = np.full(n, self.value)
        if self.kind == "alternating":
            w[1::2] *= -1.0
        return w

    def to_config(self) -> str:
        return f"{self.kind}({self.value!r})"


@dataclass(frozen=True)
class ExperimentPlan:
    model: TriangularArrayModel
    scheme: NormingScheme
    epsilons: tuple
    n_schedule: tuple = DEFAULT_SCHEDULE
    replications: int = 1000
    seed: int = 0
    center: str = "subtract_mean"
    semantics: str = "triangular"
    weights: WeightRule | None = None
    name: str = "experiment"

    def __post_init__(self):
        if self.replications < 100:
            raise ValueError("at least 100 replications are required for "
                             f"probability estimates, got {self.replications}")
        sched = tuple(int(n) for n in self.n_schedule)
        if any(b <= a for a, b in zip(sched, sched[1:])) or not sched:
            raise ValueError("n_schedule must be strictly increasing and non-empty")
        if any(e <= 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        if self.center not in ("subtract_mean", "none"):
            raise ValueError(f"unknown centering mode {self.center!r}")
        if self.semantics not in ("triangular", "sequence"):
            raise ValueError(f"unknown semantics {self.semantics!r}")
        object.__setattr__(self, "n_schedule", sched)
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Probability (or path-statistic) estimate with a normal-approximation
    95% half-width."""

    value: float
    half_width: float
    replications: int

    @staticmethod
    def from_count(count: int, replications: int) -> "MonteCarloEstimate":
        p = count / replications
        hw = 1.96 * math.sqrt(p * (1.0 - p) / replications)
        return MonteCarloEstimate(p, hw, replications)


# ---------------------------------------------------------------------------
# truncation split
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationSplit:
    """Bounded part (clamped at +-a) and exceedance remainder; the parts
    always add back to the input exactly."""

    x_prime: object
    x_double_prime: object


def truncate_split(x, a) -> TruncationSplit:
    """Split x into the +-a clamp and the remainder; accepts arrays.

    The remainder is rounded once, so the bounded part is recomputed as
    x - remainder (exact by Sterbenz) and nudged one ulp when the rounding
    pushed it past the level; both invariants then hold exactly in floats.
    """
    a_arr = np.asarray(a, dtype=float)
    if np.any(a_arr <= 0.0):
        raise ValueError("truncation level must be positive")
    x_arr = np.asarray(x, dtype=float)
    rest = x_arr - np.clip(x_arr, -a_arr, a_arr)
    prime = x_arr - rest
    over = np.abs(prime) > a_arr
    if np.any(over):
        rest = np.where(over, np.nextafter(rest, x_arr), rest)
        prime = x_arr - rest
    if np.ndim(x) == 0:
        return TruncationSplit(float(prime), float(rest))
    return TruncationSplit(prime, rest)


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

def _row_means(model: TriangularArrayModel, n: int) -> np.ndarray:
    shared = model.iid_marginal()
    if shared is not None and model.kind != "discrete_joint":
        return np.full(n, shared.mean())
    return np.array([model.marginal_for(n, k).mean() for k in range(1, n + 1)])


def _chunks(total: int, size: int = 256):
    for lo in range(0, total, size):
        yield lo, min(lo + size, total)


def _triangular_sums(plan: ExperimentPlan, n: int, lo: int, hi: int) -> np.ndarray:
    rngs = [rng_for(plan.seed, n, rep) for rep in range(lo, hi)]
    rows = sample_rows(plan.model, n, rngs)
    if plan.center == "subtract_mean":
        rows = rows - _row_means(plan.model, n)[None, :]
    if plan.weights is not None:
        sums = rows @ plan.weights.vector(n)
    else:
        sums = rows.sum(axis=1)
    return sums / float(plan.scheme.b(n))


def _sequence_sums(plan: ExperimentPlan, schedule: Sequence[int],
                   lo: int, hi: int) -> np.ndarray:
    n_max = schedule[-1]
    rngs = [rng_for(plan.seed, rep) for rep in range(lo, hi)]
    rows = sample_rows(plan.model, n_max, rngs)
    if plan.center == "subtract_mean":
        rows = rows - _row_means(plan.model, n_max)[None, :]
    out = np.empty((hi - lo, len(schedule)))
    for i, n in enumerate(schedule):
        if plan.weights is not None:
            # weights vary with the row length, so each prefix is re-weighted
            out[:, i] = rows[:, :n] @ plan.weights.vector(n)
        else:
            out[:, i] = rows[:, :n].sum(axis=1)
        out[:, i] /= float(plan.scheme.b(n))
    return out


def row_stat_matrix(plan: ExperimentPlan,
                    schedule: Sequence[int] | None = None) -> np.ndarray:
    """Signed normalized sums, shape (replications, len(schedule)).

    Work items are (row, replication-block) in triangular mode and
    replication-blocks in sequence mode; every value lands at a fixed index,
    so the matrix is identical for any worker count.
    """
    schedule = list(plan.n_schedule if schedule is None else schedule)
    reps = plan.replications
    out = np.empty((reps, len(schedule)))
    workers = worker_count()

    if plan.semantics == "sequence":
        tasks = [(lo, hi) for lo, hi in _chunks(reps)]

        def run_seq(task):
            lo, hi = task
            out[lo:hi, :] = _sequence_sums(plan, schedule, lo, hi)

        _run_tasks(run_seq, tasks, workers)
        return out

    tasks = [(i, n, lo, hi)
             for i, n in enumerate(schedule)
             for lo, hi in _chunks(reps)]

    def run_tri(task):
        i, n, lo, hi = task
        out[lo:hi, i] = _triangular_sums(plan, n, lo, hi)

    _run_tasks(run_tri, tasks, workers)
    return out


def _run_tasks(fn, tasks, workers: int) -> None:
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            fn(task)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fn, tasks))


def normalized_row_sum(plan: ExperimentPlan, n: int, replication_index: int) -> float:
    """One centred, weighted, normalized row sum; deterministic in
    (plan.seed, n, replication_index)."""
    if plan.semantics == "sequence":
        return float(_sequence_sums(plan, [n], replication_index,
                                    replication_index + 1)[0, 0])
    return float(_triangular_sums(plan, n, replication_index,
                                  replication_index + 1)[0])


def estimate_tail(plan: ExperimentPlan, n: int, epsilon: float) -> MonteCarloEstimate:
    """Fraction of replications with |normalized sum| > epsilon."""
    stats = row_stat_matrix(plan, [n])[:, 0]
    count = int(np.count_nonzero(np.abs(stats) > epsilon))
    return MonteCarloEstimate.from_count(count, plan.replications)


def tail_table(plan: ExperimentPlan,
               stats: np.ndarray | None = None) -> dict:
    """Estimates for every (n, epsilon) cell of the plan; returns a dict
    keyed by (n, epsilon)."""
    if stats is None:
        stats = row_stat_matrix(plan)
    table = {}
    for i, n in enumerate(plan.n_schedule):
        column = np.abs(stats[:, i])
        for eps in plan.epsilons:
            count = int(np.count_nonzero(column > eps))
            table[(n, eps)] = MonteCarloEstimate.from_count(count, plan.replications)
    return table


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    epsilon: float
    partial_sum: float
    last_term: float
    slope: float


def _loglog_slope(ns: np.ndarray, ps: np.ndarray) -> float:
    """Least-squares slope of log(p) against log(n) over the positive
    estimates; -inf when fewer than two positive points remain (the observed
    tail has died out inside the window)."""
    mask = ps > 0.0
    if int(mask.sum()) < 2:
        return -math.inf
    return float(np.polyfit(np.log(ns[mask]), np.log(ps[mask]), 1)[0])


def complete_convergence_diagnostic(plan: ExperimentPlan,
                                    stats: np.ndarray | None = None) -> list:
    """Summability proxy for the deviation-probability series.

    The partial sum weights each estimated tail by the schedule gap it stands
    in for (a Riemann proxy for the full series, reported as such), and the
    slope is the log-log fit of tail against n over the last half of the
    schedule.  Slopes below -1 indicate a summable tail by the integral test.
    """
    if len(plan.n_schedule) < 6:
        raise ValueError("the convergence diagnostic needs at least 6 schedule points")
    table = tail_table(plan, stats)
    ns = np.asarray(plan.n_schedule, dtype=float)
    gaps = np.diff(np.concatenate([[0.0], ns]))
    half = len(ns) // 2
    rows = []
    for eps in plan.epsilons:
        estimates = np.array([table[(n, eps)].value for n in plan.n_schedule])
        partial = float(np.dot(estimates, gaps))
        slope = _loglog_slope(ns[half:], estimates[half:])
        rows.append(ConvergenceRow(eps, partial, float(estimates[-1]), slope))
    return rows


@dataclass(frozen=True)
class PathRow:
    start_n: int
    trailing_sup_p95: float


def strong_law_path_diagnostic(plan: ExperimentPlan,
                               stats: np.ndarray | None = None) -> list:
    """Finite-horizon surrogate for almost-sure convergence: per replication
    the trailing supremum sup_{n >= N} |normalized sum| over schedule points,
    summarised by its 95th percentile across replications as N grows."""
    if stats is None:
        stats = row_stat_matrix(plan)
    magnitude = np.abs(stats)
    # suffix maximum along the schedule axis
    trailing = np.flip(np.maximum.accumulate(np.flip(magnitude, axis=1), axis=1),
                       axis=1)
    p95 = np.percentile(trailing, 95.0, axis=0)
    return [PathRow(int(n), float(v)) for n, v in zip(plan.n_schedule, p95)]


# ---------------------------------------------------------------------------
# bound validity sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepParams:
    """How to source the bound inputs.

    ``a``/``s``: explicit numbers, or None to derive per row (a: the largest
    summand support bound, s: the summed second moments).  ``m``: explicit
    number, "certified" (exact small rows), or "claimed".  ``lam``/``p``
    feed the truncation bound only.
    """

    a: float | None = None
    s: float | None = None
    m: object = "claimed"
    lam: float = 1.0
    p: float = 1.0
    enumeration_budget: int = 1 << 16


@dataclass(frozen=True)
class SweepRow:
    n: int
    epsilon: float
    tail: float
    half_width: float
    bound: float
    satisfied: object  # True/False, or None when bound preconditions fail
    mode: str
    note: str = ""


def _enumerate_row(plan: ExperimentPlan, n: int, budget: int):
    """Exact centred row distribution (values, probs) when the joint is
    enumerable; None otherwise."""
    model = plan.model
    if model.kind == "discrete_joint":
        table = model.joint_for(n)
        atoms = table.atoms.copy()
        probs = table.probs
    elif model.kind == "independent":
        specs = [model.marginal_for(n, k) for k in range(1, n + 1)]
        if not all(s._is_atomic() for s in specs):
            return None
        count = 1
        for s in specs:
            count *= len(s.values)
            if count > budget:
                return None
        atoms_cols = [np.asarray(s.values, dtype=float) for s in specs]
        probs_cols = [np.asarray(s.probs, dtype=float) for s in specs]
        atoms = atoms_cols[0][:, None]
        probs = probs_cols[0]
        for col_v, col_p in zip(atoms_cols[1:], probs_cols[1:]):
            atoms = np.concatenate(
                [np.repeat(atoms, len(col_v), axis=0),
                 np.tile(col_v, atoms.shape[0])[:, None]], axis=1)
            probs = (probs[:, None] * col_p[None, :]).reshape(-1)
    else:
        return None
    if plan.center == "subtract_mean":
        atoms = atoms - _row_means(model, n)[None, :]
    if plan.weights is not None:
        sums = atoms @ plan.weights.vector(n)
    else:
        sums = atoms.sum(axis=1)
    return sums, probs


def _certified_m(plan: ExperimentPlan, n: int) -> float:
    from .dependence import certify_end_row
    model = plan.model
    if model.kind == "independent":
        return 1.0  # product measure; the certifier returns 1 exactly
    cert = certify_end_row(model.joint_for(n), "end",
                           max_coords=8, max_atoms_per_coord=64)
    return max(1.0, cert.m_end)


def bound_validity_sweep(plan: ExperimentPlan, bound: str = "bennett",
                         params: SweepParams = SweepParams()) -> list:
    """Compare tails with a bound cell by cell.

    Exact mode (enumerable rows): the enumerated tail must not exceed the raw
    bound — any failure is an implementation bug.  MC mode: the estimate plus
    three half-widths is compared instead, and a claimed dependence constant
    is flagged in the note.
    """
    if bound not in ("bennett", "bernstein", "fuk_nagaev"):
        raise ValueError(f"unknown bound kind {bound!r}")
    rows = []
    for n in plan.n_schedule:
        enum = _enumerate_row(plan, n, params.enumeration_budget)
        specs = [plan.model.marginal_for(n, k) for k in range(1, n + 1)]
        means = _row_means(plan.model, n) if plan.center == "subtract_mean" \
            else np.zeros(n)
        weights = plan.weights.vector(n) if plan.weights is not None else np.ones(n)

        if params.m == "certified" and enum is not None:
            m_value = _certified_m(plan, n)
            m_note = "certified"
        elif params.m == "claimed" or params.m == "certified":
            m_value = plan.model.claimed_m_at(n)
            m_note = "claimed"
        else:
            m_value = float(params.m)
            m_note = "given"

        support = max(abs(w) * s.support_abs_bound() + abs(w) * abs(mu)
                      for w, s, mu in zip(weights, specs, means))
        if params.a is not None:
            a_value = params.a
        else:
            a_value = support if support > 0.0 else 1.0  # a.s.-zero rows
        if params.s is not None:
            s_value = params.s
        else:
            s_value = float(sum(w * w * (s.second_moment() - (s.mean() ** 2
                            if plan.center == "subtract_mean" else 0.0))
                            for w, s in zip(weights, specs)))
            s_value = max(s_value, 1e-300)

        note = m_note
        precondition_ok = True
        if bound in ("bennett", "bernstein") and support > a_value * (1.0 + 1e-12):
            precondition_ok = False
            note = f"support {support:.6g} exceeds a={a_value:.6g}"

        if enum is not None:
            sums, probs = enum
            mode = "exact"
        else:
            stats = row_stat_matrix(plan, [n])[:, 0] * float(plan.scheme.b(n))
            mode = "mc"

        for eps in plan.epsilons:
            if enum is not None:
                if bound == "fuk_nagaev":
                    tail = float(probs[np.abs(sums) > eps].sum())
                else:
                    tail = float(probs[sums > eps].sum())
                hw = 0.0
                comparison = tail
            else:
                if bound == "fuk_nagaev":
                    count = int(np.count_nonzero(np.abs(stats) > eps))
                else:
                    count = int(np.count_nonzero(stats > eps))
                est = MonteCarloEstimate.from_count(count, plan.replications)
                tail, hw = est.value, est.half_width
                comparison = tail + 3.0 * hw

            if not precondition_ok:
                rows.append(SweepRow(n, eps, tail, hw, math.nan, None, mode, note))
                continue

            if bound == "bennett":
                result = bennett_bound(BoundInputs(eps, a_value, s_value,
                                                   m_value, n))
            elif bound == "bernstein":
                result = bernstein_bound(BoundInputs(eps, a_value, s_value,
                                                     m_value, n))
            else:
                tails = [_weighted_tail(s, w, mu) for s, w, mu
                         in zip(specs, weights, means)]
                moment_sum = float(sum(
                    abs(w) ** params.p * _centered_abs_moment(s, params.p, mu)
                    for w, s, mu in zip(weights, specs, means)))
                result = fuk_nagaev_bound(FukNagaevInputs(
                    eps, params.lam, params.p, moment_sum, tails, m_value))
            bound_value = result.bound
            rows.append(SweepRow(n, eps, tail, hw, bound_value,
                                 bool(comparison <= bound_value), mode, note))
    return rows


def _centered_abs_moment(spec, p: float, mu: float) -> float:
    if mu == 0.0:
        return spec.abs_moment(p)
    if spec._is_atomic():
        v = np.asarray(spec.values) - mu
        return float(np.dot(np.abs(v) ** p, spec.probs))
    raise ValueError("centred absolute moments need atomic marginals")


def _weighted_tail(spec, w: float, mu: float):
    """t -> P{|w*(X - mu)| > t} for an atomic marginal."""
    if spec._is_atomic():
        v = np.abs(w * (np.asarray(spec.values) - mu))
        probs = np.asarray(spec.probs)

        def tail(t, v=v, probs=probs):
            return float(probs[v > t].sum())

        return tail

    def tail(t, spec=spec, w=w, mu=mu):
        if w == 0.0:
            return 0.0
        # P{|w (X - mu)| > t}; only symmetric-free shift for mu = 0
        if mu == 0.0:
            return float(spec.sf_abs(t / abs(w)))
        raise ValueError("centred tails need atomic marginals")

    return tail
