"""Value search: turning upper-bound queries into inconsistency values.

The binary search follows the published scheme step for step: probe the
midpoint of the remaining range, keep the bound on satisfiable, move up on
unsatisfiable, and fall back to infinity when the range is exhausted and the
measure admits it.  A linear variant probes 0, 1, 2, ... instead.  The
hitting-set measure searches over block counts internally (satisfiability of
the b-block instance certifies value <= b - 1), so both drivers operate on
the plain value range [0, |K|-1].

``compute`` dispatches a (measure, method) pair to the right pipeline and
reports phase timings split into encoding generation, CNF transformation,
solving, and everything else.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from . import asp as asp_mod
from . import encodings
from .kb import KnowledgeBase
from .oracles import MeasureUndefinedError, naive_measure
from .solver import (
    BackendConfig,
    HardClausesUnsatisfiableError,
    SolveStatus,
    solve,
    solve_maxsat,
)
from .values import INF, MEASURES, Value

METHODS = ("sat-binary", "sat-linear", "maxsat", "naive", "asp")

PHASES = ("encoding", "cnfTransform", "solving", "other")


@dataclass(frozen=True)
class SearchRange:
    measure: str
    min: int
    max: int
    infinity_possible: bool

    @property
    def size(self) -> int:
        return self.max - self.min + 1


def search_range(measure: str, kb: KnowledgeBase) -> SearchRange:
    """Value range to search, computed on the prepared KB."""
    pkb = encodings.prepare_kb(kb)
    n_atoms = len(pkb.signature())
    n_formulas = len(pkb)
    if measure == "contension":
        return SearchRange(measure, 0, n_atoms, False)
    if measure == "forgetting":
        return SearchRange(measure, 0, len(pkb.occurrences()), False)
    if measure == "hitting-set":
        return SearchRange(measure, 0, n_formulas - 1, True)
    if measure == "max-distance":
        return SearchRange(measure, 0, n_atoms, True)
    if measure == "sum-distance":
        return SearchRange(measure, 0, n_atoms * n_formulas, True)
    if measure == "hit-distance":
        return SearchRange(measure, 0, n_formulas, False)
    raise ValueError(f"unknown measure {measure!r}")


@dataclass(frozen=True)
class RunConfig:
    backend: BackendConfig = field(default_factory=BackendConfig)
    card_method: str = "sequential"
    asp_solver: str | None = None

    @property
    def timeout(self) -> float:
        return self.backend.timeout


@dataclass
class SearchOutcome:
    measure: str
    method: str
    value: Value | None
    solver_calls: int
    phase_times: dict[str, float]
    total_seconds: float
    status: str = "ok"  # "ok" | "timeout"
    bounds: tuple[int, int] | None = None  # remaining range on timeout

    @property
    def timed_out(self) -> bool:
        return self.status == "timeout"


class _PhaseClock:
    def __init__(self) -> None:
        self.start = time.perf_counter()
        self.acc = {"encoding": 0.0, "cnfTransform": 0.0, "solving": 0.0}

    def outcome(self, measure: str, method: str, value: Value | None,
                calls: int, status: str = "ok",
                bounds: tuple[int, int] | None = None) -> SearchOutcome:
        total = time.perf_counter() - self.start
        other = max(0.0, total - sum(self.acc.values()))
        phases = dict(self.acc, other=other)
        return SearchOutcome(measure, method, value, calls, phases, total, status, bounds)


def _probe(measure: str, kb: KnowledgeBase, bound: int, cfg: RunConfig,
           clock: _PhaseClock, deadline: float) -> bool | None:
    """One upper-bound query; None signals a backend timeout."""
    begin = time.perf_counter()
    enc = encodings.encode(measure, kb, bound, cfg.card_method)
    elapsed = time.perf_counter() - begin
    clock.acc["cnfTransform"] += enc.cnf_transform_seconds
    clock.acc["encoding"] += elapsed - enc.cnf_transform_seconds
    remaining = deadline - time.monotonic()
    if remaining <= 0:
        return None
    begin = time.perf_counter()
    result = solve(enc.cnf, replace(cfg.backend, timeout=remaining))
    clock.acc["solving"] += time.perf_counter() - begin
    if result.status is SolveStatus.TIMEOUT:
        return None
    return result.status is SolveStatus.SAT


def _exhausted(measure: str, rng: SearchRange) -> Value:
    if rng.infinity_possible:
        return INF
    raise MeasureUndefinedError(
        f"no upper bound of {measure} found in its range; "
        "a formula constant-folds to -"
    )


def binary_search(measure: str, kb: KnowledgeBase, cfg: RunConfig | None = None) -> SearchOutcome:
    """Published binary-search scheme over the measure's value range."""
    cfg = cfg or RunConfig()
    clock = _PhaseClock()
    deadline = time.monotonic() + cfg.timeout
    if len(kb) == 0:
        return clock.outcome(measure, "sat-binary", 0, 0)
    rng = search_range(measure, kb)
    lo, hi = rng.min, rng.max
    inc_val = -1
    calls = 0
    while lo <= hi:
        mid = lo + (hi - lo) // 2
        verdict = _probe(measure, kb, mid, cfg, clock, deadline)
        if verdict is None:
            return clock.outcome(measure, "sat-binary", None, calls, "timeout", (lo, hi))
        calls += 1
        if verdict:
            if inc_val < 0 or mid < inc_val:
                inc_val = mid
            hi = mid - 1
        else:
            lo = mid + 1
    value = _exhausted(measure, rng) if inc_val < 0 else inc_val
    return clock.outcome(measure, "sat-binary", value, calls)


def linear_search(measure: str, kb: KnowledgeBase, cfg: RunConfig | None = None) -> SearchOutcome:
    """Probe u = 0, 1, 2, ...; the first satisfiable bound is the value."""
    cfg = cfg or RunConfig()
    clock = _PhaseClock()
    deadline = time.monotonic() + cfg.timeout
    if len(kb) == 0:
        return clock.outcome(measure, "sat-linear", 0, 0)
    rng = search_range(measure, kb)
    calls = 0
    for u in range(rng.min, rng.max + 1):
        verdict = _probe(measure, kb, u, cfg, clock, deadline)
        if verdict is None:
            return clock.outcome(measure, "sat-linear", None, calls, "timeout", (u, rng.max))
        calls += 1
        if verdict:
            return clock.outcome(measure, "sat-linear", u, calls)
    return clock.outcome(measure, "sat-linear", _exhausted(measure, rng), calls)


def _compute_maxsat(measure: str, kb: KnowledgeBase, cfg: RunConfig) -> SearchOutcome:
    clock = _PhaseClock()
    if len(kb) == 0:
        return clock.outcome(measure, "maxsat", 0, 0)
    begin = time.perf_counter()
    inst = encodings.encode_contension_maxsat(kb, cfg.card_method)
    elapsed = time.perf_counter() - begin
    clock.acc["cnfTransform"] += inst.cnf_transform_seconds
    clock.acc["encoding"] += elapsed - inst.cnf_transform_seconds
    from .solver import MaxSatInstance

    stats: dict[str, int] = {}
    begin = time.perf_counter()
    try:
        cost, _model = solve_maxsat(
            MaxSatInstance(inst.hard, inst.soft_units, inst.hard.varmap),
            cfg.backend,
            stats=stats,
        )
    except HardClausesUnsatisfiableError as exc:
        raise MeasureUndefinedError(
            "contension hard clauses unsatisfiable; a formula constant-folds to -"
        ) from exc
    except TimeoutError:
        clock.acc["solving"] += time.perf_counter() - begin
        return clock.outcome(measure, "maxsat", None, stats.get("calls", 0), "timeout")
    clock.acc["solving"] += time.perf_counter() - begin
    return clock.outcome(measure, "maxsat", cost, stats.get("calls", 1))


def _compute_naive(measure: str, kb: KnowledgeBase, cfg: RunConfig) -> SearchOutcome:
    clock = _PhaseClock()
    if len(kb) == 0:
        return clock.outcome(measure, "naive", 0, 0)
    begin = time.perf_counter()
    value = naive_measure(kb, measure)
    clock.acc["solving"] += time.perf_counter() - begin
    return clock.outcome(measure, "naive", value, 1)


def _compute_asp(measure: str, kb: KnowledgeBase, cfg: RunConfig) -> SearchOutcome:
    clock = _PhaseClock()
    if len(kb) == 0:
        return clock.outcome(measure, "asp", 0, 0)
    begin = time.perf_counter()
    program = asp_mod.emit_asp(measure, kb)
    clock.acc["encoding"] += time.perf_counter() - begin
    begin = time.perf_counter()
    report = asp_mod.solve_asp(program, solver_path=cfg.asp_solver, timeout=cfg.timeout)
    clock.acc["solving"] += time.perf_counter() - begin
    if report.status == "timeout":
        return clock.outcome(measure, "asp", None, 1, "timeout")
    return clock.outcome(measure, "asp", asp_mod.extract_value(measure, program, report), 1)


def compute(measure: str, kb: KnowledgeBase, method: str = "sat-binary",
            cfg: RunConfig | None = None) -> SearchOutcome:
    """Compute the measure's value with the chosen pipeline."""
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "maxsat" and measure != "contension":
        raise ValueError("the MaxSAT pipeline only supports the contension measure")
    cfg = cfg or RunConfig()
    if method == "sat-binary":
        return binary_search(measure, kb, cfg)
    if method == "sat-linear":
        return linear_search(measure, kb, cfg)
    if method == "maxsat":
        return _compute_maxsat(measure, kb, cfg)
    if method == "naive":
        return _compute_naive(measure, kb, cfg)
    return _compute_asp(measure, kb, cfg)
