"""Three-valued evaluation of epistemic formulas over state sequences."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

from .core import (
    And,
    Atom,
    Believes,
    Formula,
    GroupBelieves,
    GroupKnows,
    GroupMode,
    GroupSees,
    GroupSeesVar,
    Knows,
    Not,
    Sees,
    SeesVar,
    StateSequence,
    Ternary,
    interpret_atom,
    validate_formula,
)
from .perspectives import (
    Cache,
    ObservationModel,
    common_observation,
    common_perspectives,
    distributed_perspective,
    group_observation,
    uniform_perspectives,
    _cached_perspective,
)


@dataclass
class EvalStats:
    """Accumulated evaluation statistics.

    `external_calls` counts top-level evaluations; the fixed-point counts
    record, for every common-belief evaluation, how many iterations the
    common-perspective computation took.
    """

    external_calls: int = 0
    eval_time: float = 0.0
    cf_iteration_counts: List[int] = field(default_factory=list)

    @property
    def common_max(self) -> int:
        return max(self.cf_iteration_counts, default=0)

    @property
    def common_avg(self) -> float:
        counts = self.cf_iteration_counts
        return sum(counts) / len(counts) if counts else 0.0

    @property
    def avg_call_ms(self) -> float:
        if not self.external_calls:
            return 0.0
        return self.eval_time / self.external_calls * 1000.0

    def merge(self, other: "EvalStats") -> None:
        self.external_calls += other.external_calls
        self.eval_time += other.eval_time
        self.cf_iteration_counts.extend(other.cf_iteration_counts)


class Evaluator:
    """Evaluates formulas against state sequences under one observation model.

    Evaluation is a pure function of (sequence, formula): repeated calls give
    identical truth values and identical fixed-point iteration counts. The
    evaluator mutates only its `stats`, which can be merged across instances.
    Perspectives are cached per top-level call, since the common-belief fixed
    point revisits the same individual perspectives many times.
    """

    def __init__(self, model: ObservationModel):
        self.model = model
        self.stats = EvalStats()
        self._cache: Optional[Cache] = None
        # keeps validated formulas alive so ids cannot be recycled
        self._checked_formulas: dict[int, Formula] = {}

    def evaluate(self, seq: StateSequence, phi: Formula) -> Ternary:
        if id(phi) not in self._checked_formulas:
            validate_formula(seq.sig, phi)
            self._checked_formulas[id(phi)] = phi
        start = time.perf_counter()
        self._cache = {}
        try:
            result = self._eval(seq, phi)
        finally:
            self._cache = None
            self.stats.external_calls += 1
            self.stats.eval_time += time.perf_counter() - start
        return result

    # -- helpers ------------------------------------------------------------

    def _perspective(self, agent: str, seq: StateSequence) -> StateSequence:
        return _cached_perspective(self.model, agent, seq, self._cache)

    def _pooled_perspective(self, group, seq: StateSequence) -> StateSequence:
        cache = self._cache
        key = ("df", group, seq)
        if cache is not None and key in cache:
            return cache[key]
        pooled = distributed_perspective(self.model, group, seq)
        if cache is not None:
            cache[key] = pooled
        return pooled

    # -- dispatch -----------------------------------------------------------

    def _eval(self, seq: StateSequence, phi: Formula) -> Ternary:
        if isinstance(phi, Atom):
            return interpret_atom(seq.last, phi)
        if isinstance(phi, And):
            left = self._eval(seq, phi.left)
            if left is Ternary.FALSE:
                return Ternary.FALSE
            return min(left, self._eval(seq, phi.right))
        if isinstance(phi, Not):
            return self._eval(seq, phi.child).negate()
        if isinstance(phi, SeesVar):
            return self._sees_var(seq, phi.agent, phi.var)
        if isinstance(phi, Sees):
            return self._sees_formula(seq, phi.agent, phi.child)
        if isinstance(phi, Knows):
            held = self._eval(seq, phi.child)
            if held is Ternary.FALSE:
                return Ternary.FALSE
            return min(held, self._sees_formula(seq, phi.agent, phi.child))
        if isinstance(phi, Believes):
            return self._eval(self._perspective(phi.agent, seq), phi.child)
        if isinstance(phi, GroupSeesVar):
            return self._group_sees_var(seq, phi)
        if isinstance(phi, GroupSees):
            return self._group_sees_formula(seq, phi.mode, phi.group, phi.child)
        if isinstance(phi, GroupKnows):
            held = self._eval(seq, phi.child)
            if held is Ternary.FALSE:
                return Ternary.FALSE
            return min(held, self._group_sees_formula(seq, phi.mode, phi.group, phi.child))
        if isinstance(phi, GroupBelieves):
            return self._group_believes(seq, phi)
        raise TypeError(f"not a formula node: {phi!r}")

    # -- seeing -------------------------------------------------------------

    def _sees_var(self, seq: StateSequence, agent: str, var: str) -> Ternary:
        last = seq.last
        if agent not in last or var not in last:
            return Ternary.UNKNOWN
        if not self.model.sees(agent, last, var):
            return Ternary.FALSE
        return Ternary.TRUE

    def _sees_formula(self, seq: StateSequence, agent: str, child: Formula) -> Ternary:
        if self._eval(seq, child) is Ternary.UNKNOWN or agent not in seq.last:
            return Ternary.UNKNOWN
        observed = StateSequence([self.model.observe(agent, s) for s in seq])
        if self._eval(observed, child) is Ternary.UNKNOWN:
            return Ternary.FALSE
        return Ternary.TRUE

    def _group_sees_var(self, seq: StateSequence, phi: GroupSeesVar) -> Ternary:
        last = seq.last
        if phi.mode is GroupMode.UNIFORM:
            return min(self._sees_var(seq, i, phi.var) for i in phi.group)
        if phi.mode is GroupMode.DISTRIBUTED:
            if phi.var not in last or not any(i in last for i in phi.group):
                return Ternary.UNKNOWN
            if not any(self.model.sees(i, last, phi.var) for i in phi.group):
                return Ternary.FALSE
            return Ternary.TRUE
        # common: every member must be present, and the variable must survive
        # the intersection fixed point
        if phi.var not in last or not all(i in last for i in phi.group):
            return Ternary.UNKNOWN
        if phi.var not in common_observation(self.model, phi.group, last):
            return Ternary.FALSE
        return Ternary.TRUE

    def _group_sees_formula(self, seq: StateSequence, mode: GroupMode,
                            group, child: Formula) -> Ternary:
        last = seq.last
        if mode is GroupMode.UNIFORM:
            return min(self._sees_formula(seq, i, child) for i in group)
        if mode is GroupMode.DISTRIBUTED:
            if self._eval(seq, child) is Ternary.UNKNOWN or not any(i in last for i in group):
                return Ternary.UNKNOWN
            pooled = group_observation(self.model, group, last)
            if self._eval(StateSequence([pooled]), child) is Ternary.UNKNOWN:
                return Ternary.FALSE
            return Ternary.TRUE
        if self._eval(seq, child) is Ternary.UNKNOWN or not all(i in last for i in group):
            return Ternary.UNKNOWN
        shared = StateSequence([common_observation(self.model, group, s) for s in seq])
        if self._eval(shared, child) is Ternary.UNKNOWN:
            return Ternary.FALSE
        return Ternary.TRUE

    # -- believing ----------------------------------------------------------

    def _group_believes(self, seq: StateSequence, phi: GroupBelieves) -> Ternary:
        if phi.mode is GroupMode.UNIFORM:
            views = uniform_perspectives(self.model, phi.group, seq, self._cache)
            return min(self._eval(w, phi.child) for w in views)
        if phi.mode is GroupMode.DISTRIBUTED:
            return self._eval(self._pooled_perspective(phi.group, seq), phi.child)
        views, fp = common_perspectives(self.model, phi.group,
                                        frozenset([seq]), self._cache)
        self.stats.cf_iteration_counts.append(fp.iterations)
        return min(self._eval(w, phi.child) for w in views)
