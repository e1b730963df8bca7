"""Breadth-first planning over full state histories.

Because belief formulas are evaluated on the whole state sequence, search
nodes carry their complete history and duplicate detection keys on the full
sequence: two nodes are interchangeable only if every state along the way
matches. Merging on last states would be unsound here.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .core import (
    Formula,
    Signature,
    State,
    StateSequence,
    Ternary,
    ValidationError,
    Value,
)
from .perspectives import ObservationModel
from .semantics import Evaluator

SOLVED = "solved"
UNSOLVABLE = "unsolvable"
ABORTED = "aborted"


@dataclass(frozen=True)
class Effect:
    """One assignment of an action: set a constant, copy a variable, or add."""

    var: str
    kind: str  # "set" | "copy" | "add"
    operand: object

    def __post_init__(self):
        if self.kind not in ("set", "copy", "add"):
            raise ValidationError(f"unknown effect kind {self.kind!r}")


@dataclass(frozen=True)
class Action:
    name: str
    precondition: Optional[Formula]
    effects: Tuple[Effect, ...]


@dataclass(frozen=True)
class SearchNode:
    sequence: StateSequence
    plan: Tuple[str, ...]


Goal = Tuple[Formula, Ternary]


@dataclass
class PlanResult:
    """Outcome of one search plus its bookkeeping.

    `expanded` counts nodes whose successors were generated; `generated`
    counts every node created, the root included, before duplicate pruning.
    A goal node is recognised when generated, so a goal that already holds
    in the initial state reports expanded = 0.
    """

    status: str
    plan: Optional[Tuple[str, ...]]
    expanded: int
    generated: int
    external_calls: int
    avg_call_ms: float
    common_max: int
    common_avg: float
    total_time: float

    @property
    def plan_length(self) -> Optional[int]:
        return None if self.plan is None else len(self.plan)


def _apply_effects(sig: Signature, state: State,
                   effects: Tuple[Effect, ...]) -> Optional[State]:
    """Successor values, or None when any effect leaves its declared domain."""
    vals = list(state.vals)
    for eff in effects:
        idx = sig.index[eff.var]
        if eff.kind == "set":
            new: Optional[Value] = eff.operand  # type: ignore[assignment]
        elif eff.kind == "copy":
            new = vals[sig.index[eff.operand]]  # type: ignore[index]
        else:
            current = vals[idx]
            if current is None:
                return None
            new = current + eff.operand  # type: ignore[operator]
        if new is None or not sig.in_domain(eff.var, new):
            return None
        vals[idx] = new
    return sig.state_from_values(tuple(vals))


def apply_action(evaluator: Evaluator, action: Action,
                 node: SearchNode) -> Optional[SearchNode]:
    """Extend the node by one action, or None if inapplicable.

    The precondition must evaluate to strictly true on the node's history;
    merely-unknown preconditions do not license acting.
    """
    if action.precondition is not None:
        if evaluator.evaluate(node.sequence, action.precondition) is not Ternary.TRUE:
            return None
    sig = node.sequence.sig
    successor = _apply_effects(sig, node.sequence.last, action.effects)
    if successor is None:
        return None
    return SearchNode(node.sequence.extend(successor), node.plan + (action.name,))


def breadth_first_plan(model: ObservationModel,
                       actions: Sequence[Action],
                       initial: State,
                       goals: Iterable[Goal],
                       max_depth: int = 12,
                       node_budget: Optional[int] = None,
                       time_budget: Optional[float] = None) -> PlanResult:
    """Shortest plan reaching all goal targets, FIFO order, duplicates pruned.

    Exhausting all plans of length <= max_depth yields status "unsolvable";
    exceeding a node or time budget yields "aborted" (nothing is proven).
    Action order is the declaration order, so results are deterministic.
    """
    sig = initial.sig
    missing = [v for v in sig.variables if v not in initial]
    if missing:
        raise ValidationError(f"initial state must be global; missing: {', '.join(missing)}")
    goals = tuple(goals)
    evaluator = Evaluator(model)
    start = time.perf_counter()

    def finish(status: str, plan: Optional[Tuple[str, ...]],
               expanded: int, generated: int) -> PlanResult:
        stats = evaluator.stats
        return PlanResult(
            status=status,
            plan=plan,
            expanded=expanded,
            generated=generated,
            external_calls=stats.external_calls,
            avg_call_ms=stats.avg_call_ms,
            common_max=stats.common_max,
            common_avg=stats.common_avg,
            total_time=time.perf_counter() - start,
        )

    def satisfied(node: SearchNode) -> bool:
        return all(evaluator.evaluate(node.sequence, phi) is target
                   for phi, target in goals)

    root = SearchNode(StateSequence([initial]), ())
    expanded = 0
    generated = 1
    if satisfied(root):
        return finish(SOLVED, (), expanded, generated)
    frontier = deque([root])
    seen = {root.sequence}
    while frontier:
        if node_budget is not None and generated >= node_budget:
            return finish(ABORTED, None, expanded, generated)
        if time_budget is not None and time.perf_counter() - start > time_budget:
            return finish(ABORTED, None, expanded, generated)
        node = frontier.popleft()
        if len(node.plan) >= max_depth:
            continue
        expanded += 1
        for action in actions:
            child = apply_action(evaluator, action, node)
            if child is None:
                continue
            generated += 1
            if child.sequence in seen:
                continue
            seen.add(child.sequence)
            if satisfied(child):
                return finish(SOLVED, child.plan, expanded, generated)
            frontier.append(child)
    return finish(UNSOLVABLE, None, expanded, generated)
