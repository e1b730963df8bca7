"""Observation models and perspective functions over state sequences.

An observation model says which variables an agent can make out in a state.
From it we derive, for any state sequence, the local sequence an agent is
justified in believing: what it currently sees plus remembered values, with
never-seen variables left absent. Group variants pool observations (the
distributed view) or iterate everyone's views to a fixed point (the common
view).
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from .core import (
    EngineError,
    Signature,
    State,
    StateSequence,
    ValidationError,
    Value,
)

PerspectiveSet = FrozenSet[StateSequence]

# cache maps ("jp", agent, seq) / ("df", group, seq) -> StateSequence
Cache = Dict[tuple, StateSequence]


class AxiomViolation(EngineError):
    """An observation model breaks one of the required axioms."""


class ObservationModel:
    """Visibility relation: which variables an agent can observe in a state.

    Subclasses implement ``sees``. The relation may consult only values
    present in the state it is given, and must be monotone in the state
    (extra assignments can only reveal more), so the derived projection
    ``observe`` satisfies containment, idempotence and monotonicity.

    ``sees`` is deliberately a relation on (possibly partial) states rather
    than a projection: a viewer can recognise *that* someone sees a variable
    (e.g. a peeking flag is visible) even when the variable's value is absent
    from the viewer's own local state. Perspective building relies on this.
    """

    name = "unnamed"

    def sees(self, agent: str, state: State, var: str) -> bool:
        raise NotImplementedError

    def observe(self, agent: str, state: State) -> State:
        """The part of `state` the agent can see (always a sub-state)."""
        sig = state.sig
        vals = list(state.vals)
        for idx, var in enumerate(sig.variables):
            if vals[idx] is not None and not self.sees(agent, state, var):
                vals[idx] = None
        return sig.state_from_values(tuple(vals))

    def transparent_variables(self) -> FrozenSet[str]:
        """Variables visible to every agent in every state (fast-path hint).

        Must be sound: ``sees`` has to return True for these unconditionally.
        """
        return frozenset()


_MODEL_FACTORIES: Dict[str, Callable[[Signature, list], ObservationModel]] = {}


def register_model(name: str):
    def wrap(factory: Callable[[Signature, list], ObservationModel]):
        _MODEL_FACTORIES[name] = factory
        return factory
    return wrap


def make_model(name: str, sig: Signature, config: Optional[list] = None) -> ObservationModel:
    try:
        factory = _MODEL_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(_MODEL_FACTORIES)) or "none"
        raise ValidationError(f"unknown observation model {name!r} (registered: {known})") from None
    return factory(sig, config or [])


def registered_models() -> Tuple[str, ...]:
    return tuple(sorted(_MODEL_FACTORIES))


# --------------------------------------------------------------------------
# Retrieval
# --------------------------------------------------------------------------

def retrieve_value(seq: StateSequence, ts: int, var: str) -> Optional[Value]:
    """Value of `var` with respect to timestamp `ts`.

    The value at `ts` if assigned there; otherwise the most recent earlier
    value; otherwise the closest later value; otherwise None. `ts` may be -1,
    meaning "before the sequence", in which case only forward lookup applies.
    """
    n = len(seq) - 1
    if not -1 <= ts <= n:
        raise IndexError(f"timestamp {ts} outside -1..{n}")
    occ = [t for t in range(len(seq)) if var in seq[t]]
    return _retrieve(seq, occ, ts, n, var)


def _retrieve(seq: StateSequence, occ: Sequence[int], ts: int, limit: int,
              var: str) -> Optional[Value]:
    # occ: sorted timestamps where var carries a value; limit: last usable index
    pos = bisect_left(occ, ts)
    if pos < len(occ) and occ[pos] == ts:
        return seq[ts].get(var)
    if pos > 0:
        return seq[occ[pos - 1]].get(var)
    if pos < len(occ) and occ[pos] <= limit:
        return seq[occ[pos]].get(var)
    return None


# --------------------------------------------------------------------------
# Individual and pooled perspectives
# --------------------------------------------------------------------------

def _believed_sequence(seq: StateSequence,
                       visible_at: Callable[[int, str], bool],
                       transparent: FrozenSet[str]) -> StateSequence:
    """Build the sequence a viewer believes, given its visibility per timestamp.

    For each variable and each timestamp t, take the last time (<= t) the
    viewer could see the variable and look its value up in the prefix
    [s_0..s_t] via the retrieval rule. A variable the viewer has not yet seen
    stays absent: with no sighting there is nothing to justify a value, and
    filling one in from later states would fabricate evidence.
    """
    sig = seq.sig
    length = len(seq)
    variables = sig.variables
    columns: list[list[Optional[Value]]] = []
    for var in variables:
        occ = [t for t in range(length) if var in seq[t]]
        if var in transparent and len(occ) == length:
            columns.append([seq[t].get(var) for t in range(length)])
            continue
        column: list[Optional[Value]] = [None] * length
        last_seen = -1
        for t in range(length):
            if visible_at(t, var):
                last_seen = t
            if last_seen >= 0:
                column[t] = _retrieve(seq, occ, last_seen, t, var)
        columns.append(column)
    states = [sig.state_from_values(tuple(col[t] for col in columns))
              for t in range(length)]
    return StateSequence(states)


def justified_perspective(model: ObservationModel, agent: str,
                          seq: StateSequence) -> StateSequence:
    """The local sequence `agent` believes after watching `seq`."""
    return _believed_sequence(
        seq,
        lambda t, var: model.sees(agent, seq[t], var),
        model.transparent_variables(),
    )


def distributed_perspective(model: ObservationModel, group: Iterable[str],
                            seq: StateSequence) -> StateSequence:
    """The pooled sequence of a group: the union of members' observations
    drives visibility, so the most recent sighting by anyone wins."""
    members = tuple(group)
    if not members:
        raise ValidationError("a group must contain at least one agent")
    return _believed_sequence(
        seq,
        lambda t, var: any(model.sees(i, seq[t], var) for i in members),
        model.transparent_variables(),
    )


def _cached_perspective(model: ObservationModel, agent: str, seq: StateSequence,
                        cache: Optional[Cache]) -> StateSequence:
    if cache is None:
        return justified_perspective(model, agent, seq)
    key = ("jp", agent, seq)
    found = cache.get(key)
    if found is None:
        found = justified_perspective(model, agent, seq)
        cache[key] = found
    return found


def uniform_perspectives(model: ObservationModel, group: Iterable[str],
                         seq: StateSequence,
                         cache: Optional[Cache] = None) -> PerspectiveSet:
    """Everyone's individual perspectives, as a duplicate-free set."""
    members = tuple(group)
    if not members:
        raise ValidationError("a group must contain at least one agent")
    return frozenset(_cached_perspective(model, i, seq, cache) for i in members)


@dataclass(frozen=True)
class FixedPointStats:
    """How a common-perspective computation converged."""

    iterations: int
    final_size: int


def common_perspectives(model: ObservationModel, group: Iterable[str],
                        seed: PerspectiveSet,
                        cache: Optional[Cache] = None
                        ) -> Tuple[PerspectiveSet, FixedPointStats]:
    """Least fixed point of repeatedly taking everyone's perspectives.

    Each iteration replaces the current set S with the union of all members'
    perspectives of every sequence in S; convergence is reached when the set
    stops changing. One iteration is counted per application, including the
    one that confirms stability.
    """
    members = tuple(group)
    if not members:
        raise ValidationError("a group must contain at least one agent")
    views = frozenset(seed)
    if not views:
        raise ValidationError("the seed perspective set must be non-empty")
    lengths = {len(w) for w in views}
    if len(lengths) != 1:
        raise ValidationError("seed sequences must share one length")
    some = next(iter(views))
    bound = 2 ** (len(some.sig.variables) * len(some))
    iterations = 0
    while True:
        iterations += 1
        grown = set()
        for w in views:
            for i in members:
                grown.add(_cached_perspective(model, i, w, cache))
        frozen = frozenset(grown)
        if frozen == views:
            return frozen, FixedPointStats(iterations, len(frozen))
        if iterations > bound:
            raise EngineError("common perspectives exceeded the convergence bound; "
                              "the observation model likely violates its axioms")
        views = frozen


def common_observation(model: ObservationModel, group: Iterable[str],
                       state: State) -> State:
    """Fixed point of intersecting the group's observations of one state.

    Variables not visible to every member are dropped, repeatedly, until the
    remaining sub-state is commonly observed.
    """
    members = tuple(group)
    if not members:
        raise ValidationError("a group must contain at least one agent")
    current = state
    while True:
        keep = [var for var, _ in current.items()
                if all(model.sees(i, current, var) for i in members)]
        nxt = current.restrict(keep)
        if nxt == current:
            return current
        current = nxt


def group_observation(model: ObservationModel, group: Iterable[str],
                      state: State) -> State:
    """Union of the members' observations of one state."""
    members = tuple(group)
    keep = [var for var, _ in state.items()
            if any(model.sees(i, state, var) for i in members)]
    return state.restrict(keep)


# --------------------------------------------------------------------------
# Axiom checking
# --------------------------------------------------------------------------

def check_observation_axioms(model: ObservationModel, agents: Iterable[str],
                             states: Iterable[State], rng=None,
                             substates_per_state: int = 2) -> None:
    """Verify containment, idempotence and monotonicity on sampled states.

    Raises AxiomViolation with the offending agent/state on the first failure.
    Monotonicity is probed against random sub-states of each sample (pass an
    ``rng`` for reproducibility).
    """
    import random as _random

    rng = rng or _random.Random(0)
    agents = tuple(agents)
    for state in states:
        samples = [state]
        assigned = state.assigned()
        for _ in range(substates_per_state):
            keep = [v for v in assigned if rng.random() < 0.6]
            samples.append(state.restrict(keep))
        for sample in samples:
            for agent in agents:
                seen = model.observe(agent, sample)
                if model.observe(agent, sample) != seen:
                    raise AxiomViolation(
                        f"observation of {sample!r} by {agent!r} is not deterministic")
                if not seen.subset_of(sample):
                    raise AxiomViolation(
                        f"containment fails for agent {agent!r} on {sample!r}: got {seen!r}")
                again = model.observe(agent, seen)
                if again != seen:
                    raise AxiomViolation(
                        f"idempotence fails for agent {agent!r} on {sample!r}: "
                        f"{seen!r} -> {again!r}")
        for sample in samples[1:]:
            for agent in agents:
                small = model.observe(agent, sample)
                large = model.observe(agent, state)
                if not small.subset_of(large):
                    raise AxiomViolation(
                        f"monotonicity fails for agent {agent!r}: "
                        f"O({sample!r}) = {small!r} is not within O({state!r}) = {large!r}")
