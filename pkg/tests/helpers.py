"""Shared fixtures: bundled instances, hand-built models, random generators."""

from __future__ import annotations

import random
from importlib import resources
from typing import Dict, Optional, Tuple

from epiplan.core import Signature, State, StateSequence
from epiplan.cli import load_benchmark
from epiplan.parser import DomainFile, parse_trace
from epiplan.perspectives import ObservationModel


def number_domain() -> DomainFile:
    return load_benchmark("number", "n1")[0]


def plan1_sequence(domain: DomainFile) -> StateSequence:
    text = (resources.files("epiplan").joinpath("benchmarks")
            .joinpath("number").joinpath("plan1.trace").read_text(encoding="utf-8"))
    return parse_trace(text, domain)


def n_projection(seq: StateSequence) -> Tuple[Optional[int], ...]:
    return tuple(s.get("n") for s in seq)


# --------------------------------------------------------------------------
# The two-variable/three-observer example: a sees everything at step 0,
# b sees y at step 1, c sees x at step 2.
# --------------------------------------------------------------------------

class StepGated(ObservationModel):
    """Visibility keyed on an always-visible step counter."""

    name = "step-gated"
    rules = {"a": {0: ("x", "y")}, "b": {1: ("y",)}, "c": {2: ("x",)}}

    def sees(self, agent: str, state: State, var: str) -> bool:
        if var == "step" or state.sig.is_agent(var):
            return True
        step = state.get("step")
        if step is None:
            return False
        return var in self.rules[agent].get(step, ())

    def transparent_variables(self):
        return frozenset({"step"})


def step_gated_instance() -> Tuple[Signature, StepGated, StateSequence]:
    sig = Signature(["a", "b", "c"],
                    {"x": (1, 3, 5), "y": (2, 4, 6), "step": (0, 1, 2)})
    seq = StateSequence([
        sig.global_state({"x": 1, "y": 2, "step": 0}),
        sig.global_state({"x": 3, "y": 4, "step": 1}),
        sig.global_state({"x": 5, "y": 6, "step": 2}),
    ])
    return sig, StepGated(), seq


# --------------------------------------------------------------------------
# Random instances: rule-table visibility that satisfies the axioms by
# construction (guards only consult always-visible flag variables).
# --------------------------------------------------------------------------

class RuleVisibility(ObservationModel):
    """Per-(agent, var) visibility: always, never, or gated on a flag value."""

    name = "rule-table"

    def __init__(self, rules: Dict[Tuple[str, str], object], flags: frozenset):
        self.rules = rules
        self.flags = flags

    def sees(self, agent: str, state: State, var: str) -> bool:
        if var in self.flags or state.sig.is_agent(var):
            return True
        rule = self.rules.get((agent, var), False)
        if rule is True or rule is False:
            return bool(rule)
        flag, wanted = rule
        return state.get(flag) == wanted

    def transparent_variables(self):
        return self.flags


_DOMAIN_POOLS = ((0, 1, 2), (True, False), ("red", "green", "blue"), (1, 2))


def random_instance(rng: random.Random, max_vars: int = 4, max_domain: int = 3,
                    max_len: int = 6):
    """A random (signature, model, global sequence) triple.

    Declared variables <= max_vars, domain sizes <= max_domain, sequence
    length <= max_len. The first variable is a boolean flag that gates the
    visibility of the others for some agents.
    """
    agents = [f"ag{i}" for i in range(rng.randint(1, 3))]
    n_vars = rng.randint(1, max_vars)
    domains = {"flag": (True, False)}
    for i in range(1, n_vars):
        pool = _DOMAIN_POOLS[rng.randrange(len(_DOMAIN_POOLS))]
        size = rng.randint(1, min(max_domain, len(pool)))
        domains[f"v{i}"] = pool[:size]
    sig = Signature(agents, domains)
    rules: Dict[Tuple[str, str], object] = {}
    for agent in agents:
        for var in domains:
            if var == "flag":
                continue
            roll = rng.random()
            if roll < 0.3:
                rules[(agent, var)] = True
            elif roll < 0.55:
                rules[(agent, var)] = False
            else:
                rules[(agent, var)] = ("flag", rng.random() < 0.5)
    model = RuleVisibility(rules, frozenset({"flag"}))
    length = rng.randint(1, max_len)
    states = []
    for _ in range(length):
        assignment = {var: values[rng.randrange(len(values))]
                      for var, values in domains.items()}
        states.append(sig.global_state(assignment))
    return sig, model, StateSequence(states)


def random_states(rng: random.Random, sig: Signature, count: int):
    """Random global states over a signature."""
    out = []
    for _ in range(count):
        assignment = {}
        for var in sig.variables:
            if sig.is_agent(var):
                continue
            pool = sig.domain(var)
            assignment[var] = pool[rng.randrange(len(pool))]
        out.append(sig.global_state(assignment))
    return out


# --------------------------------------------------------------------------
# Tiny instances + logically separable formulas for the Boolean oracle.
# --------------------------------------------------------------------------

def random_oracle_case(rng: random.Random):
    """A (model, global sequence, formula) triple small enough to enumerate.

    Formulas are conjunctions of possibly negated literals, optionally under
    one modal prefix: the separable shapes for which a definite three-valued
    verdict must agree with the exhaustive Boolean semantics.
    """
    from epiplan.core import (And, Atom, Believes, GroupBelieves, GroupKnows,
                              GroupMode, GroupSees, GroupSeesVar, Knows, Not,
                              Sees, SeesVar, make_group)

    agents = ["a", "b"][: rng.randint(1, 2)]
    domains = {"flag": (True, False)}
    if rng.random() < 0.8:
        domains["v1"] = (0, 1)
    sig = Signature(agents, domains)
    rules = {}
    for agent in agents:
        for var in domains:
            if var == "flag":
                continue
            roll = rng.random()
            if roll < 0.4:
                rules[(agent, var)] = True
            elif roll < 0.6:
                rules[(agent, var)] = False
            else:
                rules[(agent, var)] = ("flag", rng.random() < 0.5)
    model = RuleVisibility(rules, frozenset({"flag"}))
    length = rng.randint(1, 2)
    states = []
    for _ in range(length):
        assignment = {var: values[rng.randrange(len(values))]
                      for var, values in domains.items()}
        states.append(sig.global_state(assignment))
    seq = StateSequence(states)

    def literal(var):
        pool = domains[var]
        value = pool[rng.randrange(len(pool))]
        rel = "=" if rng.random() < 0.8 else "!="
        atom = Atom(rel, var, value)
        return Not(atom) if rng.random() < 0.3 else atom

    # logically separable bodies only: conjuncts over distinct variables, so
    # no hidden tautologies/contradictions (ternary is incomplete on those)
    var_pool = list(domains)
    rng.shuffle(var_pool)
    body = literal(var_pool[0])
    if len(var_pool) > 1 and rng.random() < 0.4:
        body = And(body, literal(var_pool[1]))

    group = make_group(agents)
    agent = rng.choice(agents)
    mode = rng.choice(list(GroupMode))
    wrappers = [
        lambda: body,
        lambda: SeesVar(agent, rng.choice(list(domains))),
        lambda: Sees(agent, body),
        lambda: Knows(agent, body),
        lambda: Believes(agent, body),
        lambda: GroupSeesVar(mode, group, rng.choice(list(domains))),
        lambda: GroupSees(mode, group, body),
        lambda: GroupKnows(mode, group, body),
        lambda: GroupBelieves(mode, group, body),
    ]
    phi = wrappers[rng.randrange(len(wrappers))]()
    if rng.random() < 0.25:
        phi = Not(phi)
    return model, seq, phi


# --------------------------------------------------------------------------
# Deliberately broken models, used to prove the axiom harness has teeth.
# --------------------------------------------------------------------------

class LeakingModel(ObservationModel):
    """Breaks containment: invents a value for an unassigned variable."""

    name = "broken-containment"

    def sees(self, agent, state, var):
        return True

    def observe(self, agent, state):
        vals = list(state.vals)
        for idx, val in enumerate(vals):
            if val is None:
                vals[idx] = state.sig.domain(state.sig.variables[idx])[0]
                break
        return state.sig.state_from_values(tuple(vals))


class NonMonotoneModel(ObservationModel):
    """Breaks monotonicity: hides v1 as soon as the flag becomes visible."""

    name = "broken-monotone"

    def sees(self, agent, state, var):
        if state.sig.is_agent(var) or var == "flag":
            return True
        return "flag" not in state


class NonIdempotentModel(ObservationModel):
    """Breaks idempotence: payload needs the flag, but the flag is hidden."""

    name = "broken-idempotent"

    def sees(self, agent, state, var):
        if state.sig.is_agent(var):
            return True
        if var == "flag":
            return False
        return state.get("flag") is True
