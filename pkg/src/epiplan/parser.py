"""Text formats: formula s-expressions, domain files, problem files, traces.

Formulas are prefix s-expressions, declarations are keyword lines. The exact
grammar is documented in the README. All parse errors carry line and column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .core import (
    And,
    Atom,
    Believes,
    EngineError,
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
    Signature,
    State,
    StateSequence,
    Ternary,
    ValidationError,
    Value,
    Var,
    format_value,
    make_group,
    validate_formula,
)
from .perspectives import ObservationModel, make_model
from .planner import Action, Effect, apply_action, SearchNode
from .semantics import Evaluator


class ParseError(EngineError):
    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


def _tokenize(text: str, first_line: int = 1) -> List[Token]:
    tokens = []
    line, col = first_line, 1
    current = ""
    start_col = 1
    in_comment = False

    def flush():
        nonlocal current
        if current:
            tokens.append(Token(current, line, start_col))
            current = ""

    for ch in text + "\n":
        if ch == "\n":
            flush()
            in_comment = False
            line += 1
            col = 1
            continue
        if in_comment:
            col += 1
            continue
        if ch == "#":
            flush()
            in_comment = True
        elif ch in "()":
            flush()
            tokens.append(Token(ch, line, col))
        elif ch.isspace():
            flush()
        else:
            if not current:
                start_col = col
            current += ch
        col += 1
    return tokens


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


# --------------------------------------------------------------------------
# Formulas
# --------------------------------------------------------------------------

_RELS = {"=", "!=", "<", "<=", ">", ">="}
_SINGLE_OPS = {"S": Sees, "K": Knows, "B": Believes}
_GROUP_OPS: Dict[str, Tuple[type, GroupMode]] = {
    "ES": (GroupSees, GroupMode.UNIFORM),
    "DS": (GroupSees, GroupMode.DISTRIBUTED),
    "CS": (GroupSees, GroupMode.COMMON),
    "EK": (GroupKnows, GroupMode.UNIFORM),
    "DK": (GroupKnows, GroupMode.DISTRIBUTED),
    "CK": (GroupKnows, GroupMode.COMMON),
    "EB": (GroupBelieves, GroupMode.UNIFORM),
    "DB": (GroupBelieves, GroupMode.DISTRIBUTED),
    "CB": (GroupBelieves, GroupMode.COMMON),
}


class _TokenStream:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expectation: str) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise ParseError(f"unexpected end of input, expected {expectation}",
                             last.line if last else None, last.col if last else None)
        self.pos += 1
        return tok


def _parse_constant(text: str) -> Value:
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        return text


def parse_formula(text: str, sig: Signature, first_line: int = 1) -> Formula:
    """Parse and validate one formula; trailing input is an error."""
    stream = _TokenStream(_tokenize(text, first_line))
    phi = _parse_formula(stream, sig)
    extra = stream.peek()
    if extra is not None:
        raise ParseError(f"unexpected trailing input {extra.text!r}", extra.line, extra.col)
    try:
        validate_formula(sig, phi)
    except ValidationError as exc:
        raise ParseError(str(exc), first_line) from exc
    return phi


def _parse_formula(stream: _TokenStream, sig: Signature) -> Formula:
    opener = stream.next("a formula")
    if opener.text != "(":
        raise ParseError(f"expected '(' to start a formula, found {opener.text!r}",
                         opener.line, opener.col)
    head = stream.next("an operator or relation")
    name = head.text
    if name in _RELS:
        return _parse_atom(stream, sig, name, head)
    if name == "not":
        child = _parse_formula(stream, sig)
        _expect_close(stream, head)
        return Not(child)
    if name == "and":
        parts = [_parse_formula(stream, sig), _parse_formula(stream, sig)]
        while stream.peek() is not None and stream.peek().text == "(":
            parts.append(_parse_formula(stream, sig))
        _expect_close(stream, head)
        phi = parts[0]
        for part in parts[1:]:
            phi = And(phi, part)
        return phi
    if name in _SINGLE_OPS:
        agent_tok = stream.next("an agent name")
        if agent_tok.text in "()":
            raise ParseError("expected an agent name", agent_tok.line, agent_tok.col)
        node = _SINGLE_OPS[name]
        arg = stream.peek()
        if name == "S" and arg is not None and arg.text != "(":
            var_tok = stream.next("a variable")
            _expect_close(stream, head)
            return SeesVar(agent_tok.text, var_tok.text)
        child = _parse_formula(stream, sig)
        _expect_close(stream, head)
        return node(agent_tok.text, child)
    if name in _GROUP_OPS:
        node, mode = _GROUP_OPS[name]
        group = _parse_group(stream)
        arg = stream.peek()
        if name in ("ES", "DS", "CS") and arg is not None and arg.text != "(":
            var_tok = stream.next("a variable")
            _expect_close(stream, head)
            return GroupSeesVar(mode, group, var_tok.text)
        child = _parse_formula(stream, sig)
        _expect_close(stream, head)
        return node(mode, group, child)
    raise ParseError(f"unknown operator {name!r}", head.line, head.col)


def _parse_atom(stream: _TokenStream, sig: Signature, rel: str, head: Token) -> Atom:
    lhs = stream.next("a variable")
    if lhs.text in "()":
        raise ParseError("expected a variable name", lhs.line, lhs.col)
    if lhs.text not in sig.index:
        raise ParseError(f"undeclared variable {lhs.text!r}", lhs.line, lhs.col)
    rhs_tok = stream.next("a constant or variable")
    if rhs_tok.text in "()":
        raise ParseError("expected a constant or variable", rhs_tok.line, rhs_tok.col)
    rhs: Union[Value, Var]
    if rhs_tok.text in sig.index:
        rhs = Var(rhs_tok.text)
    else:
        rhs = _parse_constant(rhs_tok.text)
    _expect_close(stream, head)
    return Atom(rel, lhs.text, rhs)


def _parse_group(stream: _TokenStream) -> Tuple[str, ...]:
    opener = stream.next("a group")
    if opener.text != "(":
        raise ParseError("expected '(' to start a group", opener.line, opener.col)
    names = []
    while True:
        tok = stream.next("an agent name or ')'")
        if tok.text == ")":
            break
        if tok.text == "(":
            raise ParseError("groups contain agent names only", tok.line, tok.col)
        names.append(tok.text)
    if not names:
        raise ParseError("a group must contain at least one agent", opener.line, opener.col)
    return make_group(names)


def _expect_close(stream: _TokenStream, opener: Token) -> None:
    tok = stream.next("')'")
    if tok.text != ")":
        raise ParseError(f"expected ')', found {tok.text!r} (opened at line "
                         f"{opener.line})", tok.line, tok.col)


def format_formula(phi: Formula) -> str:
    """Render a formula as an s-expression that parses back to an equal AST."""
    if isinstance(phi, Atom):
        rhs = phi.rhs.name if isinstance(phi.rhs, Var) else format_value(phi.rhs)
        return f"({phi.rel} {phi.lhs} {rhs})"
    if isinstance(phi, Not):
        return f"(not {format_formula(phi.child)})"
    if isinstance(phi, And):
        return f"(and {format_formula(phi.left)} {format_formula(phi.right)})"
    if isinstance(phi, SeesVar):
        return f"(S {phi.agent} {phi.var})"
    if isinstance(phi, Sees):
        return f"(S {phi.agent} {format_formula(phi.child)})"
    if isinstance(phi, Knows):
        return f"(K {phi.agent} {format_formula(phi.child)})"
    if isinstance(phi, Believes):
        return f"(B {phi.agent} {format_formula(phi.child)})"
    if isinstance(phi, GroupSeesVar):
        return f"({phi.mode.value}S ({' '.join(phi.group)}) {phi.var})"
    if isinstance(phi, GroupSees):
        return f"({phi.mode.value}S ({' '.join(phi.group)}) {format_formula(phi.child)})"
    if isinstance(phi, GroupKnows):
        return f"({phi.mode.value}K ({' '.join(phi.group)}) {format_formula(phi.child)})"
    if isinstance(phi, GroupBelieves):
        return f"({phi.mode.value}B ({' '.join(phi.group)}) {format_formula(phi.child)})"
    raise TypeError(f"not a formula node: {phi!r}")


# --------------------------------------------------------------------------
# Domain files
# --------------------------------------------------------------------------

@dataclass
class DomainFile:
    name: str
    signature: Signature
    model_name: str
    model: ObservationModel
    actions: Tuple[Action, ...]
    obs_config: List[List[str]] = field(default_factory=list)


def parse_domain(text: str) -> DomainFile:
    lines = text.splitlines()
    name = None
    agents: List[str] = []
    domains: Dict[str, List[Value]] = {}
    model_name = None
    obs_config: List[List[str]] = []
    raw_actions: List[Tuple[str, int, Optional[Tuple[str, int]], List[Tuple[List[str], int]]]] = []

    i = 0
    while i < len(lines):
        lineno = i + 1
        parts = _strip_comment(lines[i]).split()
        i += 1
        if not parts:
            continue
        key = parts[0]
        if key == "domain":
            _need(parts, 2, 2, lineno, "domain <name>")
            name = parts[1]
        elif key == "agents":
            if len(parts) < 2:
                raise ParseError("agents line needs at least one agent", lineno)
            agents.extend(parts[1:])
        elif key == "var":
            var_name, values = _parse_var_decl(parts, lineno)
            if var_name in domains:
                raise ParseError(f"variable {var_name!r} declared twice", lineno)
            domains[var_name] = values
        elif key == "observation":
            _need(parts, 2, 2, lineno, "observation <model-name>")
            model_name = parts[1]
        elif key == "obs-config":
            if len(parts) < 2:
                raise ParseError("obs-config needs at least one token", lineno)
            obs_config.append(parts[1:])
        elif key == "action":
            _need(parts, 2, 2, lineno, "action <name>")
            action_name = parts[1]
            pre: Optional[Tuple[str, int]] = None
            effs: List[Tuple[List[str], int]] = []
            closed = False
            while i < len(lines):
                inner_no = i + 1
                inner = _strip_comment(lines[i]).split()
                i += 1
                if not inner:
                    continue
                if inner[0] == "end":
                    closed = True
                    break
                if inner[0] == "pre":
                    if pre is not None:
                        raise ParseError(f"action {action_name!r} has two 'pre' lines",
                                         inner_no)
                    raw = _strip_comment(lines[inner_no - 1]).strip()[len("pre"):].strip()
                    pre = (raw, inner_no)
                elif inner[0] == "eff":
                    effs.append((inner[1:], inner_no))
                else:
                    raise ParseError(f"unexpected {inner[0]!r} inside action "
                                     f"{action_name!r}", inner_no)
            if not closed:
                raise ParseError(f"action {action_name!r} is missing its 'end'", lineno)
            raw_actions.append((action_name, lineno, pre, effs))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    if name is None:
        raise ParseError("missing 'domain <name>' line")
    if not agents:
        raise ParseError("missing 'agents' line")
    if model_name is None:
        raise ParseError("missing 'observation <model-name>' line")
    try:
        sig = Signature(agents, domains)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc

    actions = []
    names = set()
    for action_name, lineno, pre, effs in raw_actions:
        if action_name in names:
            raise ParseError(f"action {action_name!r} declared twice", lineno)
        names.add(action_name)
        precondition = None
        if pre is not None:
            precondition = parse_formula(pre[0], sig, first_line=pre[1])
        effects = tuple(_parse_effect(sig, tokens, lno) for tokens, lno in effs)
        actions.append(Action(action_name, precondition, effects))

    try:
        model = make_model(model_name, sig, obs_config)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc
    return DomainFile(name, sig, model_name, model, tuple(actions), obs_config)


def _need(parts: List[str], lo: int, hi: int, lineno: int, usage: str) -> None:
    if not lo <= len(parts) <= hi:
        raise ParseError(f"expected: {usage}", lineno)


def _parse_var_decl(parts: List[str], lineno: int) -> Tuple[str, List[Value]]:
    # var <name> : <type> ...
    if len(parts) < 4 or parts[2] != ":":
        raise ParseError("expected: var <name> : <type> ...", lineno)
    var_name = parts[1]
    kind = parts[3]
    rest = parts[4:]
    if kind == "bool":
        if rest:
            raise ParseError("bool variables take no arguments", lineno)
        return var_name, [False, True]
    if kind == "enum":
        if not rest:
            raise ParseError("enum variables need at least one symbol", lineno)
        return var_name, list(rest)
    if kind == "int":
        if len(rest) == 1 and ".." in rest[0]:
            lo_text, _, hi_text = rest[0].partition("..")
            try:
                lo, hi = int(lo_text), int(hi_text)
            except ValueError:
                raise ParseError(f"bad integer range {rest[0]!r}", lineno) from None
            if hi < lo:
                raise ParseError(f"empty integer range {rest[0]!r}", lineno)
            return var_name, list(range(lo, hi + 1))
        if len(rest) >= 3 and rest[0] == "{" and rest[-1] == "}":
            try:
                return var_name, [int(tok) for tok in rest[1:-1]]
            except ValueError:
                raise ParseError("integer set members must be integers", lineno) from None
        raise ParseError("expected: int <lo>..<hi> or int { v1 v2 ... }", lineno)
    raise ParseError(f"unknown variable type {kind!r}", lineno)


def _parse_effect(sig: Signature, tokens: List[str], lineno: int) -> Effect:
    # <var> := <value-or-var> | <var> += <int> | <var> -= <int>
    if len(tokens) != 3:
        raise ParseError("expected: eff <var> := <value> | eff <var> += <int>", lineno)
    var, op, operand = tokens
    if var not in sig.index:
        raise ParseError(f"undeclared variable {var!r}", lineno)
    if op == ":=":
        if operand in sig.index:
            if sig.domain_kind(operand) != sig.domain_kind(var):
                raise ParseError(f"cannot copy {operand!r} into {var!r}: kinds differ", lineno)
            return Effect(var, "copy", operand)
        value = _parse_constant(operand)
        if sig.domain_kind(var) == "symbol" and not sig.in_domain(var, value):
            raise ParseError(f"symbol {operand!r} is not in the domain of {var!r}", lineno)
        if sig.domain_kind(var) != ("bool" if type(value) is bool else
                                    "int" if type(value) is int else "symbol"):
            raise ParseError(f"value {operand!r} does not fit variable {var!r}", lineno)
        return Effect(var, "set", value)
    if op in ("+=", "-="):
        if sig.domain_kind(var) != "int":
            raise ParseError(f"arithmetic effects need an integer variable, got {var!r}", lineno)
        try:
            delta = int(operand)
        except ValueError:
            raise ParseError(f"expected an integer, found {operand!r}", lineno) from None
        return Effect(var, "add", delta if op == "+=" else -delta)
    raise ParseError(f"unknown effect operator {op!r}", lineno)


# --------------------------------------------------------------------------
# Problem files
# --------------------------------------------------------------------------

_TARGETS = {"true": Ternary.TRUE, "false": Ternary.FALSE, "unknown": Ternary.UNKNOWN}


@dataclass
class ProblemFile:
    name: str
    domain_name: str
    initial: State
    goals: Tuple[Tuple[Formula, Ternary], ...]
    max_depth: Optional[int] = None


def parse_problem(text: str, domain: DomainFile) -> ProblemFile:
    sig = domain.signature
    name = None
    domain_name = None
    assignments: Dict[str, Value] = {}
    goals: List[Tuple[Formula, Ternary]] = []
    max_depth = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = _strip_comment(raw).split()
        if not parts:
            continue
        key = parts[0]
        if key == "problem":
            _need(parts, 2, 2, lineno, "problem <name>")
            name = parts[1]
        elif key == "domain":
            _need(parts, 2, 2, lineno, "domain <name>")
            domain_name = parts[1]
        elif key == "init":
            for chunk in parts[1:]:
                var, eq, val = chunk.partition("=")
                if not eq:
                    raise ParseError(f"init entries look like var=value, found {chunk!r}", lineno)
                if var in assignments:
                    raise ParseError(f"variable {var!r} initialised twice", lineno)
                if var not in sig.index:
                    raise ParseError(f"undeclared variable {var!r}", lineno)
                assignments[var] = _parse_constant(val)
        elif key == "goal":
            if len(parts) < 3 or parts[1] not in _TARGETS:
                raise ParseError("expected: goal true|false|unknown (<formula>)", lineno)
            raw_formula = _strip_comment(raw).strip()
            raw_formula = raw_formula[raw_formula.index(parts[1]) + len(parts[1]):].strip()
            goals.append((parse_formula(raw_formula, sig, first_line=lineno),
                          _TARGETS[parts[1]]))
        elif key == "max-depth":
            _need(parts, 2, 2, lineno, "max-depth <N>")
            try:
                max_depth = int(parts[1])
            except ValueError:
                raise ParseError(f"max-depth must be an integer, found {parts[1]!r}",
                                 lineno) from None
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    if name is None:
        raise ParseError("missing 'problem <name>' line")
    if domain_name is None:
        raise ParseError("missing 'domain <name>' line")
    if domain_name != domain.name:
        raise ParseError(f"problem references domain {domain_name!r} but "
                         f"{domain.name!r} was loaded")
    if not goals:
        raise ParseError("a problem needs at least one goal")
    try:
        initial = sig.global_state(assignments)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc
    return ProblemFile(name, domain_name, initial, tuple(goals), max_depth)


# --------------------------------------------------------------------------
# Traces
# --------------------------------------------------------------------------

def parse_trace(text: str, domain: DomainFile) -> StateSequence:
    """A trace is either `init` plus `do` lines (replayed through the action
    model, checking preconditions) or explicit `state` lines."""
    sig = domain.signature
    action_by_name = {a.name: a for a in domain.actions}
    states: List[State] = []
    node: Optional[SearchNode] = None
    evaluator = Evaluator(domain.model)
    explicit = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = _strip_comment(raw).split()
        if not parts:
            continue
        key = parts[0]
        if key == "init":
            if node is not None or states:
                raise ParseError("init must be the first directive", lineno)
            node = SearchNode(StateSequence([_state_line(sig, parts[1:], lineno, total=True)]), ())
        elif key == "do":
            _need(parts, 2, 2, lineno, "do <action-name>")
            if node is None:
                raise ParseError("'do' requires an 'init' line first", lineno)
            action = action_by_name.get(parts[1])
            if action is None:
                raise ParseError(f"unknown action {parts[1]!r}", lineno)
            successor = apply_action(evaluator, action, node)
            if successor is None:
                raise ParseError(f"action {parts[1]!r} is not applicable at this point", lineno)
            node = successor
        elif key == "state":
            if node is not None:
                raise ParseError("cannot mix 'state' lines with init/do", lineno)
            explicit = True
            states.append(_state_line(sig, parts[1:], lineno, total=False))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    if node is not None:
        return node.sequence
    if explicit and states:
        return StateSequence(states)
    raise ParseError("empty trace: expected 'init'/'do' lines or 'state' lines")


def _state_line(sig: Signature, chunks: List[str], lineno: int, total: bool) -> State:
    assignments: Dict[str, Value] = {}
    for chunk in chunks:
        var, eq, val = chunk.partition("=")
        if not eq:
            raise ParseError(f"state entries look like var=value, found {chunk!r}", lineno)
        if var not in sig.index:
            raise ParseError(f"undeclared variable {var!r}", lineno)
        assignments[var] = _parse_constant(val)
    try:
        if total:
            return sig.global_state(assignments)
        for agent in sig.agents:
            assignments.setdefault(agent, True)
        return sig.make_state(assignments)
    except ValidationError as exc:
        raise ParseError(str(exc), lineno) from exc
