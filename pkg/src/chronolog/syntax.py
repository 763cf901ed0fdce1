"""DatalogMTL abstract syntax, parsing, printing, normal form, grounding.

Concrete grammar (one statement per ``.``; ``%`` starts a comment):

    rule      :=  [ body ] "->" head
    body      :=  literal { "," literal }
    literal   :=  unary [ ("since" | "until") interval unary ]
    unary     :=  ("boxminus" | "boxplus" | "diamondminus" | "diamondplus")
                  interval unary
               |  "top" | "bottom" | atom | "(" literal ")"
    head      :=  "top" | atom
               |  ("boxminus" | "boxplus") interval head
    atom      :=  IDENT [ "(" term { "," term } ")" ]
    interval  :=  ("[" | "(") endpoint "," endpoint ("]" | ")")

Terms inside an atom are variables when they start with an uppercase
letter, otherwise constants (quoted constants are always constants).
Duration endpoints take an optional unit suffix (d/h/m/s, days = 1);
mixing suffixed and bare numbers within one file is rejected.

Database files contain facts: ``atom "@" interval "."``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator

from .errors import InputError, ParseError
from .intervals import Interval, TimePoint, NEG_INF, POS_INF

AUX_PREFIX = "_aux"

KEYWORDS = {
    "top",
    "bottom",
    "boxminus",
    "boxplus",
    "diamondminus",
    "diamondplus",
    "since",
    "until",
    "inf",
}

UNIT_SCALE = {
    "d": Fraction(1),
    "h": Fraction(1, 24),
    "m": Fraction(1, 1440),
    "s": Fraction(1, 86400),
}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Constant:
    name: str

    def __str__(self) -> str:
        if re.fullmatch(r"[a-z][A-Za-z0-9_]*", self.name):
            return self.name
        return "'" + self.name.replace("\\", "\\\\").replace("'", "\\'") + "'"


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Constant | Variable


class Literal:
    """Base class for body/head formulas."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Top(Literal):
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True, slots=True)
class Bottom(Literal):
    def __str__(self) -> str:
        return "bottom"


@dataclass(frozen=True, slots=True)
class Atom(Literal):
    predicate: str
    terms: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.terms:
            return self.predicate
        return f"{self.predicate}({','.join(str(t) for t in self.terms)})"

    @property
    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.terms)


@dataclass(frozen=True, slots=True)
class BoxMinus(Literal):
    rho: Interval
    inner: Literal

    def __str__(self) -> str:
        return f"boxminus{self.rho} {self.inner}"


@dataclass(frozen=True, slots=True)
class BoxPlus(Literal):
    rho: Interval
    inner: Literal

    def __str__(self) -> str:
        return f"boxplus{self.rho} {self.inner}"


@dataclass(frozen=True, slots=True)
class DiamondMinus(Literal):
    rho: Interval
    inner: Literal

    def __str__(self) -> str:
        return f"diamondminus{self.rho} {self.inner}"


@dataclass(frozen=True, slots=True)
class DiamondPlus(Literal):
    rho: Interval
    inner: Literal

    def __str__(self) -> str:
        return f"diamondplus{self.rho} {self.inner}"


@dataclass(frozen=True, slots=True)
class Since(Literal):
    left: Literal
    rho: Interval
    right: Literal

    def __str__(self) -> str:
        return f"{_operand_text(self.left)} since{self.rho} {_operand_text(self.right)}"


@dataclass(frozen=True, slots=True)
class Until(Literal):
    left: Literal
    rho: Interval
    right: Literal

    def __str__(self) -> str:
        return f"{_operand_text(self.left)} until{self.rho} {_operand_text(self.right)}"


def _operand_text(lit: Literal) -> str:
    if isinstance(lit, (Since, Until)):
        return f"({lit})"
    return str(lit)


UNARY_OPS = (BoxMinus, BoxPlus, DiamondMinus, DiamondPlus)
BACKWARD_OPS = (BoxPlus, DiamondPlus, Until)


@dataclass(frozen=True, slots=True)
class Fact:
    atom: Atom
    interval: Interval

    def __str__(self) -> str:
        return f"{self.atom}@{self.interval}"


@dataclass(frozen=True, slots=True)
class Rule:
    body: tuple[Literal, ...]
    head: Literal
    id: str = ""

    def __str__(self) -> str:
        body = ", ".join(str(b) for b in self.body)
        return f"{body} -> {self.head} ." if body else f"-> {self.head} ."


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]
    axioms: tuple[Fact, ...] = ()

    @property
    def is_normal_form(self) -> bool:
        return all(rule_form(r) is not None for r in self.rules)

    @property
    def is_ground(self) -> bool:
        return not any(
            isinstance(t, Variable)
            for r in self.rules
            for a in body_atoms(r) + head_atoms(r)
            for t in a.terms
        )

    def predicates(self) -> list[str]:
        preds: set[str] = {f.atom.predicate for f in self.axioms}
        for r in self.rules:
            preds.update(a.predicate for a in body_atoms(r))
            preds.update(a.predicate for a in head_atoms(r))
        return sorted(preds)

    def constants(self) -> set[str]:
        out: set[str] = {c.name for f in self.axioms for c in f.atom.terms}
        for r in self.rules:
            for a in body_atoms(r) + head_atoms(r):
                out.update(t.name for t in a.terms if isinstance(t, Constant))
        return out

    def same_rules(self, other: Program) -> bool:
        """Structural equality ignoring rule identifiers."""
        return (
            [(r.body, r.head) for r in self.rules]
            == [(r.body, r.head) for r in other.rules]
            and self.axioms == other.axioms
        )

    def __str__(self) -> str:
        return program_text(self)


def literal_atoms(lit: Literal) -> Iterator[Atom]:
    if isinstance(lit, Atom):
        yield lit
    elif isinstance(lit, UNARY_OPS):
        yield from literal_atoms(lit.inner)
    elif isinstance(lit, (Since, Until)):
        yield from literal_atoms(lit.left)
        yield from literal_atoms(lit.right)


def literal_intervals(lit: Literal) -> Iterator[Interval]:
    if isinstance(lit, UNARY_OPS):
        yield lit.rho
        yield from literal_intervals(lit.inner)
    elif isinstance(lit, (Since, Until)):
        yield lit.rho
        yield from literal_intervals(lit.left)
        yield from literal_intervals(lit.right)


def literal_contains_top(lit: Literal) -> bool:
    if isinstance(lit, Top):
        return True
    if isinstance(lit, UNARY_OPS):
        return literal_contains_top(lit.inner)
    if isinstance(lit, (Since, Until)):
        return literal_contains_top(lit.left) or literal_contains_top(lit.right)
    return False


def body_atoms(rule: Rule) -> list[Atom]:
    return [a for lit in rule.body for a in literal_atoms(lit)]


def head_atoms(rule: Rule) -> list[Atom]:
    return list(literal_atoms(rule.head))


def literal_variables(lit: Literal) -> set[str]:
    return {t.name for a in literal_atoms(lit) for t in a.terms if isinstance(t, Variable)}


def rule_form(rule: Rule) -> int | None:
    """The temporal-normal-form shape of a rule, or None if not normal.

    1 Horn; 2 since; 3 until; 4 boxminus; 5 boxplus; 6 diamondminus;
    7 diamondplus. Bodies of forms 2-7 consist of exactly the one
    temporal literal over atoms, and every head is an atom.
    """
    if not isinstance(rule.head, Atom):
        return None
    if all(isinstance(b, Atom) for b in rule.body) and rule.body:
        return 1
    if len(rule.body) != 1:
        return None
    lit = rule.body[0]
    if isinstance(lit, Since) and isinstance(lit.left, Atom) and isinstance(lit.right, Atom):
        return 2
    if isinstance(lit, Until) and isinstance(lit.left, Atom) and isinstance(lit.right, Atom):
        return 3
    if isinstance(lit, BoxMinus) and isinstance(lit.inner, Atom):
        return 4
    if isinstance(lit, BoxPlus) and isinstance(lit.inner, Atom):
        return 5
    if isinstance(lit, DiamondMinus) and isinstance(lit.inner, Atom):
        return 6
    if isinstance(lit, DiamondPlus) and isinstance(lit.inner, Atom):
        return 7
    return None


FP_FORMS = {1, 4, 6}


def is_forward_propagating(program: Program) -> bool:
    return all(rule_form(r) in FP_FORMS for r in program.rules)


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+)
    | (?P<COMMENT>%[^\n]*)
    | (?P<ARROW>->)
    | (?P<NUMBER>(?:\d+\.\d+|\d+(?:/\d+)?))(?P<UNIT>[smhd]\b)?
    | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<QUOTED>'(?:[^'\\\n]|\\.)*')
    | (?P<PUNCT>[()\[\],.@\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int
    unit: str | None = None


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        for name in ("ARROW", "NUMBER", "IDENT", "QUOTED", "PUNCT"):
            if m.group(name) is not None:
                tokens.append(_Token(name, m.group(name), line, col, m.group("UNIT")))
                break
        consumed = m.group(0)
        newlines = consumed.count("\n")
        if newlines:
            line += newlines
            col = len(consumed) - consumed.rfind("\n")
        else:
            col += len(consumed)
        pos = m.end()
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.seen_unit = False
        self.seen_bare = False

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind.lower()
            raise self.error(f"expected {want!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.text == ch

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == word

    # -- numbers and intervals ------------------------------------------

    def parse_number(self) -> Fraction:
        sign = Fraction(1)
        if self.at_punct("-"):
            self.next()
            sign = Fraction(-1)
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text == "inf":
            raise self.error("infinite endpoint is not a number here")
        tok = self.expect("NUMBER")
        value = Fraction(tok.text)
        if tok.unit:
            self.seen_unit = True
            value *= UNIT_SCALE[tok.unit]
        else:
            self.seen_bare = True
        return sign * value

    def parse_endpoint(self) -> TimePoint:
        if self.at_punct("-"):
            save = self.pos
            self.next()
            if self.at_keyword("inf"):
                self.next()
                return NEG_INF
            self.pos = save
        if self.at_keyword("inf"):
            self.next()
            return POS_INF
        return TimePoint(self.parse_number())

    def parse_interval(self) -> Interval:
        tok = self.peek()
        if self.at_punct("["):
            lo_open = False
        elif self.at_punct("("):
            lo_open = True
        else:
            raise self.error("expected interval")
        self.next()
        lo = self.parse_endpoint()
        self.expect("PUNCT", ",")
        hi = self.parse_endpoint()
        if self.at_punct("]"):
            hi_open = False
        elif self.at_punct(")"):
            hi_open = True
        else:
            raise self.error("expected ']' or ')'")
        self.next()
        try:
            return Interval(lo, hi, lo_open, hi_open)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from exc

    def parse_operator_interval(self) -> Interval:
        tok = self.peek()
        rho = self.parse_interval()
        if rho.lo < TimePoint(Fraction(0)):
            raise ParseError(f"negative operator range {rho}", tok.line, tok.col)
        return rho

    # -- atoms and literals ---------------------------------------------

    def parse_ident(self) -> str:
        tok = self.expect("IDENT")
        if tok.text in KEYWORDS:
            raise self.error(f"{tok.text!r} is a reserved word", tok)
        if tok.text.startswith(AUX_PREFIX):
            raise self.error(f"identifiers may not start with {AUX_PREFIX!r}", tok)
        return tok.text

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "QUOTED":
            self.next()
            raw = tok.text[1:-1]
            return Constant(raw.replace("\\'", "'").replace("\\\\", "\\"))
        name = self.parse_ident()
        if name[0].isupper():
            return Variable(name)
        return Constant(name)

    def parse_atom(self) -> Atom:
        name = self.parse_ident()
        terms: list[Term] = []
        if self.at_punct("("):
            self.next()
            terms.append(self.parse_term())
            while self.at_punct(","):
                self.next()
                terms.append(self.parse_term())
            self.expect("PUNCT", ")")
        return Atom(name, tuple(terms))

    def parse_unary(self, *, nested: bool = False) -> Literal:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text in (
            "boxminus",
            "boxplus",
            "diamondminus",
            "diamondplus",
        ):
            self.next()
            rho = self.parse_operator_interval()
            inner = self.parse_unary(nested=True)
            ctor = {
                "boxminus": BoxMinus,
                "boxplus": BoxPlus,
                "diamondminus": DiamondMinus,
                "diamondplus": DiamondPlus,
            }[tok.text]
            return ctor(rho, inner)
        if self.at_keyword("top"):
            self.next()
            return Top()
        if self.at_keyword("bottom"):
            if nested:
                raise self.error("'bottom' may only appear as a whole body literal")
            self.next()
            return Bottom()
        if self.at_punct("("):
            self.next()
            lit = self.parse_literal(nested=True)
            self.expect("PUNCT", ")")
            return lit
        return self.parse_atom()

    def parse_literal(self, *, nested: bool = False) -> Literal:
        left = self.parse_unary(nested=nested)
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text in ("since", "until"):
            if isinstance(left, Bottom):
                raise self.error("'bottom' may only appear as a whole body literal")
            self.next()
            rho = self.parse_operator_interval()
            right = self.parse_unary(nested=True)
            return (Since if tok.text == "since" else Until)(left, rho, right)
        return left

    def parse_head(self) -> Literal:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text in ("boxminus", "boxplus"):
            self.next()
            rho = self.parse_operator_interval()
            inner = self.parse_head()
            return (BoxMinus if tok.text == "boxminus" else BoxPlus)(rho, inner)
        if tok.kind == "IDENT" and tok.text in (
            "diamondminus",
            "diamondplus",
            "since",
            "until",
            "bottom",
        ):
            raise self.error(f"{tok.text!r} is not allowed in a rule head")
        if self.at_keyword("top"):
            self.next()
            return Top()
        return self.parse_atom()

    # -- statements ------------------------------------------------------

    def parse_rule(self, index: int) -> Rule:
        tok = self.peek()
        body: list[Literal] = []
        if not tok.kind == "ARROW":
            body.append(self.parse_literal())
            while self.at_punct(","):
                self.next()
                body.append(self.parse_literal())
        self.expect("ARROW")
        head = self.parse_head()
        self.expect("PUNCT", ".")
        rule = Rule(tuple(body), head, f"r{index}")
        head_vars = literal_variables(rule.head)
        bound = set().union(*(literal_variables(b) for b in rule.body)) if body else set()
        loose = head_vars - bound
        if loose:
            raise ParseError(
                f"head variables {sorted(loose)} do not occur in the body",
                tok.line,
                tok.col,
            )
        return rule

    def parse_program(self) -> Program:
        rules: list[Rule] = []
        axioms: list[Fact] = []
        index = 1
        while self.peek().kind != "EOF":
            rule = self.parse_rule(index)
            if not rule.body:
                if not isinstance(rule.head, Atom) or not rule.head.is_ground:
                    raise self.error("a bodiless rule must have a ground atom head")
                axioms.append(Fact(rule.head, Interval(NEG_INF, POS_INF, True, True)))
            else:
                rules.append(rule)
                index += 1
        self._check_units()
        return Program(tuple(rules), tuple(axioms))

    def parse_fact(self) -> Fact:
        atom = self.parse_atom()
        if not atom.is_ground:
            raise self.error("database facts must be ground")
        self.expect("PUNCT", "@")
        interval = self.parse_interval()
        self.expect("PUNCT", ".")
        return Fact(atom, interval)

    def parse_database_facts(self) -> list[Fact]:
        facts = []
        while self.peek().kind != "EOF":
            facts.append(self.parse_fact())
        self._check_units()
        return facts

    def _check_units(self) -> None:
        if self.seen_unit and self.seen_bare:
            raise ParseError(
                "file mixes unit-suffixed and bare durations", 1, 1
            )


def parse_program(text: str) -> Program:
    return _Parser(text).parse_program()


def parse_database(text: str):
    """Parse a database file into a Model (atom -> IntervalSet)."""
    from .reasoner import Model

    return Model.from_facts(_Parser(text).parse_database_facts())


def parse_fact(text: str) -> Fact:
    """Parse a single ``atom@interval`` fact (with or without trailing dot)."""
    stripped = text.strip()
    if not stripped.endswith("."):
        stripped += "."
    return _Parser(stripped).parse_fact()


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

def rule_text(rule: Rule) -> str:
    return str(rule)


def program_text(program: Program) -> str:
    lines = [str(r) for r in program.rules]
    lines.extend(f"-> {f.atom} ." for f in program.axioms)
    return "\n".join(lines) + ("\n" if lines else "")


def database_text(facts: Iterable[Fact]) -> str:
    lines = [f"{f} ." for f in facts]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Temporal normal form
# ---------------------------------------------------------------------------

class _Normalizer:
    def __init__(self, program: Program):
        self.counter = 0
        self.aux_for: dict[Literal, Atom] = {}
        self.rules: list[Rule] = []
        self.axioms: list[Fact] = list(program.axioms)
        self.true_atom: Atom | None = None

    def fresh_atom(self, variables: tuple[Term, ...]) -> Atom:
        atom = Atom(f"{AUX_PREFIX}{self.counter}", variables)
        self.counter += 1
        return atom

    def emit(self, body: tuple[Literal, ...], head: Literal, rid: str) -> None:
        self.rules.append(Rule(body, head, rid))

    def always_true(self) -> Atom:
        # stand-in atom for a nested `top` operand of since/until
        if self.true_atom is None:
            self.true_atom = Atom(f"{AUX_PREFIX}top")
            self.axioms.append(
                Fact(self.true_atom, Interval(NEG_INF, POS_INF, True, True))
            )
        return self.true_atom

    def simplify(self, lit: Literal) -> Literal:
        """Fold `top` through the operators; since/until over top reduce."""
        if isinstance(lit, UNARY_OPS):
            inner = self.simplify(lit.inner)
            if isinstance(inner, Top):
                return Top()
            return type(lit)(lit.rho, inner)
        if isinstance(lit, (Since, Until)):
            left = self.simplify(lit.left)
            right = self.simplify(lit.right)
            if isinstance(left, Top):
                op = DiamondMinus if isinstance(lit, Since) else DiamondPlus
                return op(lit.rho, right)
            return type(lit)(left, lit.rho, right)
        return lit

    def atomize(self, lit: Literal, rid: str) -> Atom:
        """Define a fresh predicate equivalent to ``lit`` and return it."""
        if isinstance(lit, Atom):
            return lit
        if isinstance(lit, Top):
            return self.always_true()
        key = lit
        cached = self.aux_for.get(key)
        if cached is not None:
            return cached
        variables = tuple(Variable(v) for v in sorted(literal_variables(lit)))
        aux = self.fresh_atom(variables)
        self.aux_for[key] = aux
        flat = self.flatten(lit, rid)
        self.emit((flat,), aux, f"{rid}~{aux.predicate}")
        return aux

    def flatten(self, lit: Literal, rid: str) -> Literal:
        """Rewrite one literal so each operator applies directly to an atom."""
        if isinstance(lit, (Atom, Top, Bottom)):
            return lit
        if isinstance(lit, UNARY_OPS):
            return type(lit)(lit.rho, self.atomize(lit.inner, rid))
        if isinstance(lit, (Since, Until)):
            return type(lit)(
                self.atomize(lit.left, rid), lit.rho, self.atomize(lit.right, rid)
            )
        raise InputError(f"cannot normalize literal {lit}")

    def add_rule(self, rule: Rule) -> None:
        body: list[Literal] = []
        for lit in rule.body:
            lit = self.simplify(lit)
            if isinstance(lit, Bottom):
                return  # rule can never fire
            if isinstance(lit, Top):
                continue
            body.append(self.flatten(lit, rule.id))

        head = self.simplify(rule.head)
        if isinstance(head, Top):
            return  # trivially satisfied
        rid = rule.id
        # Peel box heads via the dual diamond rule.
        while isinstance(head, (BoxMinus, BoxPlus)):
            carrier = self.fresh_atom(
                tuple(Variable(v) for v in sorted(literal_variables(head.inner)))
            )
            self.finish_rule(tuple(body), carrier, rid)
            dual = DiamondPlus if isinstance(head, BoxMinus) else DiamondMinus
            body = [dual(head.rho, carrier)]
            rid = f"{rid}^"
            head = head.inner

        self.finish_rule(tuple(body), head, rid)

    def finish_rule(self, body: tuple[Literal, ...], head: Atom, rid: str) -> None:
        if not body:
            if not head.is_ground:
                raise InputError(f"rule {rid}: unrestricted head {head}")
            self.axioms.append(Fact(head, Interval(NEG_INF, POS_INF, True, True)))
            return
        temporal = [b for b in body if not isinstance(b, Atom)]
        if temporal and len(body) > 1:
            new_body: list[Literal] = []
            for lit in body:
                if isinstance(lit, Atom):
                    new_body.append(lit)
                else:
                    new_body.append(self.atomize(lit, rid))
            body = tuple(new_body)
        self.emit(body, head, rid)


def to_normal_form(program: Program) -> Program:
    """Convert to temporal normal form.

    Nested temporal literals and temporal literals sharing a body with
    other literals are factored through fresh ``_aux`` predicates; box
    heads are rewritten through the dual diamond rule. Already-normal
    programs come back unchanged (idempotent).
    """
    if program.is_normal_form:
        return program
    norm = _Normalizer(program)
    for rule in program.rules:
        norm.add_rule(rule)
    return Program(tuple(norm.rules), tuple(norm.axioms))


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------

def _substitute_term(term: Term, binding: dict[str, str]) -> Term:
    if isinstance(term, Variable):
        return Constant(binding[term.name])
    return term


def _substitute(lit: Literal, binding: dict[str, str]) -> Literal:
    if isinstance(lit, Atom):
        return Atom(lit.predicate, tuple(_substitute_term(t, binding) for t in lit.terms))
    if isinstance(lit, UNARY_OPS):
        return type(lit)(lit.rho, _substitute(lit.inner, binding))
    if isinstance(lit, (Since, Until)):
        return type(lit)(
            _substitute(lit.left, binding), lit.rho, _substitute(lit.right, binding)
        )
    return lit


def ground(program: Program, database=None) -> Program:
    """Instantiate every rule with constants drawn from program and database.

    Rules whose variables cannot be bound (no constants anywhere) produce
    no instances; propositional rules pass through untouched.
    """
    constants = set(program.constants())
    if database is not None:
        constants.update(
            t.name for atom in database.atoms() for t in atom.terms
        )
    names = sorted(constants)
    out: list[Rule] = []
    for rule in program.rules:
        variables = sorted(
            set().union(
                literal_variables(rule.head),
                *(literal_variables(b) for b in rule.body),
            )
        )
        if not variables:
            out.append(rule)
            continue
        for combo in product(names, repeat=len(variables)):
            binding = dict(zip(variables, combo))
            out.append(
                Rule(
                    tuple(_substitute(b, binding) for b in rule.body),
                    _substitute(rule.head, binding),
                    f"{rule.id}[{','.join(combo)}]",
                )
            )
    return Program(tuple(out), program.axioms)
