"""Constraint evaluation over a graph.

DEFINE rows are evaluated to node sets (class extensions) with least-fixpoint
semantics for recursive definitions and stratified negation. ASSERT rows are
dispatched to per-element checks that emit violations. Closed-world and
unique-name behavior is controlled by ValidationConfig.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from . import rdf
from .model import (
    Constraint, ConstraintSet, Element, PropertyRef, Severity,
    ClassRef, MODE_DEFINE,
    BOTTOM, DATATYPE, DEFINED, NAMED, NOMINALS, SELF, TOP, TOP_REF,
)


class FixpointLimit(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"FIXPOINT_LIMIT: no fixpoint within {cap} rounds")


@dataclass(frozen=True)
class ValidationConfig:
    cwa: bool = True
    una: bool = True
    infer: bool = False
    fixpoint_cap: int = 10_000
    severity_floor: Severity = Severity.ERROR

    def __post_init__(self):
        if not self.una and not self.infer:
            raise ValueError("una=False requires infer=True")


@dataclass(frozen=True)
class Violation:
    constraint_id: str
    type_name: str
    focus: rdf.Term
    detail: str
    severity: Severity
    element: Element

    def sort_key(self):
        return (self.constraint_id, self.focus.sort_key(), self.detail)


@dataclass
class Report:
    violations: list
    config: ValidationConfig
    severity_floor: Severity = Severity.ERROR

    @property
    def conforms(self) -> bool:
        return not any(v.severity >= self.severity_floor
                       for v in self.violations)

    def counts(self) -> dict:
        out = {"info": 0, "warning": 0, "error": 0}
        for v in self.violations:
            out[v.severity.name.lower()] += 1
        return out


# Violations that report the absence of data; downgraded to WARNING when the
# closed-world assumption is switched off (absence is not falsifiable then).
_ABSENT = "absent"
_PRESENT = "present"


class EvaluationEnv:
    """Read-only evaluation state: graph, constraint set, memo, partition."""

    def __init__(self, graph: rdf.Graph, cset: ConstraintSet,
                 config: ValidationConfig, partition=None):
        self.graph = graph
        self.cset = cset
        self.config = config
        self.partition = partition   # SameAsPartition or None
        self.memo: dict = {}
        self._universe = None
        self._rounds = 0

    # -- identity under the configured name semantics ----------------------

    def rep(self, t: rdf.Term):
        """Counting key: partition representative for nodes, term otherwise."""
        if self.partition is not None and t.is_node():
            return self.partition.find(t)
        return t

    def same(self, a: rdf.Term, b: rdf.Term) -> bool:
        return a == b or self.rep(a) == self.rep(b)

    def mates(self, t: rdf.Term):
        """All known names for t (partition classmates), including t."""
        if self.partition is not None and t.is_node():
            return self.partition.classmates(t)
        return (t,)

    # -- primitive accessors ----------------------------------------------

    def universe(self) -> frozenset:
        if self._universe is None:
            self._universe = self.graph.nodes()
        return self._universe

    def fillers(self, x: rdf.Term, prop: PropertyRef) -> frozenset:
        """Objects reachable from x (or any name for x) over prop."""
        if prop.chain:
            frontier = {x}
            for step in prop.chain:
                nxt = set()
                for node in frontier:
                    nxt.update(self.fillers(node, step))
                frontier = nxt
            return frozenset(frontier)
        p = rdf.iri(prop.iri)
        out = set()
        for name in self.mates(x):
            if prop.inverse:
                if name.is_node():
                    out.update(self.graph.subjects(p, name))
            else:
                out.update(self.graph.objects(name, p))
        return frozenset(out)

    def pairs(self, prop: PropertyRef):
        """All (x, y) with a prop edge, before partition collapsing."""
        if prop.chain:
            result = set()
            starts = {t.s for t in self.graph.match(
                None, rdf.iri(prop.chain[0].iri), None)}
            if prop.chain[0].inverse:
                starts = {t.o for t in self.graph.match(
                    None, rdf.iri(prop.chain[0].iri), None) if t.o.is_node()}
            for x in starts:
                for y in self.fillers(x, prop):
                    result.add((x, y))
            return result
        p = rdf.iri(prop.iri)
        if prop.inverse:
            return {(t.o, t.s) for t in self.graph.match(None, p, None)
                    if t.o.is_node()}
        return {(t.s, t.o) for t in self.graph.match(None, p, None)}

    def distinct_count(self, values) -> int:
        """Distinct values: partition classes for nodes, lexical for literals."""
        return len({self.rep(v) for v in values})

    # -- class membership and extensions -----------------------------------

    def instances(self, class_iri: str) -> frozenset:
        typed = set(self.graph.subjects(rdf.TYPE, rdf.iri(class_iri)))
        if self.partition is None:
            return frozenset(typed)
        out = set(typed)
        for n in typed:
            out.update(m for m in self.mates(n) if m in self.universe())
        return frozenset(out)

    def member(self, t: rdf.Term, ref: ClassRef, focus=None) -> bool:
        if ref.kind == TOP:
            return t.is_node()
        if ref.kind == BOTTOM:
            return False
        if ref.kind == SELF:
            return focus is not None and self.same(t, focus)
        if ref.kind == DATATYPE:
            return _literal_in_datatype(t, ref.iri)
        if ref.kind == NOMINALS:
            return any(self.same(t, m) for m in ref.members)
        if ref.kind == NAMED:
            return t in self.instances(ref.iri)
        return t in self.extension(ref)

    def extension(self, ref: ClassRef) -> frozenset:
        if ref in self.memo:
            return self.memo[ref]
        if ref.kind == TOP:
            result = self.universe()
        elif ref.kind == BOTTOM:
            result = frozenset()
        elif ref.kind == NAMED:
            result = self.instances(ref.iri)
        elif ref.kind == NOMINALS:
            out = set()
            for m in ref.members:
                out.add(m)
                out.update(x for x in self.mates(m) if x in self.universe())
            result = frozenset(out)
        elif ref.kind == DATATYPE:
            result = frozenset(
                lit for lit in self.graph.literals()
                if _literal_in_datatype(lit, ref.iri))
        elif ref.kind == SELF:
            raise ValueError("SELF has no standalone extension")
        else:
            result = self._defined_extension(ref.label)
            return result
        self.memo[ref] = result
        return result

    def _defined_extension(self, label: str) -> frozenset:
        ref = ClassRef.defined(label)
        if ref in self.memo:
            return self.memo[ref]
        stratum = self.cset.strata[label]
        component = [l for l, s in self.cset.strata.items() if s == stratum]
        recursive = any(l in self.cset.cyclic for l in component)
        # least fixpoint from the empty set over the whole component
        for l in component:
            self.memo[ClassRef.defined(l)] = frozenset()
        while True:
            self._rounds += 1
            if self._rounds > self.config.fixpoint_cap:
                raise FixpointLimit(self.config.fixpoint_cap)
            changed = False
            for l in component:
                key = ClassRef.defined(l)
                new = self._evaluate_body(self.cset.defines[l])
                if new != self.memo[key]:
                    self.memo[key] = new
                    changed = True
            if not changed or not recursive:
                break
        return self.memo[ref]

    def _evaluate_body(self, row: Constraint) -> frozenset:
        el = row.element
        if el is Element.INTERSECTION:
            result = set(self.universe())
            for ref in row.classes:
                result &= self.extension(ref)
            return frozenset(result)
        if el is Element.UNION:
            result = set()
            for ref in row.classes:
                result |= self.extension(ref)
            return frozenset(result)
        if el is Element.NEGATION:
            return self.universe() - self.extension(row.classes[0])
        if el is Element.XOR:
            exts = [self.extension(ref) for ref in row.classes]
            return frozenset(
                x for x in self.universe()
                if sum(1 for e in exts if x in e) == 1)
        if el is Element.CLASS_EQUIV:
            return self.extension(row.classes[0])
        if el is Element.ALLOWED_VALUES:
            # all fillers fall inside the permitted union (vacuous when none)
            prop = row.left[0]
            refs = row.classes
            return frozenset(
                x for x in self.universe()
                if all(any(self.member(v, r, x) for r in refs)
                       for v in self.fillers(x, prop)))
        if el in (Element.EXISTS, Element.REQUIRED, Element.VALUE_RESTRICTION,
                  Element.FORALL, Element.MIN_CARD, Element.MAX_CARD,
                  Element.EXACT_CARD):
            return frozenset(
                x for x in self.universe()
                if self._quantifier_holds(row, x))
        raise ValueError(
            f"define row {row.id}: element {el.value} has no extension")

    def _quantifier_holds(self, row: Constraint, x: rdf.Term) -> bool:
        prop = row.left[0]
        qual = row.classes[0] if row.classes else TOP_REF
        fillers = self.fillers(x, prop)
        if row.element is Element.FORALL:
            return all(self.member(v, qual, x) for v in fillers)
        qualified = [v for v in fillers if self.member(v, qual, x)]
        count = self.distinct_count(qualified)
        if row.element in (Element.EXISTS, Element.REQUIRED,
                           Element.VALUE_RESTRICTION):
            return count >= 1
        if row.element is Element.MIN_CARD:
            return count >= row.value
        if row.element is Element.MAX_CARD:
            return count <= row.value
        return count == row.value      # EXACT_CARD


def _literal_in_datatype(t: rdf.Term, dt_iri: str) -> bool:
    if t.kind != rdf.LITERAL or t.datatype != dt_iri:
        return False
    try:
        rdf.value_of(t)
    except rdf.Unparsable:
        return False
    return True


# ---------------------------------------------------------------------------
# Sugar normalization
# ---------------------------------------------------------------------------

def _shortcut_bounds(value):
    text = str(value or "").lower()
    mandatory = "mandatory" in text or "required" in text
    repeatable = "non-repeatable" not in text and "repeatable" in text
    return (1 if mandatory else 0), (None if repeatable else 1)


def normalize_sugar(row: Constraint) -> list:
    """Expand sugar elements into equivalent core rows (same id kept)."""
    el = row.element
    if el is Element.REQUIRED:
        return [replace(row, element=Element.EXISTS, value=None)]
    if el is Element.REPEATABLE:
        return [replace(row, element=Element.MIN_CARD, value=1)]
    if el is Element.EXACT_CARD:
        return [replace(row, element=Element.MIN_CARD),
                replace(row, element=Element.MAX_CARD)]
    if el is Element.CARD_SHORTCUT:
        lo, hi = _shortcut_bounds(row.value)
        rows = []
        if lo > 0:
            rows.append(replace(row, element=Element.MIN_CARD, value=lo))
        if hi is not None:
            rows.append(replace(row, element=Element.MAX_CARD, value=hi))
        return rows
    if el is Element.SYMMETRIC:
        # equivalent to being its own inverse
        return [replace(row, element=Element.INVERSE, right=row.left)]
    return [row]


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def _v(row, focus, detail, kind=_PRESENT, severity=None):
    return (Violation(row.id, row.element.value, focus, detail,
                      severity if severity is not None else row.severity,
                      row.element),
            kind)


def _lex(t: rdf.Term) -> str:
    if t.kind == rdf.LITERAL:
        return t.lexical
    if t.kind == rdf.IRI:
        return t.iri
    return "_:" + t.label


def check_subsumption(row, env):
    sub = env.extension(row.context)
    if row.element is Element.CLASS_EQUIV:
        sup = env.extension(row.classes[0])
        for x in sorted(sub - sup, key=rdf.Term.sort_key):
            yield _v(row, x, "not an instance of the equivalent class",
                     _ABSENT)
        for x in sorted(sup - sub, key=rdf.Term.sort_key):
            yield _v(row, x, "equivalent class instance missing from context",
                     _ABSENT)
        return
    if row.element is Element.CLASS_DISJOINT:
        bad = set(sub)
        for ref in row.classes:
            bad &= env.extension(ref)
        for x in sorted(bad, key=rdf.Term.sort_key):
            yield _v(row, x, "instance of classes declared disjoint")
        return
    # SUBCLASS_OF
    sup = env.extension(row.classes[0])
    for x in sorted(sub - sup, key=rdf.Term.sort_key):
        yield _v(row, x, "not an instance of the super class", _ABSENT)


def check_quantifier(row, env):
    qual = row.classes[0] if row.classes else TOP_REF
    for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
        fillers = env.fillers(x, row.left[0])
        if row.element is Element.FORALL:
            for v in sorted(fillers, key=rdf.Term.sort_key):
                if not env.member(v, qual, x):
                    yield _v(row, x, f"value {_lex(v)} outside required class")
            continue
        qualified = [v for v in fillers if env.member(v, qual, x)]
        count = env.distinct_count(qualified)
        if row.element is Element.EXISTS and count < 1:
            yield _v(row, x, "required value missing", _ABSENT)
        elif row.element is Element.MIN_CARD and count < row.value:
            yield _v(row, x, f"{count} values, at least {row.value} required",
                     _ABSENT)
        elif row.element is Element.MAX_CARD and count > row.value:
            yield _v(row, x, f"{count} values, at most {row.value} allowed")


def check_value_restriction(row, env):
    target = row.classes[0]
    for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
        fillers = env.fillers(x, row.left[0])
        if not any(env.member(v, target, x) for v in fillers):
            yield _v(row, x, "required specific value missing", _ABSENT)


def check_boolean(row, env):
    ctx = env.extension(row.context)
    if row.element is Element.NEGATION:
        bad = ctx & env.extension(row.classes[0])
        for x in sorted(bad, key=rdf.Term.sort_key):
            yield _v(row, x, "instance of the forbidden class")
        return
    if row.element is Element.INTERSECTION:
        for ref in row.classes:
            ext = env.extension(ref)
            for x in sorted(ctx - ext, key=rdf.Term.sort_key):
                yield _v(row, x, "missing from a required conjunct", _ABSENT)
        return
    if row.element is Element.UNION:
        exts = [env.extension(ref) for ref in row.classes]
        for x in sorted(ctx, key=rdf.Term.sort_key):
            if not any(x in e for e in exts):
                yield _v(row, x, "member of no permitted alternative", _ABSENT)
        return
    # XOR: exactly one operand must hold
    exts = [env.extension(ref) for ref in row.classes]
    for x in sorted(ctx, key=rdf.Term.sort_key):
        n = sum(1 for e in exts if x in e)
        if n == 0:
            yield _v(row, x, "no alternative satisfied", _ABSENT)
        elif n > 1:
            yield _v(row, x, f"{n} exclusive alternatives satisfied")


def check_property_axiom(row, env):
    el = row.element
    left = row.left[0]
    g = env.graph
    if el in (Element.SUBPROPERTY_OF, Element.PROPERTY_EQUIV,
              Element.CONDITIONAL):
        right = row.right[0]
        if el is Element.CONDITIONAL:
            subjects = {x for x, _ in env.pairs(left)}
            for x in sorted(subjects, key=rdf.Term.sort_key):
                if not env.fillers(x, right):
                    yield _v(row, x, "conditional property missing", _ABSENT)
            return
        for x, y in sorted(env.pairs(left),
                           key=lambda p: (p[0].sort_key(), p[1].sort_key())):
            if not any(env.same(y, z) for z in env.fillers(x, right)):
                yield _v(row, x,
                         f"missing super-property edge to {_lex(y)}", _ABSENT)
        if el is Element.PROPERTY_EQUIV:
            for x, y in sorted(env.pairs(right),
                               key=lambda p: (p[0].sort_key(),
                                              p[1].sort_key())):
                if not any(env.same(y, z) for z in env.fillers(x, left)):
                    yield _v(row, x,
                             f"missing equivalent-property edge to {_lex(y)}",
                             _ABSENT)
        return
    if el is Element.PROPERTY_DISJOINT:
        right = row.right[0]
        for x, y in sorted(env.pairs(left),
                           key=lambda p: (p[0].sort_key(), p[1].sort_key())):
            if any(env.same(y, z) for z in env.fillers(x, right)):
                yield _v(row, x,
                         f"edge to {_lex(y)} present for both disjoint "
                         "properties")
        return
    if el is Element.INVERSE:
        right = row.right[0]
        for x, y in sorted(env.pairs(left),
                           key=lambda p: (p[0].sort_key(), p[1].sort_key())):
            if not y.is_node():
                continue
            if not any(env.same(x, z) for z in env.fillers(y, right)):
                yield _v(row, x, f"missing inverse edge {_lex(y)} -> {_lex(x)}",
                         _ABSENT)
        for x, y in sorted(env.pairs(right),
                           key=lambda p: (p[0].sort_key(), p[1].sort_key())):
            if not y.is_node():
                continue
            if not any(env.same(x, z) for z in env.fillers(y, left)):
                yield _v(row, x, f"missing inverse edge {_lex(y)} -> {_lex(x)}",
                         _ABSENT)
        return
    if el is Element.ASYMMETRIC:
        seen = set()
        for x, y in env.pairs(left):
            if not y.is_node():
                continue
            if any(env.same(x, z) for z in env.fillers(y, left)):
                key = frozenset((env.rep(x), env.rep(y)))
                if key not in seen:
                    seen.add(key)
                    a, b = sorted((x, y), key=rdf.Term.sort_key)
                    yield _v(row, a,
                             f"edge present in both directions with {_lex(b)}")
        return
    if el is Element.TRANSITIVE:
        pairs = env.pairs(left)
        for x, y in sorted(pairs, key=lambda p: (p[0].sort_key(),
                                                 p[1].sort_key())):
            if not y.is_node():
                continue
            for z in sorted(env.fillers(y, left), key=rdf.Term.sort_key):
                if not any(env.same(z, w) for w in env.fillers(x, left)):
                    yield _v(row, x,
                             f"missing transitive edge to {_lex(z)}", _ABSENT)
        return
    if el is Element.REFLEXIVE:
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            if not any(env.same(x, v) for v in env.fillers(x, left)):
                yield _v(row, x, "missing edge to itself", _ABSENT)
        return
    if el is Element.IRREFLEXIVE:
        restrict = None
        if row.context.kind != TOP:
            restrict = env.extension(row.context)
        for x, y in sorted(env.pairs(left),
                           key=lambda p: (p[0].sort_key(), p[1].sort_key())):
            if restrict is not None and x not in restrict:
                continue
            if env.same(x, y):
                yield _v(row, x, "edge to itself is forbidden")
        return
    if el is Element.DOMAIN:
        target = row.classes[0]
        subjects = {x for x, _ in env.pairs(left)}
        for x in sorted(subjects, key=rdf.Term.sort_key):
            if not env.member(x, target, x):
                yield _v(row, x, "subject outside the declared domain",
                         _ABSENT)
        return
    if el is Element.RANGE:
        target = row.classes[0]
        restrict = None
        if row.context.kind != TOP:
            restrict = env.extension(row.context)
        for x, y in sorted(env.pairs(left),
                           key=lambda p: (p[0].sort_key(), p[1].sort_key())):
            if restrict is not None and x not in restrict:
                continue
            if not env.member(y, target, x):
                yield _v(row, x, f"value {_lex(y)} outside the declared range",
                         _ABSENT)
        return
    if el is Element.FUNCTIONAL:
        subjects = {x for x, _ in env.pairs(left)}
        for x in sorted(subjects, key=rdf.Term.sort_key):
            n = env.distinct_count(env.fillers(x, left))
            if n > 1:
                yield _v(row, x, f"{n} distinct values for a functional "
                                 "property")
        return
    if el is Element.INVERSE_FUNCTIONAL:
        objects = {y for _, y in env.pairs(left)}
        for y in sorted(objects, key=rdf.Term.sort_key):
            if not y.is_node():
                continue
            n = env.distinct_count(env.fillers(y, left.flipped()))
            if n > 1:
                yield _v(row, y, f"{n} distinct subjects share an "
                                 "inverse-functional value")
        return
    if el is Element.KEYFOR:
        ctx = env.extension(row.context)
        by_key: dict = {}
        for x in ctx:
            for v in env.fillers(x, left):
                by_key.setdefault(env.rep(v), set()).add(env.rep(x))
        seen = set()
        for key_val, owners in sorted(by_key.items(),
                                      key=lambda kv: kv[0].sort_key()):
            if len(owners) > 1:
                marker = frozenset(owners)
                if marker in seen:
                    continue
                seen.add(marker)
                focus = min(owners, key=rdf.Term.sort_key)
                yield _v(row, focus,
                         f"key value {_lex(key_val)} shared by "
                         f"{len(owners)} distinct individuals")
        return
    raise ValueError(f"unhandled property axiom {el.value}")


def check_individuals(row, env):
    # context and classes[0] are singleton nominal sets
    (a,) = tuple(row.context.members)
    (b,) = tuple(row.classes[0].members)
    if row.element is Element.INDIVIDUAL_EQ:
        if not env.same(a, b):
            yield _v(row, a, f"{_lex(a)} and {_lex(b)} are not known to be "
                             "the same individual", _ABSENT)
    else:
        if env.same(a, b):
            yield _v(row, a, f"{_lex(a)} and {_lex(b)} denote the same "
                             "individual")


def check_assertion(row, env):
    (a,) = tuple(row.context.members)
    (obj,) = tuple(row.classes[0].members)
    present = any(env.same(obj, v) for v in env.fillers(a, row.left[0]))
    if row.element is Element.ASSERTION_EQ and not present:
        yield _v(row, a, f"required assertion to {_lex(obj)} missing",
                 _ABSENT)
    if row.element is Element.ASSERTION_NEQ and present:
        yield _v(row, a, f"forbidden assertion to {_lex(obj)} present")


def check_values(row, env):
    el = row.element
    if el is Element.VOCAB_MEMBERSHIP:
        scheme_prop = row.right[0]
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            for v in sorted(env.fillers(x, row.left[0]),
                            key=rdf.Term.sort_key):
                if not v.is_node():
                    continue
                for s in sorted(env.fillers(v, scheme_prop),
                                key=rdf.Term.sort_key):
                    if not any(env.member(s, ref, x) for ref in row.classes):
                        yield _v(row, x,
                                 f"value {_lex(v)} is in vocabulary "
                                 f"{_lex(s)}, which is not allowed")
        return
    for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
        for v in sorted(env.fillers(x, row.left[0]), key=rdf.Term.sort_key):
            inside = any(env.member(v, ref, x) for ref in row.classes)
            if el is Element.ALLOWED_VALUES and not inside:
                yield _v(row, x, f"value {_lex(v)} is not allowed")
            elif el is Element.NOT_ALLOWED_VALUES and inside:
                yield _v(row, x, f"value {_lex(v)} is explicitly excluded")


_HTML_RE = re.compile(r"<[A-Za-z][^>]*>")
_WS_EDGE_RE = re.compile(r"^\s|\s$")
_INTERNAL_WS_RE = re.compile(r"\S\s+\S")

_OPS = {
    "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b, "!=": lambda a, b: a != b,
}


def _literal_targets(row, env):
    """(focus, literal) pairs the literal-family checks run over."""
    if row.context.kind == DATATYPE:
        for lit in sorted(env.graph.literals(), key=rdf.Term.sort_key):
            if lit.datatype == row.context.iri:
                yield lit, lit
        return
    for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
        for v in sorted(env.fillers(x, row.left[0]), key=rdf.Term.sort_key):
            yield x, v


def check_literal(row, env):
    el = row.element
    if el is Element.COMPARE:
        yield from _check_compare(row, env)
        return
    if el is Element.LANG_TAG_CARD:
        yield from _check_lang_card(row, env)
        return
    for focus, v in _literal_targets(row, env):
        text = _lex(v)
        if el is Element.PATTERN:
            if not re.search(row.value, text):
                yield _v(row, focus, f"{text!r} does not match the pattern")
        elif el is Element.NEG_PATTERN:
            if re.search(row.value, text):
                yield _v(row, focus, f"{text!r} matches the forbidden pattern")
        elif el is Element.LANG_TAG:
            if v.kind != rdf.LITERAL:
                continue
            if not _lang_matches(v.lang, str(row.value)):
                yield _v(row, focus,
                         f"language tag {v.lang or '(none)'} not allowed")
        elif el is Element.WHITESPACE:
            if v.kind != rdf.LITERAL:
                continue
            if _WS_EDGE_RE.search(text):
                yield _v(row, focus, "leading or trailing whitespace")
            elif (str(row.value) == "none-internal"
                  and _INTERNAL_WS_RE.search(text)):
                yield _v(row, focus, "internal whitespace is forbidden")
        elif el is Element.HTML_FREE:
            if v.kind == rdf.LITERAL and _HTML_RE.search(text):
                yield _v(row, focus, "literal contains HTML markup")
        elif el is Element.STRING_LENGTH:
            if v.kind != rdf.LITERAL:
                continue
            n = len(text)
            facets = row.value if isinstance(row.value, dict) else {}
            lo = facets.get("min")
            hi = facets.get("max")
            if lo is not None and n < lo:
                yield _v(row, focus, f"length {n} below minimum {lo}")
            if hi is not None and n > hi:
                yield _v(row, focus, f"length {n} above maximum {hi}")
        elif el is Element.VALUE_VALID_FOR_DATATYPE:
            if v.kind != rdf.LITERAL:
                continue
            try:
                rdf.value_of(v)
            except rdf.Unparsable as exc:
                yield _v(row, focus,
                         f"{text!r} is not valid for {exc.datatype}")
        elif el in (Element.FACET_RANGE, Element.NEG_FACET_RANGE):
            if v.kind != rdf.LITERAL:
                continue
            failures = _facet_failures(v, row.value or {})
            if el is Element.FACET_RANGE:
                for msg in failures:
                    yield _v(row, focus, msg)
            elif not failures:
                yield _v(row, focus,
                         f"{text!r} falls inside the excluded range")
        else:
            raise ValueError(f"unhandled literal element {el.value}")


def _facet_failures(lit, facets):
    text = lit.lexical
    out = []
    try:
        val = rdf.value_of(lit)
    except rdf.Unparsable:
        return [f"{text!r} is not parseable for facet comparison"]
    for facet, expected in facets.items():
        try:
            if facet == "minInclusive" and not val >= _facet_value(expected):
                out.append(f"{text!r} below minInclusive {expected}")
            elif facet == "maxInclusive" and not val <= _facet_value(expected):
                out.append(f"{text!r} above maxInclusive {expected}")
            elif facet == "minExclusive" and not val > _facet_value(expected):
                out.append(f"{text!r} not above minExclusive {expected}")
            elif facet == "maxExclusive" and not val < _facet_value(expected):
                out.append(f"{text!r} not below maxExclusive {expected}")
            elif facet == "pattern" and not re.search(str(expected), text):
                out.append(f"{text!r} does not match facet pattern")
            elif facet == "length" and len(text) != int(expected):
                out.append(f"length {len(text)} != {expected}")
            elif facet == "minLength" and len(text) < int(expected):
                out.append(f"length {len(text)} < {expected}")
            elif facet == "maxLength" and len(text) > int(expected):
                out.append(f"length {len(text)} > {expected}")
        except TypeError:
            out.append(f"{text!r} not comparable with facet {facet}")
    return out


def _facet_value(expected):
    if isinstance(expected, str):
        try:
            return int(expected)
        except ValueError:
            return expected
    return expected


def _lang_matches(tag: str, wanted: str) -> bool:
    if not tag:
        return False
    tag = tag.lower()
    wanted = wanted.lower()
    return tag == wanted or tag.startswith(wanted + "-")


def _check_compare(row, env):
    op = _OPS[row.value]
    for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
        lefts = [v for v in env.fillers(x, row.left[0])
                 if v.kind == rdf.LITERAL]
        rights = [v for v in env.fillers(x, row.right[0])
                  if v.kind == rdf.LITERAL]
        for lv in sorted(lefts, key=rdf.Term.sort_key):
            for rv in sorted(rights, key=rdf.Term.sort_key):
                try:
                    ok = op(rdf.value_of(lv), rdf.value_of(rv))
                except (rdf.Unparsable, TypeError):
                    yield _v(row, x,
                             f"cannot compare {lv.lexical!r} with "
                             f"{rv.lexical!r}")
                    continue
                if not ok:
                    yield _v(row, x,
                             f"{lv.lexical!r} {row.value} {rv.lexical!r} "
                             "does not hold")


def _check_lang_card(row, env):
    facets = row.value if isinstance(row.value, dict) else {}
    lo = facets.get("min")
    hi = facets.get("max")
    for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
        by_lang: dict = {}
        for v in env.fillers(x, row.left[0]):
            if v.kind == rdf.LITERAL and v.lang:
                by_lang.setdefault(v.lang, set()).add(v)
        for lang in sorted(by_lang):
            n = len(by_lang[lang])
            if hi is not None and n > hi:
                yield _v(row, x,
                         f"{n} values tagged @{lang}, at most {hi} allowed")
            if lo is not None and n < lo:
                yield _v(row, x,
                         f"{n} values tagged @{lang}, at least {lo} required",
                         _ABSENT)


def check_structure(row, env):
    el = row.element
    g = env.graph
    if el is Element.ORDERED:
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            for head in sorted(env.fillers(x, row.left[0]),
                               key=rdf.Term.sort_key):
                try:
                    members = rdf.list_members(g, head)
                except ValueError as exc:
                    yield _v(row, x, f"MALFORMED_LIST: {exc}")
                    continue
                dt = str(row.value) if row.value else ""
                if dt:
                    for m in members:
                        if m.kind != rdf.LITERAL or m.datatype != dt:
                            yield _v(row, x,
                                     f"list member {_lex(m)} not of the "
                                     "required datatype")
        return
    if el is Element.LIST_OP:
        spec = row.value if isinstance(row.value, dict) else {}
        index = int(spec.get("index", 0))
        expect = str(spec.get("expect", ""))
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            for head in sorted(env.fillers(x, row.left[0]),
                               key=rdf.Term.sort_key):
                try:
                    members = rdf.list_members(g, head)
                except ValueError as exc:
                    yield _v(row, x, f"MALFORMED_LIST: {exc}")
                    continue
                if index >= len(members):
                    yield _v(row, x,
                             f"list has no element at index {index}")
                    continue
                m = members[index]
                names = {_lex(m)}
                if m.kind == rdf.IRI:
                    for sep in ("#", "/"):
                        if sep in m.iri:
                            names.add(m.iri.rsplit(sep, 1)[1])
                if expect not in names:
                    yield _v(row, x,
                             f"list element {index} is {_lex(m)}, "
                             f"expected {expect}")
        return
    if el is Element.COUNT_AGG:
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            actual = env.distinct_count(env.fillers(x, row.right[0]))
            for stated in sorted(env.fillers(x, row.left[0]),
                                 key=rdf.Term.sort_key):
                try:
                    value = rdf.value_of(stated)
                except rdf.Unparsable:
                    yield _v(row, x, f"count value {_lex(stated)!r} is not "
                                     "numeric")
                    continue
                if value != actual:
                    yield _v(row, x,
                             f"stated count {value} != actual {actual}")
        return
    if el is Element.MATH_OP:
        op = str(row.value)
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            operands = []
            usable = True
            for prop in row.right:
                vals = [v for v in env.fillers(x, prop)
                        if v.kind == rdf.LITERAL]
                if len(vals) != 1:
                    usable = False
                    break
                try:
                    operands.append(rdf.value_of(vals[0]))
                except rdf.Unparsable:
                    usable = False
                    break
            if not usable:
                continue
            if op in ("product", "multiplication"):
                expected = 1
                for v in operands:
                    expected = expected * v
            elif op in ("sum", "addition"):
                expected = sum(operands)
            elif op == "subtraction":
                expected = operands[0]
                for v in operands[1:]:
                    expected -= v
            elif op == "division":
                expected = operands[0]
                for v in operands[1:]:
                    expected /= v
            else:
                raise ValueError(f"unknown math operator {op!r}")
            for stated in sorted(env.fillers(x, row.left[0]),
                                 key=rdf.Term.sort_key):
                try:
                    if rdf.value_of(stated) != expected:
                        yield _v(row, x,
                                 f"{_lex(stated)} != computed {expected}")
                except rdf.Unparsable:
                    yield _v(row, x, f"value {_lex(stated)!r} not numeric")
        return
    if el is Element.VALID_CLASSES:
        allowed_only = bool(row.value)
        listed = row.classes
        for t in sorted(g.match(None, rdf.TYPE, None),
                        key=rdf.Triple.sort_key):
            inside = any(env.member(t.o, ref, t.s) for ref in listed)
            if allowed_only and not inside:
                yield _v(row, t.s, f"class {_lex(t.o)} is not valid here")
            if not allowed_only and inside:
                yield _v(row, t.s, f"class {_lex(t.o)} is forbidden here")
        return
    if el is Element.VALID_PROPERTIES:
        allowed_only = bool(row.value)
        listed = {p.iri for p in row.left}
        restrict = None
        if row.context.kind != TOP:
            restrict = env.extension(row.context)
        for t in sorted(g, key=rdf.Triple.sort_key):
            if restrict is not None and t.s not in restrict:
                continue
            inside = t.p.iri in listed
            if allowed_only and not inside:
                yield _v(row, t.s, f"property {t.p.iri} is not valid here")
            if not allowed_only and inside:
                yield _v(row, t.s, f"property {t.p.iri} is forbidden here")
        return
    if el is Element.NOT_REDUNDANT:
        sub, sup = row.left[0], row.right[0]
        for x in sorted({s for s, _ in env.pairs(sub)},
                        key=rdf.Term.sort_key):
            sub_vals = {env.rep(v) for v in env.fillers(x, sub)}
            for v in sorted(env.fillers(x, sup), key=rdf.Term.sort_key):
                if env.rep(v) in sub_vals:
                    yield _v(row, x,
                             f"value {_lex(v)} repeats the more specific "
                             "property")
        return
    if el is Element.RECOMMENDED:
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            if not env.fillers(x, row.left[0]):
                yield _v(row, x, "recommended property missing", _ABSENT)
        return
    if el is Element.PROVENANCE:
        for x in sorted(env.extension(row.context), key=rdf.Term.sort_key):
            if not any(env.fillers(x, p) for p in row.left):
                yield _v(row, x, "no provenance information", _ABSENT)
        return
    if el is Element.VOCABULARY_ONLY:
        namespaces = str(row.value or "").split()
        seen = set()
        for t in sorted(g, key=rdf.Triple.sort_key):
            candidates = [t.p.iri]
            if t.p == rdf.TYPE and t.o.kind == rdf.IRI:
                candidates.append(t.o.iri)
            for iri_str in candidates:
                if iri_str in seen:
                    continue
                seen.add(iri_str)
                if not any(iri_str.startswith(ns) for ns in namespaces):
                    yield _v(row, t.s,
                             f"term {iri_str} outside the declared "
                             "vocabularies")
        return
    if el is Element.HTTP_URI_SCHEME:
        seen = set()
        for t in sorted(g, key=rdf.Triple.sort_key):
            for term in (t.s, t.p, t.o):
                if term.kind != rdf.IRI or term in seen:
                    continue
                seen.add(term)
                if not (term.iri.startswith("http://")
                        or term.iri.startswith("https://")):
                    yield _v(row, term, f"{term.iri} does not use the "
                                        "http(s) scheme")
        return
    if el is Element.OPTIONAL:
        # having the property implies membership in the context class
        target = env.extension(row.context)
        for x in sorted({s for s, _ in env.pairs(row.left[0])},
                        key=rdf.Term.sort_key):
            if x not in target:
                yield _v(row, x,
                         "optional property used outside its context class",
                         _ABSENT)
        return
    if el is Element.DEFAULT_VALUE:
        return   # handled by the inference pre-pass, never a violation
    raise ValueError(f"unhandled structural element {el.value}")


_DISPATCH = {
    Element.SUBCLASS_OF: check_subsumption,
    Element.CLASS_EQUIV: check_subsumption,
    Element.CLASS_DISJOINT: check_subsumption,
    Element.EXISTS: check_quantifier,
    Element.FORALL: check_quantifier,
    Element.MIN_CARD: check_quantifier,
    Element.MAX_CARD: check_quantifier,
    Element.VALUE_RESTRICTION: check_value_restriction,
    Element.NEGATION: check_boolean,
    Element.INTERSECTION: check_boolean,
    Element.UNION: check_boolean,
    Element.XOR: check_boolean,
    Element.SUBPROPERTY_OF: check_property_axiom,
    Element.PROPERTY_EQUIV: check_property_axiom,
    Element.PROPERTY_DISJOINT: check_property_axiom,
    Element.INVERSE: check_property_axiom,
    Element.ASYMMETRIC: check_property_axiom,
    Element.TRANSITIVE: check_property_axiom,
    Element.REFLEXIVE: check_property_axiom,
    Element.IRREFLEXIVE: check_property_axiom,
    Element.DOMAIN: check_property_axiom,
    Element.RANGE: check_property_axiom,
    Element.FUNCTIONAL: check_property_axiom,
    Element.INVERSE_FUNCTIONAL: check_property_axiom,
    Element.KEYFOR: check_property_axiom,
    Element.CONDITIONAL: check_property_axiom,
    Element.INDIVIDUAL_EQ: check_individuals,
    Element.INDIVIDUAL_NEQ: check_individuals,
    Element.ASSERTION_EQ: check_assertion,
    Element.ASSERTION_NEQ: check_assertion,
    Element.ALLOWED_VALUES: check_values,
    Element.NOT_ALLOWED_VALUES: check_values,
    Element.VOCAB_MEMBERSHIP: check_values,
    Element.PATTERN: check_literal,
    Element.NEG_PATTERN: check_literal,
    Element.FACET_RANGE: check_literal,
    Element.NEG_FACET_RANGE: check_literal,
    Element.COMPARE: check_literal,
    Element.LANG_TAG: check_literal,
    Element.LANG_TAG_CARD: check_literal,
    Element.WHITESPACE: check_literal,
    Element.HTML_FREE: check_literal,
    Element.STRING_LENGTH: check_literal,
    Element.VALUE_VALID_FOR_DATATYPE: check_literal,
    Element.ORDERED: check_structure,
    Element.LIST_OP: check_structure,
    Element.COUNT_AGG: check_structure,
    Element.MATH_OP: check_structure,
    Element.VALID_CLASSES: check_structure,
    Element.VALID_PROPERTIES: check_structure,
    Element.NOT_REDUNDANT: check_structure,
    Element.RECOMMENDED: check_structure,
    Element.PROVENANCE: check_structure,
    Element.VOCABULARY_ONLY: check_structure,
    Element.HTTP_URI_SCHEME: check_structure,
    Element.OPTIONAL: check_structure,
    Element.DEFAULT_VALUE: check_structure,
}


def build_env(graph: rdf.Graph, cset: ConstraintSet,
              config: ValidationConfig, partition=None) -> EvaluationEnv:
    if not config.una and partition is None:
        from .inference import SameAsPartition
        partition = SameAsPartition.from_graph(graph)
    return EvaluationEnv(graph, cset, config, partition)


def validate(graph: rdf.Graph, cset: ConstraintSet,
             config: ValidationConfig = None, partition=None) -> Report:
    """Check every ASSERT row; DEFINE rows only feed extensions."""
    if config is None:
        config = ValidationConfig()
    env = build_env(graph, cset, config, partition)
    violations = []
    for row in cset.asserts():
        for core in normalize_sugar(row):
            check = _DISPATCH[core.element]
            for violation, kind in check(core, env):
                if kind == _ABSENT and not config.cwa:
                    if violation.severity > Severity.WARNING:
                        violation = replace(violation,
                                            severity=Severity.WARNING)
                violations.append(violation)
    violations.sort(key=Violation.sort_key)
    return Report(violations, config, config.severity_floor)
