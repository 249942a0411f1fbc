"""Forward-chaining materialization run before validation.

Schema rows whose types admit a pre-pass become rules: subclass/subproperty
propagation, property chains, inverse/symmetric/transitive closure, domain
and range typing, property equivalence, and - when the unique-name assumption
is off - sameAs merging driven by functional, inverse-functional and key
rows. Merged nodes keep their triples; everything is also copied onto a
canonical representative so later counting can work per partition class.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rdf
from .model import ClassRef, Constraint, ConstraintSet, Element, NAMED, TOP


class FixpointLimit(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"FIXPOINT_LIMIT: no fixpoint within {cap} rounds")


class SameAsPartition:
    """Union-find over nodes; representative = lexicographically least IRI."""

    def __init__(self):
        self._parent: dict = {}

    @classmethod
    def from_graph(cls, g: rdf.Graph) -> "SameAsPartition":
        part = cls()
        for t in g.match(None, rdf.SAMEAS, None):
            if t.o.is_node():
                part.merge(t.s, t.o)
        return part

    def find(self, t: rdf.Term) -> rdf.Term:
        if t not in self._parent:
            return t
        root = t
        while self._parent.get(root, root) != root:
            root = self._parent[root]
        # path compression
        while self._parent.get(t, t) != root:
            self._parent[t], t = root, self._parent[t]
        return root

    def merge(self, a: rdf.Term, b: rdf.Term) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # prefer an IRI representative, then least sort key
        winner, loser = sorted((ra, rb), key=rdf.Term.sort_key)
        self._parent.setdefault(winner, winner)
        self._parent[loser] = winner
        return True

    def same(self, a: rdf.Term, b: rdf.Term) -> bool:
        return a == b or self.find(a) == self.find(b)

    def classmates(self, t: rdf.Term):
        root = self.find(t)
        mates = [m for m in self._parent if self.find(m) == root]
        if t not in self._parent:
            return (t,) if not mates else tuple(sorted(
                set(mates) | {t}, key=rdf.Term.sort_key))
        return tuple(sorted(set(mates) | {root}, key=rdf.Term.sort_key))

    def is_discrete(self) -> bool:
        return all(self.find(t) == t for t in self._parent)

    def classes(self):
        groups: dict = {}
        for t in self._parent:
            groups.setdefault(self.find(t), set()).add(t)
        for root, members in groups.items():
            members.add(root)
        return groups


@dataclass(frozen=True)
class InferenceConfig:
    una: bool = True
    fixpoint_cap: int = 10_000


def _rule_rows(cset: ConstraintSet):
    """Schema rows that drive triple rules, grouped by element."""
    grouped: dict = {}
    for row in cset:
        grouped.setdefault(row.element, []).append(row)
    return grouped


def _named(ref: ClassRef):
    return rdf.iri(ref.iri) if ref.kind == NAMED else None


def _apply_triple_rules(triples: set, delta: set, grouped: dict) -> set:
    """One semi-naive round: conclusions that need at least one delta premise.

    Single-premise rules read only the delta; two-premise joins pair the
    delta against the full set on both sides.
    """
    new = set()

    def add(s, p, o):
        t = rdf.Triple(s, p, o)
        if t not in triples:
            new.add(t)

    by_sp: dict = {}
    by_p: dict = {}
    for t in triples:
        by_sp.setdefault((t.s, t.p), []).append(t.o)
        by_p.setdefault(t.p, []).append(t)

    for row in grouped.get(Element.SUBCLASS_OF, ()):
        sub, sup = _named(row.context), _named(row.classes[0])
        if sub is None or sup is None:
            continue
        for t in delta:
            if t.p == rdf.TYPE and t.o == sub:
                add(t.s, rdf.TYPE, sup)
    for row in grouped.get(Element.CLASS_EQUIV, ()):
        a, b = _named(row.context), _named(row.classes[0])
        if a is None or b is None:
            continue
        for t in delta:
            if t.p == rdf.TYPE and t.o == a:
                add(t.s, rdf.TYPE, b)
            elif t.p == rdf.TYPE and t.o == b:
                add(t.s, rdf.TYPE, a)

    for row in grouped.get(Element.SUBPROPERTY_OF, ()):
        target = rdf.iri(row.right[0].iri)
        left = row.left[0]
        if left.chain:
            yield_pairs = _chain_pairs_delta(left.chain, triples, delta, by_sp)
            for s, o in yield_pairs:
                add(s, target, o)
        else:
            p = rdf.iri(left.iri)
            for t in delta:
                if t.p == p:
                    if left.inverse:
                        if t.o.is_node():
                            add(t.o, target, t.s)
                    else:
                        add(t.s, target, t.o)

    for row in grouped.get(Element.PROPERTY_EQUIV, ()):
        p = rdf.iri(row.left[0].iri)
        q = rdf.iri(row.right[0].iri)
        for t in delta:
            if t.p == p:
                add(t.s, q, t.o)
            elif t.p == q:
                add(t.s, p, t.o)

    for row in grouped.get(Element.INVERSE, ()):
        p = rdf.iri(row.left[0].iri)
        q = rdf.iri(row.right[0].iri)
        for t in delta:
            if t.p == p and t.o.is_node():
                add(t.o, q, t.s)
            elif t.p == q and t.o.is_node():
                add(t.o, p, t.s)

    for row in grouped.get(Element.SYMMETRIC, ()):
        p = rdf.iri(row.left[0].iri)
        for t in delta:
            if t.p == p and t.o.is_node():
                add(t.o, p, t.s)

    for row in grouped.get(Element.TRANSITIVE, ()):
        p = rdf.iri(row.left[0].iri)
        for t in delta:
            if t.p != p:
                continue
            # delta ⋈ all and all ⋈ delta
            for o2 in by_sp.get((t.o, p), ()):
                add(t.s, p, o2)
            for u in by_p.get(p, ()):
                if u.o == t.s:
                    add(u.s, p, t.o)

    for row in grouped.get(Element.DOMAIN, ()):
        cls = _named(row.classes[0])
        if cls is None:
            continue
        p = rdf.iri(row.left[0].iri)
        for t in delta:
            if t.p == p:
                add(t.s, rdf.TYPE, cls)
    for row in grouped.get(Element.RANGE, ()):
        cls = _named(row.classes[0])
        if cls is None or row.context.kind != TOP:
            continue
        p = rdf.iri(row.left[0].iri)
        for t in delta:
            if t.p == p and t.o.is_node():
                add(t.o, rdf.TYPE, cls)
    return new


def _chain_pairs_delta(chain, triples, delta, by_sp):
    """(start, end) pairs over a chain where ≥1 step comes from the delta."""
    # small chains only; recompute pairs over the whole graph but keep just
    # those that touch a delta triple by re-walking from delta subjects too.
    # Correctness over speed: walk every start node each round.
    del delta, by_sp
    index: dict = {}
    for t in triples:
        index.setdefault(t.p, {}).setdefault(t.s, set()).add(t.o)
    inv_index: dict = {}
    for t in triples:
        if t.o.is_node():
            inv_index.setdefault(t.p, {}).setdefault(t.o, set()).add(t.s)

    def step_map(step):
        if step.inverse:
            return inv_index.get(rdf.iri(step.iri), {})
        return index.get(rdf.iri(step.iri), {})

    first = step_map(chain[0])
    results = []
    for start, mids in first.items():
        frontier = set(mids)
        for step in chain[1:]:
            mapping = step_map(step)
            nxt = set()
            for node in frontier:
                nxt.update(mapping.get(node, ()))
            frontier = nxt
        for end in frontier:
            results.append((start, end))
    return results


def _merge_rules(triples: set, part: SameAsPartition, cset: ConstraintSet,
                 instances_of) -> bool:
    """Apply sameAs-producing rules; True when the partition coarsened."""
    changed = False
    by_sp: dict = {}
    by_po: dict = {}
    for t in triples:
        by_sp.setdefault((t.s, t.p), set()).add(t.o)
        by_po.setdefault((t.p, t.o), set()).add(t.s)

    for t in triples:
        if t.p == rdf.SAMEAS and t.o.is_node():
            changed |= part.merge(t.s, t.o)

    for row in cset.by_element(Element.INDIVIDUAL_EQ):
        (a,) = tuple(row.context.members)
        (b,) = tuple(row.classes[0].members)
        if a.is_node() and b.is_node():
            changed |= part.merge(a, b)

    for row in cset.by_element(Element.FUNCTIONAL):
        p = rdf.iri(row.left[0].iri)
        for (s, pred), objects in by_sp.items():
            if pred != p:
                continue
            nodes = sorted((o for o in objects if o.is_node()),
                           key=rdf.Term.sort_key)
            for other in nodes[1:]:
                changed |= part.merge(nodes[0], other)

    for row in cset.by_element(Element.INVERSE_FUNCTIONAL):
        p = rdf.iri(row.left[0].iri)
        for (pred, o), subjects in by_po.items():
            if pred != p:
                continue
            nodes = sorted(subjects, key=rdf.Term.sort_key)
            for other in nodes[1:]:
                changed |= part.merge(nodes[0], other)

    for row in cset.by_element(Element.KEYFOR):
        p = rdf.iri(row.left[0].iri)
        scope = instances_of(row.context)
        by_key: dict = {}
        for (s, pred), objects in by_sp.items():
            if pred != p or (scope is not None and s not in scope):
                continue
            for o in objects:
                by_key.setdefault(part.find(o) if o.is_node() else o,
                                  set()).add(s)
        for owners in by_key.values():
            nodes = sorted(owners, key=rdf.Term.sort_key)
            for other in nodes[1:]:
                changed |= part.merge(nodes[0], other)
    return changed


def _copy_onto_representatives(triples: set, part: SameAsPartition) -> set:
    new = set()
    for t in triples:
        s = part.find(t.s)
        o = part.find(t.o) if t.o.is_node() else t.o
        if s != t.s or o != t.o:
            u = rdf.Triple(s, t.p, o)
            if u not in triples:
                new.add(u)
    return new


def materialize(g: rdf.Graph, cset: ConstraintSet,
                config: InferenceConfig = None,
                strategy: str = "seminaive"):
    """Least fixpoint of the schema rules over g.

    Returns (graph, partition). With una=True the partition stays discrete
    and merge-producing rows are left for the validator to flag.
    """
    if config is None:
        config = InferenceConfig()
    grouped = _rule_rows(cset)
    triples = set(g.triples)
    part = SameAsPartition()
    rounds = 0

    def instances_of(ref: ClassRef):
        if ref.kind == TOP:
            return None
        if ref.kind != NAMED:
            return None
        cls = rdf.iri(ref.iri)
        out = set()
        for t in triples:
            if t.p == rdf.TYPE and t.o == cls:
                out.add(t.s)
                out.update(m for m in part.classmates(t.s))
        return out

    while True:
        # triple rules to fixpoint
        delta = set(triples) if strategy == "seminaive" else None
        while True:
            rounds += 1
            if rounds > config.fixpoint_cap:
                raise FixpointLimit(config.fixpoint_cap)
            if strategy == "seminaive":
                new = _apply_triple_rules(triples, delta, grouped)
            else:
                new = _apply_triple_rules(triples, set(triples), grouped)
            if not new:
                break
            triples |= new
            delta = new
        if config.una:
            break
        changed = _merge_rules(triples, part, cset, instances_of)
        copied = _copy_onto_representatives(triples, part)
        if copied:
            triples |= copied
            continue
        if not changed:
            break
    return rdf.Graph(triples, dict(g.prefixes)), part


def apply_default_values(g: rdf.Graph, constraints) -> rdf.Graph:
    """Add a row's default triple wherever the property is absent."""
    extra = []
    for row in constraints:
        if row.element is not Element.DEFAULT_VALUE:
            continue
        cls = _named(row.context)
        if cls is None:
            continue
        prop = rdf.iri(row.left[0].iri)
        obj = _default_object(row.value)
        for t in sorted(g.match(None, rdf.TYPE, cls),
                        key=rdf.Triple.sort_key):
            if not g.match(t.s, prop, None):
                extra.append(rdf.Triple(t.s, prop, obj))
    return g.with_triples(extra)


def _default_object(value) -> rdf.Term:
    if isinstance(value, dict):
        if "iri" in value:
            return rdf.iri(str(value["iri"]))
        return rdf.literal(str(value.get("value", "")),
                           datatype=str(value.get("datatype",
                                                  rdf.XSD_STRING)))
    return rdf.literal(str(value))


def entails_same(g: rdf.Graph, a: rdf.Term, b: rdf.Term,
                 cset: ConstraintSet, config: InferenceConfig = None) -> bool:
    if config is None:
        config = InferenceConfig(una=False)
    _, part = materialize(g, cset, config)
    return part.same(a, b)
