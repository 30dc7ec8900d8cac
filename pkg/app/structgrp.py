"""
SolAut Structure Module
Structure trees (iterated semidirect products and cyclic extensions with
explicit actions), their finite realizations, presentations, isomorphism
testing and the brute-force Out(E) enumeration.
"""

import logging
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

from .config import get_settings
from .errors import InfiniteTree, TooLarge, VerificationError
from .intmat import smith_decomposition
from .words import GroupAutomorphism, compose, equal_mod_inner, identity_automorphism, invert

logger = logging.getLogger(__name__)

Word = Tuple[Tuple[str, int], ...]


def word(*pairs: Tuple[str, int]) -> Word:
    """Normalize a word: drop zero exponents and merge neighbouring equal letters."""
    out: List[List] = []
    for name, exp in pairs:
        if not exp:
            continue
        if out and out[-1][0] == name:
            out[-1][1] += exp
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([name, exp])
    return tuple((n, e) for n, e in out)


def inverse_word(w: Word) -> Word:
    return tuple((n, -e) for n, e in reversed(w))


def format_word(w: Word) -> str:
    if not w:
        return "1"
    return " ".join(n if e == 1 else f"{n}^{e}" for n, e in w)


# ----- Structure trees -----

@dataclass(frozen=True)
class Cyclic:
    order: int
    label: str

    def generators(self) -> List[str]:
        return [self.label]

    def shape(self) -> str:
        return f"Z_{self.order}"

    def size(self) -> Optional[int]:
        return self.order

    def to_dict(self) -> dict:
        return {"node": "Cyclic", "order": str(self.order), "generator": self.label}


@dataclass(frozen=True)
class IntegersZ:
    label: str

    def generators(self) -> List[str]:
        return [self.label]

    def shape(self) -> str:
        return "Z"

    def size(self) -> Optional[int]:
        return None

    def to_dict(self) -> dict:
        return {"node": "IntegersZ", "generator": self.label}


@dataclass(frozen=True)
class Lattice:
    labels: Tuple[str, str] = ("alpha", "beta")

    def generators(self) -> List[str]:
        return list(self.labels)

    def shape(self) -> str:
        return "Z^2"

    def size(self) -> Optional[int]:
        return None

    def to_dict(self) -> dict:
        return {"node": "Lattice", "generators": list(self.labels)}


@dataclass(frozen=True)
class FiniteQuotient:
    """Z^2 modulo the span of the relation columns, generated by the images of e1, e2."""
    relations: Tuple[Tuple[int, int], ...]
    labels: Tuple[str, str] = ("alpha", "beta")

    def invariants(self) -> List[int]:
        """Invariant factors, 0 standing for an infinite cyclic factor."""
        rows = [[c[0] for c in self.relations], [c[1] for c in self.relations]]
        if not self.relations:
            return [0, 0]
        snf = smith_decomposition(rows)
        diag = [snf.S[i][i] if i < len(snf.S[0]) else 0 for i in range(2)]
        return [abs(x) for x in diag]

    def generators(self) -> List[str]:
        return list(self.labels)

    def shape(self) -> str:
        factors = [f"Z_{n}" if n else "Z" for n in self.invariants() if n != 1]
        return "+".join(factors) if factors else "1"

    def size(self) -> Optional[int]:
        inv = self.invariants()
        if 0 in inv:
            return None
        return inv[0] * inv[1]

    def to_dict(self) -> dict:
        return {
            "node": "FiniteQuotient",
            "generators": list(self.labels),
            "relations": [[str(x) for x in c] for c in self.relations],
            "invariants": [str(n) for n in self.invariants()],
        }


@dataclass(frozen=True)
class SemidirectProduct:
    """normal x| acting, where the acting generator t maps each normal generator x to t x t^-1 = action[x]."""
    normal: "StructureTree"
    acting: Union[Cyclic, IntegersZ]
    action: Tuple[Tuple[str, Word], ...]

    def generators(self) -> List[str]:
        return self.normal.generators() + self.acting.generators()

    def shape(self) -> str:
        return f"({self.normal.shape()}) x| {self.acting.shape()}"

    def size(self) -> Optional[int]:
        a, b = self.normal.size(), self.acting.size()
        return None if a is None or b is None else a * b

    def to_dict(self) -> dict:
        return {
            "node": "SemidirectProduct",
            "normal": self.normal.to_dict(),
            "acting": self.acting.to_dict(),
            "action": {x: format_word(w) for x, w in self.action},
        }


@dataclass(frozen=True)
class CyclicExtension:
    """Group generated by normal and t with t x t^-1 = action[x] and t^order = lift_power."""
    normal: "StructureTree"
    label: str
    order: int
    action: Tuple[Tuple[str, Word], ...]
    lift_power: Word

    def generators(self) -> List[str]:
        return self.normal.generators() + [self.label]

    def shape(self) -> str:
        return f"({self.normal.shape()}) . Z_{self.order}"

    def size(self) -> Optional[int]:
        a = self.normal.size()
        return None if a is None else a * self.order

    def to_dict(self) -> dict:
        return {
            "node": "CyclicExtension",
            "normal": self.normal.to_dict(),
            "generator": self.label,
            "order": str(self.order),
            "action": {x: format_word(w) for x, w in self.action},
            "lift_power": format_word(self.lift_power),
        }


StructureTree = Union[Cyclic, IntegersZ, Lattice, FiniteQuotient, SemidirectProduct, CyclicExtension]


def tree_order(tree: StructureTree) -> Optional[int]:
    return tree.size()


# ----- Presentations -----

@dataclass(frozen=True)
class PresentationRelator:
    text: str
    word: Word


@dataclass
class Presentation:
    generators: List[str]
    relators: List[PresentationRelator]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "generators": self.generators,
            "relators": [r.text for r in self.relators],
            "notes": self.notes,
        }

    def __str__(self) -> str:
        return f"< {', '.join(self.generators)} | {', '.join(r.text for r in self.relators)} >"


def _conjugation_relators(label: str, action: Tuple[Tuple[str, Word], ...]) -> List[PresentationRelator]:
    out = []
    for x, image in action:
        w = word((label, 1), (x, 1), (label, -1)) + inverse_word(image)
        out.append(PresentationRelator(f"{label} {x} {label}^-1 = {format_word(image)}", word(*w)))
    return out


def presentation(tree: StructureTree) -> Presentation:
    """Polycyclic presentation read off the tree."""
    if isinstance(tree, Cyclic):
        return Presentation([tree.label], [PresentationRelator(f"{tree.label}^{tree.order} = 1", word((tree.label, tree.order)))])
    if isinstance(tree, IntegersZ):
        return Presentation([tree.label], [])
    if isinstance(tree, (Lattice, FiniteQuotient)):
        a, b = tree.labels
        rels = [PresentationRelator(f"{a} {b} = {b} {a}", word((a, 1), (b, 1), (a, -1), (b, -1)))]
        if isinstance(tree, FiniteQuotient):
            for c in tree.relations:
                w = word((a, c[0]), (b, c[1]))
                if w:
                    rels.append(PresentationRelator(f"{format_word(w)} = 1", w))
        return Presentation([a, b], rels)
    if isinstance(tree, SemidirectProduct):
        inner_p = presentation(tree.normal)
        acting_p = presentation(tree.acting)
        rels = inner_p.relators + acting_p.relators + _conjugation_relators(tree.acting.label, tree.action)
        return Presentation(inner_p.generators + acting_p.generators, rels, list(inner_p.notes))
    if isinstance(tree, CyclicExtension):
        inner_p = presentation(tree.normal)
        t = tree.label
        lift = word((t, tree.order)) + inverse_word(tree.lift_power)
        rels = inner_p.relators + [PresentationRelator(f"{t}^{tree.order} = {format_word(tree.lift_power)}", word(*lift))]
        rels += _conjugation_relators(t, tree.action)
        return Presentation(inner_p.generators + [t], rels, list(inner_p.notes))
    raise TypeError(f"unknown tree node {tree!r}")


def evaluate_word(w: Word, assignment: Dict[str, object], mul: Callable, inv: Callable, identity: object) -> object:
    result = identity
    for name, exp in w:
        base = assignment[name] if exp > 0 else inv(assignment[name])
        n = abs(exp)
        acc = identity
        while n:
            if n & 1:
                acc = mul(acc, base)
            base = mul(base, base)
            n >>= 1
        result = mul(result, acc)
    return result


@dataclass
class PresentationReport:
    results: List[Tuple[str, bool]]
    generates: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.results) and self.generates is not False

    @property
    def failures(self) -> List[str]:
        return [text for text, ok in self.results if not ok]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "failures": self.failures, "generates": self.generates, "checked": len(self.results)}


def check_relators(
    pres: Presentation,
    assignment: Dict[str, object],
    mul: Callable,
    inv: Callable,
    identity: object,
    is_trivial: Callable[[object], bool],
) -> PresentationReport:
    results = []
    for rel in pres.relators:
        value = evaluate_word(rel.word, assignment, mul, inv, identity)
        results.append((rel.text, bool(is_trivial(value))))
    return PresentationReport(results)


# ----- Finite realizations -----

class FiniteGroupRealization:
    """A finite group given by its element list and a multiplication procedure."""

    def __init__(self, elements: Sequence[Hashable], mul: Callable, identity: Hashable,
                 generators: Dict[str, Hashable], name: str = ""):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self._mul = mul
        self.identity = identity
        self.generators = dict(generators)
        self.name = name
        self._inverses: Dict[Hashable, Hashable] = {}
        self._orders: Dict[Hashable, int] = {}
        self._table: Optional[List[List[int]]] = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, x: Hashable, y: Hashable) -> Hashable:
        return self._mul(x, y)

    def element_order(self, x: Hashable) -> int:
        if x not in self._orders:
            n, y = 1, x
            while y != self.identity:
                y = self.mul(y, x)
                n += 1
                if n > self.order:
                    raise VerificationError(f"element {x} of {self.name} has no finite order")
            self._orders[x] = n
        return self._orders[x]

    def inv(self, x: Hashable) -> Hashable:
        if x not in self._inverses:
            y = self.identity
            for _ in range(self.element_order(x) - 1):
                y = self.mul(y, x)
            self._inverses[x] = y
        return self._inverses[x]

    def power(self, x: Hashable, n: int) -> Hashable:
        return evaluate_word((("x", n),), {"x": x}, self.mul, self.inv, self.identity)

    def table(self) -> List[List[int]]:
        if self._table is None:
            idx = self.index
            self._table = [[idx[self.mul(x, y)] for y in self.elements] for x in self.elements]
        return self._table

    def closure(self, gens: Sequence[Hashable]) -> set:
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def words(self) -> Dict[Hashable, Word]:
        """Shortest positive words in the named generators for every element."""
        out: Dict[Hashable, Word] = {self.identity: ()}
        queue = deque([self.identity])
        names = sorted(self.generators)
        while queue:
            x = queue.popleft()
            for n in names:
                y = self.mul(x, self.generators[n])
                if y not in out:
                    out[y] = word(*(out[x] + ((n, 1),)))
                    queue.append(y)
        return out

    def evaluate(self, w: Word, assignment: Optional[Dict[str, Hashable]] = None) -> Hashable:
        return evaluate_word(w, assignment or self.generators, self.mul, self.inv, self.identity)


def _homomorphism_map(source: FiniteGroupRealization, images: Dict[str, Hashable],
                      target: FiniteGroupRealization) -> Optional[Dict[Hashable, Hashable]]:
    """Extend generator images along the Cayley graph; None on any inconsistency."""
    mapping = {source.identity: target.identity}
    queue = deque([source.identity])
    gens = [(source.generators[n], images[n]) for n in sorted(source.generators)]
    while queue:
        x = queue.popleft()
        fx = mapping[x]
        for g, h in gens:
            y = source.mul(x, g)
            fy = target.mul(fx, h)
            if y in mapping:
                if mapping[y] != fy:
                    return None
            else:
                mapping[y] = fy
                queue.append(y)
    return mapping


def _action_map(normal: FiniteGroupRealization, action: Tuple[Tuple[str, Word], ...]) -> Dict[Hashable, Hashable]:
    images = {x: normal.evaluate(w) for x, w in action}
    missing = set(normal.generators) - set(images)
    for x in missing:
        images[x] = normal.generators[x]
    mapping = _homomorphism_map(normal, images, normal)
    if mapping is None or len(mapping) != normal.order or len(set(mapping.values())) != normal.order:
        raise VerificationError(f"action {dict(action)} is not an automorphism of {normal.name}")
    return mapping


def _map_power(mapping: Dict[Hashable, Hashable], n: int) -> Dict[Hashable, Hashable]:
    result = {x: x for x in mapping}
    for _ in range(n):
        result = {x: mapping[y] for x, y in result.items()}
    return result


def realize(tree: StructureTree) -> FiniteGroupRealization:
    """Materialize a finite tree; elements are nested tuples."""
    if isinstance(tree, Cyclic):
        n = tree.order
        return FiniteGroupRealization(
            [(i,) for i in range(n)], lambda x, y: ((x[0] + y[0]) % n,), (0,),
            {tree.label: (1 % n,)}, tree.shape(),
        )
    if isinstance(tree, (IntegersZ, Lattice)):
        raise InfiniteTree(f"{tree.shape()} has no finite realization")
    if isinstance(tree, FiniteQuotient):
        return _realize_quotient(tree)
    if isinstance(tree, SemidirectProduct):
        if not isinstance(tree.acting, Cyclic):
            raise InfiniteTree(f"{tree.shape()} has an infinite acting factor")
        return _realize_extension(tree.normal, tree.acting.label, tree.acting.order, tree.action, (), tree.shape())
    if isinstance(tree, CyclicExtension):
        return _realize_extension(tree.normal, tree.label, tree.order, tree.action, tree.lift_power, tree.shape())
    raise TypeError(f"unknown tree node {tree!r}")


def _realize_quotient(tree: FiniteQuotient) -> FiniteGroupRealization:
    inv = tree.invariants()
    if 0 in inv:
        raise InfiniteTree(f"{tree.shape()} is infinite")
    rows = [[c[0] for c in tree.relations], [c[1] for c in tree.relations]]
    U = smith_decomposition(rows).U
    m0, m1 = inv

    def reduce(y0: int, y1: int) -> tuple:
        return (y0 % m0, y1 % m1)

    elements = [(i, j) for i in range(m0) for j in range(m1)]
    gens = {tree.labels[k]: reduce(U[0][k], U[1][k]) for k in range(2)}
    return FiniteGroupRealization(
        elements, lambda x, y: reduce(x[0] + y[0], x[1] + y[1]), (0, 0), gens, tree.shape(),
    )


def _realize_extension(normal_tree: StructureTree, label: str, m: int,
                       action: Tuple[Tuple[str, Word], ...], lift: Word, name: str) -> FiniteGroupRealization:
    N = realize(normal_tree)
    tau = _action_map(N, action)
    powers = [_map_power(tau, i) for i in range(m)]
    z = N.evaluate(lift) if lift else N.identity

    if tau[z] != z:
        raise VerificationError(f"{name}: the action does not fix t^{m}")
    tau_m = _map_power(tau, m)
    z_inv = N.inv(z)
    if any(tau_m[x] != N.mul(N.mul(z, x), z_inv) for x in N.elements):
        raise VerificationError(f"{name}: action^{m} is not conjugation by t^{m}")

    def mul(x, y):
        n1, i1 = x
        n2, i2 = y
        n = N.mul(n1, powers[i1][n2])
        if i1 + i2 >= m:
            n = N.mul(n, z)
        return (n, (i1 + i2) % m)

    elements = [(n, i) for i in range(m) for n in N.elements]
    gens = {g: (e, 0) for g, e in N.generators.items()}
    gens[label] = (N.identity, 1 % m) if m > 1 else (z, 0)
    return FiniteGroupRealization(elements, mul, (N.identity, 0), gens, name)


@dataclass
class AxiomReport:
    identity: bool
    inverses: bool
    closure: bool
    associativity: bool
    exhaustive: bool
    checked_triples: int

    @property
    def ok(self) -> bool:
        return self.identity and self.inverses and self.closure and self.associativity


def check_group_axioms(g: FiniteGroupRealization, seed: int = 0) -> AxiomReport:
    """Exhaustive associativity up to the configured order, sampled triples above it."""
    settings = get_settings()
    table = g.table()
    n = g.order
    e = g.index[g.identity]
    identity_ok = all(table[e][i] == i and table[i][e] == i for i in range(n))
    inverses_ok = all(e in row for row in table)
    closure_ok = all(len(set(row)) == n for row in table)

    exhaustive = n <= settings.axiom_exhaustive_limit
    if exhaustive:
        triples = ((i, j, k) for i in range(n) for j in range(n) for k in range(n))
        count = n ** 3
    else:
        rng = random.Random(seed)
        count = settings.axiom_samples
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(count))
    assoc_ok = all(table[table[i][j]][k] == table[i][table[j][k]] for i, j, k in triples)
    return AxiomReport(identity_ok, inverses_ok, closure_ok, assoc_ok, exhaustive, count)


def verify_presentation(pres: Presentation, g: FiniteGroupRealization,
                        assignment: Optional[Dict[str, Hashable]] = None) -> PresentationReport:
    """Evaluate every relator under the assignment and check that it generates g."""
    assignment = assignment or g.generators
    report = check_relators(pres, assignment, g.mul, g.inv, g.identity, lambda x: x == g.identity)
    report.generates = len(g.closure([assignment[n] for n in pres.generators])) == g.order
    return report


# ----- Isomorphism -----

def _order_histogram(g: FiniteGroupRealization) -> Counter:
    return Counter(g.element_order(x) for x in g.elements)


def _derived_size(g: FiniteGroupRealization) -> int:
    comms = {g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y))) for x in g.elements for y in g.elements}
    return len(g.closure(list(comms)))


def _center_size(g: FiniteGroupRealization) -> int:
    gens = list(g.generators.values())
    return sum(1 for x in g.elements if all(g.mul(x, h) == g.mul(h, x) for h in gens))


def invariants(g: FiniteGroupRealization) -> dict:
    return {
        "order": g.order,
        "orders": sorted(_order_histogram(g).items()),
        "abelianization": g.order // _derived_size(g),
        "center": _center_size(g),
    }


def _generating_set(g: FiniteGroupRealization) -> List[Hashable]:
    gens: List[Hashable] = []
    span = {g.identity}
    for x in sorted(g.elements, key=lambda y: (-g.element_order(y), g.index[y])):
        if x not in span:
            gens.append(x)
            span = g.closure(gens)
            if len(span) == g.order:
                break
    return gens


def _subgroup_map(g1: FiniteGroupRealization, pairs: List[Tuple[Hashable, Hashable]],
                  g2: FiniteGroupRealization) -> Optional[Dict[Hashable, Hashable]]:
    mapping = {g1.identity: g2.identity}
    queue = deque([g1.identity])
    while queue:
        x = queue.popleft()
        fx = mapping[x]
        for a, b in pairs:
            y = g1.mul(x, a)
            fy = g2.mul(fx, b)
            if y in mapping:
                if mapping[y] != fy:
                    return None
            else:
                mapping[y] = fy
                queue.append(y)
    if len(set(mapping.values())) != len(mapping):
        return None
    return mapping


def find_isomorphism(g1: FiniteGroupRealization, g2: FiniteGroupRealization) -> Optional[Dict[Hashable, Hashable]]:
    limit = get_settings().iso_limit
    if max(g1.order, g2.order) > limit:
        raise TooLarge(f"isomorphism test capped at order {limit}", {"orders": [g1.order, g2.order]})
    if g1.order != g2.order:
        return None
    if invariants(g1) != invariants(g2):
        return None

    gens = _generating_set(g1)
    by_order: Dict[int, List[Hashable]] = {}
    for y in g2.elements:
        by_order.setdefault(g2.element_order(y), []).append(y)

    def search(i: int, pairs: List[Tuple[Hashable, Hashable]]) -> Optional[Dict[Hashable, Hashable]]:
        if i == len(gens):
            mapping = _subgroup_map(g1, pairs, g2)
            return mapping if mapping is not None and len(mapping) == g1.order else None
        current = _subgroup_map(g1, pairs, g2) if pairs else {g1.identity: g2.identity}
        image_span = set(current.values())
        for candidate in by_order.get(g1.element_order(gens[i]), []):
            if candidate in image_span:
                continue
            trial = pairs + [(gens[i], candidate)]
            if _subgroup_map(g1, trial, g2) is None:
                continue
            found = search(i + 1, trial)
            if found is not None:
                return found
        return None

    return search(0, [])


def isomorphic(g1: FiniteGroupRealization, g2: FiniteGroupRealization) -> bool:
    return find_isomorphism(g1, g2) is not None


# ----- Out(E) by closure -----

@dataclass
class OutTable:
    """Coset representatives of Out(E) with their multiplication table."""
    order: int
    representatives: List[GroupAutomorphism]
    words: List[Word]
    table: List[List[int]]
    generator_classes: Dict[str, int]

    def realization(self) -> FiniteGroupRealization:
        n = self.order
        table = self.table
        return FiniteGroupRealization(
            range(n), lambda i, j: table[i][j], 0, dict(self.generator_classes), "Out(E) brute force",
        )

    def to_dict(self) -> dict:
        return {"order": str(self.order), "representatives": [format_word(w) for w in self.words]}


def out_bruteforce(G) -> OutTable:
    """
    Enumerate Out(E) as classes of automorphisms modulo inner ones.

    G supplies out_seeds() (named automorphisms), out_key(phi) (a cheap
    invariant that is constant on classes) and optionally
    out_candidates() (automorphisms solved without the seeds, at least one
    per class; any of them outside the closure raises VerificationError).
    Class equality is decided by equal_mod_inner.
    """
    settings = get_settings()
    seeds: Dict[str, GroupAutomorphism] = G.out_seeds()
    names = list(seeds)
    for n in names:
        if seeds[n].inverse_images is None:
            seeds[n] = GroupAutomorphism(seeds[n].group, seeds[n].images, n, invert(seeds[n]).images)

    ident = identity_automorphism(G.words_group)
    reps: List[GroupAutomorphism] = [ident]
    words: List[Word] = [()]
    buckets: Dict[Hashable, List[int]] = {G.out_key(ident): [0]}
    transitions: List[Dict[str, int]] = []
    cap = settings.iso_limit * 4

    def locate(phi: GroupAutomorphism) -> Optional[int]:
        for j in buckets.get(G.out_key(phi), []):
            if equal_mod_inner(phi, reps[j]) is not None:
                return j
        return None

    i = 0
    while i < len(reps):
        transitions.append({})
        for n in names:
            candidate = compose(reps[i], seeds[n])
            j = locate(candidate)
            if j is None:
                j = len(reps)
                reps.append(candidate)
                words.append(word(*(words[i] + ((n, 1),))))
                buckets.setdefault(G.out_key(candidate), []).append(j)
                if len(reps) > cap:
                    raise TooLarge(f"Out(E) closure exceeded {cap} classes")
            transitions[i][n] = j
        i += 1

    order = len(reps)
    table = []
    for a in range(order):
        row = []
        for b in range(order):
            c = a
            for n, e in words[b]:
                for _ in range(e):
                    c = transitions[c][n]
            row.append(c)
        table.append(row)

    extra = getattr(G, "out_candidates", None)
    if extra is not None:
        for phi in extra():
            if locate(phi) is None:
                raise VerificationError(f"automorphism {phi.name} lies outside the generated Out(E)")

    logger.info(f"brute-force Out(E) for {G.words_group}: {order} classes")
    return OutTable(order, reps, words, table, {n: transitions[0][n] for n in names})
