"""Finite-support permutations of root labels and brute-force group theory.

Composition convention: ``compose(p, q)`` applies p first, then q, which
matches concatenation of parameter paths (the first path acts first).
Cycle notation ``(a b c)`` means a -> b -> c -> a.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .errors import ParameterError, SeriesTooLargeError

DEFAULT_CAP = 100_000


def label_key(label: str):
    """Sort key putting labels like z_-2 < z_0 < z_10 in numeric order."""
    m = re.fullmatch(r"([A-Za-z]+)_(-?\d+)", label)
    if m:
        return (m.group(1), int(m.group(2)), "")
    return (label, 0, label)


class Permutation:
    """A bijection of labels that moves only finitely many of them."""

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping=None):
        m = {k: v for k, v in dict(mapping or {}).items() if k != v}
        if set(m) != set(m.values()):
            raise ParameterError(f"mapping is not a bijection on its support: {mapping!r}")
        self._map = m
        self._hash = hash(frozenset(m.items()))

    @classmethod
    def identity(cls) -> "Permutation":
        return cls()

    @classmethod
    def cycle(cls, *labels: str) -> "Permutation":
        if len(set(labels)) != len(labels):
            raise ParameterError(f"repeated label in cycle {labels!r}")
        return cls({labels[i]: labels[(i + 1) % len(labels)] for i in range(len(labels))})

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        text = text.strip()
        if text in ("", "()", "id"):
            return cls()
        if not re.fullmatch(r"(\(\s*[^()\s]+(\s+[^()\s]+)*\s*\)\s*)+", text):
            raise ParameterError(f"malformed cycle notation: {text!r}")
        mapping = {}
        for body in re.findall(r"\(([^()]*)\)", text):
            labels = body.split()
            for i, lab in enumerate(labels):
                if lab in mapping:
                    raise ParameterError(f"cycles are not disjoint at {lab!r}: {text!r}")
                mapping[lab] = labels[(i + 1) % len(labels)]
        return cls(mapping)

    @property
    def mapping(self) -> dict:
        return dict(self._map)

    @property
    def support(self) -> frozenset:
        return frozenset(self._map)

    def __call__(self, label: str) -> str:
        return self._map.get(label, label)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self._map == other._map

    def __hash__(self):
        return self._hash

    def is_identity(self) -> bool:
        return not self._map

    def then(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return Permutation({v: k for k, v in self._map.items()})

    def power(self, n: int) -> "Permutation":
        base = self if n >= 0 else self.inverse()
        out = Permutation()
        for _ in range(abs(n)):
            out = compose(out, base)
        return out

    def cycles(self) -> list[tuple[str, ...]]:
        seen, out = set(), []
        for start in sorted(self._map, key=label_key):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self._map[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self._map[nxt]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def order(self) -> int:
        from math import lcm
        return lcm(*self.cycle_type()) if self._map else 1

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def __str__(self):
        if not self._map:
            return "()"
        return "".join("(" + " ".join(c) + ")" for c in self.cycles())

    def __repr__(self):
        return f"Permutation({str(self)!r})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """p first, then q."""
    keys = set(p.support) | set(q.support)
    return Permutation({k: q(p(k)) for k in keys})


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def commutator(p: Permutation, q: Permutation) -> Permutation:
    """[p, q] = p^-1 q^-1 p q, read left to right."""
    return compose(compose(compose(p.inverse(), q.inverse()), p), q)


# --- closures over integer tuples ------------------------------------------------


def _to_tuple(p: Permutation, index: dict) -> tuple:
    return tuple(index[p(lab)] for lab in index)


def _compose_t(a: tuple, b: tuple) -> tuple:
    return tuple(b[i] for i in a)


def _inverse_t(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def _closure(gens: list, n: int, cap: int):
    """BFS closure of tuple permutations; returns (parents, capped).

    ``parents`` maps element -> (previous element, generator index) giving
    shortest words; the identity maps to None.
    """
    ident = tuple(range(n))
    parents = {ident: None}
    queue = deque([ident])
    while queue:
        cur = queue.popleft()
        for gi, g in enumerate(gens):
            nxt = _compose_t(cur, g)
            if nxt not in parents:
                if len(parents) >= cap:
                    return parents, True
                parents[nxt] = (cur, gi)
                queue.append(nxt)
    return parents, False


@dataclass
class GroupClosure:
    generators: list
    points: tuple
    capped: bool
    _elements: dict = field(repr=False)

    @property
    def order(self):
        return None if self.capped else len(self._elements)

    @property
    def size(self) -> int:
        return len(self._elements)

    @property
    def elements(self) -> set:
        return {self._from_tuple(t) for t in self._elements}

    def _from_tuple(self, t: tuple) -> Permutation:
        return Permutation({self.points[i]: self.points[j] for i, j in enumerate(t)})

    def _tuple(self, p: Permutation):
        index = {lab: i for i, lab in enumerate(self.points)}
        if not p.support <= set(index):
            return None
        return _to_tuple(p, index)

    def __contains__(self, p: Permutation) -> bool:
        t = self._tuple(p)
        return t is not None and t in self._elements

    def word(self, p: Permutation):
        """Shortest word (list of generator indices, applied left to right) for p, or None."""
        t = self._tuple(p)
        if t is None or t not in self._elements:
            return None
        word = []
        while self._elements[t] is not None:
            t, gi = self._elements[t]
            word.append(gi)
        return word[::-1]


def _points_of(gens) -> tuple:
    pts = set()
    for g in gens:
        pts |= g.support
    return tuple(sorted(pts, key=label_key))


def generate_group(gens: list, cap: int = DEFAULT_CAP, points=None) -> GroupClosure:
    """Breadth-first closure of gens under composition, stopping at cap elements."""
    if cap < 1:
        raise ParameterError(f"cap must be >= 1, got {cap}")
    gens = list(gens)
    pts = tuple(points) if points is not None else _points_of(gens)
    index = {lab: i for i, lab in enumerate(pts)}
    tgens = [_to_tuple(g, index) for g in gens]
    elements, capped = _closure(tgens, len(pts), cap)
    return GroupClosure(gens, pts, capped, elements)


@dataclass(frozen=True)
class SolvabilityVerdict:
    solvable: bool
    derived_chain_orders: list
    certificate: str


def _commutator_subgroup(group: GroupClosure, cap: int) -> GroupClosure:
    """Normal closure of the generator commutators, i.e. [G, G]."""
    pts = group.points
    index = {lab: i for i, lab in enumerate(pts)}
    tg = [_to_tuple(g, index) for g in group.generators]
    gens = []
    for a in tg:
        for b in tg:
            c = _compose_t(_compose_t(_compose_t(_inverse_t(a), _inverse_t(b)), a), b)
            if c != tuple(range(len(pts))) and c not in gens:
                gens.append(c)
    while True:
        elements, capped = _closure(gens, len(pts), cap)
        if capped:
            raise SeriesTooLargeError(f"commutator closure exceeded cap {cap}")
        added = False
        for h in list(gens):
            for g in tg:
                conj = _compose_t(_compose_t(_inverse_t(g), h), g)
                if conj not in elements:
                    gens.append(conj)
                    added = True
                    break
            if added:
                break
        if not added:
            perms = [Permutation({pts[i]: pts[j] for i, j in enumerate(t)}) for t in gens]
            return GroupClosure(perms, pts, False, elements)


def derived_series(group: GroupClosure, cap: int = DEFAULT_CAP) -> SolvabilityVerdict:
    """Iterate G -> [G, G] until the order stops dropping.

    A non-solvable chain ends with its repeated perfect term, e.g. [60, 60].
    """
    if group.capped:
        raise ParameterError("derived series needs an uncapped closure")
    chain = [group.order]
    current = group
    while current.order > 1:
        nxt = _commutator_subgroup(current, cap)
        chain.append(nxt.order)
        if nxt.order == current.order:
            break
        current = nxt
    solvable = chain[-1] == 1
    if solvable:
        cert = f"derived series {chain} reaches the trivial group"
    else:
        cert = f"derived series {chain} stabilizes at a perfect subgroup of order {chain[-1]}"
    return SolvabilityVerdict(solvable, chain, cert)


def is_transitive(group: GroupClosure, points: list) -> bool:
    if group.capped:
        raise ParameterError("transitivity needs an uncapped closure")
    if not points:
        raise ParameterError("points must be non-empty")
    orbit = {points[0]}
    frontier = [points[0]]
    while frontier:
        lab = frontier.pop()
        for g in group.generators:
            img = g(lab)
            if img not in orbit:
                orbit.add(img)
                frontier.append(img)
    return orbit == set(points)


@dataclass(frozen=True)
class AlternatingCertificate:
    result: object  # True, False or None (indeterminate)
    points: tuple
    words: dict
    text: str

    def __bool__(self):
        return self.result is True


def _span(points) -> str:
    keys = [label_key(p) for p in points]
    run = all(k[0] == keys[0][0] and k[2] == "" for k in keys) and [k[1] for k in keys] == list(
        range(keys[0][1], keys[0][1] + len(keys)))
    return "{" + (f"{points[0]}..{points[-1]}" if run else ", ".join(points)) + "}"


def contains_alternating(gens: list, points: list, cap: int = DEFAULT_CAP, max_word: int = 12) -> AlternatingCertificate:
    """Does <gens> contain every consecutive 3-cycle on ``points`` (hence Alt(points))?"""
    points = tuple(points)
    if len(points) < 3:
        raise ParameterError("need at least 3 points")
    group = generate_group(gens, cap=cap, points=tuple(sorted(set(_points_of(gens)) | set(points), key=label_key)))
    words = {}
    missing = []
    for i in range(len(points) - 2):
        cyc = Permutation.cycle(*points[i:i + 3])
        w = group.word(cyc)
        if w is None:
            missing.append(str(cyc))
            continue
        words[str(cyc)] = (
            " * ".join(f"g{j + 1}" for j in w) if len(w) <= max_word else "element of the closure (word longer than 12)"
        )
    span = _span(points)
    if missing and group.capped:
        return AlternatingCertificate(None, points, words, f"indeterminate: closure capped at {cap} before finding {missing}")
    if missing:
        return AlternatingCertificate(False, points, words, f"missing consecutive 3-cycles {missing}")
    return AlternatingCertificate(True, points, words, f"contains alternating group on {span}")
