"""Permutations on {1..n}, cycle notation and group closure."""

from __future__ import annotations

import logging
import math
import re
from collections import deque
from itertools import permutations as _permutations
from itertools import product
from typing import Any, Dict, Iterable, Iterator, Sequence

from .const import CONF_GROUP_CAP, ensure_config
from .errors import (
    DegreeMismatch,
    DuplicatePoint,
    GroupTooLarge,
    InvariantViolation,
    LengthMismatch,
    ParseError,
    PointOutOfRange,
)

_LOGGER = logging.getLogger(__name__)

_CYCLE_TEXT = re.compile(r"\s*(?:\(\s*[\d\s,]*\)\s*)*")
_CYCLE = re.compile(r"\(([^()]*)\)")


class Permutation:
    """A bijection of {1..n}; images[i-1] is the image of point i."""

    __slots__ = ("_images", "_hash")

    def __init__(self, images: Sequence[int]):
        images = tuple(int(v) for v in images)
        n = len(images)
        if n < 1:
            raise PointOutOfRange("a permutation needs degree >= 1")
        if sorted(images) != list(range(1, n + 1)):
            raise InvariantViolation(f"{images} is not a bijection of 1..{n}")
        self._images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(range(1, n + 1))

    @property
    def n(self) -> int:
        return len(self._images)

    @property
    def images(self) -> tuple[int, ...]:
        return self._images

    def __call__(self, point: int) -> int:
        if not 1 <= point <= self.n:
            raise PointOutOfRange(f"point {point} outside 1..{self.n}")
        return self._images[point - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._images == other._images

    def __lt__(self, other: Permutation) -> bool:
        return self._images < other._images

    def __hash__(self) -> int:
        return self._hash

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self._images, start=1))

    def order(self) -> int:
        return math.lcm(*(len(c) for c in cycle_decomposition(self)))

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)}, n={self.n})"


def identity(n: int) -> Permutation:
    return Permutation.identity(n)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return p∘q, i.e. (p∘q)(i) = p(q(i))."""
    if p.n != q.n:
        raise DegreeMismatch(f"cannot compose degrees {p.n} and {q.n}")
    pi = p.images
    return Permutation(pi[v - 1] for v in q.images)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.n
    for i, v in enumerate(p.images, start=1):
        inv[v - 1] = i
    return Permutation(inv)


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse cycle notation such as "(1 2)(3 4 5 6)"; unmentioned points are fixed."""
    if degree < 1:
        raise PointOutOfRange(f"degree must be positive, got {degree}")
    if not _CYCLE_TEXT.fullmatch(text):
        raise ParseError(f"malformed cycle notation: {text!r}")

    images = list(range(1, degree + 1))
    seen: set[int] = set()
    for body in _CYCLE.findall(text):
        points = [int(tok) for tok in re.split(r"[\s,]+", body.strip()) if tok]
        for point in points:
            if not 1 <= point <= degree:
                raise PointOutOfRange(f"point {point} outside 1..{degree}")
            if point in seen:
                raise DuplicatePoint(f"point {point} appears twice in {text!r}")
            seen.add(point)
        for idx, point in enumerate(points):
            images[point - 1] = points[(idx + 1) % len(points)]
    return Permutation(images)


def cycle_decomposition(p: Permutation) -> list[list[int]]:
    """Cycles (fixed points included) sorted by length, then smallest point.

    Each cycle starts at its smallest point.
    """
    seen = [False] * (p.n + 1)
    cycles: list[list[int]] = []
    for start in range(1, p.n + 1):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        nxt = p(start)
        while nxt != start:
            cycle.append(nxt)
            seen[nxt] = True
            nxt = p(nxt)
        cycles.append(cycle)
    cycles.sort(key=lambda c: (len(c), c[0]))
    return cycles


def format_cycles(p: Permutation) -> str:
    """Canonical cycle notation: fixed points omitted, "()" for identity."""
    parts = [
        "(" + " ".join(str(v) for v in cycle) + ")"
        for cycle in cycle_decomposition(p)
        if len(cycle) > 1
    ]
    return "".join(parts) or "()"


def apply_to_positions(p: Permutation, items: Sequence[Any]) -> tuple[Any, ...]:
    """Move the item at position i to position p(i)."""
    if len(items) != p.n:
        raise LengthMismatch(f"{len(items)} items for a permutation of degree {p.n}")
    out: list[Any] = [None] * p.n
    for i, v in enumerate(p.images):
        out[v - 1] = items[i]
    return tuple(out)


class PermutationGroup:
    """A finite permutation group held as an explicit element set."""

    def __init__(
        self,
        degree: int,
        elements: Iterable[Permutation],
        validate: bool = True,
    ):
        self.degree = degree
        self._elements = frozenset(elements)
        for g in self._elements:
            if g.n != degree:
                raise DegreeMismatch(f"element {g} has degree {g.n}, not {degree}")
        if validate:
            self._validate()

    def _validate(self) -> None:
        if identity(self.degree) not in self._elements:
            raise InvariantViolation("group lacks the identity")
        for g in self._elements:
            if inverse(g) not in self._elements:
                raise InvariantViolation(f"group lacks the inverse of {g}")
            for h in self._elements:
                if compose(g, h) not in self._elements:
                    raise InvariantViolation(f"group not closed under {g}∘{h}")

    @property
    def elements(self) -> frozenset[Permutation]:
        return self._elements

    def order(self) -> int:
        return len(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __iter__(self) -> Iterator[Permutation]:
        return iter(sorted(self._elements))

    def __contains__(self, item: object) -> bool:
        return item in self._elements

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PermutationGroup):
            return self.degree == other.degree and self._elements == other._elements
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.degree, self._elements))

    def __repr__(self) -> str:
        return f"PermutationGroup(degree={self.degree}, order={len(self)})"


def generate_group(
    generators: Iterable[Permutation],
    degree: int | None = None,
    config: Dict | None = None,
) -> PermutationGroup:
    """Close a generator set under composition (breadth first)."""
    gens = list(generators)
    if degree is None:
        if not gens:
            raise DegreeMismatch("an empty generator set needs an explicit degree")
        degree = gens[0].n
    for g in gens:
        if g.n != degree:
            raise DegreeMismatch(f"generator {g} has degree {g.n}, not {degree}")
    cap = ensure_config(config)[CONF_GROUP_CAP]

    ident = identity(degree)
    found = {ident}
    queue = deque([ident])
    while queue:
        current = queue.popleft()
        for g in gens:
            nxt = compose(g, current)
            if nxt in found:
                continue
            found.add(nxt)
            if len(found) > cap:
                raise GroupTooLarge(
                    f"group generated by {len(gens)} generators exceeds {cap}"
                )
            queue.append(nxt)
    _LOGGER.debug("Generated group of order %d on %d points", len(found), degree)
    # finite closure under products is a group; skip the quadratic recheck
    return PermutationGroup(degree, found, validate=False)


class DegreeClassGroup:
    """Product of symmetric groups on the classes of a per-point label.

    Holds all π with label(π(i)) == label(i); enumerated lazily.
    """

    def __init__(self, labels: Sequence[Any], config: Dict | None = None):
        self.degree = len(labels)
        self.labels = tuple(labels)
        classes: Dict[Any, list[int]] = {}
        for point, label in enumerate(self.labels, start=1):
            classes.setdefault(label, []).append(point)
        self.classes = sorted(classes.values())
        self._order = math.prod(math.factorial(len(c)) for c in self.classes)
        self._cap = ensure_config(config)[CONF_GROUP_CAP]

    def order(self) -> int:
        return self._order

    def __len__(self) -> int:
        return self._order

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, Permutation) or item.n != self.degree:
            return False
        return all(
            self.labels[item(i) - 1] == self.labels[i - 1]
            for i in range(1, self.degree + 1)
        )

    def __iter__(self) -> Iterator[Permutation]:
        if self._order > self._cap:
            raise GroupTooLarge(
                f"degree-class group of order {self._order} exceeds {self._cap}"
            )
        per_class = [list(_permutations(c)) for c in self.classes]
        for choice in product(*per_class):
            images = [0] * self.degree
            for cls, imgs in zip(self.classes, choice):
                for src, dst in zip(cls, imgs):
                    images[src - 1] = dst
            yield Permutation(images)

    def to_group(self) -> PermutationGroup:
        return PermutationGroup(self.degree, iter(self), validate=False)

    def __repr__(self) -> str:
        return f"DegreeClassGroup(classes={self.classes}, order={self._order})"
