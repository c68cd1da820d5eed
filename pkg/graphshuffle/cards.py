"""The card table: piles, shuffles, turns, sorts and the visible trace."""

from __future__ import annotations

import hashlib
import logging
import math
import random
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Sequence, TypeVar

from .const import CONF_BRANCH_CAP, CONF_SEED, ensure_config
from .errors import (
    AlreadyFaceUp,
    DuplicateKey,
    ExactTooLarge,
    HiddenKey,
    InvariantViolation,
    PayloadExposure,
    UnequalPileSizes,
)
from .perm import Permutation

_LOGGER = logging.getLogger(__name__)

T = TypeVar("T")

_PROGRESS_EVERY = 100_000  # branches between DEBUG progress lines


# -----------------------------
# Cards
# -----------------------------
class DeckClass(IntEnum):
    """Kinds of cards; the integer value is the public sort rank."""

    BARRED = 0
    NUMBERED = 1
    PAYLOAD = 2


class Face(Enum):
    UP = "up"
    DOWN = "down"


@dataclass
class Card:
    deck_class: DeckClass
    value: int
    face: Face = Face.DOWN

    @property
    def symbol(self) -> str:
        """Printed face: "3" for a numbered card, "~3" for a barred one."""
        if self.deck_class is DeckClass.PAYLOAD:
            raise PayloadExposure("payload cards have no public symbol")
        if self.deck_class is DeckClass.BARRED:
            return f"~{self.value}"
        return str(self.value)

    @property
    def rank(self) -> tuple[int, int]:
        return (int(self.deck_class), self.value)

    @property
    def label(self) -> tuple[DeckClass, int]:
        return (self.deck_class, self.value)

    def is_face_up(self) -> bool:
        return self.face is Face.UP


def numbered(value: int, copies: int = 1) -> list[Card]:
    return [Card(DeckClass.NUMBERED, value) for _ in range(copies)]


def barred(value: int) -> Card:
    return Card(DeckClass.BARRED, value)


def payload(value: int) -> Card:
    return Card(DeckClass.PAYLOAD, value)


# -----------------------------
# Visible trace
# -----------------------------
def _csv(values: Iterable[int]) -> str:
    return ",".join(str(v) for v in values)


@dataclass(frozen=True)
class ShuffleApplied:
    """A pile-scramble; `positions` is set for cards scrambled inside one pile."""

    piles: tuple[int, ...]
    sizes: tuple[int, ...]
    positions: tuple[int, ...] = ()

    def to_line(self) -> str:
        if self.positions:
            return f"shuffle pile={_csv(self.piles)} positions={_csv(self.positions)}"
        return f"shuffle piles={_csv(self.piles)} sizes={_csv(self.sizes)}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event": "shuffle",
            "piles": list(self.piles),
            "sizes": list(self.sizes),
            "positions": list(self.positions),
        }


@dataclass(frozen=True)
class Turned:
    pile: int
    position: int
    symbol: str

    def to_line(self) -> str:
        return f"turn pile={self.pile} position={self.position} symbol={self.symbol}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event": "turn",
            "pile": self.pile,
            "position": self.position,
            "symbol": self.symbol,
        }


@dataclass(frozen=True)
class Sorted:
    piles: tuple[int, ...]
    rearrangement: tuple[int, ...]

    def to_line(self) -> str:
        return f"sort piles={_csv(self.piles)} moves={_csv(self.rearrangement)}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event": "sort",
            "piles": list(self.piles),
            "rearrangement": list(self.rearrangement),
        }


@dataclass(frozen=True)
class Rearranged:
    label: str
    sizes: tuple[int, ...]

    def to_line(self) -> str:
        return f"rearrange {self.label} sizes={_csv(self.sizes)}"

    def to_dict(self) -> Dict[str, Any]:
        return {"event": "rearrange", "label": self.label, "sizes": list(self.sizes)}


TraceEvent = ShuffleApplied | Turned | Sorted | Rearranged


@dataclass
class VisibleTrace:
    """Public transcript of a run. Never holds a drawn permutation."""

    events: list[TraceEvent] = field(default_factory=list)

    def append(self, event: TraceEvent) -> None:
        self.events.append(event)

    def __len__(self) -> int:
        return len(self.events)

    def shuffle_count(self) -> int:
        return sum(1 for e in self.events if isinstance(e, ShuffleApplied))

    def to_lines(self) -> list[str]:
        return [e.to_line() for e in self.events]

    def to_json(self) -> list[Dict[str, Any]]:
        return [e.to_dict() for e in self.events]

    def digest(self) -> str:
        text = "\n".join(self.to_lines())
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VisibleTrace):
            return NotImplemented
        return self.events == other.events


# -----------------------------
# Randomness
# -----------------------------
class ChoiceSource(ABC):
    """Hands out uniform choices and remembers the arity of every choice point."""

    def __init__(self) -> None:
        self.arities: list[int] = []

    def choose_uniform(self, k: int) -> int:
        if k < 1:
            raise InvariantViolation(f"cannot choose among {k} options")
        value = self._choose(k)
        self.arities.append(k)
        return value

    @abstractmethod
    def _choose(self, k: int) -> int:
        """Return an integer in [0, k)."""

    def reset(self) -> None:
        self.arities = []


class SeededChoice(ChoiceSource):
    def __init__(self, seed: int = 0):
        super().__init__()
        self.seed = seed
        self._rng = random.Random(seed)

    def _choose(self, k: int) -> int:
        return self._rng.randrange(k)

    def reset(self) -> None:
        super().reset()
        self._rng = random.Random(self.seed)


class ScriptedChoice(ChoiceSource):
    def __init__(self, script: Sequence[int]):
        super().__init__()
        self.script = list(script)
        self._pos = 0

    def _choose(self, k: int) -> int:
        if self._pos >= len(self.script):
            raise InvariantViolation(f"script exhausted after {self._pos} choices")
        value = self.script[self._pos]
        if not 0 <= value < k:
            raise InvariantViolation(f"scripted choice {value} outside [0, {k})")
        self._pos += 1
        return value

    def reset(self) -> None:
        super().reset()
        self._pos = 0


class ExhaustiveChoice(ChoiceSource):
    """Odometer over the choice tree; a program is replayed once per leaf."""

    def __init__(self) -> None:
        super().__init__()
        self._path: list[int] = []
        self._depth = 0

    def _choose(self, k: int) -> int:
        if self._depth < len(self._path):
            value = self._path[self._depth]
            if value >= k:
                raise InvariantViolation("choice tree changed shape between replays")
        else:
            value = 0
            self._path.append(0)
        self._depth += 1
        return value

    def probability(self) -> Fraction:
        return Fraction(1, math.prod(self.arities))

    def advance(self) -> bool:
        """Move to the next leaf; False once every branch was visited."""
        # choice points past the current depth belong to an abandoned subtree
        path = self._path[: self._depth]
        arities = self.arities[: self._depth]
        for idx in range(len(path) - 1, -1, -1):
            if path[idx] + 1 < arities[idx]:
                self._path = path[:idx] + [path[idx] + 1]
                self.reset()
                return True
        return False

    def reset(self) -> None:
        super().reset()
        self._depth = 0


def unrank_permutation(index: int, k: int) -> Permutation:
    """Permutation of degree k with Lehmer rank `index`; rank 0 is the identity."""
    items = list(range(1, k + 1))
    images = []
    for remaining in range(k, 0, -1):
        digit, index = divmod(index, math.factorial(remaining - 1))
        images.append(items.pop(digit))
    return Permutation(images)


def draw_permutation(choice: ChoiceSource, k: int) -> Permutation:
    return unrank_permutation(choice.choose_uniform(math.factorial(k)), k)


# -----------------------------
# Table
# -----------------------------
class CardTable:
    """Ordered piles of cards plus the trace of everything done to them.

    Piles and positions are 1-based in every public call.
    """

    def __init__(self, piles: Iterable[Iterable[Card]] = ()):
        self.piles: list[list[Card]] = [list(p) for p in piles]
        self.trace = VisibleTrace()

    def pile(self, index: int) -> list[Card]:
        if not 1 <= index <= len(self.piles):
            raise InvariantViolation(f"no pile {index} on a table of {len(self.piles)}")
        return self.piles[index - 1]

    def sizes(self, indices: Iterable[int] | None = None) -> tuple[int, ...]:
        if indices is None:
            return tuple(len(p) for p in self.piles)
        return tuple(len(self.pile(i)) for i in indices)

    def card_multiset(self) -> Counter:
        return Counter(c.label for p in self.piles for c in p)

    def payload_order(self) -> tuple[int, ...]:
        """Payload values in table order, reading piles left to right."""
        return tuple(
            c.value for p in self.piles for c in p if c.deck_class is DeckClass.PAYLOAD
        )

    def __repr__(self) -> str:
        return f"CardTable(sizes={self.sizes()}, events={len(self.trace)})"


def helper_layout(table: CardTable) -> tuple[tuple[tuple[DeckClass, int], ...], ...]:
    """Sorted (deck class, value) contents of every pile holding no payload card."""
    return tuple(
        tuple(sorted(c.label for c in p))
        for p in table.piles
        if all(c.deck_class is not DeckClass.PAYLOAD for c in p)
    )


def _move_piles(table: CardTable, indices: Sequence[int], perm: Permutation) -> None:
    # pile at slot indices[j] moves to slot indices[perm(j+1)-1]
    before = [table.pile(i) for i in indices]
    for j, pile in enumerate(before, start=1):
        table.piles[indices[perm(j) - 1] - 1] = pile


def pss(
    table: CardTable, pile_indices: Sequence[int], choice: ChoiceSource
) -> Permutation:
    """Pile-scramble shuffle of equal-size piles; returns the drawn slot permutation."""
    indices = list(pile_indices)
    sizes = table.sizes(indices)
    if len(set(sizes)) > 1:
        raise UnequalPileSizes(f"piles {indices} have sizes {sizes}")
    perm = draw_permutation(choice, len(indices))
    _move_piles(table, indices, perm)
    table.trace.append(ShuffleApplied(tuple(indices), sizes))
    return perm


def pss_within(
    table: CardTable, pile: int, positions: Sequence[int], choice: ChoiceSource
) -> Permutation:
    """Scramble single cards at the given positions inside one pile."""
    cards = table.pile(pile)
    positions = list(positions)
    perm = draw_permutation(choice, len(positions))
    before = [cards[p - 1] for p in positions]
    for j, card in enumerate(before, start=1):
        cards[positions[perm(j) - 1] - 1] = card
    table.trace.append(ShuffleApplied((pile,), (1,) * len(positions), tuple(positions)))
    return perm


def generalized_pss(
    table: CardTable, pile_indices: Sequence[int], choice: ChoiceSource
) -> Permutation | None:
    """One pile-scramble per size class; singleton classes are left alone.

    Returns the combined slot permutation on len(pile_indices) points, or
    None when no piles were named.
    """
    indices = list(pile_indices)
    classes: Dict[int, list[int]] = {}
    for slot, index in enumerate(indices, start=1):
        classes.setdefault(len(table.pile(index)), []).append(slot)

    images = list(range(1, len(indices) + 1))
    for size in sorted(classes):
        slots = classes[size]
        if len(slots) < 2:
            continue
        sub = pss(table, [indices[s - 1] for s in slots], choice)
        for j, slot in enumerate(slots, start=1):
            images[slot - 1] = slots[sub(j) - 1]
    if not indices:
        return None
    return Permutation(images)


def turn(table: CardTable, pile: int, position: int) -> str:
    cards = table.pile(pile)
    if not 1 <= position <= len(cards):
        raise InvariantViolation(f"pile {pile} has no position {position}")
    card = cards[position - 1]
    if card.deck_class is DeckClass.PAYLOAD:
        raise PayloadExposure(f"refusing to turn payload card at pile {pile}")
    if card.is_face_up():
        raise AlreadyFaceUp(f"card at pile {pile} position {position} is already up")
    card.face = Face.UP
    table.trace.append(Turned(pile, position, card.symbol))
    return card.symbol


@dataclass(frozen=True)
class SortKey:
    """Sort piles by the face-up cards at these positions, compared in order."""

    positions: tuple[int, ...] = (1,)

    def of(self, cards: Sequence[Card]) -> tuple[tuple[int, int], ...]:
        key = []
        for pos in self.positions:
            if pos > len(cards) or not cards[pos - 1].is_face_up():
                break
            key.append(cards[pos - 1].rank)
        return tuple(key)


def _fully_public(cards: Sequence[Card]) -> bool:
    return all(c.is_face_up() for c in cards)


def sort_piles_by_revealed(
    table: CardTable,
    key: SortKey,
    pile_indices: Sequence[int] | None = None,
    allow_identical_public: bool = False,
) -> Permutation:
    """Sort piles ascending by their revealed key; returns the slot rearrangement.

    Equal keys raise DuplicateKey. With `allow_identical_public`, piles that are
    fully face-up and show the same cards may tie, since swapping them changes
    nothing on the table.
    """
    if pile_indices is None:
        pile_indices = range(1, len(table.piles) + 1)
    indices = list(pile_indices)
    if not indices:
        raise InvariantViolation("nothing to sort")
    first = key.positions[0]
    keyed = []
    for slot, index in enumerate(indices, start=1):
        cards = table.pile(index)
        if first > len(cards) or not cards[first - 1].is_face_up():
            raise HiddenKey(f"sort key of pile {index} is face down")
        keyed.append((key.of(cards), slot))

    keyed.sort()
    for (k1, s1), (k2, s2) in zip(keyed, keyed[1:]):
        if k1 != k2:
            continue
        left, right = table.pile(indices[s1 - 1]), table.pile(indices[s2 - 1])
        same = [c.label for c in left] == [c.label for c in right]
        public = _fully_public(left) and _fully_public(right)
        if not (allow_identical_public and same and public):
            raise DuplicateKey(
                f"piles {indices[s1 - 1]} and {indices[s2 - 1]} share key {k1}"
            )

    images = [0] * len(indices)
    for target, (_, slot) in enumerate(keyed, start=1):
        images[slot - 1] = target
    perm = Permutation(images)
    _move_piles(table, indices, perm)
    table.trace.append(Sorted(tuple(indices), perm.images))
    return perm


def rearrange(
    table: CardTable, recipe: Sequence[Sequence[tuple[int, int]]], label: str
) -> None:
    """Rebuild the table from (pile, position) references; every card used once."""
    wanted = Counter(ref for new_pile in recipe for ref in new_pile)
    available = Counter(
        (i, pos)
        for i, p in enumerate(table.piles, start=1)
        for pos in range(1, len(p) + 1)
    )
    if wanted != available:
        raise InvariantViolation(
            f"rearrangement {label!r} does not use every card once"
        )
    new_piles = [[table.pile(i)[pos - 1] for i, pos in new_pile] for new_pile in recipe]
    table.piles = new_piles
    table.trace.append(Rearranged(label, table.sizes()))


# -----------------------------
# Enumeration
# -----------------------------
def estimate_branches(
    program: Callable[[ChoiceSource], Any], config: Dict | None = None
) -> int:
    """Product of choice arities seen in one seeded dry run."""
    conf = ensure_config(config)
    source = SeededChoice(conf[CONF_SEED])
    program(source)
    return math.prod(source.arities)


def enumerate_runs(
    program: Callable[[ChoiceSource], T], config: Dict | None = None
) -> list[tuple[T, Fraction]]:
    """Run `program` once per branch of its choice tree, with exact probabilities."""
    conf = ensure_config(config)
    cap = conf[CONF_BRANCH_CAP]
    estimate = estimate_branches(program, conf)
    if estimate > cap:
        raise ExactTooLarge(estimate, cap)
    _LOGGER.info("Enumerating about %d branches", estimate)

    source = ExhaustiveChoice()
    leaves: list[tuple[T, Fraction]] = []
    while True:
        outcome = program(source)
        leaves.append((outcome, source.probability()))
        if len(leaves) > cap:
            raise ExactTooLarge(len(leaves), cap)
        if len(leaves) % _PROGRESS_EVERY == 0:
            _LOGGER.debug("Visited %d of about %d branches", len(leaves), estimate)
        if not source.advance():
            break

    total = sum((p for _, p in leaves), Fraction(0))
    if total != 1:
        raise InvariantViolation(f"leaf probabilities sum to {total}")
    _LOGGER.info("Enumerated %d branches", len(leaves))
    return leaves
