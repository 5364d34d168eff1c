"""Round-based execution spaces: schedule alphabets, prefix predicates,
and finitely many excluded eventually-periodic executions.

A round schedule is an ordered partition of the process set: the blocks
take their snapshots in sequence, each block seeing every earlier block
and itself.  For two processes the three schedules are written with the
arrows of the lossy-link reading: "->" means the left process goes
first (it hears nobody this round), "<-" means the right process goes
first, "<->" means both see each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .errors import Unsupported
from .subdivision import Schedule, ordered_partitions

MAX_PROCESSES = 5

# Fixed orientation for n = 2: "->" is the ordered partition ({0}, {1}),
# the round in which the left process sees only itself.
ARROW_NAMES = {
    ((0,), (1,)): "->",
    ((1,), (0,)): "<-",
    ((0, 1),): "<->",
}
ARROW_SCHEDULES = {name: blocks for blocks, name in ARROW_NAMES.items()}


@dataclass(frozen=True)
class RoundSchedule:
    """An ordered partition of the processes 0..n-1."""

    blocks: Schedule  # tuple of sorted tuples of colors

    def __post_init__(self):
        seen = set()
        for block in self.blocks:
            if not block or tuple(sorted(block)) != tuple(block):
                raise ValueError(f"blocks must be nonempty sorted tuples: {self.blocks}")
            if seen & set(block):
                raise ValueError(f"blocks must be disjoint: {self.blocks}")
            seen.update(block)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __str__(self):
        name = ARROW_NAMES.get(self.blocks)
        if name is not None:
            return name
        return "|".join(",".join(str(c) for c in b) for b in self.blocks)

    def to_json_obj(self):
        return [list(b) for b in self.blocks]

    @classmethod
    def parse(cls, raw) -> "RoundSchedule":
        if isinstance(raw, RoundSchedule):
            return raw
        if isinstance(raw, str):
            if raw in ARROW_SCHEDULES:
                return cls(ARROW_SCHEDULES[raw])
            blocks = tuple(
                tuple(sorted(int(x) for x in part.split(","))) for part in raw.split("|")
            )
            return cls(blocks)
        return cls(tuple(tuple(sorted(int(c) for c in b)) for b in raw))


Word = tuple  # tuple[RoundSchedule, ...]


def word(*schedules) -> Word:
    return tuple(RoundSchedule.parse(s) for s in schedules)


def enumerate_round_schedules(n: int) -> list[RoundSchedule]:
    """All round schedules on n processes, canonical order."""
    if not 1 <= n <= MAX_PROCESSES:
        raise Unsupported(f"round schedules supported for 1..{MAX_PROCESSES} processes")
    return [RoundSchedule(blocks) for blocks in ordered_partitions(range(n))]


@dataclass(frozen=True)
class ExecutionWord:
    """The eventually periodic infinite word stem . cycle^omega."""

    stem: Word
    cycle: Word

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("cycle must be nonempty")

    def letter(self, i: int) -> RoundSchedule:
        if i < len(self.stem):
            return self.stem[i]
        return self.cycle[(i - len(self.stem)) % len(self.cycle)]

    def prefix(self, length: int) -> Word:
        return tuple(self.letter(i) for i in range(length))

    def normalized(self) -> "ExecutionWord":
        """Canonical form: primitive cycle, stem not absorbable into it."""
        cycle = list(self.cycle)
        for period in range(1, len(cycle)):
            if len(cycle) % period == 0 and cycle == cycle[:period] * (len(cycle) // period):
                cycle = cycle[:period]
                break
        stem = list(self.stem)
        while stem and stem[-1] == cycle[-1]:
            stem.pop()
            cycle = [cycle[-1]] + cycle[:-1]
        return ExecutionWord(tuple(stem), tuple(cycle))

    def __str__(self):
        stem = ",".join(str(s) for s in self.stem)
        cycle = ",".join(str(s) for s in self.cycle)
        return f"({stem})({cycle})^w" if stem else f"({cycle})^w"

    def to_json_obj(self):
        return {
            "stem": [s.to_json_obj() for s in self.stem],
            "cycle": [s.to_json_obj() for s in self.cycle],
        }

    @classmethod
    def parse(cls, obj) -> "ExecutionWord":
        return cls(
            tuple(RoundSchedule.parse(s) for s in obj["stem"]),
            tuple(RoundSchedule.parse(s) for s in obj["cycle"]),
        )


PrefixPredicate = Callable[[frozenset, Word], bool]


@dataclass(frozen=True)
class ModelSpec:
    """A round-based model: which finite schedule prefixes can happen,
    plus finitely many excluded limit executions.

    `allowed_prefix(participants, word)` must be prefix-closed and
    extendable.  Built-in models only restrict full-participation
    words; executions of a proper participation set are unrestricted.
    """

    n: int
    name: str
    kind: str  # "iis" | "firstRoundRestricted" | "custom"
    allowed_first_rounds: tuple[RoundSchedule, ...] | None = None
    excluded: tuple[ExecutionWord, ...] = ()
    predicate: PrefixPredicate | None = field(default=None, compare=False)

    def schedules(self, participants: frozenset) -> list[RoundSchedule]:
        if len(participants) > MAX_PROCESSES:
            raise Unsupported(f"at most {MAX_PROCESSES} participants supported")
        return [RoundSchedule(blocks) for blocks in ordered_partitions(sorted(participants))]

    def allowed_prefix(self, participants: frozenset, prefix: Word) -> bool:
        if len(participants) < self.n:
            return True
        if self.predicate is not None and not self.predicate(participants, prefix):
            return False
        if self.allowed_first_rounds is not None and prefix:
            if prefix[0] not in self.allowed_first_rounds:
                return False
        return True

    def is_compact(self) -> bool:
        return not self.excluded

    def to_json_obj(self) -> dict:
        obj = {"schema": 1, "n": self.n, "kind": self.kind, "name": self.name}
        if self.allowed_first_rounds is not None:
            obj["allowedFirstRounds"] = [s.to_json_obj() for s in self.allowed_first_rounds]
        obj["excluded"] = [w.to_json_obj() for w in self.excluded]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def enumerate_prefixes(model: ModelSpec, depth: int, participants: frozenset | None = None) -> list[Word]:
    """All allowed schedule words of exactly the given length, in
    lexicographic order of the schedule enumeration.  Excluded limit
    executions remove no finite prefix."""
    if depth < 0:
        raise Unsupported("depth must be nonnegative")
    if participants is None:
        participants = frozenset(range(model.n))
    alphabet = model.schedules(participants)
    out: list[Word] = []

    def extend(prefix: Word):
        if len(prefix) == depth:
            out.append(prefix)
            return
        for s in alphabet:
            candidate = prefix + (s,)
            if model.allowed_prefix(participants, candidate):
                extend(candidate)

    if model.allowed_prefix(participants, ()):
        extend(())
    return out


def is_excluded_limit(model: ModelSpec, w: ExecutionWord) -> bool:
    normal = w.normalized()
    return any(normal == e.normalized() for e in model.excluded)


# -- built-in models -------------------------------------------------------


def iis(n: int) -> ModelSpec:
    if not 1 <= n <= MAX_PROCESSES:
        raise Unsupported(f"built-in models support 1..{MAX_PROCESSES} processes")
    return ModelSpec(n=n, name=f"iis{n}", kind="iis")


def m1() -> ModelSpec:
    """Two-process model whose first round is never the full exchange."""
    return ModelSpec(
        n=2,
        name="m1",
        kind="firstRoundRestricted",
        allowed_first_rounds=(
            RoundSchedule(ARROW_SCHEDULES["->"]),
            RoundSchedule(ARROW_SCHEDULES["<-"]),
        ),
    )


def m2() -> ModelSpec:
    """Two-process IIS minus the single execution <->, <-, <-, ..."""
    e = ExecutionWord(word("<->"), word("<-"))
    return ModelSpec(n=2, name="m2", kind="custom", excluded=(e,))


BUILTIN_MODELS: dict[str, Callable[[], ModelSpec]] = {
    "iis2": lambda: iis(2),
    "iis3": lambda: iis(3),
    "ll": lambda: ModelSpec(n=2, name="ll", kind="iis"),
    "m1": m1,
    "m2": m2,
}


def builtin_model(name: str) -> ModelSpec:
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        raise Unsupported(f"unknown built-in model {name!r}") from None


def load_model_json_obj(obj: dict) -> ModelSpec:
    kind = obj.get("kind", "custom")
    first = obj.get("allowedFirstRounds")
    first_rounds = tuple(RoundSchedule.parse(s) for s in first) if first is not None else None
    excluded = tuple(ExecutionWord.parse(e) for e in obj.get("excluded", []))
    if kind == "iis":
        first_rounds = None
    return ModelSpec(
        n=int(obj["n"]),
        name=obj.get("name", kind),
        kind=kind,
        allowed_first_rounds=first_rounds,
        excluded=excluded,
    )


def load_model_json(text: str) -> ModelSpec:
    return load_model_json_obj(json.loads(text))
