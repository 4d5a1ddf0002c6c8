"""Invariant instance records and ordered invariant sets."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class InvariantInstance:
    """One runtime observation: location, canonical value, type tag,
    execution index, and the slicing round that produced it."""

    l: str
    v: str
    tau: str
    t: int
    round: int

    def to_jsonl(self) -> str:
        return json.dumps(
            {"l": self.l, "v": self.v, "tau": self.tau, "t": self.t, "r": self.round},
            ensure_ascii=False,
            separators=(",", ":"),
        )


class InvariantSet:
    """Instances ordered by (round, t)."""

    def __init__(self, instances: Iterable[InvariantInstance] = ()):
        self.instances: list[InvariantInstance] = sorted(
            instances, key=lambda i: (i.round, i.t)
        )

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[InvariantInstance]:
        return iter(self.instances)

    def extend(self, instances: Iterable[InvariantInstance]) -> None:
        self.instances.extend(instances)
        self.instances.sort(key=lambda i: (i.round, i.t))

    def locations(self) -> set[str]:
        return {inst.l for inst in self.instances}

    def to_jsonl(self) -> str:
        return "".join(inst.to_jsonl() + "\n" for inst in self.instances)

    @staticmethod
    def from_jsonl(text: str) -> "InvariantSet":
        out = []
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            out.append(InvariantInstance(obj["l"], obj["v"], obj["tau"], obj["t"], obj["r"]))
        return InvariantSet(out)
