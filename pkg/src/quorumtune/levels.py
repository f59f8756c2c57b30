"""Cassandra-style per-operation consistency levels and quorum arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class ReadLevel(Enum):
    ONE = "ONE"
    QUORUM = "QUORUM"
    ALL = "ALL"


class WriteLevel(Enum):
    ANY = "ANY"
    ONE = "ONE"
    QUORUM = "QUORUM"
    ALL = "ALL"


# Weakness ranks used for deterministic tie-breaks. ANY is ranked below ONE
# even though both need a single acknowledgment.
_READ_RANK = {ReadLevel.ONE: 0, ReadLevel.QUORUM: 1, ReadLevel.ALL: 2}
_WRITE_RANK = {WriteLevel.ANY: 0, WriteLevel.ONE: 1, WriteLevel.QUORUM: 2, WriteLevel.ALL: 3}


def required_acks(level: ReadLevel | WriteLevel, replica_count: int) -> int:
    """Acknowledgments a coordinator must collect before the op completes."""
    if replica_count < 1:
        raise ValueError(f"replica_count must be >= 1, got {replica_count}")
    if isinstance(level, WriteLevel) and level is WriteLevel.ANY:
        return 1
    name = level.name
    if name == "ONE":
        return 1
    if name == "QUORUM":
        return replica_count // 2 + 1
    if name == "ALL":
        return replica_count
    raise ValueError(f"unknown level {level!r}")


@dataclass(frozen=True, order=False)
class ConsistencyLevel:
    """A (read level, write level) pair; the prediction target."""

    read: ReadLevel
    write: WriteLevel

    @property
    def key(self) -> str:
        return f"{self.read.value}/{self.write.value}"

    def __str__(self) -> str:
        return self.key

    @classmethod
    def parse(cls, text: str) -> "ConsistencyLevel":
        try:
            read_part, write_part = text.strip().split("/")
            return cls(ReadLevel(read_part), WriteLevel(write_part))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"not a consistency level: {text!r}") from exc

    def weakness_rank(self) -> tuple[int, int]:
        """(read rank, write rank); lexicographically smaller is weaker."""
        return (_READ_RANK[self.read], _WRITE_RANK[self.write])

    def read_acks(self, replica_count: int) -> int:
        return required_acks(self.read, replica_count)

    def write_acks(self, replica_count: int) -> int:
        return required_acks(self.write, replica_count)

    def intersects(self, replica_count: int) -> bool:
        """True when read and write quorums must overlap (R + W > N)."""
        return self.read_acks(replica_count) + self.write_acks(replica_count) > replica_count


# The closed enumeration of all 12 combined levels, weakest first.
ALL_LEVELS: tuple[ConsistencyLevel, ...] = tuple(
    sorted(
        (ConsistencyLevel(r, w) for r in ReadLevel for w in WriteLevel),
        key=ConsistencyLevel.weakness_rank,
    )
)

assert math.prod((len(ReadLevel), len(WriteLevel))) == len(ALL_LEVELS) == 12
