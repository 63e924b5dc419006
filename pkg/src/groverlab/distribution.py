"""Probability mass over computational-basis bitstrings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, DomainError


def _sort_key(item: tuple[str, float]) -> tuple[float, int]:
    bits, p = item
    return (-p, int(bits, 2))


@dataclass(frozen=True)
class Distribution:
    """``probs`` maps length-``n`` bitstrings to probabilities; absent keys mean 0.

    ``truncated`` marks a top-k view whose mass may sum to less than one.
    """

    n: int
    probs: Mapping[str, float] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "probs", dict(self.probs))
        for bits, p in self.probs.items():
            if len(bits) != self.n or set(bits) - {"0", "1"}:
                raise DomainError(f"{bits!r} is not a {self.n}-bit string")
            if p < 0:
                raise DomainError(f"negative probability {p} for {bits}")

    @classmethod
    def from_array(cls, probs: np.ndarray, n: int | None = None) -> "Distribution":
        probs = np.asarray(probs, dtype=float)
        if n is None:
            n = int(probs.size).bit_length() - 1
        if probs.size != 2**n:
            raise DimensionMismatch(f"expected {2**n} probabilities, got {probs.size}")
        return cls(n, {format(i, f"0{n}b"): float(p) for i, p in enumerate(probs)})

    def to_array(self) -> np.ndarray:
        """Dense length-2**n vector, zero-filling absent states."""
        out = np.zeros(2**self.n)
        for bits, p in self.probs.items():
            out[int(bits, 2)] = p
        return out

    def get(self, bits: str) -> float:
        return self.probs.get(bits, 0.0)

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def ranked(self) -> list[tuple[str, float]]:
        """Entries by probability descending, ties by ascending integer value."""
        return sorted(self.probs.items(), key=_sort_key)

    def to_json(self) -> dict:
        return {"n": self.n, "probs": dict(self.probs), "truncated": self.truncated}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: Mapping) -> "Distribution":
        return cls(int(data["n"]), {str(k): float(v) for k, v in data["probs"].items()}, bool(data.get("truncated", False)))

    @classmethod
    def loads(cls, text: str) -> "Distribution":
        return cls.from_json(json.loads(text))


def total_variation(p: Distribution, q: Distribution) -> float:
    if p.n != q.n:
        raise DimensionMismatch(f"n={p.n} vs n={q.n}")
    return 0.5 * float(np.abs(p.to_array() - q.to_array()).sum())
