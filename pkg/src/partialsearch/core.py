"""Database geometry, derived angles and the iteration-plan vocabulary.

Items are numbered ``0 .. N-1`` and block ``i`` holds items ``[i*b, (i+1)*b)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Literal

OpKind = Literal["G1", "G2", "Ga"]
OP_KINDS: tuple[str, ...] = ("G1", "G2", "Ga")


class GeometryError(ValueError):
    """Invalid database geometry."""


class NonDividing(GeometryError):
    pass


class TargetOutOfRange(GeometryError):
    pass


class DegenerateGeometry(GeometryError):
    pass


@dataclass(frozen=True)
class Angles:
    """``sin^2(theta1) = 1/N``, ``sin^2(theta2) = 1/b``, ``sin(gamma) = 1/sqrt(K)``."""

    theta1: float
    theta2: float
    gamma: float

    @classmethod
    def from_counts(cls, n_items: int, n_blocks: int) -> "Angles":
        return cls(
            theta1=math.asin(1.0 / math.sqrt(n_items)),
            theta2=math.asin(math.sqrt(n_blocks / n_items)),
            gamma=math.asin(1.0 / math.sqrt(n_blocks)),
        )

    @classmethod
    def limit(cls, gamma: float, theta2: float) -> "Angles":
        """Large-block angles, with ``theta1 = sin(gamma) * theta2`` imposed."""
        return cls(theta1=math.sin(gamma) * theta2, theta2=theta2, gamma=gamma)


@dataclass(frozen=True)
class SearchSpace:
    n_items: int
    n_blocks: int
    target_index: int = 0
    angles: Angles = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        N, K, t = self.n_items, self.n_blocks, self.target_index
        if K < 2:
            raise DegenerateGeometry(f"need at least 2 blocks, got K={K}")
        if N <= 0 or N % K:
            raise NonDividing(f"K={K} does not divide N={N}")
        if N // K < 2:
            raise DegenerateGeometry(f"block size must be >= 2, got b={N // K}")
        if not 0 <= t < N:
            raise TargetOutOfRange(f"target {t} outside [0, {N})")
        object.__setattr__(self, "angles", Angles.from_counts(N, K))

    @property
    def block_size(self) -> int:
        return self.n_items // self.n_blocks

    @property
    def target_block(self) -> int:
        return self.block_of(self.target_index)

    def block_of(self, item: int) -> int:
        return item // self.block_size


def make_space(n_items: int, n_blocks: int, target_index: int = 0) -> SearchSpace:
    return SearchSpace(int(n_items), int(n_blocks), int(target_index))


_STEP_RE = re.compile(r"^\s*(G1|G2|Ga)\s*:\s*(\d+)\s*$")


@dataclass(frozen=True)
class IterationPlan:
    """Operator string written left to right, e.g. ``G1 G2^j2 G1^j1``.

    ``steps[0]`` is the leftmost factor, so it acts *last* on the state.
    """

    steps: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        steps = tuple((str(k), int(p)) for k, p in self.steps)
        for kind, power in steps:
            if kind not in OP_KINDS:
                raise ValueError(f"unknown operator kind {kind!r}")
            if power < 0:
                raise ValueError(f"negative power {power} for {kind}")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def of(cls, steps: Iterable[tuple[str, int]]) -> "IterationPlan":
        return cls(tuple(steps))

    @classmethod
    def parse(cls, text: str) -> "IterationPlan":
        """Parse ``"G1:1,G2:20,G1:20"`` (written order)."""
        text = text.strip()
        if not text:
            return cls()
        steps = []
        for chunk in text.split(","):
            m = _STEP_RE.match(chunk)
            if m is None:
                raise ValueError(f"bad plan step {chunk!r}; expected KIND:POWER")
            steps.append((m.group(1), int(m.group(2))))
        return cls(tuple(steps))

    def application_order(self) -> tuple[tuple[str, int], ...]:
        """Steps in the order they act on the state (rightmost first)."""
        return tuple(reversed(self.steps))

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return ",".join(f"{k}:{p}" for k, p in self.steps)
