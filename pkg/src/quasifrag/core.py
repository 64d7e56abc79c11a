"""Unit patterns, occupancy layouts and mode sets.

Momenta are integer mode labels ``k`` in ``[0, L)``; the angle ``2*pi*k/L``
only appears inside the entropy engines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Sequence


class SpecError(ValueError):
    """Raised when a pattern, occupancy spec or mode set is invalid."""


class CapExceeded(SpecError):
    """Raised when a request exceeds a configured cost cap; the message carries the estimate."""


@dataclass(frozen=True)
class UnitPattern:
    """A cell of ``l`` consecutive momenta with excited subset ``kappa``."""

    l: int
    kappa: tuple[int, ...]

    def __post_init__(self):
        kappa = tuple(int(k) for k in self.kappa)
        object.__setattr__(self, "kappa", kappa)
        if int(self.l) != self.l or self.l < 1:
            raise SpecError(f"cell length must be a positive integer, got {self.l!r}")
        if not kappa:
            raise SpecError("kappa must contain at least one excited momentum")
        if any(b <= a for a, b in zip(kappa, kappa[1:])):
            raise SpecError(f"kappa must be strictly increasing, got {list(kappa)}")
        if kappa[0] < 0 or kappa[-1] >= self.l:
            raise SpecError(f"kappa {list(kappa)} not inside [0, {self.l})")

    @property
    def size(self) -> int:
        return len(self.kappa)

    def __str__(self):
        return f"l={self.l},kappa={{{','.join(map(str, self.kappa))}}}"


@dataclass(frozen=True)
class Block:
    pattern: UnitPattern
    p: int
    offset: int = 0

    def momenta(self) -> list[int]:
        l = self.pattern.l
        return [self.offset + a * l + k for a in range(self.p) for k in self.pattern.kappa]


@dataclass(frozen=True)
class ModeSet:
    """Explicit set of excited momenta of a chain of ``L`` sites."""

    L: int
    K: tuple[int, ...] = ()

    def __post_init__(self):
        K = tuple(sorted(int(k) for k in self.K))
        object.__setattr__(self, "K", K)
        if int(self.L) != self.L or self.L < 1:
            raise SpecError(f"chain length must be a positive integer, got {self.L!r}")
        if len(set(K)) != len(K):
            raise SpecError(f"repeated momentum in {list(K)}")
        if K and (K[0] < 0 or K[-1] >= self.L):
            raise SpecError(f"momenta {list(K)} not inside [0, {self.L})")

    def __len__(self):
        return len(self.K)

    def __iter__(self):
        return iter(self.K)

    def shifted(self, c: int) -> ModeSet:
        return ModeSet(self.L, tuple((k + c) % self.L for k in self.K))

    def complement(self) -> ModeSet:
        occupied = set(self.K)
        return ModeSet(self.L, tuple(k for k in range(self.L) if k not in occupied))


@dataclass(frozen=True)
class OccupancySpec:
    """Ordered blocks of repeated unit patterns inside a chain of ``L`` momenta."""

    L: int
    blocks: tuple[Block, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if int(self.L) != self.L or self.L < 1:
            raise SpecError(f"chain length must be a positive integer, got {self.L!r}")
        if not self.blocks:
            raise SpecError("an occupancy spec needs at least one block")
        for i, b in enumerate(self.blocks):
            if int(b.p) != b.p or b.p < 1:
                raise SpecError(f"block {i}: repetitions must be a positive integer, got {b.p!r}")
            if not 0 <= b.offset < self.L:
                raise SpecError(f"block {i}: offset {b.offset} not inside [0, {self.L})")
            if b.p * b.pattern.l > self.L:
                raise SpecError(f"block {i}: p*l = {b.p * b.pattern.l} exceeds L = {self.L}")

    @classmethod
    def full(cls, pattern: UnitPattern, p: int) -> OccupancySpec:
        return cls(p * pattern.l, (Block(pattern, p, 0),))

    @property
    def is_fully_occupied(self) -> bool:
        b = self.blocks
        return len(b) == 1 and b[0].offset == 0 and b[0].p * b[0].pattern.l == self.L

    def to_dict(self) -> dict[str, Any]:
        return {
            "L": self.L,
            "blocks": [
                {"l": b.pattern.l, "kappa": list(b.pattern.kappa), "p": b.p, "offset": b.offset}
                for b in self.blocks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> OccupancySpec:
        try:
            blocks = tuple(
                Block(UnitPattern(int(b["l"]), tuple(b["kappa"])), int(b["p"]), int(b.get("offset", 0)))
                for b in data["blocks"]
            )
            return cls(int(data["L"]), blocks)
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed occupancy spec: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> OccupancySpec:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CellCoordinates:
    alpha: int
    y: Fraction | float
    x: Fraction | float


def expand(spec: OccupancySpec) -> ModeSet:
    """Expand an occupancy spec into its explicit mode set.

    Raises
    ------
    SpecError
        If a momentum falls outside ``[0, L)`` or two blocks collide; the
        message names the offending momentum.
    """
    owner: dict[int, int] = {}
    for i, block in enumerate(spec.blocks):
        for k in block.momenta():
            if not 0 <= k < spec.L:
                raise SpecError(f"block {i}: momentum {k} outside [0, {spec.L})")
            if k in owner:
                raise SpecError(f"blocks {owner[k]} and {i} both excite momentum {k}")
            owner[k] = i
    return ModeSet(spec.L, tuple(sorted(owner)))


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, Rational):
        return Fraction(x)
    return None


def cell_coords(l: int, x) -> CellCoordinates:
    """Split ``l*x`` into integer part ``alpha`` and fractional part ``y``.

    ``x`` may be a ``Fraction`` (boundaries resolved exactly) or a float.
    ``alpha`` is clamped to ``l - 1``.
    """
    fx = _as_fraction(x)
    if fx is not None:
        if not 0 < fx < 1:
            raise SpecError(f"x must lie in (0, 1), got {fx}")
        alpha = math.floor(l * fx)
        alpha = min(max(alpha, 0), l - 1)
        return CellCoordinates(alpha, l * fx - alpha, fx)
    x = float(x)
    if not 0.0 < x < 1.0 or math.isnan(x):
        raise SpecError(f"x must lie in (0, 1), got {x}")
    lx = l * x
    alpha = min(max(math.floor(lx), 0), l - 1)
    return CellCoordinates(alpha, lx - alpha, x)


def repetition_ratios(spec: OccupancySpec) -> list[Fraction]:
    """Return ``p_i / L`` for every block, as exact fractions."""
    return [Fraction(b.p, spec.L) for b in spec.blocks]


def subsystem_fraction(L_A: int, L: int) -> Fraction:
    return Fraction(L_A, L)


def mode_set(L: int, K: Iterable[int]) -> ModeSet:
    return ModeSet(L, tuple(K))


def parse_kappa(text: str | Sequence[int]) -> tuple[int, ...]:
    if isinstance(text, str):
        text = text.strip().strip("{}[]")
        return tuple(int(t) for t in text.split(",") if t.strip())
    return tuple(int(t) for t in text)
