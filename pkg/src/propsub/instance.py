"""Chore-division instances: parsing, validation, preprocessing, normalization.

All numbers are :class:`fractions.Fraction`. Agents and chores are
0-indexed; agent ``i`` is row ``i`` of the disutility matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

Rational = Fraction


class InstanceError(ValueError):
    """Invalid instance document. ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def parse_rational(value: Any, path: str = "$") -> Fraction:
    """Parse ``"p/q"`` strings and integers. Floats are rejected."""
    if isinstance(value, bool):
        raise InstanceError(path, "expected rational, got boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            p = int(num)
            q = int(den) if sep else 1
        except ValueError:
            raise InstanceError(path, f"not a rational: {value!r}") from None
        if q == 0:
            raise InstanceError(path, "zero denominator")
        return Fraction(p, q)
    raise InstanceError(path, f"expected 'p/q' string or integer, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


@dataclass(frozen=True)
class Instance:
    weights: tuple[Fraction, ...]
    disutilities: tuple[tuple[Fraction, ...], ...]
    scale: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        object.__setattr__(
            self,
            "disutilities",
            tuple(tuple(Fraction(v) for v in row) for row in self.disutilities),
        )
        object.__setattr__(self, "scale", Fraction(self.scale))
        _validate(self.weights, self.disutilities)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def m(self) -> int:
        return len(self.disutilities[0]) if self.disutilities else 0

    def disutility(self, i: int, c: int) -> Fraction:
        return self.disutilities[i][c]

    def total(self, i: int) -> Fraction:
        """Agent ``i``'s disutility for the whole chore set."""
        return sum(self.disutilities[i], Fraction(0))

    def prop_share(self, i: int) -> Fraction:
        return self.weights[i] * self.total(i)

    def bundle(self, i: int, chores: Iterable[int]) -> Fraction:
        row = self.disutilities[i]
        return sum((row[c] for c in chores), Fraction(0))

    def is_bounded(self) -> bool:
        return all(v <= 1 for row in self.disutilities for v in row)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "weights": [format_rational(w) for w in self.weights],
            "disutilities": [[format_rational(v) for v in row] for row in self.disutilities],
        }
        if self.scale != 1:
            doc["scale"] = format_rational(self.scale)
        return doc


def _validate(weights: Sequence[Fraction], rows: Sequence[Sequence[Fraction]]) -> None:
    if not weights:
        raise InstanceError("$.weights", "at least one agent required")
    for i, w in enumerate(weights):
        if w <= 0:
            raise InstanceError(f"$.weights[{i}]", f"weight must be positive, got {w}")
    total = sum(weights, Fraction(0))
    if total != 1:
        raise InstanceError("$.weights", f"weights sum ≠ 1 (sum is {total})")
    if len(rows) != len(weights):
        raise InstanceError(
            "$.disutilities",
            f"dimension mismatch: {len(rows)} rows for {len(weights)} agents",
        )
    m = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != m:
            raise InstanceError(
                f"$.disutilities[{i}]", f"dimension mismatch: {len(row)} chores, expected {m}"
            )
        for c, v in enumerate(row):
            if v < 0:
                raise InstanceError(f"$.disutilities[{i}][{c}]", f"negative disutility {v}")


@dataclass(frozen=True)
class IntegralAllocation:
    """``owner[c]`` is the agent that receives chore ``c``."""

    owner: tuple[int, ...]
    n: int = field(default=0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "owner", tuple(self.owner))
        if self.n == 0 and self.owner:
            object.__setattr__(self, "n", max(self.owner) + 1)

    @property
    def m(self) -> int:
        return len(self.owner)

    def bundles(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for c, i in enumerate(self.owner):
            out[i].append(c)
        return out

    @classmethod
    def from_bundles(cls, bundles: Sequence[Iterable[int]]) -> IntegralAllocation:
        owner: dict[int, int] = {}
        for i, bundle in enumerate(bundles):
            for c in bundle:
                if c in owner:
                    raise ValueError(f"chore {c} assigned twice")
                owner[c] = i
        m = len(owner)
        if sorted(owner) != list(range(m)):
            raise ValueError("bundles must cover chores 0..m-1 exactly")
        return cls(tuple(owner[c] for c in range(m)), n=len(bundles))


def parse_instance(text: str | bytes) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("$", f"malformed JSON: {exc}") from None
    return instance_from_dict(doc)


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, Mapping):
        raise InstanceError("$", "expected a JSON object")
    for key in ("weights", "disutilities"):
        if key not in doc:
            raise InstanceError(f"$.{key}", "missing field")
    raw_w, raw_d = doc["weights"], doc["disutilities"]
    if not isinstance(raw_w, list):
        raise InstanceError("$.weights", "expected a list")
    if not isinstance(raw_d, list) or not all(isinstance(r, list) for r in raw_d):
        raise InstanceError("$.disutilities", "expected a list of lists")
    weights = [parse_rational(v, f"$.weights[{i}]") for i, v in enumerate(raw_w)]
    rows = [
        [parse_rational(v, f"$.disutilities[{i}][{c}]") for c, v in enumerate(row)]
        for i, row in enumerate(raw_d)
    ]
    scale = parse_rational(doc.get("scale", 1), "$.scale")
    if scale <= 0:
        raise InstanceError("$.scale", "scale must be positive")
    return Instance(tuple(weights), tuple(tuple(r) for r in rows), scale)


def serialize_instance(inst: Instance) -> str:
    return json.dumps(inst.to_dict(), indent=2) + "\n"


def restrict_chores(inst: Instance, chores: Sequence[int]) -> Instance:
    rows = tuple(tuple(row[c] for c in chores) for row in inst.disutilities)
    return Instance(inst.weights, rows, inst.scale)


def preprocess_zero_disutility(inst: Instance) -> tuple[Instance, dict[int, int]]:
    """Hand every chore that some agent finds costless to the lowest such agent.

    Returns the instance over the remaining chores (original order kept) and
    the pre-assignment, keyed by original chore index.
    """
    pre: dict[int, int] = {}
    for c in range(inst.m):
        for i in range(inst.n):
            if inst.disutilities[i][c] == 0:
                pre[c] = i
                break
    if not pre:
        return inst, pre
    kept = [c for c in range(inst.m) if c not in pre]
    return restrict_chores(inst, kept), pre


def kept_chores(m: int, preassigned: Mapping[int, int]) -> list[int]:
    return [c for c in range(m) if c not in preassigned]


def scale_disutilities(inst: Instance, factor: Fraction) -> Instance:
    """Divide every disutility by ``factor`` and multiply the recorded scale by it."""
    rows = tuple(tuple(v / factor for v in row) for row in inst.disutilities)
    return Instance(inst.weights, rows, inst.scale * factor)


def normalize(inst: Instance) -> Instance:
    top = max((v for row in inst.disutilities for v in row), default=Fraction(0))
    if top <= 1:
        return inst
    return scale_disutilities(inst, top)
