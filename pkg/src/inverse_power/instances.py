"""Built-in targets (EU member states, the 1957 EEC, hard_n) and target files."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import Sequence

from .inverse import TargetDistribution

# population in thousands
EU_POPULATION: tuple[tuple[str, int], ...] = (
    ("Germany", 82500),
    ("United Kingdom", 60600),
    ("France", 60000),
    ("Italy", 58500),
    ("Spain", 43000),
    ("Poland", 38200),
    ("Romania", 21700),
    ("Netherlands", 16300),
    ("Greece", 11100),
    ("Czech Republic", 10500),
    ("Belgium", 10400),
    ("Hungary", 10200),
    ("Portugal", 10100),
    ("Sweden", 9000),
    ("Austria", 8200),
    ("Bulgaria", 7800),
    ("Denmark", 5400),
    ("Slovakia", 5400),
    ("Finland", 5200),
    ("Ireland", 4100),
    ("Latvia", 3400),
    ("Lithuania", 2300),
    ("Slovenia", 2000),
    ("Estonia", 1300),
    ("Cyprus", 700),
    ("Luxembourg", 500),
    ("Malta", 400),
)

# (state, votes, population in 2010)
EEC_1957: tuple[tuple[str, int, int], ...] = (
    ("Germany", 4, 82144902),
    ("France", 4, 62582650),
    ("Italy", 4, 60017346),
    ("Netherlands", 2, 16503473),
    ("Belgium", 2, 10783738),
    ("Luxembourg", 1, 494153),
)
EEC_QUOTA = 12

SQRT_DIGITS = 12


@dataclass(frozen=True)
class PopulationTable:
    rows: tuple[tuple[str, int], ...]
    unit: str

    def __post_init__(self):
        names = [r[0] for r in self.rows]
        if len(set(names)) != len(names):
            raise ValueError("state names must be unique")
        if any(p <= 0 for _, p in self.rows):
            raise ValueError("populations must be positive")

    def largest(self, n: int) -> "PopulationTable":
        order = sorted(self.rows, key=lambda r: -r[1])
        return PopulationTable(tuple(order[:n]), self.unit)


EU = PopulationTable(EU_POPULATION, "thousands")
EEC = PopulationTable(tuple((s, p) for s, _, p in EEC_1957), "persons")


def sqrt_rational(x: int, digits: int = SQRT_DIGITS) -> Fraction:
    """floor(sqrt(x) * 10^digits) / 10^digits, computed with integers only."""
    scale = 10**digits
    return Fraction(isqrt(x * scale * scale), scale)


def penrose_target(pops: Sequence[int] | PopulationTable, n: int | None = None, label: str = "") -> TargetDistribution:
    """Power proportional to the square root of population, over the n largest states.

    Each root is truncated to 12 decimals; dividing by their exact rational
    sum makes the target sum to one with no residual adjustment.
    """
    if isinstance(pops, PopulationTable):
        values = [p for _, p in pops.rows]
    else:
        values = list(pops)
    values.sort(reverse=True)
    if n is None:
        n = len(values)
    if not 1 <= n <= len(values):
        raise ValueError(f"n={n} outside 1..{len(values)}")
    roots = [sqrt_rational(p) for p in values[:n]]
    total = sum(roots)
    return TargetDistribution(tuple(r / total for r in roots), label or f"penrose_{n}")


def eu_target(n: int) -> TargetDistribution:
    if not 1 <= n <= len(EU_POPULATION):
        raise ValueError(f"EU instances exist for 1 <= n <= {len(EU_POPULATION)}")
    return penrose_target(EU, n, f"EU_{n}")


def eec_target() -> TargetDistribution:
    return penrose_target(EEC, None, "EEC")


def hard_target(n: int) -> TargetDistribution:
    """(3/4, 1/4, 0, ..., 0)."""
    if n < 2:
        raise ValueError("hard instances need n >= 2")
    return TargetDistribution((Fraction(3, 4), Fraction(1, 4)) + (Fraction(0),) * (n - 2), f"hard_{n}")


# --- target files -------------------------------------------------------------


class TargetParseError(ValueError):
    pass


def parse_number(token: str) -> Fraction:
    """Exact value of ``p/q`` or a decimal literal."""
    token = token.strip()
    if "/" in token:
        p, q = token.split("/", 1)
        return Fraction(int(p), int(q))
    try:
        return Fraction(Decimal(token))
    except InvalidOperation as exc:
        raise ValueError(f"not a number: {token!r}") from exc


def parse_target(text: str, normalize: bool = False, label: str = "") -> TargetDistribution:
    """Entries separated by commas or newlines; a non-numeric first row is a header."""
    values: list[Fraction] = []
    rows = list(csv.reader(io.StringIO(text)))
    for lineno, row in enumerate(rows, start=1):
        cells = [c.strip() for c in row if c.strip()]
        if not cells or cells[0].startswith("#"):
            continue
        try:
            values.extend(parse_number(c) for c in cells)
        except (ValueError, ZeroDivisionError) as exc:
            if lineno == 1 and not values:
                continue  # header
            raise TargetParseError(f"line {lineno}: {exc}") from exc
    if not values:
        raise TargetParseError("no target entries found")
    if any(v < 0 for v in values):
        raise TargetParseError("target entries must be non-negative")
    total = sum(values)
    if total != 1:
        if not normalize:
            raise TargetParseError(f"entries sum to {total}, not 1 (use normalize to rescale)")
        if total == 0:
            raise TargetParseError("cannot normalize an all-zero target")
        values = [v / total for v in values]
    return TargetDistribution.of(values, label)


def load_target(path, normalize: bool = False) -> TargetDistribution:
    p = Path(path)
    return parse_target(p.read_text(), normalize, p.stem)


def save_target(path, target: TargetDistribution, original_order: bool = True) -> None:
    vals = target.to_original(target.d) if original_order else target.d
    Path(path).write_text(",".join(str(v) for v in vals) + "\n")
