"""Admissibility, fusion counts, gluing checks, twist scalars and the abelian functor."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cyclotomic import CyclotomicField, CycNum, s_power


@dataclass(frozen=True)
class ColoredDisk:
    """A disk with outer color b and inner colors a_1..a_n at level r."""

    r: int
    outer: int
    colors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(a) for a in self.colors))
        if not isinstance(self.r, int) or self.r < 3 or self.r % 2 == 0:
            raise ValueError(f"level r must be an odd integer >= 3, got {self.r!r}")

    @property
    def n(self) -> int:
        return len(self.colors)

    @property
    def m(self) -> Fraction:
        """(sum a_i - b)/2; the block vanishes unless this is a non-negative integer."""
        return Fraction(sum(self.colors) - self.outer, 2)

    @property
    def drop(self) -> int | None:
        m = self.m
        return int(m) if m.denominator == 1 and m >= 0 else None


def _check_color(r: int, a: int):
    if not 0 <= a <= r - 2:
        raise ValueError(f"color {a} outside 0..{r - 2}")


def admissible(r: int, a: int, b: int, c: int) -> bool:
    for x in (a, b, c):
        _check_color(r, x)
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b and a + b + c < 2 * r - 2


def _in_range(r: int, colors: Sequence[int]) -> bool:
    return all(0 <= a <= r - 2 for a in colors)


def fusion_dim(disk: ColoredDisk) -> int:
    """Count admissible labelings of a left-comb fusion tree."""
    r, b, colors = disk.r, disk.outer, disk.colors
    if not _in_range(r, colors) or not _in_range(r, [b]):
        return 0
    if not colors:
        return int(b == 0)
    counts = {colors[0]: 1}
    for a in colors[1:]:
        nxt: dict[int, int] = {}
        for c, k in counts.items():
            for c2 in range(r - 1):
                if admissible(r, c, a, c2):
                    nxt[c2] = nxt.get(c2, 0) + k
        counts = nxt
    return counts.get(b, 0)


def fusion_dim_tree(r: int, b: int, colors: Sequence[int], tree) -> int:
    """Dimension through an arbitrary binary tree; leaves are slot indices, nodes are pairs."""

    def node_counts(t) -> dict[int, int]:
        if isinstance(t, int):
            return {colors[t]: 1}
        left, right = node_counts(t[0]), node_counts(t[1])
        out: dict[int, int] = {}
        for c1, k1 in left.items():
            for c2, k2 in right.items():
                for c in range(r - 1):
                    if admissible(r, c1, c2, c):
                        out[c] = out.get(c, 0) + k1 * k2
        return out

    if not _in_range(r, colors) or not _in_range(r, [b]):
        return 0
    return node_counts(tree).get(b, 0)


def random_tree(n: int, rng: random.Random):
    """A random binary tree whose leaves are 0..n-1 in order."""
    nodes: list = list(range(n))
    while len(nodes) > 1:
        i = rng.randrange(len(nodes) - 1)
        nodes[i:i + 2] = [(nodes[i], nodes[i + 1])]
    return nodes[0]


@dataclass
class FusionTable:
    r: int
    table: dict[tuple[int, int, int], int]

    @classmethod
    def build(cls, r: int) -> "FusionTable":
        rng = range(r - 1)
        return cls(r, {(a, b, c): int(admissible(r, a, b, c)) for a in rng for b in rng for c in rng})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "c", "admissible"])
        for (a, b, c), v in sorted(self.table.items()):
            w.writerow([a, b, c, v])
        return buf.getvalue()


# --------------------------------------------------------------------------
# gluing
# --------------------------------------------------------------------------


@dataclass
class GluingReport:
    disk: ColoredDisk
    split: int
    dim: int
    terms: dict[int, tuple[int, int]] = field(default_factory=dict)
    assembled_rank: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def verify_gluing(disk: ColoredDisk, n1: int) -> GluingReport:
    """Check dim(D) = sum_c dim(c; a_1..a_n1) dim(b; c, rest) and that the gluing map is onto."""
    from .braidrep import gluing_embed
    from .linalg import ExactMatrix
    from .qgroup import quantum_block

    n = disk.n
    if not 1 <= n1 < n:
        raise ValueError("split must satisfy 1 <= n1 < n")
    block = quantum_block(disk)
    report = GluingReport(disk, n1, block.dimension)
    left_colors, right_colors = disk.colors[:n1], disk.colors[n1:]
    columns = []
    total = 0
    for c in range(disk.r - 1):
        left = ColoredDisk(disk.r, c, left_colors)
        right = ColoredDisk(disk.r, disk.outer, (c,) + right_colors)
        if left.drop is None or right.drop is None:
            continue
        bl, br = quantum_block(left), quantum_block(right)
        if not bl.dimension or not br.dimension:
            continue
        report.terms[c] = (bl.dimension, br.dimension)
        total += bl.dimension * br.dimension
        for u in bl.sections.cols:
            for x in br.sections.cols:
                try:
                    v = gluing_embed(disk, n1, c, u, x)
                    columns.append(block.coordinates(v))
                except (ValueError, ArithmeticError) as exc:
                    report.failures.append(f"c={c}: {exc}")
    if total != block.dimension:
        report.failures.append(f"dimension mismatch: block {block.dimension} vs glued {total}")
    if columns:
        mat = ExactMatrix(block.dimension, len(columns), columns, block.field)
        report.assembled_rank = mat.rank()
    if report.assembled_rank != block.dimension:
        report.failures.append(f"assembled rank {report.assembled_rank} != dim {block.dimension}")
    return report


# --------------------------------------------------------------------------
# twists and the abelian functor
# --------------------------------------------------------------------------


def twist_scalar(r: int, a: int) -> CycNum:
    """t_a = q^{a(a+2)/2} = (-zeta_r)^{a(a+2)}."""
    return s_power(a * (a + 2), r)


def abelian_twist(r: int, a: int) -> CycNum:
    """t_a = q^{-a^2/2} = (-zeta_r)^{-a^2}."""
    return s_power(-a * a, r)


def abelian_dim(r: int, b: int, colors: Sequence[int]) -> int:
    """Rooted rule: 1 when sum a_i - b = 0 mod 2r, else 0."""
    CyclotomicField(r)
    return int((sum(colors) - b) % (2 * r) == 0)


def abelian_monodromy(r: int, colors: Sequence[int], m: int = 0) -> tuple[CycNum, list[CycNum]]:
    """Local-system monodromies: sigma_i -> -q^{-2}, tau_k -> q^{2 a_k}.

    `m` is the number of moving points; it must be non-negative and does not
    change the values.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    sigma = -s_power(-4, r)
    return sigma, [s_power(4 * a, r) for a in colors]
