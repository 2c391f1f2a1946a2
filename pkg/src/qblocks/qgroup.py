"""Modules of the restricted quantum group for sl2, tensor actions, pairings and blocks.

Conventions (s = q^{1/2}, specialized to -zeta_r):

* coproduct  E -> E(x)K + 1(x)E,  Fbar -> Fbar(x)1 + K^{-1}(x)Fbar,  K grouplike;
* FiniteV:   K e_i = q^{a-2i} e_i,  E e_i = [a-i+1] e_{i-1},  F e_i = [i+1] e_{i+1},  Fbar = (q-q^{-1}) F;
* VermaFbar: Fbar e_n = e_{n+1},  E^{(l)} e_n = [n l] prod_{k=1..l} (q^{a+k-n} - q^{-a-k+n}) e_{n-l};
* VermaE:    E e_n = e_{n-1},  Fbar^{(l)} e_n = [n+l l] prod_{k=0..l-1} (q^{a-k-n} - q^{-a+k+n}) e_{n+l}.

Tensor bases are weight spaces indexed by tuples (m_1, ..., m_n) in lexicographic order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .cyclotomic import (
    ONE,
    ZERO,
    CyclotomicField,
    CycNum,
    LaurentHalf,
    invert,
    qbinom,
    qfact,
    qint,
    s_power,
    specialize,
)
from .linalg import (
    LAURENT,
    ColumnEchelon,
    ExactMatrix,
    Quotient,
    RowEchelon,
    Vector,
    coordinates_in_echelon,
)

FINITE = "FiniteV"
VERMA_E = "VermaE"
VERMA_FBAR = "VermaFbar"
KINDS = (FINITE, VERMA_E, VERMA_FBAR)

GENERATORS = ("K", "Kinv", "KbinomR", "E", "Ediv", "Fbar")


def _q(e: int) -> LaurentHalf:
    return LaurentHalf._raw({2 * e: 1})


QMQ = _q(1) - _q(-1)  # q - q^{-1}


@dataclass(frozen=True)
class ModuleSpec:
    """A single factor: finite module V_alpha or a truncated Verma module."""

    kind: str
    alpha: int
    trunc: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown module kind {self.kind!r}")
        if self.kind == FINITE:
            if self.alpha < 0:
                raise ValueError("FiniteV needs alpha >= 0")
        elif self.trunc is None or self.trunc < 0:
            raise ValueError("Verma modules need a truncation bound >= 0")

    @property
    def top(self) -> int:
        return self.alpha if self.kind == FINITE else self.trunc

    @property
    def dim(self) -> int:
        return self.top + 1


@dataclass(frozen=True)
class Gen:
    """A generator label: K, Kinv, KbinomR (l = r), E, Ediv(l) or Fbar(l) (divided power)."""

    name: str
    l: int = 1

    def __post_init__(self):
        if self.name not in GENERATORS:
            raise ValueError(f"unknown generator {self.name!r}")
        if self.l < 0:
            raise ValueError("divided power index must be >= 0")

    @property
    def shift(self) -> int:
        """Change of the tuple-sum (weight drop) index."""
        if self.name in ("E", "Ediv"):
            return -self.l
        if self.name == "Fbar":
            return self.l
        return 0

    @classmethod
    def parse(cls, text: str | "Gen") -> "Gen":
        if isinstance(text, Gen):
            return text
        text = text.strip()
        if "(" in text:
            name, arg = text.rstrip(")").split("(")
            return cls(name, int(arg))
        return cls(text, 1)


# --------------------------------------------------------------------------
# single-factor actions over the Laurent ring
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def e_coeff(kind: str, alpha: int, i: int, l: int = 1) -> LaurentHalf:
    """Coefficient of E^{(l)} e_i -> e_{i-l} (E^l for VermaE, which has no divided powers)."""
    if l == 0:
        return ONE
    if i - l < 0:
        return ZERO
    if kind == FINITE:
        if i > alpha:
            return ZERO
        return qbinom(alpha - i + l, l)
    if kind == VERMA_FBAR:
        c = qbinom(i, l)
        for k in range(1, l + 1):
            c = c * (_q(alpha + k - i) - _q(-alpha - k + i))
        return c
    return ONE  # VermaE: plain power E^l


@lru_cache(maxsize=None)
def fbar_coeff(kind: str, alpha: int, i: int, l: int = 1) -> LaurentHalf:
    """Coefficient of Fbar^{(l)} e_i -> e_{i+l} (Fbar^l for VermaFbar)."""
    if l == 0:
        return ONE
    if i < 0:
        return ZERO
    if kind == FINITE:
        if i + l > alpha:
            return ZERO
        return QMQ ** l * qbinom(i + l, l)
    if kind == VERMA_E:
        c = qbinom(i + l, l)
        for k in range(l):
            c = c * (_q(alpha - k - i) - _q(-alpha + k + i))
        return c
    return ONE  # VermaFbar: plain power Fbar^l


def _divided_available(kind: str, name: str, l: int) -> bool:
    if l <= 1:
        return True
    if name in ("E", "Ediv") and kind == VERMA_E:
        return False
    if name == "Fbar" and kind == VERMA_FBAR:
        return False
    return True


def generator_matrix(spec: ModuleSpec, g: Gen | str, r: int | None = None) -> ExactMatrix:
    """Action matrix of g on the basis e_0..e_top over the Laurent ring.

    Truncated Verma modules drop vectors pushed beyond the truncation bound.
    KbinomR needs the level r.
    """
    g = Gen.parse(g)
    if not _divided_available(spec.kind, g.name, g.l):
        raise ValueError(f"{g.name}({g.l}) is not defined on the integral {spec.kind} module")
    n = spec.dim
    cols: list[Vector] = []
    for i in range(n):
        w = spec.alpha - 2 * i
        if g.name == "K":
            cols.append({i: _q(w)})
        elif g.name == "Kinv":
            cols.append({i: _q(-w)})
        elif g.name == "KbinomR":
            if r is None:
                raise ValueError("KbinomR needs r")
            cols.append({i: qbinom(w, r)})
        elif g.name in ("E", "Ediv"):
            j = i - g.l
            cols.append({j: e_coeff(spec.kind, spec.alpha, i, g.l)} if j >= 0 else {})
        else:
            j = i + g.l
            cols.append({j: fbar_coeff(spec.kind, spec.alpha, i, g.l)} if j < n else {})
    return ExactMatrix(n, n, cols, LAURENT)


def finite_f_matrix(alpha: int) -> ExactMatrix:
    """Undivided F on V_alpha (F = Fbar / (q - q^{-1}))."""
    n = alpha + 1
    return ExactMatrix(n, n, [{i + 1: qint(i + 1)} if i + 1 < n else {} for i in range(n)], LAURENT)


# --------------------------------------------------------------------------
# weight spaces
# --------------------------------------------------------------------------


def compositions(m: int, bounds: Sequence[int | None]) -> list[tuple[int, ...]]:
    """All tuples with sum m and t_i <= bounds[i] (None = unbounded), lexicographic order."""
    n = len(bounds)
    if n == 0:
        return [()] if m == 0 else []
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], i: int, left: int):
        if i == n - 1:
            b = bounds[i]
            if b is None or left <= b:
                out.append(tuple(prefix + [left]))
            return
        b = bounds[i]
        top = left if b is None else min(left, b)
        for t in range(top + 1):
            prefix.append(t)
            rec(prefix, i + 1, left - t)
            prefix.pop()

    if m >= 0:
        rec([], 0, m)
    return out


@dataclass(frozen=True)
class WeightSpace:
    """Tuples (m_1..m_n) with sum m in a tensor product of one module kind."""

    colors: tuple[int, ...]
    m: int
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(self.colors))
        if self.kind not in KINDS:
            raise ValueError(f"unknown module kind {self.kind!r}")

    @cached_property
    def basis(self) -> list[tuple[int, ...]]:
        bounds = [a for a in self.colors] if self.kind == FINITE else [None] * len(self.colors)
        return compositions(self.m, bounds)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {t: i for i, t in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def weight(self) -> int:
        return sum(self.colors) - 2 * self.m

    def shift(self, dm: int) -> "WeightSpace":
        return WeightSpace(self.colors, self.m + dm, self.kind)

    def vector(self, coeffs: dict[tuple[int, ...], object]) -> Vector:
        return {self.index[t]: c for t, c in coeffs.items() if c}

    def as_tuples(self, v: Vector) -> dict[tuple[int, ...], object]:
        return {self.basis[i]: c for i, c in v.items()}


# --------------------------------------------------------------------------
# tensor actions
# --------------------------------------------------------------------------


def _slot_set(n: int, slots: Iterable[int] | None) -> tuple[int, ...]:
    return tuple(range(n)) if slots is None else tuple(sorted(slots))


def _tensor_e_laurent(space: WeightSpace, slots: tuple[int, ...]) -> ExactMatrix:
    tgt = space.shift(-1)
    cols = []
    a = space.colors
    for t in space.basis:
        col: dict[int, LaurentHalf] = {}
        for pos, i in enumerate(slots):
            if t[i] == 0:
                continue
            c = e_coeff(space.kind, a[i], t[i])
            if not c:
                continue
            kexp = sum(a[j] - 2 * t[j] for j in slots[pos + 1:])
            u = list(t)
            u[i] -= 1
            j = tgt.index.get(tuple(u))
            if j is not None:
                col[j] = c * _q(kexp)
        cols.append(col)
    return ExactMatrix(tgt.dim, space.dim, cols, LAURENT)


def _tensor_fbar_laurent(space: WeightSpace, slots: tuple[int, ...]) -> ExactMatrix:
    tgt = space.shift(1)
    cols = []
    a = space.colors
    for t in space.basis:
        col: dict[int, LaurentHalf] = {}
        for pos, i in enumerate(slots):
            c = fbar_coeff(space.kind, a[i], t[i])
            if not c:
                continue
            kexp = -sum(a[j] - 2 * t[j] for j in slots[:pos])
            u = list(t)
            u[i] += 1
            j = tgt.index.get(tuple(u))
            if j is not None:
                col[j] = c * _q(kexp)
        cols.append(col)
    return ExactMatrix(tgt.dim, space.dim, cols, LAURENT)


def tensor_generator(space: WeightSpace, g: Gen | str, slots: Iterable[int] | None = None,
                     r: int | None = None) -> ExactMatrix:
    """Matrix of g from `space` to `space.shift(g.shift)`, over the Laurent ring.

    E, Fbar act through the coproduct on the chosen slots (all by default).
    Divided powers are the l-th power divided entrywise by [l]!, exactly.
    """
    g = Gen.parse(g)
    sl = _slot_set(len(space.colors), slots)
    if g.name in ("K", "Kinv", "KbinomR"):
        cols = []
        for t in space.basis:
            w = sum(space.colors[i] - 2 * t[i] for i in sl)
            if g.name == "K":
                cols.append({len(cols): _q(w)})
            elif g.name == "Kinv":
                cols.append({len(cols): _q(-w)})
            else:
                if r is None:
                    raise ValueError("KbinomR needs r")
                cols.append({len(cols): qbinom(w, r)})
        return ExactMatrix(space.dim, space.dim, cols, LAURENT)
    step = _tensor_e_laurent if g.name in ("E", "Ediv") else _tensor_fbar_laurent
    sign = -1 if g.name in ("E", "Ediv") else 1
    tgt = space.shift(sign * g.l)
    if g.l == 0:
        return ExactMatrix.identity(space.dim)
    mat = None
    cur = space
    for _ in range(g.l):
        if cur.m < 0 or cur.dim == 0:
            return ExactMatrix.zeros(max(tgt.dim, 0), space.dim)
        step_mat = step(cur, sl)
        mat = step_mat if mat is None else step_mat @ mat
        cur = cur.shift(sign)
    if g.l > 1:
        f = qfact(g.l)
        mat = mat.map(lambda v: v.exact_div(f))
    return mat


# --------------------------------------------------------------------------
# specialized tensor operators (fast path)
# --------------------------------------------------------------------------


class SpecializedTensor:
    """Specialized E, Fbar and their divided powers on weight spaces of one tensor product.

    Divided powers of order l < r are computed as sp(E^l) * sp([l]!)^{-1};
    orders r <= l < 2r use first-order expansion at s = -zeta (dual numbers),
    since [l]! then has a simple zero there: sp(E^{(l)}) = (E^l)'(s0) / ([l]!)'(s0).
    """

    def __init__(self, colors: Sequence[int], kind: str, r: int):
        self.colors = tuple(colors)
        self.kind = kind
        self.field = CyclotomicField(r)
        self.r = r
        self._cache: dict = {}

    def space(self, m: int) -> WeightSpace:
        key = ("space", m)
        sp = self._cache.get(key)
        if sp is None:
            sp = self._cache[key] = WeightSpace(self.colors, m, self.kind)
        return sp

    def _pair(self, x: LaurentHalf) -> tuple[CycNum, CycNum]:
        return specialize(x, self.field), specialize(x.derivative(), self.field)

    def _build(self, name: str, m: int):
        """(value, derivative) matrices of E (W_m -> W_{m-1}) or Fbar (W_m -> W_{m+1})."""
        key = (name, m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        sp = self.space(m)
        lau = _tensor_e_laurent(sp, tuple(range(len(self.colors)))) if name == "E" else \
            _tensor_fbar_laurent(sp, tuple(range(len(self.colors))))
        vcols, dcols = [], []
        for col in lau.cols:
            vc, dc = {}, {}
            for i, x in col.items():
                v, d = self._pair(x)
                if v:
                    vc[i] = v
                if d:
                    dc[i] = d
            vcols.append(vc)
            dcols.append(dc)
        out = (ExactMatrix(lau.nrows, lau.ncols, vcols, self.field),
               ExactMatrix(lau.nrows, lau.ncols, dcols, self.field))
        self._cache[key] = out
        return out

    def E(self, m: int) -> ExactMatrix:
        return self._build("E", m)[0]

    def Fbar(self, m: int) -> ExactMatrix:
        return self._build("Fbar", m)[0]

    def _chain(self, name: str, l: int, m: int, start: ExactMatrix | None, need_derivative: bool):
        sign = -1 if name == "E" else 1
        val = start if start is not None else ExactMatrix.identity(self.space(m).dim, self.field)
        der = ExactMatrix.zeros(val.nrows, val.ncols, self.field) if need_derivative else None
        cur = m
        for _ in range(l):
            if self.space(cur + sign).dim == 0 or (name == "E" and cur + sign < 0):
                return None
            V, D = self._build(name, cur)
            if need_derivative:
                der = V @ der + D @ val
            val = V @ val
            cur += sign
        return val, der

    def divided(self, name: str, l: int, m: int, start: ExactMatrix | None = None) -> ExactMatrix:
        """Specialized E^{(l)} or Fbar^{(l)} from W_m, optionally applied to the columns of `start`."""
        sign = -1 if name == "E" else 1
        tgt = self.space(m + sign * l) if m + sign * l >= 0 else None
        ncols = start.ncols if start is not None else self.space(m).dim
        if tgt is None or tgt.dim == 0:
            return ExactMatrix.zeros(0 if tgt is None else tgt.dim, ncols, self.field)
        if l == 0:
            return start if start is not None else ExactMatrix.identity(self.space(m).dim, self.field)
        r = self.r
        if l < r:
            res = self._chain(name, l, m, start, False)
            if res is None:
                return ExactMatrix.zeros(tgt.dim, ncols, self.field)
            return res[0].scale(invert(specialize(qfact(l), self.field)))
        if l >= 2 * r:
            raise NotImplementedError("divided powers of order >= 2r are not needed here")
        res = self._chain(name, l, m, start, True)
        if res is None:
            return ExactMatrix.zeros(tgt.dim, ncols, self.field)
        val, der = res
        if not val.is_zero():
            raise ArithmeticError("power is not divisible by [l]! at the root of unity")
        dfact = specialize(qfact(l).derivative(), self.field)
        return der.scale(invert(dfact))

    def ediv(self, l: int, m: int, start: ExactMatrix | None = None) -> ExactMatrix:
        return self.divided("E", l, m, start)

    def fbar_div(self, l: int, m: int, start: ExactMatrix | None = None) -> ExactMatrix:
        return self.divided("Fbar", l, m, start)


@lru_cache(maxsize=256)
def specialized_tensor(colors: tuple[int, ...], kind: str, r: int) -> SpecializedTensor:
    return SpecializedTensor(colors, kind, r)


# --------------------------------------------------------------------------
# disks, blocks, red, pairing
# --------------------------------------------------------------------------


def _disk_data(disk) -> tuple[int, int, tuple[int, ...], int | None]:
    r, b, colors = disk.r, disk.outer, tuple(disk.colors)
    total = sum(colors) - b
    m = total // 2 if total >= 0 and total % 2 == 0 else None
    return r, b, colors, m


def colors_in_range(disk) -> bool:
    """Colors and outer color inside the computed range (0..r-1 inner, 0..r-2 outer)."""
    r = disk.r
    return 0 <= disk.outer <= r - 2 and all(0 <= a <= r - 1 for a in disk.colors)


@lru_cache(maxsize=None)
def red_coefficient_laurent(alpha: int, i: int) -> LaurentHalf:
    c = QMQ ** i * qfact(i)
    for k in range(i):
        c = c * qint(alpha - k)
    return c


def red_coefficient(alpha: int, i: int, r: int) -> CycNum:
    """Diagonal entry of red on e_i of the Verma module of weight alpha, specialized."""
    return specialize(red_coefficient_laurent(alpha, i), r)


def _red_tuple(colors: Sequence[int], t: Sequence[int], field: CyclotomicField) -> CycNum:
    c = field.one
    for a, k in zip(colors, t):
        if k:
            c = c * specialize(red_coefficient_laurent(a, k), field)
            if not c:
                return c
    return c


def red_matrix(disk) -> ExactMatrix:
    """Diagonal red on the weight space, tuple basis, specialized at zeta_r."""
    r, b, colors, m = _disk_data(disk)
    field = CyclotomicField(r)
    if m is None:
        return ExactMatrix.zeros(0, 0, field)
    sp = WeightSpace(colors, m, VERMA_FBAR)
    return ExactMatrix(sp.dim, sp.dim, [{j: _red_tuple(colors, t, field)} for j, t in enumerate(sp.basis)], field)


def pairing_exponent(colors: Sequence[int], k: Sequence[int]) -> int:
    """f(k) = sum_{i != j} a_i k_j - 2 sum_{i<j} k_i k_j (a power of q)."""
    A, K = sum(colors), sum(k)
    cross = sum(a * kk for a, kk in zip(colors, k))
    sq = sum(kk * kk for kk in k)
    return A * K - cross - (K * K - sq)


def pairing_matrix(disk) -> ExactMatrix:
    """Gram matrix of the VermaFbar x VermaE pairing on the tuple basis."""
    r, b, colors, m = _disk_data(disk)
    field = CyclotomicField(r)
    if m is None:
        return ExactMatrix.zeros(0, 0, field)
    sp = WeightSpace(colors, m, VERMA_FBAR)
    return ExactMatrix(sp.dim, sp.dim, [{j: s_power(2 * pairing_exponent(colors, t), field)}
                                        for j, t in enumerate(sp.basis)], field)


def highest_weight_space(disk) -> ExactMatrix:
    """Columns: basis of ker E and ker E^{(r)} on the VermaFbar weight space."""
    r, b, colors, m = _disk_data(disk)
    field = CyclotomicField(r)
    if m is None:
        return ExactMatrix.zeros(0, 0, field)
    ops = specialized_tensor(colors, VERMA_FBAR, r)
    sp = ops.space(m)
    if m == 0:
        return ExactMatrix.identity(sp.dim, field)
    ker = ops.E(m).kernel()
    if m >= r and ker.ncols:
        # E^{(r)} restricted to ker E: only the derivative of the first factor survives
        img = ops.ediv(r, m, start=ker)
        coeff = img.kernel()
        ker = ker @ coeff
    return ker


def coinvariant_presentation(disk) -> Quotient:
    """Quotient of the VermaE weight space by im Fbar^{(1)} + im Fbar^{(r)}."""
    r, b, colors, m = _disk_data(disk)
    field = CyclotomicField(r)
    if m is None:
        return Quotient(0, field, {})
    ops = specialized_tensor(colors, VERMA_E, r)
    sp = ops.space(m)
    spanning: list[Vector] = []
    if m >= 1:
        spanning.extend(ops.Fbar(m - 1).cols)
    if m >= r:
        spanning.extend(ops.fbar_div(r, m - r).cols)
    return Quotient.build(sp.dim, field, spanning)


@dataclass
class QuantumBlock:
    """The image of hw vectors under red, modulo coinvariants."""

    disk: object
    hw_basis: ExactMatrix
    quotient: Quotient
    image_basis: ExactMatrix
    pivots: list[int]
    sections: ExactMatrix
    red_diag: list[CycNum] = field(repr=False, default_factory=list)

    @property
    def dimension(self) -> int:
        return self.image_basis.ncols

    @property
    def r(self) -> int:
        return self.disk.r

    @property
    def m(self) -> int | None:
        return _disk_data(self.disk)[3]

    @property
    def field(self) -> CyclotomicField:
        return CyclotomicField(self.disk.r)

    @property
    def space(self) -> WeightSpace:
        return WeightSpace(tuple(self.disk.colors), self.m or 0, VERMA_FBAR)

    @property
    def coinv_projection(self) -> ExactMatrix:
        return self.quotient.matrix()

    def red(self, v: Vector) -> Vector:
        out = {}
        for i, x in v.items():
            c = self.red_diag[i]
            if c:
                out[i] = c * x
        return out

    def image_of(self, v: Vector) -> Vector:
        """Class of red(v) in quotient coordinates."""
        return self.quotient.project(self.red(v))

    def coordinates(self, v: Vector) -> Vector:
        """Coordinates of red(v) in the image basis; ValueError if outside the image."""
        return coordinates_in_echelon(self.image_basis, self.pivots, self.image_of(v))

    def to_json(self) -> dict:
        rows = self.image_basis.to_rows()
        return {
            "r": self.disk.r,
            "outer": self.disk.outer,
            "colors": list(self.disk.colors),
            "dim": self.dimension,
            "image_basis": [[v.to_json() for v in row] for row in rows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _empty_block(disk) -> QuantumBlock:
    field = CyclotomicField(disk.r)
    z = ExactMatrix.zeros(0, 0, field)
    return QuantumBlock(disk, z, Quotient(0, field, {}), z, [], z, [])


def quantum_block(disk) -> QuantumBlock:
    """Assemble hw space, red, coinvariants and the canonical image basis."""
    r, b, colors, m = _disk_data(disk)
    if m is None or not colors_in_range(disk):
        return _empty_block(disk)
    field = CyclotomicField(r)
    hw = highest_weight_space(disk)
    quot = coinvariant_presentation(disk)
    sp = WeightSpace(colors, m, VERMA_FBAR)
    red_diag = [_red_tuple(colors, t, field) for t in sp.basis]
    block = QuantumBlock(disk, hw, quot, ExactMatrix.zeros(quot.dim, 0, field), [],
                         ExactMatrix.zeros(sp.dim, 0, field), red_diag)
    ech = ColumnEchelon()
    chosen, images = [], []
    for j, col in enumerate(hw.cols):
        y = block.image_of(col)
        if y and ech.insert(dict(y)) is not None:
            chosen.append(j)
            images.append(y)
    if not chosen:
        return block
    Z = ExactMatrix(quot.dim, len(images), images, field)
    Y, pivots = Z.column_echelon()
    T = Z.solve(Y)
    block.image_basis = Y
    block.pivots = pivots
    block.sections = hw.select_columns(chosen) @ T
    return block


# --------------------------------------------------------------------------
# bar involution and the induced form
# --------------------------------------------------------------------------


def bar_involution(colors: Sequence[int], m: int, v: Vector, r: int) -> Vector:
    """psi on the VermaE weight space: conjugate coordinates, then apply the quasi-R-matrices.

    psi_{X(x)V} = Theta_{X,V} (psi_X (x) psi_V), Theta = sum_l (-1)^l q^{-l(l-1)/2} E^l (x) Fbar^{(l)}.
    """
    field = CyclotomicField(r)
    sp = WeightSpace(tuple(colors), m, VERMA_E)
    n = len(colors)
    cur = {sp.basis[i]: x.conj() for i, x in v.items() if x}
    for k in range(1, n):
        total = dict(cur)
        u = cur
        l = 0
        while u:
            l += 1
            u = _apply_e_prefix(colors, k, u, field)
            if not u:
                break
            pref = s_power(-l * (l - 1), field)
            if l & 1:
                pref = -pref
            for t, x in u.items():
                c = specialize(fbar_coeff(VERMA_E, colors[k], t[k], l), field)
                if not c:
                    continue
                w = list(t)
                w[k] += l
                w = tuple(w)
                val = total.get(w)
                term = pref * c * x
                val = term if val is None else val + term
                if val:
                    total[w] = val
                else:
                    total.pop(w, None)
        cur = total
    return {sp.index[t]: x for t, x in cur.items() if x}


def _apply_e_prefix(colors, k, u: dict, field) -> dict:
    """Coproduct E on slots 0..k-1 of VermaE tensors, on tuple-keyed vectors."""
    out: dict = {}
    for t, x in u.items():
        for i in range(k):
            if t[i] == 0:
                continue
            kexp = sum(colors[j] - 2 * t[j] for j in range(i + 1, k))
            w = list(t)
            w[i] -= 1
            w = tuple(w)
            term = s_power(2 * kexp, field) * x
            val = out.get(w)
            val = term if val is None else val + term
            if val:
                out[w] = val
            else:
                out.pop(w, None)
    return out


def form_value(block: QuantumBlock, x: Vector, y: Vector) -> CycNum:
    """s_D(x, y): linear in x, antilinear in y, for hw vectors x, y (tuple basis)."""
    r, b, colors, m = _disk_data(block.disk)
    field = block.field
    sp = block.space
    z = bar_involution(colors, m, block.red(y), r)
    acc = field.zero
    for i, xv in x.items():
        zv = z.get(i)
        if zv is not None:
            acc = acc + xv * zv * s_power(2 * pairing_exponent(colors, sp.basis[i]), field)
    return acc * s_power(-2 * (m * (m + b) + m), field)


def induced_form(block: QuantumBlock) -> ExactMatrix:
    """Gram matrix G of s_D on the image basis, with H(u, v) = u^dagger G v.

    G^dagger = (-1)^m G, and rho^dagger G rho = G for the braid action.
    """
    d = block.dimension
    field = block.field
    secs = block.sections.cols
    cols = []
    for j in range(d):
        col = {}
        for i in range(d):
            v = form_value(block, secs[j], secs[i])
            if v:
                col[i] = v
        cols.append(col)
    return ExactMatrix(d, d, cols, field)


def hermitian_form(block: QuantumBlock) -> ExactMatrix:
    """h_D = (q - q^{-1})^{-m} s_D, a hermitian matrix."""
    m = block.m or 0
    scale = invert(specialize(QMQ, block.field)) ** m if m else block.field.one
    return induced_form(block).scale(scale)


# --------------------------------------------------------------------------
# Jones-Wenzl embeddings V_n <-> V_1^{(x)n}
# --------------------------------------------------------------------------


def binary_space(n: int) -> list[tuple[int, ...]]:
    """Basis of V_1^{(x)n}: all 0/1 tuples, by weight drop then lexicographically."""
    out: list[tuple[int, ...]] = []
    for m in range(n + 1):
        out.extend(compositions(m, [1] * n))
    return out


def _tensor_f_finite(n: int, m: int) -> ExactMatrix:
    """Undivided F (coproduct F(x)1 + K^{-1}(x)F) from W_m to W_{m+1} on V_1^{(x)n}."""
    mat = _tensor_fbar_laurent(WeightSpace((1,) * n, m, FINITE), tuple(range(n)))
    return mat.map(lambda v: v.exact_div(QMQ))


def jw_embed(n: int, r: int | None = None) -> ExactMatrix:
    """i_n: V_n -> V_1^{(x)n}, e_j -> F^{(j)} e_0^{(x)n}; Laurent, or specialized when r is given."""
    if n < 0 or (r is not None and n > r - 1):
        raise ValueError("jw_embed needs 0 <= n <= r-1")
    basis = binary_space(n)
    index = {t: i for i, t in enumerate(basis)}
    cols = []
    power = ExactMatrix.identity(1)
    for j in range(n + 1):
        if j:
            power = _tensor_f_finite(n, j - 1) @ power
        sp = WeightSpace((1,) * n, j, FINITE)
        f = qfact(j)
        col = {index[sp.basis[i]]: x.exact_div(f) for i, x in power.cols[0].items()}
        cols.append(col)
    mat = ExactMatrix(len(basis), n + 1, cols, LAURENT)
    if r is not None:
        field = CyclotomicField(r)
        mat = mat.map(lambda v: specialize(v, field), field)
    return mat


def jw_project(n: int, r: int) -> ExactMatrix:
    """p_n: V_1^{(x)n} -> V_n, the U-map with p_n i_n = id (via e_0-dual of E^{(j)} / [n j])."""
    if n < 0 or n > r - 1:
        raise ValueError("jw_project needs 0 <= n <= r-1")
    field = CyclotomicField(r)
    basis = binary_space(n)
    cols = []
    for t in basis:
        j = sum(t)
        sp = WeightSpace((1,) * n, j, FINITE)
        ediv = tensor_generator(sp, Gen("Ediv", j)) if j else ExactMatrix.identity(1)
        coeff = ediv.cols[sp.index[t]].get(0, ZERO)
        val = specialize(coeff, field) * invert(specialize(qbinom(n, j), field))
        cols.append({j: val} if val else {})
    return ExactMatrix(n + 1, len(basis), cols, field)
