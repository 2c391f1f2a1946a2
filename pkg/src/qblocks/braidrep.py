"""R-matrix and twist actions, the colored braid groupoid, and descent to blocks."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .cyclotomic import ONE, CyclotomicField, CycNum, LaurentHalf, qfact, s_power, specialize
from .linalg import LAURENT, ExactMatrix, Vector
from .qgroup import (
    FINITE,
    VERMA_E,
    VERMA_FBAR,
    QuantumBlock,
    WeightSpace,
    e_coeff,
    fbar_coeff,
    induced_form,
    quantum_block,
    specialized_tensor,
)

# --------------------------------------------------------------------------
# braid words
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"^(s|tw)(\d+)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Letter:
    kind: str  # "s" (sigma_i, strands i, i+1) or "tw" (twist of strand i)
    index: int  # 1-based
    power: int = 1

    def __str__(self):
        return f"{self.kind}{self.index}" + ("" if self.power == 1 else f"^{self.power}")


@dataclass(frozen=True)
class BraidWord:
    """A framed braid word; letters are applied left to right."""

    n: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        for L in self.letters:
            top = self.n - 1 if L.kind == "s" else self.n
            if not 1 <= L.index <= top:
                raise ValueError(f"letter {L} out of range for {self.n} strands")

    @classmethod
    def parse(cls, text: str, n: int) -> "BraidWord":
        letters = []
        for tok in filter(None, (t.strip() for t in text.split(","))):
            mt = _TOKEN.match(tok)
            if not mt:
                raise ValueError(f"bad braid token {tok!r}")
            p = int(mt.group(3)) if mt.group(3) is not None else 1
            if p:
                letters.append(Letter(mt.group(1), int(mt.group(2)), p))
        return cls(n, tuple(letters))

    def __str__(self):
        return ",".join(str(L) for L in self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.n != other.n:
            raise ValueError("strand count mismatch")
        return BraidWord(self.n, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n, tuple(Letter(L.kind, L.index, -L.power) for L in reversed(self.letters)))

    def permute(self, colors: Sequence[int]) -> tuple[int, ...]:
        """Colors after the word acts (sigma_i exchanges slots i and i+1)."""
        c = list(colors)
        for L in self.letters:
            if L.kind == "s" and L.power % 2:
                i = L.index - 1
                c[i], c[i + 1] = c[i + 1], c[i]
        return tuple(c)

    def is_pure(self) -> bool:
        return self.permute(range(self.n)) == tuple(range(self.n))


def pure_generator(i: int, j: int, n: int) -> BraidWord:
    """A_ij = (s_{j-1}..s_{i+1}) s_i^2 (s_{i+1}^{-1}..s_{j-1}^{-1}), 1 <= i < j <= n."""
    if not 1 <= i < j <= n:
        raise ValueError("need 1 <= i < j <= n")
    conj = [Letter("s", k) for k in range(j - 1, i, -1)]
    inv = [Letter("s", k, -1) for k in range(i + 1, j)]
    return BraidWord(n, tuple(conj + [Letter("s", i, 2)] + inv))


def random_pure_word(n: int, length: int, rng: random.Random, twists: bool = True) -> BraidWord:
    """Product of `length` random pure generators A_ij^{+-1} (and twists)."""
    word = BraidWord(n)
    for _ in range(length):
        if n >= 2 and (not twists or rng.random() < 0.8):
            i = rng.randint(1, n - 1)
            j = rng.randint(i + 1, n)
            g = pure_generator(i, j, n)
            word = word * (g if rng.random() < 0.5 else g.inverse())
        elif n >= 1:
            word = word * BraidWord(n, (Letter("tw", rng.randint(1, n), rng.choice((-1, 1))),))
    return word


# --------------------------------------------------------------------------
# R-matrix and twist
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _r_term(kind: str, a: int, ti: int, b: int, tj: int, n: int) -> LaurentHalf:
    """Coefficient of E^{(n)} (x) Fbar^n on e_ti (x) e_tj (equivalently E^n (x) Fbar^{(n)})."""
    if kind == FINITE:
        return e_coeff(kind, a, ti, n) * fbar_coeff(kind, b, tj, n) * qfact(n)
    if kind == VERMA_FBAR:
        return e_coeff(kind, a, ti, n)
    return fbar_coeff(kind, b, tj, n)


def _bound(kind: str, a: int) -> int | None:
    return a if kind == FINITE else None


def _pr_columns(colors: tuple[int, ...], kind: str, m: int, i: int, inverse: bool):
    """Sparse columns of PR_i (or its inverse) over the Laurent ring, with the target colors."""
    src = WeightSpace(colors, m, kind)
    tgt_colors = list(colors)
    tgt_colors[i], tgt_colors[i + 1] = tgt_colors[i + 1], tgt_colors[i]
    tgt = WeightSpace(tuple(tgt_colors), m, kind)
    cols = []
    for t in src.basis:
        col: dict[int, LaurentHalf] = {}
        if not inverse:
            a, b = colors[i], colors[i + 1]
            for n in range(t[i] + 1):
                u_i, u_j = t[i] - n, t[i + 1] + n
                bj = _bound(kind, b)
                if bj is not None and u_j > bj:
                    break
                c = _r_term(kind, a, t[i], b, t[i + 1], n)
                if not c:
                    continue
                c = c * LaurentHalf.s(n * (n - 1) + (a - 2 * u_i) * (b - 2 * u_j))
                w = list(t)
                w[i], w[i + 1] = u_j, u_i
                col[tgt.index[tuple(w)]] = c
        else:
            # (PR)^{-1} = Theta q^{-H(x)H/2} P with Theta = sum (-1)^n q^{-n(n-1)/2} E^{(n)} (x) Fbar^n
            a, b = colors[i + 1], colors[i]
            p_i, p_j = t[i + 1], t[i]
            pre = LaurentHalf.s(-(a - 2 * p_i) * (b - 2 * p_j))
            for n in range(p_i + 1):
                u_i, u_j = p_i - n, p_j + n
                bj = _bound(kind, b)
                if bj is not None and u_j > bj:
                    break
                c = _r_term(kind, a, p_i, b, p_j, n)
                if not c:
                    continue
                c = c * pre * LaurentHalf.s(-n * (n - 1))
                if n & 1:
                    c = -c
                w = list(t)
                w[i], w[i + 1] = u_i, u_j
                col[tgt.index[tuple(w)]] = c
        cols.append(col)
    return tuple(tgt_colors), tgt.dim, src.dim, cols


@lru_cache(maxsize=4096)
def pr_matrix(colors: tuple[int, ...], kind: str, m: int, i: int, r: int | None = None,
              inverse: bool = False) -> ExactMatrix:
    """PR on slots (i, i+1) (0-based) of the weight-m space; Laurent, or specialized at r."""
    tgt_colors, nt, ns, cols = _pr_columns(tuple(colors), kind, m, i, inverse)
    mat = ExactMatrix(nt, ns, cols, LAURENT)
    if r is not None:
        field = CyclotomicField(r)
        mat = mat.map(lambda v: specialize(v, field), field)
    return mat


def rmatrix(alpha: int, beta: int, kind: str, m: int) -> ExactMatrix:
    """R = q^{H(x)H/2} sum_n q^{n(n-1)/2} E^{(n)} (x) Fbar^n on the weight-m space of two factors."""
    P = pr_matrix((alpha, beta), kind, m, 0)
    swap_back = _swap_matrix((beta, alpha), kind, m)
    return swap_back @ P


def _swap_matrix(colors: tuple[int, int], kind: str, m: int) -> ExactMatrix:
    src = WeightSpace(colors, m, kind)
    tgt = WeightSpace((colors[1], colors[0]), m, kind)
    return ExactMatrix(tgt.dim, src.dim, [{tgt.index[(t[1], t[0])]: ONE} for t in src.basis])


@lru_cache(maxsize=None)
def twist_coefficients(alpha: int, kind: str, trunc: int | None = None) -> tuple[LaurentHalf, ...]:
    """Diagonal of v = (-1)^H q^{-H^2/2} sum_n (-1)^n q^{n(3n+1)/2} Fbar^{(n)} K^{-n-1} E^n."""
    top = alpha if kind == FINITE else trunc
    if top is None:
        raise ValueError("Verma twist needs a truncation bound")
    out = []
    for k in range(top + 1):
        lam = alpha - 2 * k
        total = LaurentHalf()
        for n in range(k + 1):
            if kind == FINITE:
                c = e_coeff(kind, alpha, k, n) * fbar_coeff(kind, alpha, k - n, n) * qfact(n)
            elif kind == VERMA_FBAR:
                c = e_coeff(kind, alpha, k, n)
            else:
                c = fbar_coeff(kind, alpha, k - n, n)
            if not c:
                continue
            term = c * LaurentHalf.s(n * (3 * n + 1) - 2 * (n + 1) * (lam + 2 * n))
            total = total - term if n & 1 else total + term
        total = total * LaurentHalf.s(-lam * lam)
        out.append(-total if lam & 1 else total)
    return tuple(out)


def twist_operator(alpha: int, kind: str = FINITE, trunc: int | None = None) -> ExactMatrix:
    return ExactMatrix.diagonal(list(twist_coefficients(alpha, kind, trunc)))


def twist_eigenvalue(alpha: int) -> LaurentHalf:
    """(-1)^alpha q^{-alpha(alpha+2)/2}."""
    v = LaurentHalf.s(-alpha * (alpha + 2))
    return -v if alpha & 1 else v


@lru_cache(maxsize=4096)
def twist_slot_matrix(colors: tuple[int, ...], kind: str, m: int, i: int, r: int | None = None,
                      power: int = 1) -> ExactMatrix:
    sp = WeightSpace(colors, m, kind)
    coeffs = twist_coefficients(colors[i], kind, None if kind == FINITE else m)
    if r is None:
        diag = [coeffs[t[i]] ** power if power >= 0 else _laurent_unit_inverse(coeffs[t[i]]) ** (-power)
                for t in sp.basis]
        return ExactMatrix.diagonal(diag)
    field = CyclotomicField(r)
    diag = [specialize(coeffs[t[i]], field) ** power for t in sp.basis]
    return ExactMatrix.diagonal(diag, field)


def _laurent_unit_inverse(x: LaurentHalf) -> LaurentHalf:
    return x ** -1


# --------------------------------------------------------------------------
# operators on tensors and blocks
# --------------------------------------------------------------------------


@dataclass
class ColoredOperator:
    source: tuple[int, ...]
    target: tuple[int, ...]
    matrix: ExactMatrix

    def __matmul__(self, other: "ColoredOperator") -> "ColoredOperator":
        if other.target != self.source:
            raise ValueError("color mismatch in composition")
        return ColoredOperator(other.source, self.target, self.matrix @ other.matrix)


def _letter_steps(word: BraidWord):
    for L in word.letters:
        if L.kind == "s":
            for _ in range(abs(L.power)):
                yield ("s", L.index - 1, L.power < 0)
        else:
            yield ("tw", L.index - 1, L.power)


def tensor_operator(colors: Sequence[int], word: BraidWord, kind: str, m: int,
                    r: int | None) -> ColoredOperator:
    colors = tuple(colors)
    if word.n != len(colors):
        raise ValueError("word strand count does not match the number of colors")
    field = CyclotomicField(r) if r is not None else LAURENT
    dim = WeightSpace(colors, m, kind).dim
    mat = ExactMatrix.identity(dim, field)
    cur = colors
    for kind_l, i, arg in _letter_steps(word):
        if kind_l == "s":
            step = pr_matrix(cur, kind, m, i, r, arg)
            nxt = list(cur)
            nxt[i], nxt[i + 1] = nxt[i + 1], nxt[i]
            cur = tuple(nxt)
        else:
            step = twist_slot_matrix(cur, kind, m, i, r, arg)
        mat = step @ mat
    return ColoredOperator(colors, cur, mat)


def apply_word(colors: Sequence[int], word: BraidWord, kind: str, m: int, r: int,
               v: Vector) -> tuple[tuple[int, ...], Vector]:
    """Apply the specialized word to a single vector, letter by letter."""
    cur = tuple(colors)
    for kind_l, i, arg in _letter_steps(word):
        if kind_l == "s":
            v = pr_matrix(cur, kind, m, i, r, arg).apply(v)
            nxt = list(cur)
            nxt[i], nxt[i + 1] = nxt[i + 1], nxt[i]
            cur = tuple(nxt)
        else:
            v = twist_slot_matrix(cur, kind, m, i, r, arg).apply(v)
    return cur, v


def image_operator(block: QuantumBlock, word: BraidWord, sections: ExactMatrix | None = None) -> ExactMatrix:
    """Matrix of the word on the block, in image-basis coordinates."""
    disk = block.disk
    colors = tuple(disk.colors)
    if word.n != len(colors):
        raise ValueError("word strand count does not match the number of colors")
    if word.permute(colors) != colors:
        raise ValueError("word does not preserve the color list (needs a pure word or equal colors)")
    d = block.dimension
    field = block.field
    if d == 0:
        return ExactMatrix.zeros(0, 0, field)
    m = block.m
    secs = block.sections if sections is None else sections
    ops = specialized_tensor(colors, VERMA_FBAR, disk.r)
    cols = []
    for x in secs.cols:
        _, y = apply_word(colors, word, VERMA_FBAR, m, disk.r, x)
        if m >= 1 and ops.E(m).apply(y):
            raise ArithmeticError("braid action left the highest-weight space")
        cols.append(block.coordinates(y))
    return ExactMatrix(d, d, cols, field)


def braid_matrix(disk, word: BraidWord, on: str = "image", kind: str = VERMA_FBAR) -> ColoredOperator:
    """Action of a framed braid word on the tensor weight space or on the block image."""
    colors = tuple(disk.colors)
    if on == "image":
        block = quantum_block(disk)
        return ColoredOperator(colors, colors, image_operator(block, word))
    if on != "tensor":
        raise ValueError("on must be 'image' or 'tensor'")
    total = sum(colors) - disk.outer
    if total < 0 or total % 2:
        raise ValueError("disk has no weight space (m is not a non-negative integer)")
    return tensor_operator(colors, word, kind, total // 2, disk.r)


@dataclass
class FormCheck:
    ok: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_form_invariance(disk, word: BraidWord, block: QuantumBlock | None = None,
                          form: ExactMatrix | None = None) -> FormCheck:
    """rho^dagger G rho == G on the block."""
    block = quantum_block(disk) if block is None else block
    G = induced_form(block) if form is None else form
    rho = image_operator(block, word)
    lhs = rho.conj_transpose() @ G @ rho
    if lhs == G:
        return FormCheck(True)
    diff = lhs - G
    bad = next((i, j) for j, col in enumerate(diff.cols) for i in col)
    return FormCheck(False, {"word": str(word), "entry": bad, "lhs": lhs[bad], "G": G[bad]})


# --------------------------------------------------------------------------
# gluing
# --------------------------------------------------------------------------


def gluing_embed(disk, n1: int, c: int, u: Vector, x: Vector) -> Vector:
    """comp(u, x) = sum_k (Fbar^k u) (x) v_k for x = sum_k e_k (x) v_k, in the full hw space."""
    r = disk.r
    colors = tuple(disk.colors)
    left, right = colors[:n1], colors[n1:]
    tl, tr = sum(left) - c, c + sum(right) - disk.outer
    if tl < 0 or tl % 2 or tr < 0 or tr % 2:
        raise ValueError("weight bookkeeping mismatch for the intermediate color")
    m1, m2 = tl // 2, tr // 2
    m = m1 + m2
    left_ops = specialized_tensor(left, VERMA_FBAR, r)
    right_sp = WeightSpace((c,) + right, m2, VERMA_FBAR)
    full = WeightSpace(colors, m, VERMA_FBAR)
    powers: list[Vector] = [dict(u)]
    out: Vector = {}
    for j, xv in x.items():
        t = right_sp.basis[j]
        k = t[0]
        while len(powers) <= k:
            powers.append(left_ops.Fbar(m1 + len(powers) - 1).apply(powers[-1]))
        lsp = left_ops.space(m1 + k)
        for i, uv in powers[k].items():
            key = full.index[lsp.basis[i] + t[1:]]
            val = out.get(key)
            term = uv * xv
            val = term if val is None else val + term
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    ops = specialized_tensor(colors, VERMA_FBAR, r)
    if m >= 1 and ops.E(m).apply(out):
        raise ArithmeticError("glued vector is not killed by E")
    if m >= r:
        col = ExactMatrix(full.dim, 1, [out], CyclotomicField(r))
        if not ops.ediv(r, m, start=col).is_zero():
            raise ArithmeticError("glued vector is not killed by E^{(r)}")
    return out
