"""Temperley-Lieb diagrams, Jones-Wenzl projectors, flat words and the skein form."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .cyclotomic import CyclotomicField, CycNum, LaurentHalf, qint, specialize
from .linalg import LAURENT, ExactMatrix
from .qgroup import FINITE, WeightSpace, compositions

DELTA = -(LaurentHalf.s(2) + LaurentHalf.s(-2))  # value of a closed loop, -(q + q^{-1})


# --------------------------------------------------------------------------
# diagrams
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TLDiagram:
    """Planar matching between `bottom` points (0..bottom-1) and `top` points (bottom..bottom+top-1).

    Both rows are numbered left to right. Composition x * y places x above y.
    """

    bottom: int
    top: int
    matching: tuple[int, ...]

    def __post_init__(self):
        N = self.bottom + self.top
        M = self.matching
        if len(M) != N or any(not 0 <= M[i] < N or M[i] == i or M[M[i]] != i for i in range(N)):
            raise ValueError("matching is not a fixed-point-free involution")
        if not _is_planar(self.bottom, self.top, M):
            raise ValueError("matching is not planar")

    @property
    def n(self) -> int:
        if self.bottom != self.top:
            raise ValueError("rectangular diagram")
        return self.bottom

    def through_strands(self) -> int:
        return sum(1 for i in range(self.bottom) if self.matching[i] >= self.bottom)

    def reflect(self) -> "TLDiagram":
        """Mirror top and bottom."""
        b, t = self.bottom, self.top

        def f(p: int) -> int:
            return p + t if p < b else p - b

        M = [0] * (b + t)
        for p in range(b + t):
            M[f(p)] = f(self.matching[p])
        return TLDiagram(t, b, tuple(M))

    def tensor(self, other: "TLDiagram") -> "TLDiagram":
        """Place `other` to the right."""
        b1, t1, b2, t2 = self.bottom, self.top, other.bottom, other.top

        def f1(p):
            return p if p < b1 else p - b1 + b1 + b2

        def f2(p):
            return p + b1 if p < b2 else p - b2 + b1 + b2 + t1

        M = [0] * (b1 + b2 + t1 + t2)
        for p in range(b1 + t1):
            M[f1(p)] = f1(self.matching[p])
        for p in range(b2 + t2):
            M[f2(p)] = f2(other.matching[p])
        return TLDiagram(b1 + b2, t1 + t2, tuple(M))


def _is_planar(bottom: int, top: int, M: tuple[int, ...]) -> bool:
    # walk the boundary circle: bottom left-to-right, then top right-to-left
    order = list(range(bottom)) + list(range(bottom + top - 1, bottom - 1, -1))
    pos = {p: i for i, p in enumerate(order)}
    stack = []
    for p in order:
        q = M[p]
        if pos[q] > pos[p]:
            stack.append(p)
        else:
            if not stack or stack.pop() != q:
                return False
    return True


def tl_identity(n: int) -> TLDiagram:
    return TLDiagram(n, n, tuple(list(range(n, 2 * n)) + list(range(n))))


def tl_generator(k: int, n: int) -> TLDiagram:
    """e_k: cap on bottom points k-1, k and cup on top points k-1, k (1-based k)."""
    if not 1 <= k <= n - 1:
        raise ValueError("generator index out of range")
    M = list(range(n, 2 * n)) + list(range(n))
    a, b = k - 1, k
    M[a], M[b] = b, a
    M[n + a], M[n + b] = n + b, n + a
    return TLDiagram(n, n, tuple(M))


def compose(x: TLDiagram, y: TLDiagram) -> tuple[TLDiagram, int]:
    """x above y: returns the diagram and the number of closed loops."""
    if y.top != x.bottom:
        raise ValueError("cannot compose: size mismatch")
    yb, mid, xt = y.bottom, y.top, x.top
    # outer labels: y bottom 0..yb-1, x top yb..yb+xt-1
    visited_mid = [False] * mid

    def walk_from_y(p_y: int) -> int:
        """Start at point p_y of y; follow until reaching an outer point."""
        side, p = "y", p_y
        while True:
            if side == "y":
                q = y.matching[p]
                if q < yb:
                    return q
                j = q - yb
                visited_mid[j] = True
                side, p = "x", j
            else:
                q = x.matching[p]
                if q >= x.bottom:
                    return yb + (q - x.bottom)
                visited_mid[q] = True
                side, p = "y", yb + q

    M = [0] * (yb + xt)
    for p in range(yb):
        M[p] = walk_from_y(p)
    for t in range(xt):
        # start from the x top point
        q = x.matching[x.bottom + t]
        if q >= x.bottom:
            M[yb + t] = yb + (q - x.bottom)
            continue
        visited_mid[q] = True
        M[yb + t] = walk_from_y(yb + q)
    loops = 0
    for j in range(mid):
        if visited_mid[j]:
            continue
        loops += 1
        side, p = "x", j
        while True:
            if side == "x":
                visited_mid[p] = True
                q = x.matching[p]
                visited_mid[q] = True
                side, p = "y", yb + q
            else:
                q = y.matching[p] - yb
                if visited_mid[q]:
                    break
                side, p = "x", q
    return TLDiagram(yb, xt, tuple(M)), loops


# --------------------------------------------------------------------------
# linear combinations
# --------------------------------------------------------------------------


class TLElement:
    """Formal linear combination of diagrams; coefficients in any commutative ring."""

    __slots__ = ("terms", "delta")

    def __init__(self, terms: Mapping[TLDiagram, object], delta=DELTA):
        self.terms = {d: c for d, c in terms.items() if c}
        self.delta = delta

    @classmethod
    def diagram(cls, d: TLDiagram, one=None, delta=DELTA) -> "TLElement":
        return cls({d: LaurentHalf(1) if one is None else one}, delta)

    def __add__(self, other: "TLElement") -> "TLElement":
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms[d] + c if d in terms else c
        return TLElement(terms, self.delta)

    def __sub__(self, other: "TLElement") -> "TLElement":
        return self + other.scale(-1)

    def scale(self, c) -> "TLElement":
        return TLElement({d: c * v for d, v in self.terms.items()}, self.delta)

    def __mul__(self, other: "TLElement") -> "TLElement":
        return tl_multiply(self, other)

    def tensor_id(self) -> "TLElement":
        one = tl_identity(1)
        return TLElement({d.tensor(one): c for d, c in self.terms.items()}, self.delta)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return f"TLElement({len(self.terms)} terms)"


def tl_multiply(x: TLElement, y: TLElement, n: int | None = None) -> TLElement:
    """Product x*y (x above y); each closed loop contributes the factor delta."""
    terms: dict[TLDiagram, object] = {}
    delta = x.delta
    for dx, cx in x.terms.items():
        for dy, cy in y.terms.items():
            if n is not None and (dx.bottom != n or dy.top != n):
                raise ValueError("size mismatch")
            d, loops = compose(dx, dy)
            c = cx * cy
            for _ in range(loops):
                c = c * delta
            terms[d] = terms[d] + c if d in terms else c
    return TLElement(terms, delta)


def _generic_field():
    from sympy import QQ
    from sympy.polys.fields import field

    return field("s", QQ)


def laurent_to_generic(x: LaurentHalf):
    """Image of a Laurent polynomial in the rational function field Q(s)."""
    K, s = _generic_field()
    out = K(0)
    for e, c in x.items():
        out += c * s ** e
    return out


def jones_wenzl(n: int, r: int | None = None) -> TLElement:
    """f_n by the recursion f_{k+1} = f_k (x) 1 + ([k]/[k+1]) (f_k (x) 1) e_k (f_k (x) 1).

    Coefficients live in Q(s) (generic) or in Q(zeta_r) when r is given (needs n <= r-1).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if r is not None:
        if n > r - 1:
            raise ValueError("f_n needs invertible [k] for k <= n, i.e. n <= r-1")
        field = CyclotomicField(r)
        conv: Callable = lambda x: specialize(x, field)
    else:
        conv = laurent_to_generic
    one, delta = conv(LaurentHalf(1)), conv(DELTA)
    f = TLElement({tl_identity(n if n == 0 else 1): one}, delta)
    for k in range(1, n):
        fk = f.tensor_id()
        ek = TLElement({tl_generator(k, k + 1): one}, delta)
        ratio = conv(qint(k)) / conv(qint(k + 1))
        f = fk + tl_multiply(tl_multiply(fk, ek), fk).scale(ratio)
    return f


# --------------------------------------------------------------------------
# flat words
# --------------------------------------------------------------------------


def is_flat_word(w: str) -> bool:
    depth = 0
    for ch in w:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                return False
        elif ch == ".":
            if depth:
                return False
        else:
            return False
    return depth == 0


@dataclass(frozen=True)
class FlatWord:
    """A flat tangle: '.' through strand, '(' ')' matched cups; no '.' inside a pair."""

    text: str

    def __post_init__(self):
        if not is_flat_word(self.text):
            raise ValueError(f"not a flat word: {self.text!r}")

    @property
    def n(self) -> int:
        return len(self.text)

    @property
    def b(self) -> int:
        return self.text.count(".")

    @property
    def m(self) -> int:
        return self.text.count("(")

    def pairs(self) -> list[tuple[int, int]]:
        """Matched (open, close) positions, 0-based, ordered by opening position."""
        stack, out = [], []
        for i, ch in enumerate(self.text):
            if ch == "(":
                stack.append(i)
            elif ch == ")":
                out.append((stack.pop(), i))
        return sorted(out)

    def diagram(self) -> TLDiagram:
        """The cup diagram from b bottom points to n top points."""
        b, n = self.b, self.n
        M = [0] * (b + n)
        j = 0
        for i, ch in enumerate(self.text):
            if ch == ".":
                M[j], M[b + i] = b + i, j
                j += 1
        for o, c in self.pairs():
            M[b + o], M[b + c] = b + c, b + o
        return TLDiagram(b, n, tuple(M))

    @classmethod
    def from_diagram(cls, d: TLDiagram) -> "FlatWord | None":
        """Inverse of diagram(); None when two bottom points are joined."""
        b = d.bottom
        if any(d.matching[p] < b for p in range(b)):
            return None
        chars = []
        for i in range(d.top):
            q = d.matching[b + i]
            chars.append("." if q < b else ("(" if q > b + i else ")"))
        return cls("".join(chars))

    def __str__(self):
        return self.text


def flat_words(n: int, b: int) -> list[FlatWord]:
    """All flat words of length n with b dots, sorted as strings ('(' < ')' < '.')."""
    if b < 0 or n < b or (n - b) % 2:
        return []
    out = []

    def rec(prefix: str, depth: int, dots: int):
        if len(prefix) == n:
            if depth == 0 and dots == b:
                out.append(prefix)
            return
        left = n - len(prefix)
        if depth + 1 <= left - 1:
            rec(prefix + "(", depth + 1, dots)
        if depth > 0:
            rec(prefix + ")", depth - 1, dots)
        if depth == 0 and dots < b:
            rec(prefix + ".", depth, dots + 1)

    rec("", 0, 0)
    return [FlatWord(w) for w in sorted(out)]


def skein_form(w: FlatWord | str, w2: FlatWord | str) -> LaurentHalf:
    """h(e_w, e_w2): stack the mirror of w2 on w; delta^loops if all b strands go through, else 0."""
    w, w2 = _fw(w), _fw(w2)
    if (w.n, w.b) != (w2.n, w2.b):
        raise ValueError("words of different shapes")
    d, loops = compose(w2.diagram().reflect(), w.diagram())
    if d.through_strands() != w.b:
        return LaurentHalf()
    return DELTA ** loops


def skein_gram(n: int, b: int) -> ExactMatrix:
    words = flat_words(n, b)
    return ExactMatrix.from_rows([[skein_form(u, v) for v in words] for u in words], LAURENT)


def _fw(w) -> FlatWord:
    return w if isinstance(w, FlatWord) else FlatWord(w)


def word_action(k: int, w: FlatWord | str) -> tuple[LaurentHalf, FlatWord | None]:
    """e_k e_w = coefficient * e_{w'} (w' None when the projector kills the result)."""
    w = _fw(w)
    d, loops = compose(tl_generator(k, w.n), w.diagram())
    w2 = FlatWord.from_diagram(d)
    if w2 is None:
        return LaurentHalf(), None
    return DELTA ** loops, w2


def tl_rep_on_words(n: int, b: int, k: int) -> ExactMatrix:
    """Matrix of e_k on the flat-word basis (columns = images of basis words)."""
    words = flat_words(n, b)
    index = {w: i for i, w in enumerate(words)}
    cols = []
    for w in words:
        c, w2 = word_action(k, w)
        cols.append({index[w2]: c} if w2 is not None else {})
    return ExactMatrix(len(words), len(words), cols, LAURENT)


# --------------------------------------------------------------------------
# comparison with the quantum side
# --------------------------------------------------------------------------

# cup: 1 -> -s e0(x)e1 + s^{-1} e1(x)e0 (killed by the coproduct of E);
# cap: s e0*(x)e1* - s^{-1} e1*(x)e0*, so cap(cup) = delta and the zigzags hold.
CUP = {(0, 1): -LaurentHalf.s(1), (1, 0): LaurentHalf.s(-1)}
CAP = {(0, 1): LaurentHalf.s(1), (1, 0): -LaurentHalf.s(-1)}


def compatible_tuples(w: FlatWord | str) -> list[tuple[int, ...]]:
    """cp(w): 0/1 tuples with exactly one 1 on each matched pair and 0 on dots."""
    w = _fw(w)
    pairs = w.pairs()
    out = []
    for choice in range(2 ** len(pairs)):
        t = [0] * w.n
        for j, (o, c) in enumerate(pairs):
            t[c if (choice >> j) & 1 else o] = 1
        out.append(tuple(t))
    return sorted(out)


def cinfty_coefficients(w: FlatWord | str) -> dict[tuple[int, ...], LaurentHalf]:
    """Coefficient (-1)^v q^{(v-u)/2} on each compatible tuple.

    u counts pairs whose 1 sits at the opening slot, v those with the 1 at the closing slot.
    """
    w = _fw(w)
    pairs = w.pairs()
    out = {}
    for t in compatible_tuples(w):
        v = sum(t[c] for _, c in pairs)
        u = len(pairs) - v
        coeff = LaurentHalf.s(v - u)
        out[t] = -coeff if v & 1 else coeff
    return out


def cinfty_rescaling(w: FlatWord | str) -> LaurentHalf:
    """(q - q^{-1})^m, the factor relating the two class normalizations."""
    return (LaurentHalf.s(2) - LaurentHalf.s(-2)) ** _fw(w).m


def word_to_quantum(w: FlatWord | str) -> dict[tuple[int, ...], LaurentHalf]:
    """Image in V_1^{(x)n}: the cup vector on each pair, e_0 on each dot, expanded in tuples."""
    w = _fw(w)
    vec = {tuple([0] * w.n): LaurentHalf(1)}
    for o, c in w.pairs():
        nxt = {}
        for t, x in vec.items():
            for (i, j), y in CUP.items():
                u = list(t)
                u[o], u[c] = i, j
                nxt[tuple(u)] = x * y
        vec = nxt
    return vec


def word_vector(w: FlatWord | str, r: int | None = None, kind: str = FINITE) -> dict[int, object]:
    """word_to_quantum as a sparse vector on WeightSpace((1,)*n, m, kind), specialized if r is given."""
    w = _fw(w)
    sp = WeightSpace((1,) * w.n, w.m, kind)
    vec = word_to_quantum(w)
    if r is None:
        return {sp.index[t]: x for t, x in vec.items()}
    field = CyclotomicField(r)
    return {sp.index[t]: specialize(x, field) for t, x in vec.items()}


def cupcap_matrix(n: int, m: int, k: int) -> ExactMatrix:
    """e_k acting on the weight-m space of V_1^{(x)n} as cup o cap on slots k, k+1 (1-based k)."""
    sp = WeightSpace((1,) * n, m, FINITE)
    i = k - 1
    cols = []
    for t in sp.basis:
        col = {}
        cap = CAP.get((t[i], t[i + 1]))
        if cap is not None:
            for (a, b), cup in CUP.items():
                u = list(t)
                u[i], u[i + 1] = a, b
                col[sp.index[tuple(u)]] = cap * cup
        cols.append(col)
    return ExactMatrix(sp.dim, sp.dim, cols, LAURENT)


def words_to_quantum_matrix(n: int, b: int) -> ExactMatrix:
    """Columns: word_to_quantum of each flat word, on the weight space of V_1^{(x)n}."""
    m = (n - b) // 2
    sp = WeightSpace((1,) * n, m, FINITE)
    cols = [{sp.index[t]: x for t, x in word_to_quantum(w).items()} for w in flat_words(n, b)]
    return ExactMatrix(sp.dim, len(cols), cols, LAURENT)


def binary_tuples(n: int, m: int) -> list[tuple[int, ...]]:
    return compositions(m, [1] * n)
