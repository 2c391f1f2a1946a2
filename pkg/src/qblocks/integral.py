"""Z[zeta_r]-lattices: integral highest-weight vectors and the rescaled image of red."""

from __future__ import annotations

from dataclasses import dataclass, field

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

from .cyclotomic import CycNum, CyclotomicField, LaurentHalf, specialize
from .linalg import ExactMatrix, Vector
from .qgroup import (
    VERMA_FBAR,
    _disk_data,
    colors_in_range,
    highest_weight_space,
    quantum_block,
    specialized_tensor,
)


def _int_coeffs(x: CycNum) -> list[int]:
    if not x.is_integral():
        raise ArithmeticError(f"{x} is not in Z[zeta]")
    return [int(c) for c in x.coeffs]


def z_matrix(M: ExactMatrix) -> list[list[int]]:
    """M as a Z-linear map on Z[zeta]^n = Z^{n d}, coordinates in the power basis."""
    f = M.ring
    d = f.degree
    A = [[0] * (M.ncols * d) for _ in range(M.nrows * d)]
    for j, col in enumerate(M.cols):
        for i, x in col.items():
            for k in range(d):
                for t, c in enumerate(_int_coeffs(x * f.zeta(k))):
                    A[i * d + t][j * d + k] = c
    return A


def integer_kernel(A: list[list[int]], k: int) -> list[list[int]]:
    """Z-basis of {u in Z^k : A u = 0}, read off the HNF of the stacked matrix [I; A]."""
    M = Matrix([[int(i == j) for j in range(k)] for i in range(k)] + [list(row) for row in A])
    H = hermite_normal_form(M)
    out = []
    for j in range(H.shape[1]):
        if all(H[i, j] == 0 for i in range(k, H.shape[0])):
            out.append([int(H[i, j]) for i in range(k)])
    return out


def _from_z(u: list[int], f: CyclotomicField) -> Vector:
    d = f.degree
    v = {}
    for i in range(len(u) // d):
        chunk = u[i * d:(i + 1) * d]
        if any(chunk):
            v[i] = CycNum(f, chunk)
    return v


def _unit_rows(K: ExactMatrix) -> list[int] | None:
    """Rows on which K restricts to the identity (one per column), if they exist."""
    rows = []
    support: dict[int, int] = {}
    for col in K.cols:
        for i in col:
            support[i] = support.get(i, 0) + 1
    for col in K.cols:
        p = next((i for i, x in col.items() if support[i] == 1 and x == K.ring.one), None)
        if p is None:
            return None
        rows.append(p)
    return rows


def integral_hw_lattice(disk, method: str = "auto") -> list[Vector]:
    """Z-basis of ker E (and ker E^{(r)}) inside Z[zeta]^N on the VermaFbar weight space.

    When the exact kernel basis is integral and restricts to the identity on some rows, any
    integral kernel vector is a Z[zeta]-combination of it with coefficients read off those rows,
    so {zeta^j h} is already a Z-basis. Otherwise (or with method="hnf") the integer kernel is
    computed by Hermite normal form.
    """
    r, b, colors, m = _disk_data(disk)
    f = CyclotomicField(r)
    if m is None or not colors_in_range(disk):
        return []
    if method not in ("auto", "hnf"):
        raise ValueError("method must be 'auto' or 'hnf'")
    if method == "auto":
        hw = highest_weight_space(disk)
        if all(x.is_integral() for c in hw.cols for x in c.values()) and _unit_rows(hw) is not None:
            return [{i: x * f.zeta(j) for i, x in c.items()} for c in hw.cols for j in range(f.degree)]
    ops = specialized_tensor(colors, VERMA_FBAR, r)
    k = ops.space(m).dim * f.degree
    if m == 0:
        return [_from_z([int(i == j) for i in range(k)], f) for j in range(k)]
    A = z_matrix(ops.E(m))
    if m >= r:
        A = A + z_matrix(ops.ediv(r, m))
    return [_from_z(u, f) for u in integer_kernel(A, k)]


def _to_z(v: Vector, n: int, d: int) -> list[int]:
    out = [0] * (n * d)
    for i, x in v.items():
        out[i * d:(i + 1) * d] = _int_coeffs(x)
    return out


@dataclass
class LatticeReport:
    disk: object
    generators: int
    rank: int
    contained: bool
    sharp: bool
    saturated: bool
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.contained and (self.rank == 0 or self.sharp)


def integral_structure(disk) -> LatticeReport:
    """Compare (q-q^-1)^{-m} red(L) with Z[zeta]^N, L the integral hw lattice.

    contained: every rescaled generator has Z[zeta] coordinates.
    sharp: the exponent m cannot be raised (some coordinate is not divisible by q-q^-1).
    saturated: the rescaled lattice equals its Q-span intersected with Z[zeta]^N.
    """
    r, b, colors, m = _disk_data(disk)
    f = CyclotomicField(r)
    gens = integral_hw_lattice(disk)
    if not gens:
        return LatticeReport(disk, 0, 0, True, True, True)
    block = quantum_block(disk)
    qmq = specialize(LaurentHalf.s(2) - LaurentHalf.s(-2), f)
    scale = qmq ** (-m)
    n = block.space.dim
    failures, rows = [], []
    contained, sharp = True, False
    for g in gens:
        y = {i: scale * x for i, x in block.red(g).items()}
        bad = [i for i, x in y.items() if not x.is_integral()]
        if bad:
            contained = False
            failures.append(f"generator leaves Z[zeta] at {bad[:3]}")
            continue
        if any(not (x / qmq).is_integral() for x in y.values()):
            sharp = True
        rows.append(_to_z(y, n, f.degree))
    nonzero = [row for row in rows if any(row)]
    if not nonzero:
        return LatticeReport(disk, len(gens), 0, contained, True, True, failures)
    Y = Matrix(nonzero)
    rank = Y.rank()
    inv = invariant_factors(Y)
    saturated = all(abs(c) == 1 for c in inv if c != 0)
    return LatticeReport(disk, len(gens), rank, contained, sharp, saturated, failures)
