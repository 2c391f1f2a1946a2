from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qblocks.cyclotomic import ONE, CyclotomicField, LaurentHalf, invert, qbinom, qfact, qint, specialize
from qblocks.fusion import ColoredDisk, fusion_dim
from qblocks.linalg import LAURENT, ExactMatrix
from qblocks.qgroup import (
    FINITE,
    QMQ,
    VERMA_E,
    VERMA_FBAR,
    Gen,
    ModuleSpec,
    WeightSpace,
    bar_involution,
    binary_space,
    coinvariant_presentation,
    finite_f_matrix,
    form_value,
    generator_matrix,
    hermitian_form,
    highest_weight_space,
    induced_form,
    jw_embed,
    jw_project,
    pairing_exponent,
    quantum_block,
    red_coefficient,
    red_matrix,
    specialized_tensor,
    tensor_generator,
)

q = LaurentHalf.q


def spec_mat(M: ExactMatrix, r: int) -> ExactMatrix:
    f = CyclotomicField(r)
    return M.map(lambda v: specialize(v, f), f)


# ---- single modules ----

def test_k_on_v1():
    K = generator_matrix(ModuleSpec(FINITE, 1), "K")
    assert K == ExactMatrix.diagonal([q(1), q(-1)])


def test_verma_fbar_shifts_basis():
    F = generator_matrix(ModuleSpec(VERMA_FBAR, 2, 5), "Fbar")
    for n in range(5):
        assert F.cols[n] == {n + 1: ONE}


@pytest.mark.parametrize("alpha", range(6))
def test_finite_commutator(alpha):
    spec = ModuleSpec(FINITE, alpha)
    E, F = generator_matrix(spec, "E"), finite_f_matrix(alpha)
    comm = E @ F - F @ E
    target = ExactMatrix.diagonal([qint(alpha - 2 * i) for i in range(alpha + 1)])
    assert comm == target
    K, Ki = generator_matrix(spec, "K"), generator_matrix(spec, "Kinv")
    assert (K - Ki).map(lambda v: v.exact_div(QMQ)) == target


@pytest.mark.parametrize("r", (5, 7))
def test_alternative_finite_e_coefficient_breaks_relations(r):
    # E e_i = [r - i + 1] e_{i-1} fails [E, F] = [K; 0] at the root of unity
    f = CyclotomicField(r)
    failures = 0
    for alpha in range(1, r - 1):
        E = ExactMatrix(alpha + 1, alpha + 1, [{i - 1: qint(r - i + 1)} if i else {} for i in range(alpha + 1)])
        F = finite_f_matrix(alpha)
        comm = spec_mat(E @ F - F @ E, r)
        target = spec_mat(ExactMatrix.diagonal([qint(alpha - 2 * i) for i in range(alpha + 1)]), r)
        failures += comm != target
    assert failures == r - 2


@pytest.mark.parametrize("kind", [FINITE, VERMA_E, VERMA_FBAR])
def test_k_conjugation(kind):
    for alpha in range(4):
        spec = ModuleSpec(kind, alpha, None if kind == FINITE else 5)
        K, Ki = generator_matrix(spec, "K"), generator_matrix(spec, "Kinv")
        assert K @ Ki == ExactMatrix.identity(spec.dim)
        assert K @ generator_matrix(spec, "E") @ Ki == generator_matrix(spec, "E").scale(q(2))
        assert K @ generator_matrix(spec, "Fbar") @ Ki == generator_matrix(spec, "Fbar").scale(q(-2))


def test_undefined_divided_powers_rejected():
    with pytest.raises(ValueError):
        generator_matrix(ModuleSpec(VERMA_E, 1, 4), Gen("Ediv", 2))
    with pytest.raises(ValueError):
        generator_matrix(ModuleSpec(VERMA_FBAR, 1, 4), Gen("Fbar", 2))
    with pytest.raises(ValueError):
        Gen("X")


def test_e_r_digit_formula():
    # E^{(r)} e_i = ((alpha - i)_1 + 1) e_{i-r},  F^{(r)} e_i = (i_1 + 1) e_{i+r}
    r = 5
    f = CyclotomicField(r)
    alt_disagrees = []
    for alpha in range(2 * r):
        spec = ModuleSpec(FINITE, alpha)
        E = generator_matrix(spec, Gen("Ediv", r))
        Fb = generator_matrix(spec, Gen("Fbar", r))
        for i in range(alpha + 1):
            if i >= r:
                val = specialize(E[i - r, i], f)
                assert val == (alpha - i) // r + 1
                if val != (r - i) // r + 1:
                    alt_disagrees.append((alpha, i))
            if i + r <= alpha:
                assert specialize(Fb[i + r, i], f) / specialize(QMQ ** r, f) == i // r + 1
    assert (6, 6) in alt_disagrees
    for alpha in range(r):
        assert generator_matrix(ModuleSpec(FINITE, alpha), Gen("Ediv", r)).is_zero()


# ---- tensor actions ----

def test_tensor_e_on_verma_pair():
    sp = WeightSpace((1, 1), 1, VERMA_FBAR)
    E = tensor_generator(sp, "E")
    assert sp.basis == [(0, 1), (1, 0)]
    assert E.cols[sp.index[(1, 0)]] == {0: QMQ * q(1)}
    assert E.cols[sp.index[(0, 1)]] == {0: QMQ}


@pytest.mark.parametrize("kind", [FINITE, VERMA_FBAR, VERMA_E])
def test_k_is_scalar_on_weight_space(kind):
    colors = (2, 1, 3)
    for m in range(4):
        sp = WeightSpace(colors, m, kind)
        K = tensor_generator(sp, "K")
        assert K == ExactMatrix.identity(sp.dim).scale(q(sp.weight))


def test_divided_power_beyond_drop_is_zero():
    sp = WeightSpace((1, 2), 2, FINITE)
    assert tensor_generator(sp, Gen("Ediv", 3)).is_zero()


@pytest.mark.parametrize("colors,kind", [((2, 3), FINITE), ((1, 2, 2), FINITE), ((1, 3), VERMA_FBAR),
                                         ((2, 1), VERMA_E)])
def test_fast_divided_powers_match_symbolic(colors, kind):
    r = 5
    ops = specialized_tensor(colors, kind, r)
    top = sum(colors) if kind == FINITE else 7
    for m in range(top + 1):
        for l in range(1, min(m, 2 * r - 1) + 1):
            if kind != VERMA_E:
                sym = spec_mat(tensor_generator(WeightSpace(colors, m, kind), Gen("Ediv", l)), r)
                assert ops.ediv(l, m) == sym
        for l in range(1, 2 * r):
            if kind != VERMA_FBAR and m + l <= top:
                sym = spec_mat(tensor_generator(WeightSpace(colors, m, kind), Gen("Fbar", l)), r)
                assert ops.fbar_div(l, m) == sym


def test_divided_power_r_nonzero_on_large_weights():
    r = 5
    ops = specialized_tensor((3, 3), FINITE, r)
    assert not ops.ediv(r, 5).is_zero()


def test_pairing_exponent_examples():
    assert pairing_exponent((3,), (2,)) == 0
    assert pairing_exponent((1, 1), (1, 0)) == 1
    assert pairing_exponent((1, 1), (0, 1)) == 1
    assert pairing_exponent((2, 1), (1, 1)) == 2 * 1 + 1 * 1 - 2


@settings(max_examples=25, deadline=None)
@given(colors=st.lists(st.integers(0, 3), min_size=1, max_size=3), m=st.integers(1, 4))
def test_fbar_left_adjoint_to_e(colors, m):
    colors = tuple(colors)

    def P(mm):
        sp = WeightSpace(colors, mm, VERMA_FBAR)
        return ExactMatrix(sp.dim, sp.dim, [{j: LaurentHalf.s(2 * pairing_exponent(colors, t))}
                                            for j, t in enumerate(sp.basis)], LAURENT)

    Fb = tensor_generator(WeightSpace(colors, m - 1, VERMA_FBAR), "Fbar")
    E = tensor_generator(WeightSpace(colors, m, VERMA_E), "E")
    assert Fb.T @ P(m) == P(m - 1) @ E


# ---- hw spaces, coinvariants, red ----

def test_hw_basis_pair():
    d = ColoredDisk(5, 0, (1, 1))
    hw = highest_weight_space(d)
    assert hw.ncols == 1
    v = hw.cols[0]
    f = CyclotomicField(5)
    sp = WeightSpace((1, 1), 1, VERMA_FBAR)
    ratio = v[sp.index[(0, 1)]] / v[sp.index[(1, 0)]]
    assert ratio == -specialize(q(1), f)


def test_hw_trivial_and_sizes():
    d = ColoredDisk(5, 4, (1, 3))
    assert highest_weight_space(d).ncols == 1
    d = ColoredDisk(5, 0, (2, 2, 2))
    assert highest_weight_space(d).ncols == 4
    assert quantum_block(d).dimension == 1


def test_coinvariants():
    assert coinvariant_presentation(ColoredDisk(5, 0, (1, 1))).dim == 1
    assert coinvariant_presentation(ColoredDisk(5, 2, (2,))).dim == 1


def test_coinvariant_dim_matches_hw_dim():
    for n in (1, 2, 3):
        for colors in itertools.product(range(4), repeat=n):
            for b in range(4):
                d = ColoredDisk(5, b, colors)
                if d.drop is None:
                    continue
                assert coinvariant_presentation(d).dim == highest_weight_space(d).ncols


def test_red_coefficients():
    r = 5
    f = CyclotomicField(r)
    assert red_coefficient(3, 4, r).is_zero()
    assert red_coefficient(3, 1, r) == specialize(QMQ * qint(3), f)
    assert red_coefficient(3, 0, r) == f.one
    assert red_matrix(ColoredDisk(5, 6, (3, 3))).shape == (1, 1)


@pytest.mark.parametrize("r", (5, 7))
def test_red_truncation(r):
    for alpha in range(3 * r):
        a0 = alpha % r
        for i in range(2 * r + 2):
            c = red_coefficient(alpha, i, r)
            if i > a0:
                assert c.is_zero()
            else:
                assert c * invert(c) == 1
                # (q - q^-1)^i times a unit of Z[zeta]
                unit = c / specialize(QMQ ** i, r)
                assert unit.is_integral() and invert(unit).is_integral()


@pytest.mark.parametrize("b,colors,dim", [
    (1, (1, 1, 1), 2), (0, (3, 3), 1), (0, (3, 1), 0), (0, (1,), 0), (1, (1,), 1),
    (0, (2, 2, 2), 1), (0, (1, 1, 1, 1), 2), (0, (4, 4), 0), (3, (4, 1), 0), (0, (2, 3), 0),
])
def test_block_dimensions(b, colors, dim):
    assert quantum_block(ColoredDisk(5, b, colors)).dimension == dim


def test_color_r_minus_one_gives_zero():
    for r in (5, 7):
        for colors in itertools.product(range(r), repeat=2):
            if r - 1 not in colors:
                continue
            for b in range(r - 1):
                assert quantum_block(ColoredDisk(r, b, colors)).dimension == 0


def test_block_json_deterministic():
    d = ColoredDisk(5, 1, (1, 1, 1))
    a = quantum_block(d).dumps()
    b = quantum_block(ColoredDisk(5, 1, (1, 1, 1))).dumps()
    assert a == b
    assert '"dim": 2' in a


def test_sections_map_to_image_basis():
    d = ColoredDisk(5, 0, (2, 2, 2, 2))
    block = quantum_block(d)
    assert block.dimension == fusion_dim(d)
    for j, sec in enumerate(block.sections.cols):
        assert block.coordinates(sec) == {j: block.field.one}


# ---- bar involution and forms ----

@settings(max_examples=20, deadline=None)
@given(colors=st.lists(st.integers(0, 3), min_size=2, max_size=3), m=st.integers(1, 3), seed=st.integers(0, 99))
def test_bar_involution_is_involution(colors, m, seed):
    r = 5
    f = CyclotomicField(r)
    sp = WeightSpace(tuple(colors), m, VERMA_E)
    rng = random.Random(seed)
    v = {i: f.zeta(rng.randrange(5)) * rng.randint(-2, 2) for i in range(sp.dim)}
    v = {i: x for i, x in v.items() if x}
    assert bar_involution(colors, m, bar_involution(colors, m, v, r), r) == v


DISKS = [ColoredDisk(5, 1, (1, 1, 1)), ColoredDisk(5, 0, (1, 1, 1, 1)), ColoredDisk(5, 0, (2, 2, 2, 2)),
         ColoredDisk(5, 1, (2, 2, 1)), ColoredDisk(7, 1, (2, 2, 1)), ColoredDisk(5, 2, (1, 2, 3)),
         ColoredDisk(7, 0, (3, 3, 2))]


@pytest.mark.parametrize("disk", DISKS, ids=str)
def test_form_symmetry(disk):
    block = quantum_block(disk)
    G = induced_form(block)
    sign = -1 if block.m % 2 else 1
    assert G.H == G.scale(sign)
    H = hermitian_form(block)
    assert H.H == H
    assert G.rank() == block.dimension


def test_form_sesquilinear():
    disk = ColoredDisk(5, 1, (1, 1, 1))
    block = quantum_block(disk)
    f = block.field
    x, y = block.sections.cols
    c = f.zeta(1) + 2
    cx = {i: c * v for i, v in x.items()}
    assert form_value(block, cx, y) == c * form_value(block, x, y)
    assert form_value(block, x, cx) == c.conj() * form_value(block, x, x)
    assert form_value(block, cx, cx) == c * c.conj() * form_value(block, x, x)


def test_form_independent_of_section_choice():
    disk = ColoredDisk(5, 0, (2, 2, 2))
    block = quantum_block(disk)
    hw = block.hw_basis
    dead = [c for c in hw.cols if not block.image_of(c)]
    assert dead
    x = block.sections.cols[0]
    x2 = dict(x)
    for i, v in dead[0].items():
        x2[i] = x2.get(i, block.field.zero) + v
    x2 = {i: v for i, v in x2.items() if v}
    assert form_value(block, x, x) == form_value(block, x2, x2) == form_value(block, x, x2)


# ---- Jones-Wenzl embeddings ----

def test_jw_small():
    assert jw_embed(1) == ExactMatrix.identity(2)
    assert jw_project(1, 5) == ExactMatrix.identity(2, CyclotomicField(5))
    i2 = jw_embed(2)
    assert i2.cols[0] == {binary_space(2).index((0, 0)): ONE}


@pytest.mark.parametrize("r", (5, 7))
def test_jw_project_embed_identity(r):
    for n in range(1, r):
        p, i = jw_project(n, r), jw_embed(n, r)
        assert p @ i == ExactMatrix.identity(n + 1, CyclotomicField(r))


def test_jw_embed_is_equivariant():
    n = 3
    i = jw_embed(n)
    basis = binary_space(n)
    idx = {t: k for k, t in enumerate(basis)}
    E_small = generator_matrix(ModuleSpec(FINITE, n), "E")
    for j in range(1, n + 1):
        sp = WeightSpace((1,) * n, j, FINITE)
        E = tensor_generator(sp, "E")
        col = {sp.index[t]: v for t, v in ((basis[k], v) for k, v in i.cols[j].items())}
        lhs = E.apply(col)
        tgt = sp.shift(-1)
        rhs = {tgt.index[basis[k]]: v * E_small[j - 1, j] for k, v in i.cols[j - 1].items()}
        assert {k: v for k, v in lhs.items() if v} == rhs
    assert qfact(2) == qint(2)
