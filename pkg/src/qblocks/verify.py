"""Invariant suites shared by the CLI and the test-suite."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .braidrep import (
    BraidWord,
    check_form_invariance,
    pr_matrix,
    random_pure_word,
    twist_slot_matrix,
)
from .cyclotomic import CyclotomicField, LaurentHalf, qfact, specialize
from .fusion import ColoredDisk, fusion_dim, verify_gluing
from .linalg import ExactMatrix
from .qgroup import (
    FINITE,
    VERMA_E,
    VERMA_FBAR,
    Gen,
    ModuleSpec,
    WeightSpace,
    form_value,
    generator_matrix,
    induced_form,
    quantum_block,
    tensor_generator,
)
from .tl_skein import (
    flat_words,
    jones_wenzl,
    skein_form,
    tl_generator,
    TLElement,
    word_vector,
)

SUITES = ("hopf", "ybe", "forms", "tl", "gluing")


@dataclass
class CheckResult:
    name: str
    ok: bool
    witness: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, witness: str = ""):
        self.checks.append(CheckResult(name, bool(ok), "" if ok else witness))

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, **({"witness": c.witness} if c.witness else {})}
                       for c in self.checks],
        }


def _q(e: int) -> LaurentHalf:
    return LaurentHalf.s(2 * e)


def suite_hopf(r: int, max_n: int = 3) -> SuiteReport:
    """Defining relations on single modules and divided-power consistency on tensors."""
    rep = SuiteReport("hopf")
    for kind in (FINITE, VERMA_FBAR, VERMA_E):
        for a in range(r - 1):
            spec = ModuleSpec(kind, a, None if kind == FINITE else 6)
            K, Ki = generator_matrix(spec, "K"), generator_matrix(spec, "Kinv")
            E, F = generator_matrix(spec, "E"), generator_matrix(spec, "Fbar")
            ok = (K @ E @ Ki == E.scale(_q(2))) and (K @ F @ Ki == F.scale(_q(-2)))
            comm = E @ F - F @ E
            target = K - Ki
            # truncation spoils the top basis vector of a Verma module
            top = spec.dim if kind == FINITE else spec.dim - 1
            ok = ok and comm.cols[:top] == target.cols[:top]
            rep.add(f"relations {kind} alpha={a}", ok, f"{kind} {a}")
    for n in range(2, max_n + 1):
        for colors in itertools.product(range(1, 3), repeat=n):
            for m in range(1, min(sum(colors), 4) + 1):
                sp = WeightSpace(colors, m, FINITE)
                Ep = None
                ok = True
                for l in range(1, m + 1):
                    E1 = tensor_generator(sp.shift(-(l - 1)), "E")
                    Ep = E1 if Ep is None else E1 @ Ep
                    Ed = tensor_generator(sp, Gen("Ediv", l))
                    ok = ok and Ep == Ed.scale(qfact(l))
                rep.add(f"divided powers {colors} m={m}", ok, f"{colors} m={m}")
    return rep


def suite_ybe(r: int) -> SuiteReport:
    """Braid relation on V_a^{(x)3} and equivariance of PR and v with the generators."""
    rep = SuiteReport("ybe")
    for a in (1, 2):
        c = (a, a, a)
        for m in range(3 * a + 1):
            A = pr_matrix(c, FINITE, m, 0, r)
            B = pr_matrix(c, FINITE, m, 1, r)
            rep.add(f"braid relation a={a} m={m}", A @ B @ A == B @ A @ B, f"a={a} m={m}")
    field = CyclotomicField(r)
    for a, b in itertools.product(range(r - 1), repeat=2):
        ok = True
        for m in range(a + b + 1):
            for g in ("K", "E", "Fbar", Gen("Ediv", r), Gen("Fbar", r)):
                g = Gen.parse(g)
                m2 = m - g.shift
                if not 0 <= m2 <= a + b:
                    continue
                src = WeightSpace((a, b), m2, FINITE)
                Gs = tensor_generator(src, g).map(lambda v: specialize(v, field), field)
                Gt = tensor_generator(WeightSpace((b, a), m2, FINITE), g).map(
                    lambda v: specialize(v, field), field)
                P1 = pr_matrix((a, b), FINITE, m2, 0, r)
                P2 = pr_matrix((a, b), FINITE, m, 0, r)
                ok = ok and (Gt @ P1 == P2 @ Gs)
                V1 = twist_slot_matrix((a, b), FINITE, m2, 0, r)
                V2 = twist_slot_matrix((a, b), FINITE, m, 0, r)
                ok = ok and (Gs @ V1 == V2 @ Gs)
        rep.add(f"equivariance a={a} b={b}", ok, f"a={a} b={b}")
    return rep


def suite_forms(r: int, max_n: int = 4, words: int = 5, seed: int = 0) -> SuiteReport:
    """(-1)^m-hermitian symmetry and braid invariance of the induced form."""
    rep = SuiteReport("forms")
    rng = random.Random(seed)
    for n in range(2, max_n + 1):
        for colors in itertools.combinations_with_replacement(range(1, r - 1), n):
            for b in range(r - 1):
                disk = ColoredDisk(r, b, colors)
                if disk.drop is None:
                    continue
                block = quantum_block(disk)
                if not block.dimension:
                    continue
                G = induced_form(block)
                sign = 1 if block.m % 2 == 0 else -1
                rep.add(f"symmetry {b};{colors}", G.conj_transpose() == G.scale(sign), str(disk))
                ok = all(check_form_invariance(disk, random_pure_word(n, 2, rng), block, G)
                         for _ in range(words))
                rep.add(f"invariance {b};{colors}", ok, str(disk))
    return rep


def suite_tl(r: int, max_n: int = 6) -> SuiteReport:
    """Jones-Wenzl identities and the intersection-form identity on flat words."""
    rep = SuiteReport("tl")
    field = CyclotomicField(r)
    for n in range(1, r):
        f = jones_wenzl(n, r)
        one = field.one
        ok = (f * f - f).is_zero() and all(
            (TLElement({tl_generator(k, n): one}, f.delta) * f).is_zero() for k in range(1, n))
        rep.add(f"jones-wenzl n={n}", ok, f"n={n}")
    for n in range(1, max_n + 1):
        for b in range(n % 2, min(n, r - 2) + 1, 2):
            m = (n - b) // 2
            scale = (_q(1) - _q(-1)) ** m
            disk = ColoredDisk(r, b, (1,) * n)
            block = quantum_block(disk)
            words = flat_words(n, b)
            xs = [word_vector(w, r, VERMA_FBAR) for w in words]
            ok = True
            for (i, w), (j, w2) in itertools.product(enumerate(words), repeat=2):
                lhs = form_value(block, xs[i], xs[j])
                ok = ok and lhs == specialize(scale * skein_form(w, w2), field)
            rep.add(f"s = (q-q^-1)^{m} h  n={n} b={b}", ok, f"n={n} b={b}")
    return rep


def suite_gluing(r: int, max_n: int = 4) -> SuiteReport:
    rep = SuiteReport("gluing")
    for n in range(2, max_n + 1):
        for colors in itertools.product(range(r - 1), repeat=n):
            for b in range(r - 1):
                disk = ColoredDisk(r, b, colors)
                if disk.drop is None:
                    continue
                for n1 in range(1, n):
                    g = verify_gluing(disk, n1)
                    rep.add(f"gluing {b};{colors} split {n1}", g.ok, "; ".join(g.failures))
    return rep


def run_suite(name: str, r: int, max_n: int | None = None) -> list[SuiteReport]:
    names = SUITES if name == "all" else (name,)
    out = []
    for s in names:
        if s == "hopf":
            out.append(suite_hopf(r))
        elif s == "ybe":
            out.append(suite_ybe(r))
        elif s == "forms":
            out.append(suite_forms(r, max_n or 3))
        elif s == "tl":
            out.append(suite_tl(r, max_n or 6))
        elif s == "gluing":
            out.append(suite_gluing(r, max_n or 3))
        else:
            raise ValueError(f"unknown suite {s!r}")
    return out
