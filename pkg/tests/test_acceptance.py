"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line (also repeated in the terminal summary)."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from qblocks.braidrep import check_form_invariance, random_pure_word
from qblocks.cli import signatures
from qblocks.cyclotomic import LaurentHalf, invert, specialize
from qblocks.fusion import ColoredDisk, admissible, fusion_dim
from qblocks.integral import integral_structure
from qblocks.qgroup import VERMA_FBAR, form_value, induced_form, quantum_block, red_coefficient
from qblocks.tl_skein import DELTA, skein_form, word_vector
from qblocks.verify import suite_gluing, suite_tl, suite_ybe

QMQ = LaurentHalf.s(2) - LaurentHalf.s(-2)


def report(n: int, failures: list, summary: str):
    line = f"{'PASS' if not failures else 'FAIL'} criterion {n}: {summary}"
    if failures:
        line += f" ({len(failures)} failures, first: {failures[0]})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert not failures, line


def sweep(r: int, max_n: int, min_n: int = 1):
    for n in range(min_n, max_n + 1):
        for colors in itertools.product(range(r - 1), repeat=n):
            for b in range(r - 1):
                yield ColoredDisk(r, b, colors)


def test_criterion_1_admissibility_vs_dimension():
    failures, count = [], 0
    for r in (5, 7):
        for a1, a2, b in itertools.product(range(r - 1), repeat=3):
            dim = quantum_block(ColoredDisk(r, b, (a1, a2))).dimension
            count += 1
            if dim != int(admissible(r, a1, a2, b)):
                failures.append((r, b, a1, a2, dim))
    report(1, failures, f"3-point dimensions match admissibility on {count} triples, r in {{5,7}}")


def test_criterion_2_fusion_vs_linear_algebra():
    failures, count = [], 0
    for r in (5, 7):
        for disk in sweep(r, 4):
            count += 1
            if fusion_dim(disk) != quantum_block(disk).dimension:
                failures.append(disk)
    rng = random.Random(2024)
    for _ in range(40):
        disk = ColoredDisk(5, rng.randrange(4), tuple(rng.randrange(4) for _ in range(5)))
        count += 1
        if fusion_dim(disk) != quantum_block(disk).dimension:
            failures.append(disk)
    report(2, failures, f"fusion_dim equals block dimension on {count} disks (n<=4 exhaustive, 40 random n=5)")


def test_criterion_3_braid_relations_and_equivariance():
    failures, count = [], 0
    for r in (5, 7):
        rep = suite_ybe(r)
        count += len(rep.checks)
        failures += [(r, c.name) for c in rep.checks if not c.ok]
    report(3, failures, f"Yang-Baxter (a=1,2) and PR/v equivariance with K, E, Fbar, E^(r), Fbar^(r): {count} checks")


def nested_word(n: int, b: int) -> str:
    m = (n - b) // 2
    return "(" * m + ")" * m + "." * b


def test_criterion_4_form_identity():
    r = 5
    rep = suite_tl(r, 6)
    checks = [c for c in rep.checks if c.name.startswith("s = ")]
    failures = [c.name for c in checks if not c.ok]
    assert len(checks) == sum(len(range(n % 2, min(n, r - 2) + 1, 2)) for n in range(1, 7))
    anchors = 0
    for n in range(1, 7):
        for b in range(n % 2, min(n, r - 2) + 1, 2):
            m = (n - b) // 2
            w = nested_word(n, b)
            if skein_form(w, w) != DELTA ** m:
                failures.append(f"skein anchor {w}")
            block = quantum_block(ColoredDisk(r, b, (1,) * n))
            x = word_vector(w, r, VERMA_FBAR)
            if form_value(block, x, x) != specialize(QMQ ** m * DELTA ** m, r):
                failures.append(f"quantum anchor {w}")
            anchors += 1
    report(4, failures, f"s = (q-q^-1)^m h on flat words for r=5, n<=6 ({len(checks)} blocks, {anchors} anchors "
                        f"h(e_w,e_w) = (-q-q^-1)^m)")


def test_criterion_5_form_invariance():
    rng = random.Random(5)
    failures, disks, words = [], 0, 0
    for disk in sweep(5, 4):
        if disk.drop is None:
            continue
        block = quantum_block(disk)
        if not block.dimension:
            continue
        G = induced_form(block)
        disks += 1
        for _ in range(50):
            res = check_form_invariance(disk, random_pure_word(disk.n, 3, rng), block, G)
            words += 1
            if not res:
                failures.append((str(disk), res.witness.get("word")))
    report(5, failures, f"rho^H G rho = G for {words} random pure words over {disks} disks (r=5, n<=4)")


def test_criterion_6_gluing():
    rep = suite_gluing(5, 4)
    failures = [c.name for c in rep.checks if not c.ok]
    report(6, failures, f"gluing map has full rank for all {len(rep.checks)} (disk, split) pairs (r=5, n<=4)")


def test_criterion_7_integral_structure():
    failures, disks, saturated = [], 0, 0
    for disk in sweep(5, 4):
        if disk.drop is None:
            continue
        rep = integral_structure(disk)
        disks += 1
        saturated += rep.saturated
        if not rep.contained:
            failures.append((str(disk), rep.failures[:1]))
        elif rep.rank and not rep.sharp:
            failures.append((str(disk), "exponent not sharp"))
    report(7, failures, f"(q-q^-1)^-m red(L) inside Z[zeta_5]^N, exponent sharp, on {disks} disks "
                        f"({saturated} saturated)")


def test_criterion_8_red_truncation():
    failures, count = [], 0
    for r in (5, 7):
        for alpha in range(3 * r):
            a0 = alpha % r
            for i in range(2 * r + 2):
                c = red_coefficient(alpha, i, r)
                count += 1
                if i > a0 and not c.is_zero():
                    failures.append((r, alpha, i, "nonzero"))
                if i <= a0 and (c.is_zero() or not (c * invert(c)) == 1):
                    failures.append((r, alpha, i, "not invertible"))
    report(8, failures, f"red coefficient vanishes iff i > alpha_0 ({count} entries, r in {{5,7}})")


def test_criterion_9_signatures():
    r, tol = 5, 1e-9
    block = quantum_block(ColoredDisk(r, 1, (1, 1, 1)))
    sig = {s["k"]: s for s in signatures(block, tol, list(range(1, r)))}
    failures = []
    for k, s in sig.items():
        if s["p"] + s["q"] != 2:
            failures.append((k, "p+q"))
        if s["min_abs_eigenvalue"] <= 1e-6:
            failures.append((k, "near-zero eigenvalue"))
        if s["hermitian_residual"] > tol:
            failures.append((k, "not hermitian"))
        c = sig[r - k]
        if (s["p"], s["q"]) != (c["p"], c["q"]) or not np.allclose(s["eigenvalues"], c["eigenvalues"], atol=tol):
            failures.append((k, "conjugate embedding differs"))
    pq = ", ".join(f"k={k}:({s['p']},{s['q']})" for k, s in sorted(sig.items()))
    report(9, failures, f"signatures of (1;1,1,1) at r=5: {pq}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
