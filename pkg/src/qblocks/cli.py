"""Command-line interface: dim, rep, signature, verify, fusion."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

SPEC_VERSION = "1.0"

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 2, 3


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    command: str
    r: int | None = None
    outer: int | None = None
    colors: list[int] | None = None
    word: str | None = None
    on: str = "image"
    split: int | None = None
    k: int | None = None
    format: str = "json"
    suite: str | None = None
    tol: float = 1e-9
    max_n: int | None = None
    cache: str | None = None


def _parse_colors(text: str | None) -> list[int] | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    try:
        return [int(c) for c in text.split(",")]
    except ValueError:
        raise UsageError(f"colors must be comma-separated integers, got {text!r}")


def validate(cfg: CommandConfig) -> CommandConfig:
    if cfg.r is None or cfg.r < 3 or cfg.r % 2 == 0:
        raise UsageError("--r must be an odd integer >= 3")
    if cfg.command in ("dim", "rep", "signature"):
        if cfg.outer is None or cfg.colors is None:
            raise UsageError("--outer and --colors are required")
        if cfg.outer < 0 or any(a < 0 for a in cfg.colors):
            raise UsageError("colors must be non-negative")
        if cfg.split is not None and not 1 <= cfg.split < len(cfg.colors):
            raise UsageError("--split must satisfy 1 <= split < number of colors")
    if cfg.command == "rep" and cfg.word is None:
        cfg.word = ""
    if cfg.command == "verify":
        from .verify import SUITES

        if cfg.suite not in SUITES + ("all",):
            raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES + ('all',))}")
    if cfg.format not in ("json", "csv", "text"):
        raise UsageError("--format must be json, csv or text")
    if cfg.tol <= 0:
        raise UsageError("--tol must be positive")
    return cfg


def _header(cfg: CommandConfig) -> dict:
    return {
        "spec_version": SPEC_VERSION,
        "command": cfg.command,
        "r": cfg.r,
        "outer": cfg.outer,
        "colors": cfg.colors,
        "config": asdict(cfg),
    }


def _cache_path(cfg: CommandConfig) -> Path | None:
    if not cfg.cache:
        return None
    key = f"{cfg.r}_{cfg.outer}_{'-'.join(map(str, cfg.colors))}"
    digest = hashlib.sha1(key.encode()).hexdigest()[:12]
    return Path(cfg.cache) / f"block_{key}_{digest}.json"


def cmd_dim(cfg: CommandConfig) -> tuple[dict, int]:
    from .fusion import ColoredDisk, fusion_dim
    from .qgroup import quantum_block

    disk = ColoredDisk(cfg.r, cfg.outer, tuple(cfg.colors))
    path = _cache_path(cfg)
    if path is not None and path.exists():
        la = json.loads(path.read_text())["dim"]
    else:
        block = quantum_block(disk)
        la = block.dimension
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(block.dumps())
    fd = fusion_dim(disk)
    out = _header(cfg) | {"fusion_dim": fd, "linear_algebra_dim": la, "agree": fd == la}
    ok = fd == la
    if cfg.split is not None:
        from .fusion import verify_gluing

        g = verify_gluing(disk, cfg.split)
        out["gluing"] = {"split": cfg.split, "ok": g.ok, "terms": {str(c): v for c, v in g.terms.items()},
                         "assembled_rank": g.assembled_rank, "failures": g.failures}
        ok = ok and g.ok
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_rep(cfg: CommandConfig) -> tuple[dict, int]:
    from .braidrep import BraidWord, braid_matrix
    from .fusion import ColoredDisk

    disk = ColoredDisk(cfg.r, cfg.outer, tuple(cfg.colors))
    try:
        word = BraidWord.parse(cfg.word or "", len(cfg.colors))
    except ValueError as exc:
        raise UsageError(str(exc))
    if cfg.on == "image" and word.permute(disk.colors) != disk.colors:
        raise UsageError("word permutes unequal colors; a pure word (or equal colors) is required")
    if cfg.on == "tensor" and disk.drop is None:
        raise UsageError("the disk has no weight space (sum of colors - outer must be even and >= 0)")
    op = braid_matrix(disk, word, on=cfg.on)
    out = _header(cfg) | {
        "word": str(word),
        "on": cfg.on,
        "target_colors": list(op.target),
        "shape": list(op.matrix.shape),
        "matrix": op.matrix.to_json(),
    }
    return out, EXIT_OK


def signatures(block, tol: float, ks: Sequence[int] | None = None) -> list[dict]:
    """Per-embedding (p, q) of the hermitian form h_D."""
    import numpy as np

    from .qgroup import hermitian_form

    r = block.r
    if block.dimension == 0:
        return []
    H = hermitian_form(block)
    if ks is None:
        ks = [k for k in range(1, (r + 1) // 2) if math.gcd(k, r) == 1]
    out = []
    for k in ks:
        A = H.embed(k)
        resid = float(np.abs(A - A.conj().T).max())
        Ah = (A + A.conj().T) / 2
        ev = np.linalg.eigvalsh(Ah)
        out.append({
            "k": k,
            "p": int((ev > tol).sum()),
            "q": int((ev < -tol).sum()),
            "eigenvalues": [float(x) for x in ev],
            "hermitian_residual": resid,
            "min_abs_eigenvalue": float(np.abs(ev).min()),
        })
    return out


def cmd_signature(cfg: CommandConfig) -> tuple[dict, int]:
    from .fusion import ColoredDisk
    from .qgroup import quantum_block

    disk = ColoredDisk(cfg.r, cfg.outer, tuple(cfg.colors))
    block = quantum_block(disk)
    ks = None
    if cfg.k is not None:
        if math.gcd(cfg.k, cfg.r) != 1:
            raise UsageError("--k must be coprime to r")
        ks = [cfg.k]
    sig = signatures(block, cfg.tol, ks)
    ok = all(s["p"] + s["q"] == block.dimension and s["min_abs_eigenvalue"] > cfg.tol
             and s["hermitian_residual"] <= cfg.tol for s in sig)
    out = _header(cfg) | {"dim": block.dimension, "signatures": sig, "nondegenerate": ok}
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: CommandConfig) -> tuple[dict, int]:
    from .verify import run_suite

    reports = run_suite(cfg.suite, cfg.r, cfg.max_n)
    ok = all(r.ok for r in reports)
    out = _header(cfg) | {"suite": cfg.suite, "ok": ok, "reports": [r.to_json() for r in reports]}
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_fusion(cfg: CommandConfig) -> tuple[dict, int]:
    from .fusion import FusionTable

    table = FusionTable.build(cfg.r)
    out = _header(cfg) | {"csv": table.to_csv(),
                          "admissible": [list(k) for k, v in sorted(table.table.items()) if v]}
    return out, EXIT_OK


COMMANDS = {"dim": cmd_dim, "rep": cmd_rep, "signature": cmd_signature, "verify": cmd_verify,
            "fusion": cmd_fusion}


def _render(cfg: CommandConfig, out: dict) -> str:
    if cfg.format == "json":
        return json.dumps(out, sort_keys=True, default=str)
    if cfg.command == "fusion" and cfg.format == "csv":
        return out["csv"].rstrip("\n")
    if cfg.command == "dim":
        if cfg.format == "csv":
            return "r,outer,colors,fusion_dim,linear_algebra_dim\n" + \
                f"{cfg.r},{cfg.outer},\"{','.join(map(str, cfg.colors))}\",{out['fusion_dim']},{out['linear_algebra_dim']}"
        flag = "" if out["agree"] else "  MISMATCH"
        return f"{out['fusion_dim']}/{out['linear_algebra_dim']}{flag}"
    if cfg.command == "signature" and cfg.format == "text":
        lines = [f"dim {out['dim']}"] + [f"k={s['k']}: (p, q) = ({s['p']}, {s['q']})" for s in out["signatures"]]
        return "\n".join(lines)
    if cfg.command == "verify" and cfg.format == "text":
        lines = []
        for rep in out["reports"]:
            for c in rep["checks"]:
                lines.append(f"{'PASS' if c['ok'] else 'FAIL'} {rep['suite']}: {c['name']}"
                             + (f"  [{c['witness']}]" if c.get("witness") else ""))
        return "\n".join(lines)
    return json.dumps(out, sort_keys=True, default=str)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qblocks", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, disk=True):
        sp.add_argument("--r", type=int, required=True)
        if disk:
            sp.add_argument("--outer", type=int, required=True)
            sp.add_argument("--colors", type=str, required=True)
        sp.add_argument("--format", default="json", choices=("json", "csv", "text"))

    sp = sub.add_parser("dim", help="block dimension by fusion count and by linear algebra")
    common(sp)
    sp.add_argument("--cache", default=None)
    sp.add_argument("--split", type=int, default=None)
    sp = sub.add_parser("rep", help="braid matrices on a block")
    common(sp)
    sp.add_argument("--word", default="")
    sp.add_argument("--on", default="image", choices=("image", "tensor"))
    sp = sub.add_parser("signature", help="signatures of the hermitian form per embedding")
    common(sp)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp = sub.add_parser("verify", help="run invariant suites")
    common(sp, disk=False)
    sp.add_argument("--suite", required=True)
    sp.add_argument("--max-n", dest="max_n", type=int, default=None)
    sp = sub.add_parser("fusion", help="fusion table")
    common(sp, disk=False)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with code 2 on usage errors
    try:
        cfg = CommandConfig(
            command=args.command,
            r=args.r,
            outer=getattr(args, "outer", None),
            colors=_parse_colors(getattr(args, "colors", None)),
            word=getattr(args, "word", None),
            split=getattr(args, "split", None),
            on=getattr(args, "on", "image"),
            k=getattr(args, "k", None),
            format=args.format,
            suite=getattr(args, "suite", None),
            tol=getattr(args, "tol", 1e-9),
            max_n=getattr(args, "max_n", None),
            cache=getattr(args, "cache", None),
        )
        validate(cfg)
        out, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(_render(cfg, out) + "\n")
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
