"""Command line entry point ``hare``.

Exit codes: 0 success, 1 I/O error, 2 parse or usage error, 3 internal error
or failed verification, 4 instance too large for the exhaustive oracle.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .compress import ContradictionError
from .engine import DEFAULT_ALPHA, reduce_hamiltonian
from .instances import (
    GeneratorSpec,
    detect_format,
    generate,
    parse_ising,
    parse_maxcut,
    parse_qubo,
    random_instance,
    write_ising,
)
from .model import IsingHamiltonian, ModelError, qubo_to_ising
from .oracle import MAX_SPINS, OracleGuardError, exact_ground_states

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_INTERNAL, EXIT_GUARD = 0, 1, 2, 3, 4

log = logging.getLogger("hare")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def load_instance(path: Path, fmt: str = "auto") -> tuple[IsingHamiltonian, int]:
    """Read ``path`` as a Hamiltonian plus the constant added by format conversion."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    try:
        if fmt == "auto":
            fmt = detect_format(text)
        if fmt == "ising":
            return parse_ising(text), 0
        if fmt == "qubo":
            return qubo_to_ising(parse_qubo(text))
        return parse_maxcut(text), 0
    except ModelError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def _reduce_one(src: Path, out: Path | None, map_path: Path | None, report_path: Path | None,
                fmt: str, alpha: int, weak_ngs: bool, timing: bool) -> dict:
    ham, conv_offset = load_instance(src, fmt)
    try:
        res = reduce_hamiltonian(ham, alpha=alpha, weak_ngs=weak_ngs)
    except (AssertionError, ContradictionError) as exc:
        raise CliError(f"{src}: internal error: {exc}", EXIT_INTERNAL) from None
    report = res.report.to_dict()
    report["offset"] += conv_offset
    if not timing:
        report["time_ms"] = 0.0
    fmap = res.function.to_dict()
    fmap["offset"] += conv_offset
    if out is not None:
        _write(out, write_ising(res.reduced))
    if map_path is not None:
        _write(map_path, json.dumps(fmap, indent=1) + "\n")
    if report_path is not None:
        _write(report_path, json.dumps(report, indent=1) + "\n")
    report["instance"] = str(src)
    return report


def _summary(r: dict) -> str:
    return (f"{r['instance']}: {r['nodes_before']} -> {r['nodes_after']} spins, "
            f"reduction {100 * r['reduction_ratio_logical']:.1f}%, "
            f"{r['merges']} merges, offset {r['offset']}")


def _task(args: tuple) -> dict | tuple[str, int]:
    try:
        return _reduce_one(*args)
    except CliError as exc:
        return str(exc), exc.code


def cmd_reduce(ns: argparse.Namespace) -> int:
    src = Path(ns.input)
    weak = ns.weak_ngs == "on"
    timing = not ns.no_timing
    if not src.is_dir():
        out = Path(ns.output) if ns.output else None
        r = _reduce_one(src, out, _opt(ns.map), _opt(ns.report), ns.format, ns.alpha, weak, timing)
        print(json.dumps(r, indent=1) if ns.json else _summary(r))
        return EXIT_OK

    if not ns.output:
        raise CliError("batch mode needs -o DIR", EXIT_PARSE)
    dst = Path(ns.output)
    try:
        dst.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {dst}: {exc.strerror or exc}", EXIT_IO) from None
    files = sorted(p for p in src.iterdir() if p.is_file())
    tasks = [
        (p, dst / f"{p.stem}.reduced.ising", dst / f"{p.stem}.map.json",
         dst / f"{p.stem}.report.json", ns.format, ns.alpha, weak, timing)
        for p in files
    ]
    if ns.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]

    worst = EXIT_OK
    ok = []
    for res in results:
        if isinstance(res, tuple):
            print(res[0], file=sys.stderr)
            worst = max(worst, res[1])
        else:
            ok.append(res)
            if not ns.json:
                print(_summary(res))
    before = sum(r["nodes_before"] for r in ok)
    after = sum(r["nodes_after"] for r in ok)
    agg = {
        "instances": len(ok),
        "failed": len(results) - len(ok),
        "nodes_before": before,
        "nodes_after": after,
        "reduction_ratio_logical": 1.0 - after / before if before else 0.0,
    }
    if ns.json:
        print(json.dumps({"summary": agg, "reports": ok}, indent=1))
    else:
        print(f"total: {len(ok)} instances, {before} -> {after} spins, "
              f"reduction {100 * agg['reduction_ratio_logical']:.1f}%"
              + (f", {agg['failed']} failed" if agg["failed"] else ""))
    return worst


def verify_instance(ham: IsingHamiltonian, alpha: int = DEFAULT_ALPHA, weak_ngs: bool = True) -> tuple[bool, str]:
    """Reduce ``ham`` and compare both sides against exhaustive enumeration."""
    if ham.n > MAX_SPINS:
        raise OracleGuardError(f"{ham.n} spins exceeds the oracle limit of {MAX_SPINS}")
    res = reduce_hamiltonian(ham, alpha=alpha, weak_ngs=weak_ngs)
    orig = exact_ground_states(ham)
    red = exact_ground_states(res.reduced)
    if orig.ground_energy != red.ground_energy + res.offset:
        return False, (f"min original {orig.ground_energy} != min reduced "
                       f"{red.ground_energy} + offset {res.offset}")
    for y in red.ground_states:
        x = res.function(y)
        e = ham.energy(x)
        if e != orig.ground_energy:
            return False, f"reconstruction of {y} has energy {e}, expected {orig.ground_energy}"
    return True, f"ground energy {orig.ground_energy}, {ham.n} -> {res.reduced.n} spins"


def cmd_verify(ns: argparse.Namespace) -> int:
    weak = ns.weak_ngs == "on"
    if ns.input:
        cases = [(ns.input, load_instance(Path(ns.input), ns.format)[0])]
    else:
        if ns.random is None or ns.nodes is None:
            raise CliError("verify needs -i PATH or --random K --nodes N", EXIT_PARSE)
        cases = [(f"random seed={ns.seed + k}", random_instance(ns.nodes, ns.seed + k))
                 for k in range(ns.random)]
    failed = 0
    for name, ham in cases:
        try:
            ok, detail = verify_instance(ham, ns.alpha, weak)
        except OracleGuardError as exc:
            raise CliError(f"{name}: {exc}", EXIT_GUARD) from None
        except (AssertionError, ContradictionError) as exc:
            ok, detail = False, f"internal error: {exc}"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    if len(cases) > 1:
        print(f"{len(cases) - failed}/{len(cases)} passed")
    return EXIT_INTERNAL if failed else EXIT_OK


def cmd_gen(ns: argparse.Namespace) -> int:
    try:
        spec = GeneratorSpec(ns.topology, ns.nodes, ns.avg_degree, ns.weight_bound, ns.seed,
                             ns.with_fields)
    except ModelError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    ham = generate(spec)
    _write(Path(ns.output), write_ising(ham))
    print(f"wrote {ns.output}: {ham.n} spins, {len(ham.j)} couplings, {len(ham.h)} fields")
    return EXIT_OK


def instance_stats(ham: IsingHamiltonian) -> dict:
    deg = [0] * (ham.n + 1)
    for a, b in ham.j:
        deg[a] += 1
        deg[b] += 1
    deg = deg[1:]
    weights = list(ham.j.values()) + list(ham.h.values())
    return {
        "n": ham.n,
        "m": len(ham.j),
        "fields": len(ham.h),
        "degree_min": min(deg, default=0),
        "degree_mean": (2 * len(ham.j) / ham.n) if ham.n else 0.0,
        "degree_max": max(deg, default=0),
        "weight_min": min(weights, default=0),
        "weight_max": max(weights, default=0),
    }


def cmd_stats(ns: argparse.Namespace) -> int:
    ham, _ = load_instance(Path(ns.input), ns.format)
    s = instance_stats(ham)
    if ns.json:
        print(json.dumps(s, indent=1))
    else:
        print(f"n={s['n']} m={s['m']} fields={s['fields']} "
              f"degree min/mean/max={s['degree_min']}/{s['degree_mean']:.2f}/{s['degree_max']} "
              f"weights=[{s['weight_min']}, {s['weight_max']}]")
    return EXIT_OK


def _opt(p: str | None) -> Path | None:
    return Path(p) if p else None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hare", description="Optimality-preserving Ising/QUBO reduction.")
    sub = p.add_subparsers(dest="command", required=True)
    formats = ["auto", "mqlib", "ising", "qubo"]

    r = sub.add_parser("reduce", help="reduce an instance or a directory of instances")
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output")
    r.add_argument("--format", choices=formats, default="auto")
    r.add_argument("--alpha", type=_positive, default=DEFAULT_ALPHA)
    r.add_argument("--weak-ngs", choices=["on", "off"], default="on")
    r.add_argument("--map")
    r.add_argument("--report")
    r.add_argument("--json", action="store_true", help="print the report as JSON")
    r.add_argument("--jobs", type=_positive, default=1)
    r.add_argument("--no-timing", action="store_true", help="write time_ms as 0 for reproducible reports")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="check a reduction against exhaustive search")
    v.add_argument("-i", "--input")
    v.add_argument("--format", choices=formats, default="auto")
    v.add_argument("--random", type=_positive, metavar="K")
    v.add_argument("--nodes", type=_positive)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--alpha", type=_positive, default=DEFAULT_ALPHA)
    v.add_argument("--weak-ngs", choices=["on", "off"], default="on")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("topology", choices=["er", "sf"])
    g.add_argument("--nodes", type=_positive, required=True)
    g.add_argument("--avg-degree", type=_positive, required=True)
    g.add_argument("--weight-bound", type=_positive, default=1 << 10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--with-fields", action="store_true")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("stats", help="summarize an instance")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--format", choices=formats, default="auto")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_stats)
    return p


def _setup_logging() -> None:
    name = os.environ.get("HARE_LOG", "error").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.ERROR
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except CliError as exc:
        print(f"hare: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
