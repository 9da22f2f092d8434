"""Command-line front end.

Every command prints a JSON report (or a table with ``--human``) and exits
with 0 when everything passed, 1 when a check failed, 2 on a usage error and
3 on an I/O or parse error.
"""
import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ._config import resolve_tol
from .errors import DimensionError, HeropError, NonCommutingError, TupleFileError
from .fileformat import (
    TupleFile,
    dumps_canonical,
    matrix_to_json,
    read_tuple_file,
    serialize_tuple_file,
    write_tuple_file,
)
from .gen import gen_A2_construction, gen_block_example, gen_jordan_isometry, gen_spherical_unitary
from .matcore import fro
from .spectral import split_SN, verify_decomposition_theorem
from .structure2 import classify_2_isometric, reconstruct
from .tuples import (
    CheckReport,
    CommutingTuple,
    check_A_m_isometric,
    check_A_n_nilpotent,
    check_isosymmetric,
    check_spherical_A_isometry,
    check_toral,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

KINDS = ("m-iso", "spherical", "nilpotent", "toral", "isosym")
FAMILIES = ("spherical-unitary", "block", "a2", "jordan")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _record(name, report):
    return report.to_dict(name)


def _vector_json(v):
    return [[float(np.real(z)), float(np.imag(z))] for z in np.atleast_1d(v)]


class Report:
    def __init__(self, command, tolerance):
        self.command = command
        self.tolerance = tolerance
        self.checks = []
        self.artifacts = {}
        self.errors = []

    def add(self, name, report):
        self.checks.append(_record(name, report))

    def error(self, name, exc):
        self.errors.append({"name": name, "error": type(exc).__name__, "message": str(exc)})

    @property
    def passed(self):
        return not self.errors and all(c["passed"] for c in self.checks)

    def to_dict(self):
        out = {"command": self.command, "passed": self.passed, "tolerance": self.tolerance,
               "checks": self.checks}
        if self.errors:
            out["errors"] = self.errors
        if self.artifacts:
            out["artifacts"] = self.artifacts
        return _jsonable(out)

    def render_human(self):
        rows = [("check", "passed", "residual", "tolerance")]
        for c in self.checks:
            res = c["residual"]
            rows.append((c["name"], "yes" if c["passed"] else "NO",
                         res if isinstance(res, str) else f"{res:.3e}", f"{c['tolerance']:.1e}"))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = [f"{self.command}: {'PASSED' if self.passed else 'FAILED'} (tol {self.tolerance:.1e})"]
        lines += ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        for e in self.errors:
            lines.append(f"error in {e['name']}: {e['error']}: {e['message']}")
        for name, path in self.artifacts.items():
            if isinstance(path, str):
                lines.append(f"wrote {name}: {path}")
        return "\n".join(lines) + "\n"


# commands

def load_tuple(path):
    """Read a tuple file; a non-commuting or inconsistent tuple is an input error."""
    try:
        tf = read_tuple_file(path)
    except TupleFileError as exc:
        raise TupleFileError(f"{path}: {exc}") from None
    try:
        return tf, tf.to_tuple()
    except (NonCommutingError, DimensionError) as exc:
        raise TupleFileError(f"{path}: operators: {exc}") from None


def _check_one(path, args, tol):
    tf, T = load_tuple(path)
    A = tf.A_or_identity()
    kind = args.kind
    if kind == "m-iso":
        return check_A_m_isometric(T, A, args.m, tol)
    if kind == "spherical":
        return check_spherical_A_isometry(T, A, tol)
    if kind == "nilpotent":
        return check_A_n_nilpotent(T, A, args.n if args.n is not None else 1, tol)
    if kind == "toral":
        return check_toral(T, A, args.m, tol)
    return check_isosymmetric(T, args.m, args.n if args.n is not None else 0, tol)


def cmd_check(args, tol):
    report = Report("check", tol)
    if args.kind == "isosym" and args.m + (args.n or 0) < 1:
        raise UsageError("isosym needs m + n >= 1")

    def run(path):
        try:
            return path, _check_one(path, args, tol), None
        except HeropError as exc:
            return path, None, exc

    # results are collected in input order, one record per file
    with ThreadPoolExecutor(max_workers=min(4, len(args.files))) as pool:
        results = list(pool.map(run, args.files))
    for path, rep, exc in results:
        name = f"{path}:{args.kind}"
        if isinstance(exc, (TupleFileError, OSError)):
            raise exc
        if exc is not None:
            report.error(name, exc)
        else:
            report.add(name, rep)
    return report


def _stem(path):
    name = Path(path).name
    return name[:-5] if name.endswith(".json") else name


def cmd_decompose(args, tol):
    tf, T = load_tuple(args.file)
    report = Report("decompose", tol)
    sn = split_SN(T, args.cluster_tol)
    diag = sn.diagnostics
    scale = diag["scale"]
    n = T.n
    report.add("reconstruction", CheckReport.from_residual(
        diag["reconstruction"] / scale, tol, "||S + N - T||_F / scale"))
    report.add("commutation_SN", CheckReport.from_residual(
        diag["commutation_SN"] / scale, tol, "max ||S_j N_k - N_k S_j||_F / scale"))
    nil = diag["nilpotency_index"]
    report.add("nilpotent_N", CheckReport(nil is not None, 0.0 if nil is not None else math.inf, tol,
                                          f"nilpotency index {nil}"))
    for key in ("sum_identity", "idempotent", "cross"):
        report.add(key, CheckReport.from_residual(diag[key] / n, tol, f"{key} residual / n"))
    dec = sn.decomposition
    section = {"points": [_vector_json(p) for p in dec.points], "dims": list(dec.dims)}
    out_dir = Path(args.out_dir)
    stem = _stem(args.file)
    for role, part in (("S", sn.S), ("N", sn.N)):
        meta = {"source": Path(args.file).name, "role": role}
        out = TupleFile.from_tuple(part, tf.A, meta, {"decomposition": section})
        path = out_dir / f"{stem}.{role}.json"
        write_tuple_file(path, out)
        report.artifacts[role] = str(path)
    return report


def structure_document(structure):
    """The ``structure`` section of a classify2 output file."""
    return {
        "unitary_dim": 0 if structure.unitary_tuple is None else structure.unitary_tuple.n,
        "unitary_points": [_vector_json(p) for p in structure.unitary_points],
        "blocks": [
            {
                "alpha": _vector_json(b.alpha),
                "p": b.shape[0],
                "q": b.shape[1],
                "V": [matrix_to_json(v) if v.size else [] for v in b.V],
            }
            for b in structure.blocks
        ],
        "change_of_basis": matrix_to_json(structure.change_of_basis),
    }


def cmd_classify2(args, tol):
    tf, T = load_tuple(args.file)
    report = Report("classify2", tol)
    structure = classify_2_isometric(T, tol, args.cluster_tol)
    scale = T.scale
    rebuilt = reconstruct(structure)
    rt = fro(np.asarray(rebuilt.operators) - T.operators) / scale
    report.add("round_trip", CheckReport.from_residual(rt, max(tol, 1e-7), "||reconstruct - T||_F / scale"))
    for i, blk in enumerate(structure.blocks):
        report.add(f"block_{i}_constraint", CheckReport.from_residual(
            blk.constraint_residual() / scale, tol, "||sum conj(alpha_j) V_j||_F / scale"))
    canonical = CommutingTuple(structure.canonical_operators(), commutation_tol=np.inf)
    meta = {"source": Path(args.file).name, "role": "structure"}
    out = TupleFile.from_tuple(canonical, None, meta, {"structure": structure_document(structure)})
    path = args.out or f"{_stem(args.file)}.structure.json"
    write_tuple_file(path, out)
    report.artifacts["structure"] = str(path)
    return report


def cmd_verify_theorem(args, tol):
    tf, T = load_tuple(args.file)
    report = Report("verify-theorem", tol)
    result = verify_decomposition_theorem(T, tf.A, args.m, tol, args.cluster_tol)
    for name, rep in result.checks.items():
        report.add(name, rep)
    return report


def _parse_complex_list(text):
    try:
        return [complex(part.strip().replace(" ", "")) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse complex list {text!r}") from None


def _parse_orders(text):
    orders = []
    for item in text.split(","):
        lam, _, size = item.partition(":")
        try:
            orders.append((complex(lam.strip()), int(size)))
        except ValueError:
            raise UsageError(f"--orders items look like LAMBDA:SIZE, got {item!r}") from None
    return orders


def cmd_generate(args, tol):
    fam = args.family
    params = {"family": fam, "seed": str(args.seed)}
    A = None
    if fam == "spherical-unitary":
        T = gen_spherical_unitary(args.d, args.n, args.seed)
        params.update(d=str(args.d), n=str(args.n))
        check = check_spherical_A_isometry(T, None, tol)
    elif fam == "block":
        alpha = np.array(_parse_complex_list(args.alpha)) if args.alpha else np.eye(args.d)[0]
        alpha = alpha / np.linalg.norm(alpha)
        T = gen_block_example(alpha, args.n, args.m, args.seed)
        params.update(alpha=args.alpha or "e1", n=str(args.n), m=str(args.m))
        check = check_A_m_isometric(T, None, 2, tol)
    elif fam == "a2":
        inst = gen_A2_construction(args.d, args.n, args.seed)
        T, A = inst.T, inst.A
        params.update(d=str(args.d), n=str(args.n), rank=str(inst.rank))
        check = check_A_m_isometric(T, A, 2, tol)
    else:
        orders = _parse_orders(args.orders)
        T = gen_jordan_isometry(orders, args.seed)
        params["orders"] = args.orders
        m = 2 * max(s for _, s in orders) - 1
        check = check_A_m_isometric(T, None, m, tol)
    tf = TupleFile.from_tuple(T, A, params)
    report = Report("generate", tol)
    report.add("advertised_property", check)
    if args.out:
        write_tuple_file(args.out, tf)
        report.artifacts["tuple"] = str(args.out)
        return report
    report.artifacts["tuple"] = serialize_tuple_file(tf).decode("utf-8")
    return report


def build_parser():
    p = _Parser(prog="herop", description="Hereditary calculus toolkit for commuting matrix tuples.")
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="residual tolerance (default: HEROP_TOL or 1e-9)")
    common.add_argument("--human", action="store_true", help="print a table instead of JSON")
    clustered = _Parser(add_help=False)
    clustered.add_argument("--cluster-tol", type=float, default=None,
                           help="eigenvalue clustering tolerance (default 1e-8 * scale)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="run one definitional check on tuple files")
    c.add_argument("--kind", choices=KINDS, required=True)
    c.add_argument("--m", type=int, default=1)
    c.add_argument("--n", type=int, default=None)
    c.add_argument("files", nargs="+")

    c = sub.add_parser("decompose", parents=[common, clustered], help="split T = S + N")
    c.add_argument("file")
    c.add_argument("--out-dir", default=".")

    c = sub.add_parser("classify2", parents=[common, clustered], help="structure of a 2-isometry")
    c.add_argument("file")
    c.add_argument("--out", default=None)

    c = sub.add_parser("verify-theorem", parents=[common, clustered],
                       help="split an (A,m)-isometry and certify both parts")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("file")

    c = sub.add_parser("generate", parents=[common], help="write a seeded example tuple")
    c.add_argument("--family", choices=FAMILIES, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--d", type=int, default=2)
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--m", type=int, default=1)
    c.add_argument("--alpha", default=None, help="comma-separated point on the sphere, e.g. '0.6,0.8j'")
    c.add_argument("--orders", default="1:2", help="comma-separated LAMBDA:SIZE items")
    c.add_argument("--out", default=None)
    return p


COMMANDS = {
    "check": cmd_check,
    "decompose": cmd_decompose,
    "classify2": cmd_classify2,
    "verify-theorem": cmd_verify_theorem,
    "generate": cmd_generate,
}


def _validate(args):
    for key in ("m", "n", "d"):
        v = getattr(args, key, None)
        if v is not None and v < (0 if args.command == "check" and args.kind == "isosym" else 1):
            raise UsageError(f"--{key} must be positive")
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if args.tol is not None and not (args.tol > 0 and math.isfinite(args.tol)):
        raise UsageError("--tol must be positive")


def run_command(argv, stdout=None, stderr=None):
    """Run one command; returns ``(exit_code, report_dict_or_None)``."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        tol = resolve_tol(args.tol)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE, None
    except ValueError as exc:  # e.g. a malformed HEROP_TOL
        stderr.write(f"herop: {exc}\n")
        return EXIT_USAGE, None
    except SystemExit as exc:  # --help
        return (EXIT_OK if not exc.code else EXIT_USAGE), None

    report = None
    try:
        report = COMMANDS[args.command](args, tol)
    except UsageError as exc:
        stderr.write(f"herop: {exc}\n")
        return EXIT_USAGE, None
    except (TupleFileError, OSError) as exc:
        stderr.write(f"herop: {exc}\n")
        return EXIT_IO, None
    except HeropError as exc:
        report = Report(args.command, tol)
        report.error(getattr(args, "file", args.command), exc)

    out = report.to_dict()
    if args.command == "generate" and not args.out and not args.human:
        stdout.write(out["artifacts"]["tuple"])
    elif args.human:
        stdout.write(report.render_human())
    else:
        stdout.write(dumps_canonical(out))
    stdout.flush()
    return (EXIT_OK if report.passed else EXIT_FAILED), out


def main(argv=None):
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
