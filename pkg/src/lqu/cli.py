"""Command-line interface: ``lqu compute | werner-sweep | dqc1-sweep | spin-probe-sweep | verify``.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 property
failure, 5 a required input (observable, second state, spectrum) is missing.
"""
from __future__ import annotations

import argparse
import io
import json
import shlex
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, matfile, tolerances, verify
from .linalg import RNG_ALGORITHM, SIGMA_Z, ValidationError, haar_unitary, tensor
from .metrology import qfi, spin_probe_lqu_formula
from .states import BipartiteState, DensityMatrix, dqc1_output, linear_entropy_two_qubit, spin_probe, werner
from .uncertainty import (
    Observable,
    hellinger_sq,
    lqu_bruteforce,
    lqu_closed_form,
    lqu_qubit,
    skew_information,
    variance,
)

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_PROPERTY, EXIT_MISSING = 0, 2, 3, 4, 5
MAX_DQC1_QUBITS = 12


class MissingInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def parse_grid(spec: str, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """'start:stop:steps' -> `steps` evenly spaced points, all within [lo, hi]."""
    try:
        start, stop, steps = spec.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError:
        raise matfile.ParseError(f"grid must look like start:stop:steps, got {spec!r}") from None
    if steps < 1:
        raise matfile.ParseError("grid needs at least one point")
    grid = np.linspace(start, stop, steps)
    if grid.min() < lo or grid.max() > hi:
        raise ValidationError(f"grid {spec} leaves [{lo}, {hi}]")
    return grid


def parse_floats(spec: str) -> list[float]:
    try:
        return [float(Fraction(x.strip())) for x in spec.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {spec!r}") from None


def _fmt(x: float) -> str:
    return "%.12e" % x


def write_csv(out, columns: list[str], rows: list[list[float]], header: str) -> None:
    buf = io.StringIO(newline="")
    buf.write(f"# {header}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(float(v)) for v in row) + "\n")
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def write_records(args, columns, rows, seed=None) -> None:
    header = f"lqu {__version__} seed={seed if seed is not None else 'none'} rng={RNG_ALGORITHM} cmd={args.cmdline}"
    if args.format == "json":
        doc = {"header": header, "columns": columns, "rows": [[float(v) for v in r] for r in rows]}
        text = json.dumps(doc, indent=1) + "\n"
        if args.out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
    else:
        write_csv(args.out, columns, rows, header)


def _as_local(obs: Observable, state: DensityMatrix) -> np.ndarray:
    if obs.dim == state.dim:
        return obs.matrix
    if isinstance(state, BipartiteState) and obs.dim == state.d_A:
        return obs.local(state.d_B)
    raise ValidationError(f"observable of size {obs.dim} fits neither the state nor subsystem A")


def _load(path, expected):
    obj = matfile.load(path)
    if not isinstance(obj, expected):
        raise ValidationError(f"{path} does not hold a {expected.__name__}")
    return obj


def cmd_compute(args) -> int:
    state = _load(args.state, DensityMatrix)
    hashes = {args.state: matfile.file_hash(args.state)}
    obs = None
    if args.observable:
        obs = _load(args.observable, Observable)
        hashes[args.observable] = matfile.file_hash(args.observable)
    q = args.quantity
    info = {}
    if q == "lqu":
        if not isinstance(state, BipartiteState):
            raise ValidationError("lqu needs dA and dB in the state file")
        if state.d_A == 2 and args.spectrum is None:
            value, info["method"] = lqu_closed_form(state), "closed_form"
        elif state.d_A == 2:
            value, info["method"] = lqu_qubit(state, args.spectrum), "closed_form_scaled"
        elif args.spectrum is None:
            raise MissingInput("lqu with dA > 2 needs --spectrum")
        else:
            value = lqu_bruteforce(state, args.spectrum, budget=args.budget, seed=args.seed)
            info.update(method="bruteforce", budget=args.budget, seed=args.seed, rng=RNG_ALGORITHM)
        if args.spectrum is not None:
            info["spectrum"] = list(args.spectrum)
    elif q == "hellinger":
        if args.other:
            other = _load(args.other, DensityMatrix)
            hashes[args.other] = matfile.file_hash(args.other)
        elif obs is not None:
            k = _as_local(obs, state)
            other = DensityMatrix(k @ state.matrix @ k.conj().T)
        else:
            raise MissingInput("hellinger needs --other STATE or a root-of-unity --observable")
        value = hellinger_sq(state, other)
    else:
        if obs is None:
            raise MissingInput(f"{q} needs --observable")
        k = _as_local(obs, state)
        value = {"skew": skew_information, "variance": variance, "qfi": qfi}[q](state, k)
    doc = {
        "quantity": q,
        "value": value,
        "inputs": hashes,
        "tolerances": tolerances.get().as_dict(),
        **info,
        "version": __version__,
    }
    if args.format == "json":
        text = json.dumps(doc, indent=1, sort_keys=True)
        print(text)
    else:
        print(f"{value:.12f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def werner_rows(grid) -> list[list[float]]:
    sz = tensor(SIGMA_Z, np.eye(2))
    rows = []
    for p in grid:
        rho = werner(float(p))
        rows.append([p, variance(rho, sz), lqu_closed_form(rho), linear_entropy_two_qubit(rho)])
    return rows


def cmd_werner_sweep(args) -> int:
    grid = parse_grid(args.grid)
    write_records(args, ["p", "variance_sz", "lqu", "linear_entropy"], werner_rows(grid))
    return EXIT_OK


def dqc1_rows(n: int, grid, unitary) -> list[list[float]]:
    rows = []
    for mu in grid:
        numeric = lqu_closed_form(dqc1_output(n, float(mu), unitary))
        formula = 0.5 * (1 - np.sqrt(1 - mu ** 2))
        rows.append([n, mu, numeric, formula, abs(numeric - formula)])
    return rows


def cmd_dqc1_sweep(args) -> int:
    if not 1 <= args.n <= MAX_DQC1_QUBITS:
        raise ValidationError(f"register size n={args.n} outside [1, {MAX_DQC1_QUBITS}]")
    grid = parse_grid(args.grid)
    seed = None
    if args.unitary:
        u = _load(args.unitary, np.ndarray)
    else:
        seed = args.seed
        u = haar_unitary(2 ** args.n, seed)
    write_records(args, ["n", "mu", "lqu_numeric", "lqu_formula", "abs_error"], dqc1_rows(args.n, grid, u), seed)
    return EXIT_OK


def spin_probe_rows(js, grid, nu: int) -> list[list[float]]:
    rows = []
    for j in js:
        h = tensor(np.diag([j, -j]), np.eye(2))
        for r in grid:
            probe = spin_probe(j, float(r))
            f = qfi(probe, h)
            numeric = lqu_qubit(probe, (-j, j))
            var_bound = 1.0 / (nu * f) if f > 0 else float("inf")
            rows.append([j, r, spin_probe_lqu_formula(j, float(r)), numeric, f, 4 * numeric,
                         var_bound, 2 * j, 4 * j ** 2])
    return rows


def cmd_spin_probe_sweep(args) -> int:
    if any(j <= 0 for j in args.j):
        raise ValidationError("spin values must be positive")
    if args.nu < 1:
        raise ValidationError("--nu must be positive")
    grid = parse_grid(args.grid)
    columns = ["j", "r", "lqu_formula", "lqu_numeric", "qfi", "four_lqu", "var_bound", "shot_noise", "heisenberg"]
    write_records(args, columns, spin_probe_rows(args.j, grid, args.nu))
    return EXIT_OK


def cmd_verify(args) -> int:
    start = time.perf_counter()
    override = -1.0 if args.self_test else None
    results = verify.run(args.suite, args.seed, args.trials, override)
    print(verify.format_report(results, args.seed))
    print(f"total wall time {time.perf_counter() - start:.2f}s")
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (PCG64)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(prog="lqu", description="Local quantum uncertainty toolkit")
    parser.add_argument("--version", action="version", version=f"lqu {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", parents=[common], help="evaluate one quantity on a state file")
    p.add_argument("state")
    p.add_argument("--quantity", "-q", required=True, choices=("lqu", "skew", "qfi", "hellinger", "variance"))
    p.add_argument("--observable", help="observable file (full or subsystem-A sized)")
    p.add_argument("--other", help="second state file for hellinger")
    p.add_argument("--spectrum", type=parse_floats, help="comma-separated local spectrum for lqu")
    p.add_argument("--budget", type=int, default=2000)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("werner-sweep", parents=[common], help="variance, LQU and linear entropy of Werner states")
    p.add_argument("--grid", default="0:1:101")
    p.set_defaults(func=cmd_werner_sweep)

    p = sub.add_parser("dqc1-sweep", parents=[common], help="LQU of the DQC1 output state against mu")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--grid", default="0:1:11")
    p.add_argument("--unitary", help="unitary matrix file instead of a Haar sample")
    p.set_defaults(func=cmd_dqc1_sweep)

    p = sub.add_parser("spin-probe-sweep", parents=[common], help="bounds for the dephased spin-j probe")
    p.add_argument("--j", type=parse_floats, default=[0.5, 1.0, 2.0, 5.0])
    p.add_argument("--grid", default="0.05:1:20")
    p.add_argument("--nu", type=int, default=1000)
    p.set_defaults(func=cmd_spin_probe_sweep)

    p = sub.add_parser("verify", help="run the randomized property suites")
    p.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None, help="override every property's trial count")
    p.add_argument("--self-test", action="store_true",
                   help="replace every tolerance by -1 so the harness must report failure")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        tolerances.configure(tolerances.Tolerances.from_env())
    except (ValueError, KeyError) as exc:
        print(f"lqu: error: bad {tolerances.ENV_VAR}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.cmdline = "lqu " + shlex.join(argv)
    try:
        return args.func(args)
    except matfile.ParseError as exc:
        print(f"lqu: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"lqu: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MissingInput as exc:
        print(f"lqu: missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
