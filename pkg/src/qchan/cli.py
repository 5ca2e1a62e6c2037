"""``qchan`` command-line front end.

Exit status: 0 success, 1 analysis-negative (a check failed or a premise does
not hold), 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from . import channel as chm
from . import contractivity as con
from . import dynamics as dyn
from . import enterg as ent
from . import toric
from .errors import ConditionViolated, ParseError, QChanError
from .linalg import CHANNEL_TOL
from .qstate import DensityMatrix, make_density, make_pure, matrix_from_json

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


# input helpers

def _load_json(source: str) -> tuple[dict, bytes]:
    """Read JSON from a path, or parse ``source`` itself when it looks like JSON."""
    if source.lstrip().startswith("{"):
        raw = source.encode()
    else:
        try:
            raw = Path(source).read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc.strerror}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{source}: expected a JSON object")
    return data, raw


def load_channel(source: str, tol: float = CHANNEL_TOL):
    data, raw = _load_json(source)
    try:
        return chm.channel_from_json(data, tol=tol), raw
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, QChanError):
            raise
        raise ParseError(f"{source}: malformed channel ({exc})") from exc


def load_state(source: str, tol: float = 1e-9) -> tuple[DensityMatrix, bytes]:
    """State JSON: ``{"re", "im"}`` density matrix, ``{"pure": {...}}`` or ``{"basis": i, "dim": d}``."""
    data, raw = _load_json(source)
    try:
        if "basis" in data:
            m = np.zeros((data["dim"], data["dim"]), dtype=complex)
            m[data["basis"], data["basis"]] = 1
            return make_density(m, tol), raw
        if "pure" in data:
            v = make_pure(matrix_from_json(data["pure"]).reshape(-1), tol)
            return v.density(), raw
        return DensityMatrix.from_json(data, tol), raw
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"{source}: malformed state ({exc})") from exc


# output helpers

def _clean(obj):
    """Make ``obj`` JSON-ready with floats at 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    return obj


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict) and val and not {"re", "im"} >= set(val):
            lines.append(f"{pad}{key}:")
            lines += _text(val, indent + 1)
        else:
            lines.append(f"{pad}{key}: {json.dumps(val)}")
    return lines


class Reporter:
    def __init__(self, args, argv):
        self.args = args
        self.argv = argv
        self.inputs: list[bytes] = []
        self.warnings: list[str] = []

    def digest(self) -> str:
        h = hashlib.sha256()
        for raw in self.inputs:
            h.update(raw)
        return h.hexdigest()[:16]

    def emit(self, results: dict, text: str | None = None, csv_text: str | None = None):
        report = _clean({"command": self.argv, "input_digest": self.digest(), "seed": self.args.seed,
                         "results": results, "warnings": self.warnings})
        if self.args.format == "json":
            out = json.dumps(report, indent=2, sort_keys=True) + "\n"
        elif self.args.format == "csv" and csv_text is not None:
            out = csv_text
        else:
            body = text if text is not None else "\n".join(_text(report["results"]))
            out = body.rstrip("\n") + "\n"
            out += "".join(f"warning: {w}\n" for w in self.warnings)
        if self.args.output:
            Path(self.args.output).write_text(out)
        else:
            sys.stdout.write(out)


def _matrix(m) -> dict:
    m = np.asarray(m)
    return {"re": m.real, "im": m.imag}


# commands

def cmd_analyze(args, rep: Reporter) -> int:
    ch, raw = load_channel(args.channel, args.tolerance)
    rep.inputs.append(raw)
    res: dict = {"channel": ch.name or "kraus", "dim_in": ch.dim_in, "dim_out": ch.dim_out,
                 "kraus_count": len(ch.kraus),
                 "validation": {"trace_defect": ch.trace_defect(),
                                "choi_min_eigenvalue": chm.validate_choi(ch.choi, args.tolerance),
                                "bistochastic": ch.is_bistochastic(args.tolerance)}}
    if not ch.is_square:
        rep.emit(res)
        return EXIT_OK
    est = con.modulus_estimate(ch, samples=args.samples, seed=args.seed)
    res["modulus"] = {"exact": est.k_exact, "lower_bound": est.k_lower, "method": est.method,
                      "samples": est.samples,
                      "certificate": {"psi": est.certificate[0], "phi": est.certificate[1]}}
    try:
        fp = con.fixed_point(ch, tol=args.tolerance)
        res["fixed_point"] = {"unique": fp.unique, "multiplicity": fp.eigenvalue_1_multiplicity,
                              "residual": fp.residual, "rho": _matrix(fp.rho_fixed.matrix),
                              "fixed_states": [_matrix(s.matrix) for s in fp.fixed_states]}
    except QChanError as exc:
        res["fixed_point"] = None
        rep.warnings.append(f"fixed point: {exc}")
    if ch.is_bistochastic(args.tolerance):
        res["spectral_gap"] = con.spectral_gap(ch, args.tolerance)
    else:
        res["spectral_gap"] = None
    mu = con.transfer_spectrum(ch)
    res["transfer_spectrum"] = [complex(z) for z in mu]
    res["mixing_rate"] = con.mixing_rate(ch, args.tolerance)
    comm = con.commutant(ch, args.tolerance)
    res["commutant_dimension"] = comm.dimension
    res["irreducible"] = comm.irreducible
    if est.k_exact is None:
        rep.warnings.append("modulus for dim > 2 is a sampled lower bound")
    rep.emit(res)
    return EXIT_OK


def cmd_simulate(args, rep: Reporter) -> int:
    rho, raw_s = load_state(args.state)
    ch, raw_c = load_channel(args.channel, args.tolerance)
    rep.inputs += [raw_s, raw_c]
    rec = dyn.simulate_register(rho, ch, args.steps)
    if ch.dim_in == 2:
        k = con.modulus_qubit(ch)
    else:
        k = con.modulus_estimate(ch, samples=args.samples, seed=args.seed).k_lower
        rep.warnings.append("k_power_bound uses a sampled lower bound on k and is not guaranteed")
    if rec.distances_to_fixed_point is None:
        rep.warnings.append("channel has no unique fixed point; distance column left empty")
    d0 = rec.distances_to_fixed_point[0] if rec.distances_to_fixed_point else None
    rows = []
    for t in range(rec.steps + 1):
        dist = rec.distances_to_fixed_point[t] if d0 is not None else None
        rows.append({"step": t, "distance_to_fixed_point": dist, "entropy": rec.entropies[t],
                     "k_power_bound": k ** t * d0 if d0 is not None else None})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in _clean(rows):
        w.writerow({key: "" if v is None else v for key, v in r.items()})
    rep.emit({"k": k, "rows": rows}, text=buf.getvalue(), csv_text=buf.getvalue())
    return EXIT_OK


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"expected comma-separated integers, got {s!r}") from exc


def cmd_table(args, rep: Reporter) -> int:
    depths = [d.strip() for d in args.depths.split(",")] if args.depths else None
    table = dyn.threshold_table(args.epsilon, _int_list(args.qubits), depths)
    rep.emit(table.to_json(), text=table.render(), csv_text=table.to_csv())
    return EXIT_OK


def cmd_nmr(args, rep: Reporter) -> int:
    cases = [dyn.nmr_case_study(args.ns, args.tau, t, round_epsilon=not args.exact_epsilon)
             for t in args.tth]
    lines = [f"epsilon = 1/(2 sqrt(N_S)) = {cases[0].epsilon_exact:.3e}, using {cases[0].epsilon:.3e}"]
    lines += [f"T_th = {c.T_th:g} s: k = {c.k:.8f}, n_max = {c.n_max:.1f}" for c in cases]
    rep.emit({"cases": [c.to_json() for c in cases]}, text="\n".join(lines))
    return EXIT_OK


def cmd_steps(args, rep: Reporter) -> int:
    r = dyn.n_max_report(args.k, args.epsilon)
    rep.warnings += r.warnings
    rep.emit(r.to_json(), text=f"N0 = {r.n_max} (log(eps/2)/log k = {r.ratio:.6f})")
    return EXIT_OK


def cmd_entropy_budget(args, rep: Reporter) -> int:
    data, raw = _load_json(args.params)
    rep.inputs.append(raw)
    try:
        params = ent.EntropyEnergyParams.from_json(data)
    except TypeError as exc:
        raise ParseError(f"{args.params}: {exc}") from exc
    res = {"params": params.to_json(),
           "ratio": ent.entropy_energy_ratio(params, args.large_n),
           "n_max_weak_noise": ent.n_max_weak_noise(params) if params.k < 1 else None}
    status = EXIT_OK
    try:
        res["n_max"] = ent.n_max_entropy(params, large_N=args.large_n)
    except ConditionViolated as exc:
        res["n_max"] = None
        rep.warnings.append(str(exc))
        status = EXIT_NEGATIVE
    rep.emit(res)
    return status


def cmd_toric(args, rep: Reporter) -> int:
    lat = toric.build_lattice(args.k)
    comm = toric.check_commutation(lat)
    grp = toric.protected_dimension(lat)
    res = {"lattice": lat.to_json(), "all_commute": comm.all_commute,
           "offending_pairs": comm.offending_pairs, "stabilizer_group": grp.to_json()}
    if args.k == 2:
        gs = toric.ground_space_degeneracy_bruteforce(2)
        res["bruteforce"] = {"degeneracy": gs.degeneracy, "ground_energy": gs.ground_energy,
                             "gap": gs.gap}
    rep.emit(res)
    return EXIT_OK if comm.all_commute else EXIT_NEGATIVE


def cmd_paper_check(args, rep: Reporter) -> int:
    live = args.format == "text" and not args.output
    results = acceptance.run_all(callback=(lambda r: print(r.line(), flush=True)) if live else None)
    passed = sum(r.passed for r in results)
    summary = f"{passed}/{len(results)} criteria passed"
    if live:
        print(summary)
    else:
        rep.emit({"criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                                "detail": r.detail} for r in results], "summary": summary},
                 text="\n".join([r.line() for r in results] + [summary]))
    return EXIT_OK if passed == len(results) else EXIT_NEGATIVE


# parser

def _seed_default() -> int:
    env = os.environ.get("QCHAN_SEED")
    try:
        return int(env) if env else 0
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_seed_default(),
                        help="random seed (default: $QCHAN_SEED or 0)")
    common.add_argument("--tolerance", type=float, default=CHANNEL_TOL,
                        help="validation tolerance for channels")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.set_defaults(format="text")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="qchan", parents=[common],
                                description="Contractivity, decoherence and entropy analysis of quantum channels.")
    p.add_argument("--paper-check", action="store_true", help="run the acceptance scenarios and exit")
    sub = p.add_subparsers(dest="command")

    a = sub.add_parser("analyze", parents=[common], help="full analysis of one channel")
    a.add_argument("channel", help="channel JSON file or inline JSON")
    a.add_argument("--samples", type=int, default=2000)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", parents=[common], help="orbit of a state under repeated noise")
    s.add_argument("state")
    s.add_argument("channel")
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--samples", type=int, default=2000)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("table", parents=[common], help="threshold error rates")
    t.add_argument("--epsilon", type=float, default=dyn.DEFAULT_EPSILON)
    t.add_argument("--depths", default=None, help=f"comma list from {list(dyn.DEPTH_FUNCTIONS)}")
    t.add_argument("--qubits", default=",".join(map(str, dyn.DEFAULT_QUBITS)))
    t.set_defaults(func=cmd_table)

    n = sub.add_parser("nmr", parents=[common], help="NMR precision vs relaxation budget")
    n.add_argument("--ns", type=float, default=1e23)
    n.add_argument("--tau", type=float, default=0.045)
    n.add_argument("--tth", type=float, nargs="+", default=[2.8, 45.4])
    n.add_argument("--exact-epsilon", action="store_true",
                   help="use 1/(2 sqrt(N_S)) as is instead of its power of ten")
    n.set_defaults(func=cmd_nmr)

    st = sub.add_parser("steps", parents=[common], help="N0 = ceil(log(eps/2)/log k)")
    st.add_argument("--k", type=float, required=True)
    st.add_argument("--epsilon", type=float, required=True)
    st.set_defaults(func=cmd_steps)

    e = sub.add_parser("entropy-budget", parents=[common], help="entropy-energy step budget")
    e.add_argument("params", help="JSON with beta, E_max, epsilon, N, k[, delta]")
    e.add_argument("--large-n", action="store_true", help="drop the 2^-N term")
    e.set_defaults(func=cmd_entropy_budget)

    tc = sub.add_parser("toric", parents=[common], help="toric-code stabilizer report")
    tc.add_argument("--k", type=int, default=2)
    tc.set_defaults(func=cmd_toric)

    pc = sub.add_parser("paper-check", parents=[common], help="run the acceptance scenarios")
    pc.set_defaults(func=cmd_paper_check)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors are input errors
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.paper_check:
        args.func = cmd_paper_check
    elif args.command is None:
        parser.print_help()
        return EXIT_INPUT
    rep = Reporter(args, argv)
    try:
        return args.func(args, rep)
    except QChanError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
