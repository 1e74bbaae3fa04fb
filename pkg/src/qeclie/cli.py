"""Command-line interface.

Subcommands: ``closure``, ``code check``, ``transversal``, ``gates synth``,
``sim sweep``, ``bounds singleton``, ``bounds rate``. Reports are emitted as
JSON (or CSV for sweeps) with a fixed field order and %.17g float formatting,
written atomically, so identical invocations produce byte-identical files.

Exit codes: 0 success, 1 a requested verification failed (``--expect``
unmet), 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .bounds import logical_error_estimate, min_grade_from_dims, singleton_check
from .codes import (
    Code,
    code_422,
    code_multi_spin_cat,
    code_spin25,
    code_spin_cat,
    code_w_state,
    detection_check,
    kl_check,
    load_code,
)
from .error_algebra import (
    GradedErrorSet,
    graded_span,
    lie_closure,
    pauli_error_set,
    single_site_pauli_set,
    spin_error_set,
)
from .exceptions import CapabilityError, CodeFileError, SupportOverlapError
from .gates import cz_gate, logical_pauli, phase_gate, sx_gate, verify_logical
from .noise_sim import SWEEP_FAMILIES, SimResult, sweep
from .operators import Operator, SubsystemLayout, span_of
from .transversal import certify_transversal

_USAGE_ERRORS = (ValueError, CodeFileError, CapabilityError,
                 SupportOverlapError, OSError, KeyError)


# ---------------------------------------------------------------------------
# Deterministic report rendering


def _render_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("report contains a non-finite number")
    return "%.17g" % x


def _render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_render_json(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{inner}{_render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _render_float(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return _render_json({"re": obj.real, "im": obj.imag}, indent)
    raise ValueError(f"cannot serialize {type(obj).__name__} in a report")


def _matrix_payload(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "shape": list(m.shape),
        "re": [[float(x) for x in row] for row in m.real],
        "im": [[float(x) for x in row] for row in m.imag],
    }


def emit(report, fmt: str, path: str | None) -> None:
    """Render a report and write it atomically (or to stdout when no path)."""
    if fmt == "json":
        text = _render_json(report) + "\n"
    elif fmt == "csv":
        if not isinstance(report, SimResult):
            raise ValueError("csv output is only defined for sweep results")
        for row in report.rows:
            if math.isnan(row.fidelity) or math.isinf(row.fidelity):
                raise ValueError("report contains a non-finite number")
        text = "\n".join(report.csv_lines()) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# URI parsing


def parse_code_uri(uri: str) -> Code:
    if uri.startswith("file:"):
        return load_code(uri[len("file:"):])
    if not uri.startswith("builtin:"):
        raise ValueError(f"code URI must start with 'builtin:' or 'file:', got {uri!r}")
    spec = uri[len("builtin:"):]
    if spec == "spin25":
        return code_spin25()
    if spec == "code422":
        return code_422()
    if spec.startswith("spin_cat:"):
        return code_spin_cat(float(spec.split(":", 1)[1]))
    for family, builder in (("w_state", code_w_state),
                            ("multi_spin_cat", code_multi_spin_cat)):
        if spec.startswith(family + ":"):
            parts = spec.split(":", 1)[1].split(",")
            if len(parts) != 2:
                raise ValueError(f"expected {family}:n,J in {uri!r}")
            return builder(int(parts[0]), float(parts[1]))
    raise ValueError(f"unknown builtin code {spec!r}")


def _load_error_file(path: str) -> GradedErrorSet:
    with open(path) as fh:
        doc = json.load(fh)
    dim = doc["dim"]
    gens = []
    for g in doc["generators"]:
        m = np.array(g["re"], dtype=float) + 1j * np.array(g["im"], dtype=float)
        gens.append(Operator(m, hermitian=True))
    return GradedErrorSet(generators=tuple(gens), grade=int(doc.get("grade", 1)),
                          layout=SubsystemLayout((dim,)))


def parse_error_set(uri: str, code: Code) -> GradedErrorSet:
    """Error set for a code from a spin:grade=t | pauli:weight=1 | file: URI."""
    if uri.startswith("spin:grade="):
        grade = int(uri[len("spin:grade="):])
        if code.layout.n_sites != 1:
            raise ValueError("spin error sets apply to single-subsystem codes")
        return spin_error_set((code.N - 1) / 2, grade)
    if uri == "pauli:weight=1":
        if any(d != 2 for d in code.layout.dims):
            raise ValueError("pauli error sets need qubit subsystems")
        return pauli_error_set(code.layout.n_sites)
    if uri.startswith("file:"):
        errs = _load_error_file(uri[len("file:"):])
        if errs.dim != code.N:
            raise ValueError(
                f"error set dim {errs.dim} does not match code N={code.N}")
        return errs
    raise ValueError(f"unknown error-set URI {uri!r}")


def parse_site_error_sets(uri: str, layout: SubsystemLayout) -> list[GradedErrorSet]:
    """One local error set per site from a URI applied site-wise."""
    sets = []
    for site, d in enumerate(layout.dims, start=1):
        if uri.startswith("spin:grade="):
            grade = int(uri[len("spin:grade="):])
            local = spin_error_set((d - 1) / 2, grade)
            sets.append(GradedErrorSet(generators=local.generators, grade=grade,
                                       layout=layout, site=site))
        elif uri == "pauli:weight=1":
            sets.append(single_site_pauli_set(layout, site))
        else:
            raise ValueError(f"unsupported per-site error URI {uri!r}")
    return sets


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_closure(args) -> int:
    errors = spin_error_set(args.spin, args.grade)
    span = graded_span(errors)
    report = lie_closure(span)
    emit(report.summary(), "json", args.out)
    return 0


def _cmd_code_check(args) -> int:
    code = parse_code_uri(args.code)
    errors = parse_error_set(args.errors, code)
    span = graded_span(errors)
    kl = kl_check(code, span, tol=args.tol)
    detected, det_dev = detection_check(code, span, tol=args.tol)
    report = {
        "code": code.name,
        "N": code.N,
        "K": code.K,
        "errors": args.errors,
        "basis_size": kl.basis_size,
        "max_residual": kl.max_residual,
        "correctable": kl.correctable,
        "detectable": detected,
        "detection_residual": det_dev,
        "tol": kl.tol,
    }
    if args.dump_matrices:
        report["c"] = _matrix_payload(kl.c)
    emit(report, "json", args.out)
    if args.expect is not None:
        met = {
            "correctable": kl.correctable,
            "uncorrectable": not kl.correctable,
            "detectable": detected,
        }[args.expect]
        if not met:
            print(f"expectation '{args.expect}' not met", file=sys.stderr)
            return 1
    return 0


def _cmd_transversal(args) -> int:
    code = parse_code_uri(args.code)
    site_errors = parse_site_error_sets(args.errors, code.layout)
    site_codes = None
    if args.site_code:
        codes = [parse_code_uri(uri) for uri in args.site_code]
        if len(codes) == 1:
            codes = codes * code.layout.n_sites
        site_codes = codes
    report = certify_transversal(code, site_errors, site_codes=site_codes)
    payload = {"code": code.name}
    payload.update(report.summary())
    emit(payload, "json", args.out)
    if args.expect is not None and report.verdict != args.expect:
        print(f"expected verdict {args.expect!r}, got {report.verdict!r}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_gates_synth(args) -> int:
    code = parse_code_uri(args.code)
    if args.gate in ("phase", "cz"):
        errors = parse_error_set(args.errors, code)
        span = graded_span(errors)
        cert = (phase_gate(code, span, args.phi) if args.gate == "phase"
                else cz_gate(code, span))
    elif args.gate == "sx":
        cert = sx_gate(code)
    else:  # pauli-x / pauli-y / pauli-z
        axis = args.gate.split("-", 1)[1]
        gate = logical_pauli((code.N - 1) / 2, axis)
        pauli = {
            "x": np.array([[0, 1], [1, 0]], dtype=complex),
            "y": np.array([[0, -1j], [1j, 0]]),
            "z": np.diag([1.0, -1.0]).astype(complex),
        }[axis]
        fidelity, corrected = verify_logical(gate, code, pauli)
        report = {
            "gate": args.gate,
            "dim": gate.dim,
            "logical_fidelity": fidelity,
            "phase_corrected": corrected,
        }
        if args.dump_matrices:
            report["matrix"] = _matrix_payload(gate.entries)
        emit(report, "json", args.out)
        return 0
    report = cert.summary()
    report["transparency_residuals"] = list(cert.transparency_residuals)
    if args.dump_matrices:
        report["logical_action"] = _matrix_payload(cert.logical_action)
        report["matrix"] = _matrix_payload(cert.gate.entries)
    emit(report, "json", args.out)
    return 0


def _parse_float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _cmd_sim_sweep(args) -> int:
    if args.gamma_t:
        grid = _parse_float_list(args.gamma_t)
    elif args.gamma_t_log:
        lo, hi, count = args.gamma_t_log.split(",")
        grid = list(np.logspace(math.log10(float(lo)), math.log10(float(hi)),
                                int(count)))
    else:
        raise ValueError("one of --gamma-t or --gamma-t-log is required")
    j_list = _parse_float_list(args.J) if args.J else [12.5]
    result = sweep(args.family, args.n, j_list, grid, threads=args.threads)
    emit(result, "csv", args.out)
    return 0


def _cmd_bounds_singleton(args) -> int:
    report = singleton_check(args.N, args.K, args.e_dim, t=args.t)
    emit(report.summary(), "json", args.out)
    if args.expect is not None:
        met = report.satisfied == (args.expect == "satisfied")
        if not met:
            print(f"expectation '{args.expect}' not met", file=sys.stderr)
            return 1
    return 0


def _cmd_bounds_rate(args) -> int:
    value = logical_error_estimate(args.n, args.p, args.t, mode=args.mode)
    report = {
        "n": args.n,
        "p": args.p,
        "t": args.t,
        "mode": args.mode,
        "p_logical_upper_bound": value,
    }
    if args.dims:
        dims = [int(x) for x in args.dims.split(",")]
        report["min_grade_plus_one"] = min_grade_from_dims(dims, args.K,
                                                           e1_dim=args.e1_dim)
    emit(report, "json", args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qeclie",
        description="Lie-algebraic analysis of quantum error-correcting codes")
    parser.add_argument("--version", action="version",
                        version=f"qeclie {__version__}")
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps (default: all cores; "
                             "env QECLIE_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("closure", help="Lie closure of a spin error span")
    p.add_argument("--spin", type=float, required=True, help="spin J (half-integer)")
    p.add_argument("--grade", type=int, default=1, help="error grade t")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_closure)

    code = sub.add_parser("code", help="code-level checks").add_subparsers(
        dest="subcommand", required=True)
    p = code.add_parser("check", help="Knill-Laflamme correctability check")
    p.add_argument("--code", required=True)
    p.add_argument("--errors", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--expect", choices=["correctable", "uncorrectable", "detectable"])
    p.add_argument("--dump-matrices", action="store_true")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_code_check)

    p = sub.add_parser("transversal", help="certify transversal gates")
    p.add_argument("--code", required=True)
    p.add_argument("--errors", required=True,
                   help="per-site error URI (spin:grade=t or pauli:weight=1)")
    p.add_argument("--site-code", action="append",
                   help="per-site code URI for the large-N path (repeatable)")
    p.add_argument("--expect")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_transversal)

    gates = sub.add_parser("gates", help="gate synthesis").add_subparsers(
        dest="subcommand", required=True)
    p = gates.add_parser("synth", help="synthesize and certify a logical gate")
    p.add_argument("--code", required=True)
    p.add_argument("--gate", required=True,
                   choices=["phase", "sx", "cz", "pauli-x", "pauli-y", "pauli-z"])
    p.add_argument("--errors", help="error URI (needed for phase and cz)")
    p.add_argument("--phi", type=float, default=math.pi / 2)
    p.add_argument("--dump-matrices", action="store_true")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_gates_synth)

    sim = sub.add_parser("sim", help="noise simulation").add_subparsers(
        dest="subcommand", required=True)
    p = sim.add_parser("sweep", help="entanglement-fidelity sweep")
    p.add_argument("--family", required=True, choices=list(SWEEP_FAMILIES))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--J", help="comma-separated spin values")
    p.add_argument("--gamma-t", help="comma-separated Gamma*T values")
    p.add_argument("--gamma-t-log", help="lo,hi,count log-spaced grid")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_sim_sweep)

    bounds = sub.add_parser("bounds", help="dimension-counting bounds").add_subparsers(
        dest="subcommand", required=True)
    p = bounds.add_parser("singleton", help="span-dimension bound check")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--e-dim", dest="e_dim", type=int, required=True)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--expect", choices=["satisfied", "violated"])
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_bounds_singleton)
    p = bounds.add_parser("rate", help="logical error-rate upper bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--mode", choices=["local", "correlated"], default="local")
    p.add_argument("--dims", help="comma-separated subsystem dims (adds grade report)")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--e1-dim", dest="e1_dim", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_bounds_rate)
    return parser


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser,
                  argv: list[str]) -> None:
    """Fill unset flags from the JSON config file (flags take precedence)."""
    if not args.config:
        return
    with open(args.config) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError("config file must contain a JSON object")
    explicit = {a.lstrip("-").split("=", 1)[0].replace("-", "_")
                for a in argv if a.startswith("--")}
    for key, value in config.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and attr not in explicit:
            setattr(args, attr, value)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args, parser, argv)
        if args.threads is None:
            env = os.environ.get("QECLIE_THREADS")
            args.threads = int(env) if env else None
        return args.handler(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
