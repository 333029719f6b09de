"""Command-line front end.

Every report is a JSON object with a ``manifest`` block (command, input digest,
version, resolution, timestamp). With SOURCE_DATE_EPOCH set, identical inputs
give byte-identical output.

Exit codes: 0 computed (whatever the verdict), 2 bad input, 3 resolution failure.
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
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analyzer import binding_report, classify
from .certificates import CERT_BASIS, nonselfadjoint_witness
from .composite import certify_configuration
from .config import ConfigError, MultipoleConfiguration
from .errors import InadmissibleInput, ResolutionError
from .potentials import Constant, Dipole, potential_from_json
from .rayleigh import QuadratureSpec, counterexample_search
from .spectrum import DEFAULT_TOL, mu1, mu1_bounds
from .thresholds import REFINEMENT_TOL, lambda_n, lambda_n_of_h

EXIT_OK, EXIT_INPUT, EXIT_RESOLUTION = 0, 2, 3


class InputError(ValueError):
    pass


@dataclass
class RunManifest:
    command: str
    input_digest: str
    version: str
    resolution: dict
    timestamp: str

    @classmethod
    def create(cls, command, payload: bytes, resolution: dict):
        epoch = os.environ.get("SOURCE_DATE_EPOCH")
        when = (datetime.fromtimestamp(int(epoch), timezone.utc) if epoch
                else datetime.now(timezone.utc))
        return cls(command, hashlib.sha256(payload).hexdigest(), __version__, resolution,
                   when.strftime("%Y-%m-%dT%H:%M:%SZ"))


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def render_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _read_json(path):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(raw), raw
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _resolution(args):
    return {"basis_size": args.basis_size, "quadrature_level": args.quadrature_level,
            "tolerance": args.tolerance}


def _args_payload(args) -> bytes:
    keep = {k: v for k, v in vars(args).items() if k not in ("func", "output")}
    return json.dumps(keep, sort_keys=True, default=str).encode()


def _potential(args):
    """Potential from --config (a potential document) or from --kind/--level/--strength."""
    if args.config:
        doc, raw = _read_json(args.config)
        if isinstance(doc, dict) and "dim" not in doc:
            if args.dim is None:
                raise InputError("potential document has no 'dim'; pass --dim")
            doc = {**doc, "dim": args.dim}
        return potential_from_json(doc), raw
    if args.dim is None:
        raise InputError("--dim is required without --config")
    if args.kind == "constant":
        h = Constant(args.dim, args.level)
    else:
        h = Dipole(args.dim, args.strength)
    return h, _args_payload(args)


# --- commands -------------------------------------------------------------------

def cmd_mu1(args):
    h, raw = _potential(args)
    L = args.basis_size
    tol = args.tolerance or DEFAULT_TOL
    pair = mu1(h, L, tol)
    lo, hi = mu1_bounds(h)
    report = {"mu1": pair.mu1, "basis_size": pair.basis_size, "dim": h.dim,
              "residual": pair.residual, "bounds": {"lower": lo, "upper": hi},
              "potential": h.to_json()}
    csv_rows = None
    if args.sweep:
        a, b, n = args.sweep
        scales = np.linspace(a, b, int(n))
        rows = [(float(s), mu1(h.scaled(float(s)), L, tol).mu1) for s in scales]
        report["sweep"] = [{"scale": s, "mu1": m} for s, m in rows]
        csv_rows = (["scale", "mu1"], rows)
    return report, raw, csv_rows


def cmd_lambda(args):
    tol = args.tolerance or REFINEMENT_TOL
    L = args.basis_size or 200
    if args.config:
        h, raw = _potential(args)
        res = lambda_n_of_h(h, L, refine_tol=tol)
        dim = h.dim
    else:
        if args.dim is None:
            raise InputError("--dim or --config is required")
        res = lambda_n(args.dim, L, refine_tol=tol)
        raw, dim = _args_payload(args), args.dim
    report = {"dim": dim, **res.to_json(), "refinement_tol": tol}
    return report, raw, None


def _config(path):
    doc, raw = _read_json(path)
    return MultipoleConfiguration.from_json(doc), raw


def cmd_classify(args):
    if not args.config:
        raise InputError("--config is required")
    cfg, raw = _config(args.config)
    rep = classify(cfg, args.basis_size or 200)
    return {"configuration": cfg.to_json(), **rep.to_json()}, raw, None


def cmd_binding(args):
    if not args.config or not args.config_b:
        raise InputError("--config and --config-b are required")
    a, raw_a = _config(args.config)
    b, raw_b = _config(args.config_b)
    return binding_report(a, b, args.basis_size or 200), raw_a + b"\0" + raw_b, None


def cmd_certify(args):
    if not args.config:
        raise InputError("--config is required")
    cfg, raw = _config(args.config)
    sig = None
    if args.sigma1 is not None or args.sigma2 is not None:
        if args.sigma1 is None or args.sigma2 is None:
            raise InputError("give both --sigma1 and --sigma2")
        sig = (args.sigma1, args.sigma2)
    rep = certify_configuration(cfg, alpha=args.alpha, sigmas=sig,
                                basis_size=args.basis_size or CERT_BASIS,
                                samples=args.samples, seed=args.seed)
    return rep.to_json(), raw, None


def cmd_counterexample(args):
    if args.dim is None:
        raise InputError("--dim is required")
    q = QuadratureSpec(n_per_panel=args.quadrature_level or 12, axial_nodes=24,
                       tol=args.tolerance or QuadratureSpec.tol)
    res = counterexample_search(args.dim, args.lam, args.mu, q)
    rows = [[r[k] for k in ("T", "ramp", "tau", "w", "c", "ratio")] for r in res.sweep]
    return res.to_json(), _args_payload(args), (["T", "ramp", "tau", "w", "c", "ratio"], rows)


def cmd_witness(args):
    h, raw = _potential(args)
    w = nonselfadjoint_witness(h, args.beta, args.alpha, args.delta,
                               basis_size=args.basis_size or CERT_BASIS)
    rows = list(zip(w.s.tolist(), w.phi.tolist()))
    return w.to_json(), raw, (["s", "phi"], rows)


COMMANDS = {"mu1": cmd_mu1, "lambda": cmd_lambda, "classify": cmd_classify,
            "binding": cmd_binding, "certify": cmd_certify,
            "counterexample": cmd_counterexample, "witness": cmd_witness}


def _triple(text):
    try:
        a, b, n = text.split(":")
        return float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError("expected start:stop:count") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int)
    common.add_argument("--basis-size", type=int, help="Galerkin basis size L")
    common.add_argument("--quadrature-level", type=int)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--config", help="JSON document (potential or configuration)")

    p = argparse.ArgumentParser(prog="dipolar", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mu1", parents=[common], help="lowest eigenvalue of -Lap_S - h")
    s.add_argument("--kind", choices=("constant", "dipole"), default="constant")
    s.add_argument("--level", type=float, default=0.0)
    s.add_argument("--strength", type=float, default=1.0)
    s.add_argument("--sweep", type=_triple, help="mu_1(s h) for s in start:stop:count")

    s = sub.add_parser("lambda", parents=[common], help="best Hardy constant Lambda_N(h)")
    s.add_argument("--kind", choices=("constant", "dipole"), default="dipole")
    s.add_argument("--level", type=float, default=0.0)
    s.add_argument("--strength", type=float, default=1.0)

    sub.add_parser("classify", parents=[common], help="classify a configuration")

    s = sub.add_parser("binding", parents=[common], help="binding conditions for two clusters")
    s.add_argument("--config-b", required=False)

    s = sub.add_parser("certify", parents=[common], help="certified lower bound for mu(V)")
    s.add_argument("--alpha", type=float)
    s.add_argument("--sigma1", type=float)
    s.add_argument("--sigma2", type=float)
    s.add_argument("--samples", type=int, default=4000)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("counterexample", parents=[common], help="two-cone binding counterexample")
    s.add_argument("--lam", type=float, required=True)
    s.add_argument("--mu", type=float, default=1.0)

    s = sub.add_parser("witness", parents=[common], help="non-self-adjointness witness")
    s.add_argument("--kind", choices=("constant", "dipole"), default="constant")
    s.add_argument("--level", type=float, default=0.0)
    s.add_argument("--strength", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--alpha", type=float, default=-1.0)
    s.add_argument("--delta", type=float, default=0.5)
    return p


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{x:.15g}" if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        report, raw, table = COMMANDS[args.command](args)
    except ResolutionError as exc:
        print(f"resolution failure: {exc}", file=stderr)
        return EXIT_RESOLUTION
    except (InputError, ConfigError, InadmissibleInput, ValueError, KeyError, TypeError) as exc:
        print(f"bad input: {exc}", file=stderr)
        return EXIT_INPUT
    if args.output == "csv":
        if table is None:
            print(f"bad input: {args.command} has no tabular output", file=stderr)
            return EXIT_INPUT
        stdout.write(_csv(*table))
        return EXIT_OK
    manifest = RunManifest.create(args.command, raw, _resolution(args))
    stdout.write(render_json({"manifest": asdict(manifest), "report": report}))
    return EXIT_OK


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); not an error of ours
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
