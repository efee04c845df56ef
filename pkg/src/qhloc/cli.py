"""Command-line front end: ``qhloc {model,scan,verify,schmidt,spectrum}``.

Options may come from ``--config FILE`` (a JSON object keyed by option name,
dashes or underscores) and from flags; flags win. Every output file carries
``tool_version``, ``config_hash`` and ``seed``.

Exit codes: 0 success, 1 validation error, 2 size cap exceeded, 3 disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import io
from .errors import QHLocError, ScaleCapError
from .fock import ORACLE_CAP, FockSpace, brute_force_locality, lift_metric
from .kernel_locality import scan_subsystems
from .models import (
    ChainParams,
    build_pt_hamiltonian,
    farthest_metric,
    nearest_metric,
)
from .schmidt import (
    Bipartition,
    build_eta_max,
    build_eta_min,
    operator_schmidt,
    schmidt_bounds_check,
    simultaneous_reduction,
)
from .spectral import eigen_report, pt_phase

EXIT_OK, EXIT_VALIDATION, EXIT_CAP, EXIT_DISAGREE = 0, 1, 2, 3

DEFAULTS: dict[str, Any] = {
    "out": ".",
    "format": "json",
    "tol_rank": 1e-10,
    "tol_residual": 1e-10,
    "seed": 0,
    "jobs": os.cpu_count() or 1,
    "cap_n": 20,
    # model options
    "model": "farthest",
    "n": 4,
    "m": None,
    "gamma": [0.0, 0.5],
    "hoppings": None,
    "onsite": None,
    "beta": None,
    "metric_file": None,
    # scan
    "predicate": "none",
    "family": "all",
    "witnesses": False,
    # verify
    "oracle_cap": ORACLE_CAP,
    # schmidt
    "metric": "eta_min",
    "alpha": 1.0,
    "dims": None,
    "dump_factors": False,
    # spectrum
    "im_gamma": [0.0, 2.0, 9],
    "re_gamma": None,
}

# options that never change results and are left out of the config hash
_UNHASHED = {"out", "jobs", "config", "command"}


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.kind, self.code = kind, code


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {exc}") from None


def _common(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--config", type=Path, default=s, help="JSON file of options (flags override it)")
    p.add_argument("--out", default=s, help="output directory (default: .)")
    p.add_argument("--format", choices=["json", "csv"], default=s)
    p.add_argument("--tol-rank", type=float, default=s)
    p.add_argument("--tol-residual", type=float, default=s)
    p.add_argument("--seed", type=int, default=s)
    p.add_argument("--jobs", type=int, default=s)
    p.add_argument("--cap-n", type=int, default=s)


def _model_opts(p: argparse.ArgumentParser, models: list[str]) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--model", choices=models, default=s)
    p.add_argument("--n", type=int, default=s)
    p.add_argument("--m", type=int, default=s)
    p.add_argument("--gamma", type=float, nargs=2, metavar=("RE", "IM"), default=s)
    p.add_argument("--hoppings", type=_json_arg, default=s, help="JSON list of numbers or [re, im] pairs")
    p.add_argument("--onsite", type=_json_arg, default=s, help="JSON list of real numbers")
    p.add_argument("--beta", type=float, default=s)
    p.add_argument("--metric-file", type=Path, default=s, help="matrix file used with --model file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    s = argparse.SUPPRESS

    p = sub.add_parser("model", help="emit Gamma and the reduced metric of a toy model")
    _common(p)
    _model_opts(p, ["xx", "farthest", "pt", "nearest"])

    p = sub.add_parser("scan", help="kernel-rank locality scan over subsystems")
    _common(p)
    _model_opts(p, ["farthest", "nearest", "diagonal", "file"])
    p.add_argument("--predicate", choices=["unit-disk", "conds", "parity", "involution", "none"], default=s)
    p.add_argument("--family", choices=["all", "connected", "parity-symmetric"], default=s)
    p.add_argument("--witnesses", action="store_true", default=s)

    p = sub.add_parser("verify", help="compare kernel certificates with the Fock-space oracle")
    _common(p)
    _model_opts(p, ["farthest", "nearest", "diagonal", "file"])
    p.add_argument("--oracle-cap", type=int, default=s)

    p = sub.add_parser("schmidt", help="operator Schmidt analysis of a bipartite metric")
    _common(p)
    p.add_argument("--metric", choices=["eta_min", "eta_max", "tensor", "file"], default=s)
    p.add_argument("--beta", type=float, default=s)
    p.add_argument("--alpha", type=float, default=s)
    p.add_argument("--dims", type=int, nargs=2, metavar=("DIM_A", "DIM_B"), default=s)
    p.add_argument("--metric-file", type=Path, default=s)
    p.add_argument("--dump-factors", action="store_true", default=s)

    p = sub.add_parser("spectrum", help="PT phase scan over an impurity-strength grid")
    _common(p)
    _model_opts(p, ["pt", "nearest", "xx", "farthest"])
    p.add_argument("--im-gamma", type=float, nargs=3, metavar=("START", "STOP", "NUM"), default=s)
    p.add_argument("--re-gamma", type=float, nargs=3, metavar=("START", "STOP", "NUM"), default=s)
    return parser


def resolve_config(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    given = vars(args).copy()
    path = given.pop("config", None)
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError("config", f"cannot read config {path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise CliError("config", "config file must hold a JSON object")
        for k, v in loaded.items():
            key = k.replace("-", "_")
            if key not in DEFAULTS:
                raise CliError("config", f"unknown config key {k!r}")
            cfg[key] = v
    cfg.update(given)
    _validate(cfg)
    return cfg


def _validate(cfg: dict[str, Any]) -> None:
    for key in ("tol_rank", "tol_residual"):
        if not isinstance(cfg[key], (int, float)) or not cfg[key] > 0:
            raise CliError("config", f"{key} must be positive")
    for key in ("n", "m", "cap_n", "jobs", "oracle_cap", "seed"):
        if key == "m" and cfg[key] is None:
            continue
        if not isinstance(cfg[key], int) or isinstance(cfg[key], bool):
            raise CliError("config", f"{key} must be an integer")
    if cfg["jobs"] < 1:
        raise CliError("config", "jobs must be at least 1")
    if cfg["format"] not in ("json", "csv"):
        raise CliError("config", "format must be json or csv")
    g = cfg["gamma"]
    if not (isinstance(g, (list, tuple)) and len(g) == 2):
        raise CliError("config", "gamma must be a [re, im] pair")


def _params(cfg: dict[str, Any]) -> ChainParams:
    d = {k: cfg[k] for k in ("n", "gamma", "hoppings", "onsite")}
    # the nearest-impurity model lives at n = 2m, so default m there to n // 2
    d["m"] = cfg["m"] if cfg["m"] is not None else (cfg["n"] // 2 if cfg["model"] == "nearest" else 1)
    d["beta"] = cfg["beta"] or 0.0
    return ChainParams.from_dict(d)


def _gamma(cfg) -> complex:
    return complex(cfg["gamma"][0], cfg["gamma"][1])


def _metric(cfg: dict[str, Any]) -> np.ndarray:
    model = cfg["model"]
    if model == "farthest":
        return np.asarray(farthest_metric(cfg["n"], _gamma(cfg)))
    if model == "nearest":
        return np.asarray(nearest_metric(_params(cfg)))
    if model == "diagonal":
        rng = np.random.default_rng(cfg["seed"])
        return np.diag(rng.uniform(0.5, 2.0, cfg["n"])).astype(complex)
    if model == "file":
        if cfg["metric_file"] is None:
            raise CliError("config", "--model file needs --metric-file")
        m = io.read_matrix(cfg["metric_file"])
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise CliError("validation", "metric file must hold a square matrix")
        if np.abs(m - m.conj().T).max() > 1e-12 * max(1.0, np.abs(m).max()):
            raise CliError("validation", "metric is not Hermitian")
        return m
    raise CliError("config", f"model {model!r} not available here")


def _prov(cfg: dict[str, Any]) -> dict:
    hashed = {k: (str(v) if isinstance(v, Path) else v) for k, v in cfg.items() if k not in _UNHASHED}
    return io.provenance(hashed, cfg["seed"])


def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rows(path: Path, rows: list[dict], cfg: dict, columns: list[str]) -> Path:
    prov = _prov(cfg)
    if cfg["format"] == "json":
        path = path.with_suffix(".jsonl")
        lines = [io.dumps({"provenance": prov}).strip()] + [io.dumps(r).strip() for r in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        path = path.with_suffix(".csv")
        head = "".join(f"# {k}={v}\n" for k, v in prov.items())
        body = [",".join(columns)]
        for r in rows:
            cells = []
            for c in columns:
                v = r[c]
                if isinstance(v, float):
                    v = io.fmt(v)
                elif isinstance(v, (list, tuple)):
                    v = " ".join(map(str, v))
                cells.append(str(v))
            body.append(",".join(cells))
        path.write_text(head + "\n".join(body) + "\n")
    return path


def _emit(summary: dict) -> None:
    print(io.dumps(summary), end="")


# --- subcommands --------------------------------------------------------------


def cmd_model(cfg: dict[str, Any]) -> int:
    out = _outdir(cfg)
    prov = _prov(cfg)
    model = cfg["model"]
    if model in ("xx", "farthest"):
        params = ChainParams(n=cfg["n"], m=1, gamma=_gamma(cfg))
        gamma_m = build_pt_hamiltonian(params).matrix
        metric = np.asarray(farthest_metric(cfg["n"], _gamma(cfg)))
    else:
        params = _params(cfg)
        gamma_m = build_pt_hamiltonian(params).matrix
        if model == "nearest" or params.n == 2 * params.m:
            metric = np.asarray(nearest_metric(params))
        else:
            metric = None
    ext = cfg["format"]
    files = [io.write_matrix(out / f"Gamma.{ext}", gamma_m, ext, {"provenance": prov})]
    if metric is not None:
        files.append(io.write_matrix(out / f"M.{ext}", metric, ext, {"provenance": prov}))
    _emit({"provenance": prov, "params": params.to_dict(), "files": [str(f) for f in files]})
    return EXIT_OK


def cmd_scan(cfg: dict[str, Any]) -> int:
    metric = _metric(cfg)
    pred = None if cfg["predicate"] == "none" else cfg["predicate"]
    rep = scan_subsystems(
        metric,
        predicate=pred,
        family=cfg["family"],
        cap_n=cfg["cap_n"],
        tol=cfg["tol_rank"],
        witnesses=cfg["witnesses"],
        jobs=cfg["jobs"],
    )
    rows = []
    for r in rep.rows:
        d = r.to_dict()
        if cfg["witnesses"]:
            d["witness"] = None if r.witness is None else [[z.real, z.imag] for z in r.witness]
        rows.append(d)
    path = _write_rows(_outdir(cfg) / "scan", rows, cfg, ["mask", "K", "local", "extensive", "predicate", "agree"])
    print(rep.summary())
    ok, total = rep.agreement
    _emit({"provenance": _prov(cfg), "summary": rep.summary(), "agree": ok, "compared": total, "file": str(path)})
    return EXIT_DISAGREE if pred is not None and ok != total else EXIT_OK


def cmd_verify(cfg: dict[str, Any]) -> int:
    metric = _metric(cfg)
    n = metric.shape[0]
    if n > cfg["oracle_cap"]:
        raise ScaleCapError(f"oracle verification capped at n={cfg['oracle_cap']}, got n={n}")
    rep = scan_subsystems(metric, cap_n=cfg["cap_n"], tol=cfg["tol_rank"], jobs=cfg["jobs"])
    space = FockSpace(n)
    eta = lift_metric(space, metric).matrix
    cache: dict = {}
    rows, agree = [], 0
    for r in rep.rows:
        res = brute_force_locality(space, eta, r.mask, cap=cfg["oracle_cap"], tol=cfg["tol_rank"], cache=cache)
        ok = (res.dim_local > 0) == r.local and res.extensive == r.extensive
        agree += ok
        rows.append(
            {
                "mask": list(r.mask.members),
                "K": r.K,
                "local": r.local,
                "extensive": r.extensive,
                "dim_local": res.dim_local,
                "oracle_extensive": res.extensive,
                "agree": ok,
            }
        )
    cols = ["mask", "K", "local", "extensive", "dim_local", "oracle_extensive", "agree"]
    path = _write_rows(_outdir(cfg) / "verify", rows, cfg, cols)
    line = f"{agree}/{len(rows)} subsets agree"
    print(line)
    _emit({"provenance": _prov(cfg), "summary": line, "agree": agree, "total": len(rows), "file": str(path)})
    return EXIT_OK if agree == len(rows) else EXIT_DISAGREE


def _schmidt_metric(cfg: dict[str, Any]) -> tuple[np.ndarray, Bipartition]:
    kind = cfg["metric"]
    # eta_max defaults to two qubits per side (4 x 4), everything else to 2 x 2
    dims = cfg["dims"] or ([4, 4] if kind == "eta_max" else [2, 2])
    da, db = (int(x) for x in dims)
    if kind == "eta_min":
        return build_eta_min(0.1 if cfg["beta"] is None else cfg["beta"]), Bipartition(2, 2)
    if kind == "eta_max":
        return build_eta_max(cfg["alpha"], da, db), Bipartition(da, db)
    if kind == "tensor":
        rng = np.random.default_rng(cfg["seed"])

        def pd(d):
            x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            return x @ x.conj().T + d * np.eye(d)

        return np.kron(pd(da), pd(db)), Bipartition(da, db)
    if kind == "file":
        if cfg["metric_file"] is None:
            raise CliError("config", "--metric file needs --metric-file")
        m = io.read_matrix(cfg["metric_file"])
        if m.shape[0] != da * db:
            raise CliError("validation", f"metric of size {m.shape[0]} does not factor as {da} x {db}")
        return m, Bipartition(da, db)
    raise CliError("config", f"unknown metric {kind!r}")


def cmd_schmidt(cfg: dict[str, Any]) -> int:
    eta, parts = _schmidt_metric(cfg)
    dec = operator_schmidt(eta, parts)
    bounds = schmidt_bounds_check(dec, parts, tol=cfg["tol_rank"])
    red = simultaneous_reduction(dec.side("B"), seed=cfg["seed"])
    report = dec.to_dict(cfg["seed"])
    report.update(
        {
            "provenance": _prov(cfg),
            "dims": [parts.dim_A, parts.dim_B],
            "local_observables": bounds.exists_A or bounds.exists_B,
            "bounds": bounds.to_dict(),
            "reduction_blocks": None if red is None else [list(b) for b in red.blocks],
        }
    )
    out = _outdir(cfg)
    (out / "schmidt.json").write_text(io.dumps(report))
    if cfg["dump_factors"]:
        for i in range(dec.schmidt_number):
            io.write_matrix(out / f"factor_A_{i}.{cfg['format']}", dec.factors_A[i], cfg["format"])
            io.write_matrix(out / f"factor_B_{i}.{cfg['format']}", dec.factors_B[i], cfg["format"])
    _emit({k: report[k] for k in ("schmidt_number", "local_observables", "seed")})
    return EXIT_OK if bounds.ok else EXIT_DISAGREE


def cmd_spectrum(cfg: dict[str, Any]) -> int:
    base = _params(cfg) if cfg["model"] in ("pt", "nearest") else ChainParams(n=cfg["n"], m=1, gamma=_gamma(cfg))
    if cfg["re_gamma"] is not None:
        lo, hi, num = cfg["re_gamma"]
        axis, values = "re_gamma", np.linspace(lo, hi, int(num))
        grid = [complex(v, base.gamma.imag) for v in values]
    else:
        lo, hi, num = cfg["im_gamma"]
        axis, values = "im_gamma", np.linspace(lo, hi, int(num))
        grid = [complex(base.gamma.real, v) for v in values]
    rows = []
    for v, g in zip(values, grid):
        p = ChainParams(n=base.n, m=base.m, gamma=g, hoppings=base.hoppings, onsite=base.onsite, beta=base.beta)
        rep = eigen_report(build_pt_hamiltonian(p).matrix, cfg["tol_residual"])
        rows.append(
            {
                axis: float(v),
                "class": pt_phase(rep),
                "max_abs_imag": rep.max_abs_imag,
                "max_abs_real": rep.max_abs_real,
                "diagonalizable": rep.diagonalizable,
                "distinct": rep.distinct,
            }
        )
    cols = [axis, "class", "max_abs_imag", "max_abs_real", "diagonalizable", "distinct"]
    path = _write_rows(_outdir(cfg) / "spectrum", rows, cfg, cols)
    _emit({"provenance": _prov(cfg), "points": len(rows), "file": str(path)})
    return EXIT_OK


COMMANDS = {
    "model": cmd_model,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "schmidt": cmd_schmidt,
    "spectrum": cmd_spectrum,
}


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        cfg = resolve_config(args)
        return COMMANDS[command](cfg)
    except CliError as exc:
        return _fail(exc.kind, str(exc), exc.code)
    except ScaleCapError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_CAP)
    except (QHLocError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())
