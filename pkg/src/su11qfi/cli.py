"""Command-line front end.

    su11qfi qfi     --a coherent:1 --b vacuum --g 0.5 --model u --average
    su11qfi qfim    --a coherent:1 --b sqvac:0.5 --g 0.5
    su11qfi sweep   --param g --start 0.1 --stop 1.5 --count 15 --outputs qfi,f_averaged
    su11qfi parity  --a coherent:1 --b sqvac:0.5 --g 0.5
    su11qfi analytic f_coh_sq g=0.5 alpha_sq=1 r=0.5
    su11qfi verify

Exit codes: 0 success, 1 check failure, 2 usage error, 3 convergence error.
"""
from __future__ import annotations

import argparse
import csv
import inspect
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analytic, verify
from .config import MODELS, InterferometerConfig
from .errors import ConvergenceError, CutoffError, PreconditionError, ResourceError, UnsupportedError
from .fock import FockCutoff, NumberDiagonalEnsemble, generator
from .metrology import (default_phase_grid, parity_cfi, parity_maximum, phase_family,
                        qfi_ensemble_convexity, qfi_fidelity_fd, qfi_pure, qfi_sld, qfim)
from .reference import (CONFIG_FORMULAS, formula_value, parity_reference, phase_sum_reference,
                        photon_variance, qfi_reference)
from .states import ModeSpec

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_CONVERGENCE = 0, 1, 2, 3
METHODS = ("variance", "convexity", "sld", "fidelity")
SWEEP_PARAMS = ("g", "theta", "alpha_a", "alpha_b", "r_a", "r_b")
NUMERIC_OUTPUTS = ("qfi", "qfim", "parity")

DEFAULTS = {
    "a": "vacuum", "b": "vacuum", "g": 0.5, "theta": 0.0, "model": "s", "average": False,
    "cutoff": None, "guard": 12, "tail_tol": 1e-10, "second_gain": None, "method": None,
    "format": None,
}
FLOAT_KEYS = {"g", "theta", "tail_tol", "second_gain"}
INT_KEYS = {"cutoff", "guard"}


class UsageError(Exception):
    """Bad command-line or config-file input."""


# -- ModeSpec grammar ---------------------------------------------------------

class SpecSyntaxError(UsageError):
    def __init__(self, text, column, message):
        self.text, self.column, self.message = text, column, message
        super().__init__(f"column {column}: {message} in {text!r}")


def _fields(text, start):
    """Split ``text[start:]`` at commas, returning (value, 1-based column)."""
    out, pos = [], start
    for part in text[start:].split(","):
        out.append((part, pos + 1))
        pos += len(part) + 1
    return out


def _number(text, part, column, kind=float):
    try:
        value = kind(part.strip())
    except ValueError:
        raise SpecSyntaxError(text, column, f"expected a number, got {part!r}") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise SpecSyntaxError(text, column, "value must be finite")
    return value


def parse_mode(text: str) -> ModeSpec:
    """Parse ``vacuum | fock:N | coherent:RE[,IM] | sqvac:R[,PHI] | mix:P0,P1,...``."""
    kind, sep, rest = text.partition(":")
    kind = kind.strip()
    args = _fields(text, len(kind) + 1) if sep else []
    arity = {"vacuum": (0, 0), "fock": (1, 1), "coherent": (1, 2), "sqvac": (1, 2),
             "mix": (1, None)}
    if kind not in arity:
        raise SpecSyntaxError(text, 1, f"unknown mode kind {kind!r}")
    lo, hi = arity[kind]
    if sep and not rest.strip():
        raise SpecSyntaxError(text, len(text) + 1, "missing value after ':'")
    if len(args) < lo:
        raise SpecSyntaxError(text, len(text) + 1, f"{kind} needs a value, e.g. {kind}:1")
    if hi is not None and len(args) > hi:
        col = args[hi][1] - 1 if hi else len(kind) + 1
        raise SpecSyntaxError(text, col, f"{kind} takes at most {hi} value(s)")
    if kind == "vacuum":
        return ModeSpec.vacuum()
    if kind == "fock":
        n = _number(text, *args[0], kind=int)
        if n < 0:
            raise SpecSyntaxError(text, args[0][1], "photon number must be >= 0")
        return ModeSpec.fock(n)
    values = [_number(text, *a) for a in args]
    if kind == "coherent":
        return ModeSpec.coherent(complex(values[0], values[1] if len(values) > 1 else 0.0))
    if kind == "sqvac":
        if values[0] < 0:
            raise SpecSyntaxError(text, args[0][1], "squeezing must be >= 0")
        return ModeSpec.squeezed_vacuum(values[0], values[1] if len(values) > 1 else 0.0)
    for v, (_, col) in zip(values, args):
        if v < 0:
            raise SpecSyntaxError(text, col, "probabilities must be >= 0")
    total = sum(values)
    if abs(total - 1.0) > 1e-6:
        raise SpecSyntaxError(text, len(kind) + 2, f"probabilities sum to {total:g}, not 1")
    return ModeSpec.number_mixture([v / total for v in values])


# -- configuration files ------------------------------------------------------

def _convert(key, raw, where):
    if key not in DEFAULTS:
        raise UsageError(f"{where}: unknown key {key!r}")
    if raw is None or isinstance(raw, bool) and key == "average":
        return raw
    text = str(raw).strip()
    try:
        if key in FLOAT_KEYS:
            return float(text)
        if key in INT_KEYS:
            return int(text)
    except ValueError:
        raise UsageError(f"{where}: {key} expects a number, got {text!r}") from None
    if key == "average":
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"{where}: average expects true/false, got {text!r}")
    return text


def load_config_file(path: str) -> dict:
    """Read ``key = value`` lines (``#`` comments) or a JSON object."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise UsageError(f"{path}: expected a JSON object")
        out = {k: _convert(k, v, path) for k, v in data.items()}
        for key in ("a", "b"):
            if key in out:
                try:
                    out[key] = parse_mode(out[key])
                except SpecSyntaxError as exc:
                    raise UsageError(f"{path}: key {key!r}, column {exc.column}: "
                                     f"{exc.message}") from None
        return out
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise UsageError(f"{path}:{lineno}:{col}: expected key=value")
        key, _, value = body.partition("=")
        where = f"{path}:{lineno}:{len(key) - len(key.lstrip()) + 1}"
        key = key.strip()
        out[key] = _convert(key, value, where)
        if key in ("a", "b"):
            offset = body.index("=") + 1 + len(value) - len(value.lstrip())
            try:
                out[key] = parse_mode(out[key])
            except SpecSyntaxError as exc:
                raise UsageError(f"{path}:{lineno}:{offset + exc.column}: {exc.message}") from None
    return out


def resolve_settings(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        settings.update(load_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _mode(value, flag):
    if isinstance(value, ModeSpec):
        return value
    try:
        return parse_mode(value)
    except SpecSyntaxError as exc:
        raise UsageError(f"--{flag}: {exc}") from None


def build_config(settings: dict) -> InterferometerConfig:
    if settings["model"] not in MODELS:
        raise UsageError(f"--model must be one of {', '.join(MODELS)}")
    cutoff = None
    if settings["cutoff"] is not None:
        cutoff = FockCutoff(max_total=settings["cutoff"], guard=settings["guard"],
                            tail_tol=settings["tail_tol"])
    return InterferometerConfig(
        mode_a=_mode(settings["a"], "a"), mode_b=_mode(settings["b"], "b"),
        g=settings["g"], theta=settings["theta"], model=settings["model"],
        averaging=bool(settings["average"]), cutoff=cutoff, tail_tol=settings["tail_tol"],
        guard=settings["guard"], second_gain=settings["second_gain"])


# -- output -------------------------------------------------------------------

def fmt(value) -> str:
    """12 significant digits; blanks for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else fmt(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_csv(rows: list[dict], stream) -> None:
    if not rows:
        return
    columns = list(rows[0])
    for row in rows[1:]:
        columns += [c for c in row if c not in columns]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])


def emit(records, fmt_name: str, out=None) -> None:
    out = out or sys.stdout
    records = records if isinstance(records, list) else [records]
    if fmt_name == "csv":
        write_csv(records, out)
    else:
        rounded = [{k: (float(fmt(v)) if isinstance(v, (float, np.floating)) and
                        math.isfinite(v) else v) for k, v in r.items()} for r in records]
        payload = rounded[0] if len(rounded) == 1 else rounded
        out.write(json.dumps(_jsonable(payload), indent=2) + "\n")


def deviation(value, reference):
    if value is None or reference is None:
        return None
    return verify.deviation(value, reference)


def _describe(config: InterferometerConfig) -> dict:
    return {"a": str(config.mode_a), "b": str(config.mode_b), "g": config.g,
            "theta": config.theta, "model": config.model, "average": config.averaging}


# -- computations -------------------------------------------------------------

def compute_qfi(config: InterferometerConfig, method: str | None = None) -> dict:
    if config.model == "sd":
        raise UsageError("qfi needs a single generator (u, l, s or d); use qfim for sd")
    state = config.output_state(config.cutoff)
    mixed = isinstance(state, NumberDiagonalEnsemble)
    method = method or ("convexity" if mixed else "variance")
    if method not in METHODS:
        raise UsageError(f"--method must be one of {', '.join(METHODS)}")
    gen = generator(config.model, state.cutoff)
    if mixed and method in ("variance", "fidelity"):
        raise UsageError(f"method {method} needs a pure state; use convexity or sld")
    if method == "variance":
        result = qfi_pure(state, gen)
    elif method == "convexity":
        result = qfi_ensemble_convexity(state, gen)
    elif method == "sld":
        result = qfi_sld(state, gen)
    else:
        result = qfi_fidelity_fd(phase_family(state, config.model))
    ref = qfi_reference(config)
    return {**_describe(config), "method": result.method, "value": result.value,
            "analytic_formula": ref[0] if ref else None,
            "analytic": ref[1] if ref else None,
            "deviation": deviation(result.value, ref[1] if ref else None),
            "cutoff": result.cutoff_used.max_total, "guard": result.cutoff_used.guard,
            "norm_deficit": state.norm_deficit, "residual": result.residual,
            "warning": result.warning}


def compute_qfim(config: InterferometerConfig) -> dict:
    if config.averaging or not (config.mode_a.is_pure and config.mode_b.is_pure):
        raise UsageError("qfim needs pure, unaveraged inputs")
    state = config.output_state(config.cutoff)
    m = qfim(state)
    record = {**_describe(config), "F_dd": m.F_dd, "F_ds": m.F_ds, "F_sd": m.F_sd,
              "F_ss": m.F_ss, "determinant": m.determinant, "singular": m.singular,
              "bound_phi_s": m.bound_phi_s, "bound_phi_d": m.bound_phi_d,
              "info_phi_s": m.info_phi_s}
    ref = phase_sum_reference(config)
    record["analytic_formula"] = ref[0] if ref else None
    record["analytic_info_phi_s"] = ref[1] if ref else None
    record["deviation"] = deviation(m.info_phi_s, ref[1] if ref else None)
    a, b = config.mode_a, config.mode_b
    one_vacuum = b.kind == "vacuum" or a.kind == "vacuum"
    if one_vacuum:
        chi, sign = (a, 1.0) if b.kind == "vacuum" else (b, -1.0)
        dd, ds, ss = analytic.qfim_one_vacuum(config.g, chi.mean_photons, photon_variance(chi))
        record.update(analytic_F_dd=dd, analytic_F_ds=sign * ds, analytic_F_ss=ss)
    record.update(cutoff=state.cutoff.max_total, guard=state.cutoff.guard,
                  norm_deficit=state.norm_deficit)
    return record


def compute_parity(config: InterferometerConfig, phis, dphi: float):
    points = parity_cfi(config, phis, dphi=dphi)
    best = parity_maximum(points)
    ref = parity_reference(config)
    summary = {**_describe(config), "best_phi": best.phi, "best_cfi": best.cfi,
               "analytic_formula": ref[0] if ref else None,
               "analytic": ref[1] if ref else None,
               "deviation": deviation(best.cfi, ref[1] if ref else None)}
    return points, summary


# -- sweeps -------------------------------------------------------------------

def set_parameter(config: InterferometerConfig, name: str, value: float) -> InterferometerConfig:
    if name in ("g", "theta"):
        return config.replace(**{name: value})
    mode_key = "mode_a" if name.endswith("_a") else "mode_b"
    spec = getattr(config, mode_key)
    if name.startswith("alpha"):
        if spec.kind not in ("coherent", "vacuum"):
            raise UsageError(f"{name} needs a coherent input in that mode")
        phase = np.angle(spec.alpha) if spec.alpha else 0.0
        new = ModeSpec.coherent(value * complex(math.cos(phase), math.sin(phase)))
    else:
        if spec.kind not in ("squeezed_vacuum", "vacuum"):
            raise UsageError(f"{name} needs a squeezed-vacuum input in that mode")
        new = ModeSpec.squeezed_vacuum(value, spec.phase)
    return config.replace(**{mode_key: new})


def total_resource_config(config: InterferometerConfig, n_kappa: float,
                          n_total: float) -> InterferometerConfig:
    """Split n_total between the OPA (n_kappa) and two equal coherent inputs at
    conjugate phases (real amplitudes for pump phase 0)."""
    n_in = max(n_total - n_kappa, 0.0)
    amp = math.sqrt(n_in / 2)
    return config.replace(mode_a=ModeSpec.coherent(amp), mode_b=ModeSpec.coherent(amp),
                          g=math.asinh(math.sqrt(n_kappa / 2)), theta=0.0)


def sweep_row(config, outputs, method, param, value, phis, dphi) -> dict:
    row = {param: value}
    cutoffs, deficits = [], []
    for name in outputs:
        if name == "qfi":
            rec = compute_qfi(config, method)
            row.update(qfi=rec["value"], qfi_analytic=rec["analytic"], qfi_deviation=rec["deviation"])
            cutoffs.append(rec["cutoff"])
            deficits.append(rec["norm_deficit"])
        elif name == "qfim":
            rec = compute_qfim(config)
            row.update(F_dd=rec["F_dd"], F_ds=rec["F_ds"], F_ss=rec["F_ss"],
                       info_phi_s=rec["info_phi_s"],
                       info_phi_s_analytic=rec["analytic_info_phi_s"],
                       info_phi_s_deviation=rec["deviation"])
            cutoffs.append(rec["cutoff"])
            deficits.append(rec["norm_deficit"])
        elif name == "parity":
            _, summary = compute_parity(config, phis, dphi)
            row.update(parity_cfi=summary["best_cfi"], parity_phi=summary["best_phi"],
                       parity_analytic=summary["analytic"],
                       parity_deviation=summary["deviation"])
        else:
            try:
                row[name] = formula_value(name, config)
            except ValueError as exc:
                raise UsageError(f"output {name}: {exc}") from None
    if any(n in NUMERIC_OUTPUTS for n in outputs):
        row["cutoff"] = max(cutoffs) if cutoffs else None
        row["norm_deficit"] = max(deficits) if deficits else None
    return row


def run_sweep(config, param, grid, outputs, method=None, workers=None, total=None,
              phis=None, dphi=1e-4) -> list[dict]:
    """Evaluate every grid point; rows come back in grid order."""
    phis = default_phase_grid() if phis is None else phis

    def point(value):
        cfg = (total_resource_config(config, value, total) if total is not None
               else set_parameter(config, param, value))
        return sweep_row(cfg, outputs, method, param, float(value), phis, dphi)

    with ThreadPoolExecutor(max_workers=workers or os.cpu_count() or 1) as pool:
        return list(pool.map(point, grid))


# -- commands -----------------------------------------------------------------

def cmd_qfi(args) -> int:
    settings = resolve_settings(args)
    record = compute_qfi(build_config(settings), settings["method"])
    emit(record, settings["format"] or "json")
    return EXIT_OK


def cmd_qfim(args) -> int:
    settings = resolve_settings(args)
    emit(compute_qfim(build_config(settings)), settings["format"] or "json")
    return EXIT_OK


def _parse_outputs(text):
    names = [n.strip() for n in text.split(",") if n.strip()]
    known = NUMERIC_OUTPUTS + CONFIG_FORMULAS
    for n in names:
        if n not in known:
            raise UsageError(f"unknown output {n!r}; choose from {', '.join(known)}")
    if not names:
        raise UsageError("--outputs is empty")
    return names


def cmd_sweep(args) -> int:
    settings = resolve_settings(args)
    config = build_config(settings)
    total = args.total_resource
    if total is not None:
        param = "n_kappa"
        start = 0.0 if args.start is None else args.start
        stop = total if args.stop is None else args.stop
        if not 0 <= start < stop <= total:
            raise UsageError("total-resource sweeps need 0 <= start < stop <= n_tot")
        outputs = _parse_outputs(args.outputs or "f_two_coherent_max,qfim")
    else:
        param = args.param
        if param not in SWEEP_PARAMS:
            raise UsageError(f"--param must be one of {', '.join(SWEEP_PARAMS)}")
        if args.start is None or args.stop is None:
            raise UsageError("--start and --stop are required")
        start, stop = args.start, args.stop
        outputs = _parse_outputs(args.outputs or "qfi")
    if args.count < 2 or not start < stop:
        raise UsageError("sweeps need --count >= 2 and start < stop")
    grid = np.linspace(start, stop, args.count)
    rows = run_sweep(config, param, grid, outputs, settings["method"], args.workers, total)
    fmt_name = settings["format"] or "csv"
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                emit(rows, fmt_name, fh)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror}") from None
    else:
        emit(rows, fmt_name)
    return EXIT_OK


def cmd_parity(args) -> int:
    settings = resolve_settings(args)
    config = build_config(settings)
    phis = args.phi if args.phi else default_phase_grid()
    points, summary = compute_parity(config, phis, args.dphi)
    rows = [{"phi": p.phi, "parity": p.parity, "cfi": None if p.indeterminate else p.cfi,
             "indeterminate": p.indeterminate} for p in points]
    if (settings["format"] or "csv") == "csv":
        write_csv(rows, sys.stdout)
        print(f"# best cfi {fmt(summary['best_cfi'])} at phi {fmt(summary['best_phi'])}"
              + (f", {summary['analytic_formula']} {fmt(summary['analytic'])}"
                 if summary["analytic"] is not None else ""), file=sys.stderr)
    else:
        emit({**summary, "points": rows}, "json")
    return EXIT_OK


def _analytic_value(text):
    for kind in (float, complex):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def cmd_analytic(args) -> int:
    if args.list or not args.formula:
        for name, fn in analytic.FORMULAS.items():
            doc = (fn.__doc__ or "").strip().splitlines()
            params = ", ".join(inspect.signature(fn).parameters)
            print(f"{name}({params})" + (f"  {doc[0]}" if doc else ""))
        return EXIT_OK
    fn = analytic.FORMULAS.get(args.formula)
    if fn is None:
        raise UsageError(f"unknown formula {args.formula!r}; see `analytic --list`")
    kwargs = {}
    for item in args.params:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        kwargs[key.strip()] = _analytic_value(value.strip())
    try:
        inspect.signature(fn).bind(**kwargs)
    except TypeError as exc:
        raise UsageError(f"{args.formula}: {exc}") from None
    value = fn(**kwargs)
    emit({"formula": args.formula, **{k: str(v) if isinstance(v, complex) else v
                                       for k, v in kwargs.items()}, "value": value},
         args.format or "json")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.list:
        for check in verify.CHECKS:
            print(f"{check.name:<34s} [{check.criterion:2d}] {check.description}")
        return EXIT_OK
    names = args.check or None
    if names:
        unknown = [n for n in names if n not in verify.check_names()]
        if unknown:
            raise UsageError(f"unknown check(s): {', '.join(unknown)}")
    settings = verify.Settings(tail_tol=args.tail_tol, guard=args.guard)
    results = []
    for check in (verify.CHECKS if names is None else [verify.get_check(n) for n in names]):
        result = check.run(settings)
        results.append(result)
        if args.format != "json":
            print(result.line(), flush=True)
            for note in result.notes:
                print(f"      {note}")
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        emit([{"check": r.name, "criterion": r.criterion, "value": r.value,
               "relation": r.relation, "tolerance": r.tolerance, "passed": r.passed,
               "cases": r.cases, "seconds": r.seconds, "notes": "; ".join(r.notes)}
              for r in results], "json")
    else:
        report = verify.comparison_report()
        print("unaveraged vs averaged at g=0.5, n=1: " +
              ", ".join(f"{k} {v:.6f}" for k, v in report.items()))
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK if failed else EXIT_OK


# -- parser -------------------------------------------------------------------

def _add_config_options(p):
    p.add_argument("--config", help="key=value or JSON file; flags take precedence")
    p.add_argument("--a", help="mode A input, e.g. coherent:1 (default vacuum)")
    p.add_argument("--b", help="mode B input (default vacuum)")
    p.add_argument("--g", type=float, help="OPA gain (default 0.5)")
    p.add_argument("--theta", type=float, help="pump phase (default 0)")
    p.add_argument("--model", help="phase generator: u, l, s, d or sd (default s)")
    p.add_argument("--average", action=argparse.BooleanOptionalAction, default=None,
                   help="phase-average the inputs")
    p.add_argument("--cutoff", type=int, help="fixed max total photon number")
    p.add_argument("--guard", type=int, help="guard pair levels (default 12)")
    p.add_argument("--tail-tol", dest="tail_tol", type=float,
                   help="allowed truncation loss (default 1e-10)")
    p.add_argument("--second-gain", dest="second_gain", type=float,
                   help="gain of the inverting OPA (default: same as --g)")
    p.add_argument("--method", help="qfi route: " + ", ".join(METHODS))
    p.add_argument("--format", choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="su11qfi",
                                     description="Fisher information of SU(1,1) interferometers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qfi", help="single-phase QFI with its closed form")
    _add_config_options(p)
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("qfim", help="phase sum/difference information matrix")
    _add_config_options(p)
    p.set_defaults(func=cmd_qfim)

    p = sub.add_parser("sweep", help="evaluate outputs over a linear grid")
    _add_config_options(p)
    p.add_argument("--param", default="g", help="one of " + ", ".join(SWEEP_PARAMS))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int, default=11)
    p.add_argument("--outputs", help="comma list of qfi, qfim, parity and formula names")
    p.add_argument("--total-resource", dest="total_resource", type=float, metavar="N_TOT",
                   help="split N_TOT between n_kappa and two coherent inputs")
    p.add_argument("--workers", type=int, help="worker threads (default: CPU count)")
    p.add_argument("--output", "-o", help="write here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("parity", help="parity-detection CFI versus phase sum")
    _add_config_options(p)
    p.add_argument("--phi", type=float, action="append", help="phase point (repeatable)")
    p.add_argument("--dphi", type=float, default=1e-4)
    p.set_defaults(func=cmd_parity)

    p = sub.add_parser("analytic", help="evaluate a closed-form expression")
    p.add_argument("formula", nargs="?")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--list", action="store_true")
    p.add_argument("--format", choices=("json", "csv"))
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("verify", help="run the acceptance grid")
    p.add_argument("--list", action="store_true", help="list checks without running them")
    p.add_argument("--check", action="append", help="run only this check (repeatable)")
    p.add_argument("--tail-tol", dest="tail_tol", type=float, default=1e-10)
    p.add_argument("--guard", type=int, default=12)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConvergenceError, ResourceError) as exc:
        print(f"su11qfi: convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (UsageError, CutoffError, PreconditionError, UnsupportedError, ValueError) as exc:
        print(f"su11qfi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
