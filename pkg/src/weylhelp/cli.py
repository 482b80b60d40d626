"""Command-line entry point: `weylhelp <group> <command> [options]`.

Exit codes: 0 positive/valid, 1 negative, 2 inconclusive, 64 bad input,
70 numerical failure.  Reports are JSON with a provenance block; --format csv
switches tabular commands to CSV rows.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from . import asymptotics as asym
from . import help_inequality as hi
from . import indefinite as ind
from . import liouville as lv
from . import regvar as rv
from .catalog import UnknownEntryError, catalog, names
from .coefficients import Distribution, DivergentIntegralError, ProfileError, profile_from_json
from .weyl import DomainError, MConfig, WeylError, m_eval, problem_from_json

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_NUMERIC = 64, 70

_CLASS = {
    "yes": 0, "valid": 0, "bounded": 0, "regular": 0, "converged": 0, "positive": 0, "ok": 0,
    "no": 1, "invalid": 1, "unbounded": 1, "diverges": 1, "negative": 1, "fail": 1,
    "slow": 0, "rapid": 0,
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: tuple
    problem: str | None = None
    catalog: str | None = None
    fmt: str = "json"
    seed: int = 0
    ode_rtol: float = 1e-10
    disk_rtol: float = 1e-6
    per_decade: int = 8
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.ode_rtol > 0 and self.disk_rtol > 0):
            raise UsageError("tolerances must be positive")
        if self.per_decade < 2:
            raise UsageError("grids need at least 2 points per decade")


def cstr(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{abs(z.imag):.17g}i"


def parse_complex(s: str) -> complex:
    t = s.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    try:
        return complex(t.replace("i", "j")) if "i" in t else complex(float(t), 0.0)
    except ValueError:
        raise UsageError(f"cannot parse complex number {s!r} (expected a+bi)") from None


def _jsonable(obj):
    if isinstance(obj, complex):
        return cstr(obj)
    if isinstance(obj, (np.floating,)):
        return _jsonable(float(obj))
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# inputs


def _load_problem(cfg: RunConfig):
    if cfg.catalog:
        try:
            return catalog(cfg.catalog)
        except UnknownEntryError as exc:
            raise UsageError(str(exc)) from None
    if not cfg.problem:
        raise UsageError("need --problem FILE or --catalog NAME")
    try:
        with open(cfg.problem) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.problem}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ProfileError(f"invalid JSON in {cfg.problem}: {exc}") from None
    return problem_from_json(d)


def _mconfig(cfg: RunConfig) -> MConfig:
    return MConfig(ode_rtol=cfg.ode_rtol, disk_rtol=cfg.disk_rtol)


def _ratio_cfg(cfg: RunConfig) -> asym.RatioConfig:
    return replace(asym.RATIO_DEFAULT, per_decade=cfg.per_decade)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([cstr(v) if isinstance(v, complex) else (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                    for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands; each returns (result dict, verdict word or None, trail, csv text or None)


def _mfun_eval(cfg, p):
    lam = parse_complex(cfg.options["lam"])
    s = m_eval(p, lam, _mconfig(cfg))
    res = {"lambda": lam, "m": s.m, "enclosure": s.enclosure, "method": s.method}
    return res, None, [], _csv(("lambda", "re_m", "im_m", "enclosure"), [(cstr(lam), s.m.real, s.m.imag, s.enclosure)])


def _mfun_table(cfg, p):
    o = cfg.options
    lo, hi = float(o["lo"]), float(o["hi"])
    if not 0 < lo < hi:
        raise UsageError("need 0 < --from < --to")
    n = int(round(math.log10(hi / lo) * cfg.per_decade)) + 1
    ys = np.geomspace(lo, hi, n)
    rows = []
    for y in ys:
        lam = complex(0.0, y) if o["axis"] == "imag" else complex(-y, 0.0)
        s = m_eval(p, lam, _mconfig(cfg))
        rows.append((float(y), s.m.real, s.m.imag, s.enclosure))
    return {"axis": o["axis"], "rows": rows}, None, [], _csv(("y", "re_m", "im_m", "enclosure"), rows)


def _regvar_classify(cfg, p):
    o = cfg.options
    if o["map"] == "r-over-w":
        g = asym.r_over_w(p)
    elif o["map"] == "w-over-r":
        g = asym.w_over_r(p)
    else:
        g = Distribution(p.w if o["map"] == "W" else p.r).as_map()
    var = rv.classify_variation(g, o["end"])
    res = {"map": o["map"], "end": o["end"], "variation": var.kind, "index": var.index, "source": var.source}
    verdict = None
    if o.get("pi"):
        pi = rv.positively_increasing(g, o["end"])
        res.update(pi_verdict=pi.verdict, S=pi.S, C=pi.C, beta=pi.beta, pi_note=pi.note)
        verdict = pi.verdict
    res["table"] = list(var.table)
    return res, verdict, [f"{o['map']} at {o['end']}: {var.kind} ({var.source})"], _csv(("x", "t", "ratio"), var.table)


def _asym_model(cfg, p):
    m = asym.kasahara_model(p, cfg.options["end"])
    res = {"end": m.end, "nu": m.nu, "K": m.K, "alpha": m.alpha, "validity": m.validity, "reason": m.reason}
    if m.h is not None and m.validity != "unavailable":
        res["f"] = [(r, m.f(r)) for r in np.geomspace(1e-3, 1e3, 7)]
    return res, None, [f"model {m.validity}"], None


def _asym_verify(cfg, p):
    o = cfg.options
    m = asym.kasahara_model(p, o["end"])
    rhos = np.geomspace(float(o["lo"]), float(o["hi"]), int(round(math.log10(float(o["hi"]) / float(o["lo"])) * cfg.per_decade)) + 1)
    rep = asym.verify_asymptote(p, m, rhos, config=_mconfig(cfg))
    tol = float(o["tol"])
    verdict = "ok" if rep.max_deviation <= tol else "fail"
    res = {"nu": m.nu, "K": m.K, "max_deviation": rep.max_deviation, "per_decade": rep.per_decade, "tolerance": tol}
    rows = [(r[0], r[1], r[2], r[3], r[4]) for r in rep.rows]
    return res, verdict, [f"deviation {rep.max_deviation:.3g} vs {tol:g}"], _csv(("rho", "mu", "m", "predicted", "deviation"), rows)


def _ratio_dict(rep: asym.RatioReport) -> dict:
    return {"end": rep.end, "which": rep.which, "window": rep.window, "sup": rep.sup, "median": rep.median,
            "slope": rep.slope, "monotone": rep.monotone, "verdict": rep.verdict, "prediction": rep.prediction,
            "prediction_source": rep.prediction_source, "disagreement": rep.disagreement}


def _asym_ratio(cfg, p):
    o = cfg.options
    rep = asym.ratio_criterion(p, o["end"], o["which"], _ratio_cfg(cfg), _mconfig(cfg))
    rows = [(s[0], s[1], s[2], s[3], s[4]) for s in rep.samples]
    return _ratio_dict(rep), rep.verdict, [f"{rep.which} on {rep.end}: {rep.verdict}"], \
        _csv(("y", "re_m", "im_m", "ratio", "enclosure"), rows)


def _help_check(cfg, p):
    v = hi.help_check(p, _ratio_cfg(cfg), _mconfig(cfg))
    return v.to_dict(), v.validity, list(v.trail), None


def _help_everitt(cfg, p):
    e = hi.everitt_scan(p, per_decade=cfg.per_decade, config=_mconfig(cfg))
    res = {"theta0": e.theta0, "K": e.K, "validity": e.validity, "grid_limited": e.grid_limited,
           "violation": e.violation, "rho_range": e.rho_range, "unresolved": e.unresolved}
    return res, e.validity, [f"theta0 = {e.theta0:.5f}"], _csv(("theta", "rho", "arg", "im_lambda2_m"), e.samples)


def _help_bound(cfg, p):
    seq = cfg.options["seq"]
    n = int(cfg.options["n"])
    if seq == "factorial":
        a, b = hi.factorial_sequences(n)
    elif seq == "harmonic":
        a, b = [1.0 / k for k in range(2, n + 2)], [1.0] * n
    else:
        raise UsageError(f"unknown sequence {seq!r} (factorial | harmonic)")
    rows = hi.help_lower_bound(p, a, b)
    res = {"sequence": seq, "K_max": max(r.K for r in rows), "rows": [asdict(r) for r in rows]}
    return res, None, [], _csv(("n", "a", "b", "A", "B", "K"), [(r.n, r.a, r.b, r.A, r.B, r.K) for r in rows])


def _help_potential(cfg, p):
    v = hi.help_with_potential(p, m_route=bool(cfg.options.get("m_route")))
    return v.to_dict(), v.validity, list(v.trail), None


def _sim_check(cfg, p):
    v = ind.similarity_check(p, _ratio_cfg(cfg), _mconfig(cfg))
    return v.to_dict(), v.similar, list(v.trail), None


def _sim_coeff(cfg, p):
    v = ind.similarity_coefficient_check(p)
    res = {"similar": v.similar, "case": v.case, "regular_at_inf": v.regular_at_inf, "regular_at_0": v.regular_at_0}
    return res, v.similar, list(v.trail), None


def _sim_potential(cfg, p):
    v = ind.similarity_with_potential(p)
    return v.to_dict(), v.similar, list(v.trail), None


def _sim_probe(cfg, p):
    o = cfg.options
    r = ind.nonreal_spectrum_probe(p, float(o["c"]), n=int(o["n"]), config=_mconfig(cfg))
    res = {"c": r.c, "candidates": list(r.candidates), "zeros": [(z, d) for z, d in r.zeros], "tol": r.tol,
           "failures": r.failures}
    verdict = "negative" if r.zeros else "positive"  # zeros mean nonreal spectrum
    return res, verdict, [f"{len(r.zeros)} zeros off the real axis"], _csv(("re_z", "im_z", "re_D", "im_D"), r.rows())


def _sim_lrg(cfg, p):
    r = ind.lrg_equivalence_report(p, _ratio_cfg(cfg), _mconfig(cfg))
    verdict = {"yes": "positive", "no": "negative"}.get(r.similarity, "inconclusive")
    return r.to_dict(), verdict, list(r.trail), None


def _fp_check(cfg, p):
    v = ind.fp_wellposedness(p, _ratio_cfg(cfg), _mconfig(cfg))
    return v.to_dict(), v.well_posed, list(v.trail), None


def _liouville_transform(cfg, p):
    tr = lv.transform(p, config=_mconfig(cfg))
    out = tr.problem.to_json()
    res = {"problem": out, "B": tr.B, "c0_in_L2w": tr.c0_in_L2w, "inv_c0_in_L2": tr.inv_c0_in_L2,
           "exact_tail": tr.exact_tail, "evidence": tr.evidence}
    path = cfg.options.get("out")
    if path:
        with open(path, "w") as fh:
            json.dump(_jsonable(out), fh, indent=1)
    return res, None, [], _csv(("x", "xi", "w_tilde", "W_tilde"), tr.xi_table())


def _liouville_verify(cfg, p):
    lams = [parse_complex(s) for s in cfg.options["lams"].split(",")]
    rows = lv.verify_m_invariance(p, lams, config=_mconfig(cfg))
    ok = all(r.ok for r in rows)
    res = {"rows": [{"lambda": r.lam, "m_original": r.m_original, "m_transformed": r.m_transformed,
                     "residual": r.residual, "bound": r.bound} for r in rows], "all_within_bound": ok}
    return res, "ok" if ok else "fail", [], _csv(("lambda", "m_original", "m_transformed", "residual", "bound"),
                                                 [(r.lam, r.m_original, r.m_transformed, r.residual, r.bound) for r in rows])


COMMANDS = {
    ("mfun", "eval"): _mfun_eval,
    ("mfun", "table"): _mfun_table,
    ("regvar", "classify"): _regvar_classify,
    ("asym", "model"): _asym_model,
    ("asym", "verify"): _asym_verify,
    ("asym", "ratio"): _asym_ratio,
    ("help", "check"): _help_check,
    ("help", "everitt"): _help_everitt,
    ("help", "bound"): _help_bound,
    ("help", "potential"): _help_potential,
    ("sim", "check"): _sim_check,
    ("sim", "coeff"): _sim_coeff,
    ("sim", "potential"): _sim_potential,
    ("sim", "probe"): _sim_probe,
    ("sim", "lrg"): _sim_lrg,
    ("fp", "check"): _fp_check,
    ("liouville", "transform"): _liouville_transform,
    ("liouville", "verify"): _liouville_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--problem", help="problem JSON file")
    common.add_argument("--catalog", help="named example instead of a file")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--ode-rtol", type=float, default=1e-10)
    common.add_argument("--disk-rtol", type=float, default=1e-6)
    common.add_argument("--per-decade", type=int, default=8)

    top = _Parser(prog="weylhelp", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"weylhelp {__version__}")
    groups = top.add_subparsers(dest="group", required=True)

    def sub(group, name):
        return subs[group].add_parser(name, parents=[common])

    subs = {}
    for g in ("mfun", "regvar", "asym", "help", "sim", "fp", "liouville"):
        subs[g] = groups.add_parser(g).add_subparsers(dest="cmd", required=True)
    cat = groups.add_parser("catalog")
    cat.add_argument("name", nargs="?", help="entry name; omit to list")

    s = sub("mfun", "eval")
    s.add_argument("--lambda", dest="lam", required=True, help='complex, e.g. "1+2i"')
    s = sub("mfun", "table")
    s.add_argument("--axis", choices=("imag", "neg-real"), default="imag")
    s.add_argument("--from", dest="lo", type=float, default=1e-6)
    s.add_argument("--to", dest="hi", type=float, default=1e6)
    s = sub("regvar", "classify")
    s.add_argument("--map", choices=("r-over-w", "w-over-r", "W", "R"), default="r-over-w")
    s.add_argument("--end", choices=rv.ENDS, default="infinity")
    s.add_argument("--pi", action="store_true", help="also test positive increase")
    s = sub("asym", "model")
    s.add_argument("--end", choices=asym.SPECTRAL_ENDS, default="infinity")
    s = sub("asym", "verify")
    s.add_argument("--end", choices=asym.SPECTRAL_ENDS, default="infinity")
    s.add_argument("--from", dest="lo", type=float, default=10.0)
    s.add_argument("--to", dest="hi", type=float, default=1e4)
    s.add_argument("--tol", type=float, default=1e-2)
    s = sub("asym", "ratio")
    s.add_argument("--end", choices=asym.SPECTRAL_ENDS, default="infinity")
    s.add_argument("--which", choices=("Re/Im", "Im/Re"), default="Re/Im")
    sub("help", "check")
    sub("help", "everitt")
    s = sub("help", "bound")
    s.add_argument("--seq", default="factorial")
    s.add_argument("--n", type=int, default=8)
    s = sub("help", "potential")
    s.add_argument("--m-route", dest="m_route", action="store_true")
    sub("sim", "check")
    sub("sim", "coeff")
    sub("sim", "potential")
    s = sub("sim", "probe")
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--n", type=int, default=20)
    sub("sim", "lrg")
    sub("fp", "check")
    s = sub("liouville", "transform")
    s.add_argument("--out")
    s = sub("liouville", "verify")
    s.add_argument("--lambdas", dest="lams", default="i,2i")
    return top


_COMMON = ("problem", "catalog", "fmt", "seed", "ode_rtol", "disk_rtol", "per_decade", "group", "cmd")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(ns).items() if k not in _COMMON}
    return RunConfig((ns.group, ns.cmd), ns.problem, ns.catalog, ns.fmt, ns.seed, ns.ode_rtol, ns.disk_rtol,
                     ns.per_decade, opts)


def run(cfg: RunConfig) -> tuple[dict, int, str | None]:
    """Execute one command: (report, exit code, csv text or None)."""
    np.random.seed(cfg.seed)
    problem = _load_problem(cfg)
    fn = COMMANDS[cfg.command]
    res, verdict, trail, csv_text = fn(cfg, problem)
    code = EXIT_POSITIVE if verdict is None else _CLASS.get(verdict, EXIT_INCONCLUSIVE)
    report = {
        "command": " ".join(cfg.command),
        "verdict": verdict,
        "result": res,
        "provenance": {
            "tool": "weylhelp",
            "version": __version__,
            "config": {k: v for k, v in asdict(cfg).items()},
            "trail": trail,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
    }
    return _jsonable(report), code, csv_text


def _error(kind: str, exc: BaseException, code: int) -> int:
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        if ns.group == "catalog":
            if not ns.name:
                print(json.dumps(names()))
                return 0
            try:
                print(json.dumps(_jsonable(catalog(ns.name).to_json()), indent=1))
            except UnknownEntryError as exc:
                raise UsageError(str(exc)) from None
            return 0
        cfg = config_from_args(ns)
        report, code, csv_text = run(cfg)
    except (UsageError, ProfileError, DomainError) as exc:
        return _error("usage", exc, EXIT_USAGE)
    except (WeylError, ArithmeticError, rv.RegvarError, asym.AsymptoticsError, hi.HelpError, ind.SimilarityError,
            lv.LiouvilleError, DivergentIntegralError, FloatingPointError) as exc:
        return _error("numeric", exc, EXIT_NUMERIC)
    except ValueError as exc:
        return _error("usage", exc, EXIT_USAGE)
    try:
        if cfg.fmt == "csv" and csv_text is not None:
            sys.stdout.write(csv_text)
        else:
            print(json.dumps(report, indent=1))
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the interpreter's flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return code


if __name__ == "__main__":
    sys.exit(main())
