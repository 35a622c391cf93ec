"""Command-line front end: deterministic runs, machine-readable reports.

Every run produces a single report record: subcommand echo, configuration
echo, payload, and a status in {pass, fail, witness}.  ``--emit structured``
prints it as one canonical JSON object (sorted keys, no timestamps), so a
fixed command line is byte-reproducible.  Exit codes: 0 pass, 1 error,
2 witness or counterexample found.

Any argument value of the form ``@path`` is replaced by the contents of
that file.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import puiseux
from .errors import (
    ArcFieldError,
    ConfigError,
    CounterexampleFound,
    IrrationalBranch,
    ParseError,
)
from .mapexpr import MapExpr, free_vars
from .param_series import param_rows, render_param_series
from .parser import parse_map, parse_poly, parse_series
from .puiseux import render_series
from .qarith import render_rat
from .newton import np_roots
from .topology import (
    ArcSamplerSpec,
    holder_probe,
    loja_fit,
    transfer_check,
    uniform_modulus_probe,
)
from .transport import (
    chart_factor_product,
    chart_lift_maps,
    counterexample_pushforward,
    eval_map_on_arc,
    jacobian_check,
    monotone_bound_check,
)

DEFAULTS = {"t_order": "8", "trials": 100, "seed": 0, "mode": "exact", "ram_cap": 64}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    t_order: Fraction
    trials: int
    seed: int
    mode: str
    ram_cap: int
    emit: str
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "t_order": render_rat(self.t_order),
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode,
            "ram_cap": self.ram_cap,
            "emit": self.emit,
            "tolerance": self.tolerance,
        }


@dataclass
class Report:
    subcommand: str
    config: dict
    payload: dict
    status: str  # pass | fail | witness

    def exit_code(self) -> int:
        return {"pass": 0, "fail": 2, "witness": 2}[self.status]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _fraction(text: str) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational: {text!r}") from exc


def _expand_at(value: Optional[str]) -> Optional[str]:
    if value is not None and value.startswith("@"):
        with open(value[1:], "r", encoding="ascii") as fh:
            return fh.read().strip()
    return value


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--t-order", default=DEFAULTS["t_order"], help="working truncation order (rational)")
    common.add_argument("--trials", type=int, default=DEFAULTS["trials"])
    common.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    common.add_argument("--mode", choices=("exact", "numeric"), default=DEFAULTS["mode"])
    common.add_argument("--emit", choices=("text", "structured"), default="text")
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--ram-cap", type=int, default=DEFAULTS["ram_cap"])

    top = _Parser(prog="arcfield", description=__doc__)
    sub = top.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("counterexample", parents=[common],
                   help="push the parabola family through the stretch map")
    ce = sub.choices["counterexample"]
    ce.add_argument("--grid-box", type=float, default=10.0)
    ce.add_argument("--grid-step", type=float, default=0.01)

    pr = sub.add_parser("probe", parents=[common], help="sampled probes")
    pr.add_argument("kind", choices=("holder", "loja", "unif", "transport"))
    pr.add_argument("--map", dest="map_text", help="map expression (or @file)")
    pr.add_argument("--vars", default="x,y", help="comma-separated input variables")
    pr.add_argument("--phi1", help="loja: lower function")
    pr.add_argument("--phi2", help="loja: upper function")
    pr.add_argument("--box", default="-1,1", help="box as lo,hi[;lo,hi...]")
    pr.add_argument("--epsilon", type=float, default=0.1)
    pr.add_argument("--grid-step", type=float, default=0.01)
    pr.add_argument("--transfer-kind", choices=("injective", "surjective", "limit_additive"),
                    default="injective")
    pr.add_argument("--min-ord", default="", help="per-component order floor, e.g. 1,2")
    pr.add_argument("--unit-lead", action="store_true",
                    help="sample arcs with leading coefficient +-1")
    pr.add_argument("--target", default=None, help="residual order for transport checks")

    rt = sub.add_parser("roots", parents=[common], help="real series roots of a polynomial")
    rt.add_argument("poly", help="polynomial in X (or series list 'c0; c1; ...', or @file)")

    ev = sub.add_parser("eval", parents=[common], help="apply a map to an arc")
    ev.add_argument("map_text", metavar="map", help="map expression (or @file)")
    ev.add_argument("--arc", required=True, help="semicolon-separated series components")
    ev.add_argument("--vars", default="x,y")
    return top


def _config_from(args) -> RunConfig:
    t_order = _fraction(args.t_order)
    if t_order <= 0:
        raise ConfigError("t-order must be positive")
    if args.ram_cap < 1:
        raise ConfigError("ram-cap must be at least 1")
    if args.mode == "numeric" and args.tolerance <= 0:
        raise ConfigError("tolerance must be positive in numeric mode")
    return RunConfig(
        subcommand=args.subcommand,
        t_order=t_order,
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        ram_cap=args.ram_cap,
        emit=args.emit,
        tolerance=args.tolerance,
    )


def _parse_vars(text: str):
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    if not names:
        raise ConfigError("empty variable list")
    return names


def _pruned_map(text: str, names) -> MapExpr:
    m = parse_map(text, names)
    used = set()
    for e in m.exprs:
        used |= free_vars(e)
    arity = max(used) + 1 if used else 1
    if arity < len(m.var_names):
        m = MapExpr(m.exprs, m.var_names[:arity])
    return m


def _parse_box(text: str):
    out = []
    for chunk in text.split(";"):
        lo, hi = chunk.split(",")
        out.append((float(lo), float(hi)))
    return out


# -- handlers --------------------------------------------------------------------


def run_counterexample(cfg: RunConfig, grid_box: float, grid_step: float) -> Report:
    if cfg.t_order < 3:
        raise ConfigError("counterexample needs --t-order at least 3")
    result = counterexample_pushforward(cfg.t_order)
    product = chart_factor_product(12)
    product_ok = product.terms == ((Fraction(0), Fraction(1)),)
    bound_max = monotone_bound_check(grid_box, grid_step)
    lift_u, _lift_v = chart_lift_maps()
    det = jacobian_check(lift_u, [(0.0, 0.0)])
    w = result.witness
    payload = {
        "chart": result.chart,
        "lifted": [render_param_series(c) for c in result.lifted],
        "image_first": render_param_series(result.image[0]),
        "image_second": render_param_series(result.image[1]),
        "image_first_rows": param_rows(result.image[0]),
        "image_second_rows": param_rows(result.image[1]),
        "divergence_witness": None
        if w is None
        else {
            "t_exp": render_rat(w.t_exp),
            "eps_exp": w.eps_exp,
            "coeff": render_rat(w.coeff),
            "m0n0": list(w.m0n0) if w.m0n0 else None,
        },
        "factor_product": {
            "order": "12",
            "rendered": render_series(product),
            "is_one": product_ok,
        },
        "monotone_bound": {
            "grid_box": grid_box,
            "grid_step": grid_step,
            "max": bound_max,
            "ok": bound_max <= 0.25,
        },
        "jacobian_at_origin": {"det": det, "ok": det == 1.0},
    }
    status = "witness" if w is not None else "fail"
    return Report("counterexample", cfg.as_dict(), payload, status)


def _sampler_spec(arity: int, args) -> ArcSamplerSpec:
    floors = ()
    if args.min_ord:
        floors = tuple(_fraction(x) for x in args.min_ord.split(","))
    return ArcSamplerSpec(
        dim=arity,
        unit_lead=args.unit_lead,
        min_lead_exp=floors,
    )


def run_probe(cfg: RunConfig, args) -> Report:
    kind = args.kind
    if kind == "holder":
        if not args.map_text:
            raise ConfigError("probe holder needs --map")
        m = _pruned_map(_expand_at(args.map_text), _parse_vars(args.vars))
        spec = _sampler_spec(m.arity, args)
        est = holder_probe(m, spec, trials=cfg.trials, seed=cfg.seed)
        payload = {
            "kind": "holder",
            "map": args.map_text,
            "alpha": render_rat(est.alpha),
            "constant_offset": render_rat(est.constant_offset),
            "sample_count": est.sample_count,
            "discarded": est.discarded,
            "worst_pair": list(est.worst_pair),
        }
        return Report("probe", cfg.as_dict(), payload, "pass" if est.alpha > 0 else "fail")
    if kind == "loja":
        if not (args.phi1 and args.phi2):
            raise ConfigError("probe loja needs --phi1 and --phi2")
        names = _parse_vars(args.vars)
        phi1 = _pruned_map(_expand_at(args.phi1), names)
        phi2 = _pruned_map(_expand_at(args.phi2), names)
        box = _parse_box(args.box)
        fit = loja_fit(phi1, phi2, box, samples=cfg.trials, seed=cfg.seed,
                       tolerance=cfg.tolerance)
        ok = fit.max_violation <= cfg.tolerance
        payload = {
            "kind": "loja",
            "phi1": args.phi1,
            "phi2": args.phi2,
            "box": args.box,
            "c": fit.c,
            "r": fit.r,
            "max_violation": fit.max_violation,
            "fit_samples": fit.fit_samples,
            "validation_samples": fit.validation_samples,
        }
        return Report("probe", cfg.as_dict(), payload, "pass" if ok else "fail")
    if kind == "unif":
        if not args.map_text:
            raise ConfigError("probe unif needs --map")
        m = _pruned_map(_expand_at(args.map_text), _parse_vars(args.vars))
        box = _parse_box(args.box)
        r = uniform_modulus_probe(m, box, args.epsilon, args.grid_step)
        payload = {
            "kind": "unif",
            "map": args.map_text,
            "box": args.box,
            "epsilon": args.epsilon,
            "grid_step": args.grid_step,
            "r": r,
        }
        return Report("probe", cfg.as_dict(), payload, "pass" if r > 0 else "fail")
    # transport
    if args.transfer_kind != "limit_additive" and not args.map_text:
        raise ConfigError("probe transport needs --map")
    m = None
    arity = 1
    if args.map_text:
        m = _pruned_map(_expand_at(args.map_text), _parse_vars(args.vars))
        arity = m.arity
    spec = _sampler_spec(arity, args)
    target = _fraction(args.target) if args.target else None
    try:
        rep = transfer_check(
            args.transfer_kind, m, spec, trials=cfg.trials, seed=cfg.seed,
            target=target, mode=cfg.mode,
        )
    except CounterexampleFound as exc:
        payload = {
            "kind": "transport",
            "transfer_kind": args.transfer_kind,
            "map": args.map_text,
            "witness": exc.witness,
        }
        return Report("probe", cfg.as_dict(), payload, "witness")
    payload = {
        "kind": "transport",
        "transfer_kind": rep.kind,
        "map": args.map_text,
        "trials": rep.trials,
    }
    return Report("probe", cfg.as_dict(), payload, "pass")


def run_roots(cfg: RunConfig, poly_text: str) -> Report:
    poly = parse_poly(_expand_at(poly_text))
    if poly.degree < 1:
        raise ConfigError("polynomial must have degree at least 1")
    try:
        branches = np_roots(poly, cfg.t_order, mode=cfg.mode)
    except IrrationalBranch as exc:
        raise ArcFieldError(f"{exc}; rerun with --mode numeric") from exc
    payload = {
        "poly": poly_text,
        "degree": poly.degree,
        "branches": [
            {
                "series": render_series(b.series),
                "multiplicity": b.multiplicity,
                "certified_order": None
                if b.certified_order is None
                else render_rat(b.certified_order),
                "exactness": b.exactness,
            }
            for b in branches
        ],
        "note": "" if branches else "no real branches",
    }
    return Report("roots", cfg.as_dict(), payload, "pass")


def run_eval(cfg: RunConfig, map_text: str, arc_text: str, vars_text: str) -> Report:
    m = _pruned_map(_expand_at(map_text), _parse_vars(vars_text))
    comps = tuple(parse_series(chunk) for chunk in _expand_at(arc_text).split(";"))
    image = eval_map_on_arc(m, comps, order=cfg.t_order)
    payload = {
        "map": map_text,
        "arc": [render_series(c) for c in comps],
        "image": [render_series(c) for c in image],
    }
    return Report("eval", cfg.as_dict(), payload, "pass")


# -- emission ---------------------------------------------------------------------


def _emit_text(report: Report, out) -> None:
    print(f"[{report.subcommand}] status: {report.status}", file=out)
    for key in sorted(report.payload):
        print(f"  {key}: {report.payload[key]}", file=out)


def emit(report: Report, out=None) -> None:
    out = out or sys.stdout
    if report.config.get("emit") == "structured":
        record = {
            "subcommand": report.subcommand,
            "config": report.config,
            "payload": report.payload,
            "status": report.status,
        }
        print(json.dumps(record, sort_keys=True, separators=(",", ":")), file=out)
    else:
        _emit_text(report, out)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from(args)
        puiseux.set_ram_cap(cfg.ram_cap)
        if args.subcommand == "counterexample":
            report = run_counterexample(cfg, args.grid_box, args.grid_step)
        elif args.subcommand == "probe":
            report = run_probe(cfg, args)
        elif args.subcommand == "roots":
            report = run_roots(cfg, args.poly)
        else:
            report = run_eval(cfg, args.map_text, args.arc, args.vars)
    except ParseError as exc:
        print(f"parse error at bytes {exc.start}..{exc.end}: "
              f"expected {exc.expected}, found {exc.found}", file=err)
        return 1
    except (ConfigError, ArcFieldError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    emit(report, out)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
