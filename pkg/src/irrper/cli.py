"""Command-line driver.

Exit codes: 0 all selected checks pass, 1 usage error, 2 convergence failure,
3 a check failed without a convergence failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields

from . import __version__
from .checks import ALL_CHECKS, CheckConfig
from .comparison import (
    det_q_closed_form,
    det_q_derived,
    exceptional_target,
    f_form_consistent,
    f_form_printed,
    final_period,
    sigma_matrix,
    sigma_matrix_exceptional,
    theorem_value,
)
from .curve import DegenerateCurveError, critical_data, exceptional_root
from .numeric import PRECISIONS, default_precision, get_context, parse_complex
from .period import (
    ConvergenceFailure,
    approx_sequence,
    closed_form_P,
    curve_cycles,
    direct_curve_period,
    engine_limit_P,
    exceptional_pipeline,
    pushforward_period,
    stokes_residuals,
)
from .quadrature import QuadratureError, QuadratureSettings
from .report import Check, Report
from .transport import TrackingError

log = logging.getLogger("irrper")

MODES = ("verify", "period", "approx", "direct", "exceptional")
EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_CHECK = 0, 1, 2, 3
DEFAULT_M = (20, 25, 30, 35, 40, 50, 60, 70, 80)


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "period"
    lam: str | None = None
    m: tuple = ()
    tol: float | None = None
    precision: str = field(default_factory=default_precision)
    out: str | None = None
    format: str = "json"
    timings: bool = True

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.precision not in PRECISIONS:
            raise UsageError(f"unknown precision {self.precision!r}")
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.tol is not None and not (0 < self.tol <= 1e-4):
            raise UsageError("--tol must lie in (0, 1e-4]")
        if self.mode == "approx" and not self.m:
            raise UsageError("approx mode needs --m")
        if any(int(v) < 2 for v in self.m):
            raise UsageError("--m values must be integers >= 2")
        if self.mode in ("period", "approx", "direct") and self.lam is None:
            raise UsageError(f"{self.mode} mode needs --lambda")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d["m"] = list(self.m)
        d.pop("timings")
        d.pop("out")
        return d


def parse_m_list(text: str) -> tuple:
    try:
        vals = tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError as exc:
        raise UsageError(f"bad m-list {text!r}") from exc
    if list(vals) != sorted(set(vals)):
        raise UsageError("m-list must be strictly increasing")
    return vals


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key = value")
        k, v = (p.strip() for p in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


_KEYS = {f.name for f in fields(RunConfig)} | {"lambda", "no_timings"}


def _apply(cfg: RunConfig, values: dict):
    for k, v in values.items():
        if v is None:
            continue
        if k not in _KEYS:
            raise UsageError(f"unknown config key {k!r}")
        if k in ("lambda", "lam"):
            cfg.lam = str(v)
        elif k == "m":
            cfg.m = parse_m_list(v) if isinstance(v, str) else tuple(v)
        elif k == "tol":
            try:
                cfg.tol = float(v)
            except ValueError as exc:
                raise UsageError(f"bad tolerance {v!r}") from exc
        elif k == "no_timings":
            cfg.timings = not (v is True or str(v).lower() in ("1", "true", "yes"))
        elif k == "timings":
            cfg.timings = str(v).lower() in ("1", "true", "yes")
        else:
            setattr(cfg, k, v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irrper", description="Period determinants of d + dy on Legendre curves.")
    p.add_argument("mode_pos", nargs="?", choices=MODES, help="mode (same as --mode)")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--lambda", dest="lam", help='curve parameter, e.g. "2+0i"')
    p.add_argument("--m", help="comma-separated regularisation indices")
    p.add_argument("--tol", help="quadrature tolerance")
    p.add_argument("--precision", choices=PRECISIONS)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--no-timings", action="store_true", default=None)
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(argv=None) -> tuple[RunConfig, bool]:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        raise UsageError("invalid arguments") from exc
    try:
        cfg = RunConfig()
    except ValueError as exc:  # bad IRRPER_PRECISION
        raise UsageError(str(exc)) from exc
    if ns.config:
        _apply(cfg, read_config_file(ns.config))
    if ns.mode_pos and ns.mode and ns.mode_pos != ns.mode:
        raise UsageError("conflicting modes")
    _apply(cfg, {"mode": ns.mode or ns.mode_pos, "lam": ns.lam, "m": ns.m, "tol": ns.tol,
                 "precision": ns.precision, "out": ns.out, "format": ns.format, "no_timings": ns.no_timings})
    return cfg.validate(), bool(ns.verbose)


# ---------------------------------------------------------------------------

def _curve(cfg: RunConfig, ctx):
    try:
        lam = parse_complex(cfg.lam)
    except ValueError as exc:
        raise UsageError(f"cannot parse lambda {cfg.lam!r}") from exc
    try:
        return critical_data(lam, ctx)
    except DegenerateCurveError as exc:
        raise UsageError(str(exc)) from exc


def _branch(cd) -> dict:
    b = cd.branch
    return {"lambda": cd.lam, "exceptional": cd.exceptional, "x1": cd.x1, "x2": cd.x2, "s1": cd.s1,
            "s2": cd.s2, "sqrt_branch": b.sqrt_branch, "s1_sign": b.s1_sign, "s2_sign": b.s2_sign,
            "notes": list(b.notes)}


def _rel(a, b) -> float:
    return float(abs(complex(a) - complex(b)) / max(abs(complex(a)), abs(complex(b)), 1e-300))


def _settings(cfg: RunConfig) -> QuadratureSettings:
    return QuadratureSettings(tol=cfg.tol, precision=cfg.precision)


def run_period(cfg: RunConfig, rep: Report):
    ctx = get_context(cfg.precision)
    cd = _curve(cfg, ctx)
    rep.branch = _branch(cd)
    if cd.exceptional:
        return run_exceptional(cfg, rep, [cd])
    pp = pushforward_period(cd)
    ms = cfg.m or DEFAULT_M
    recs, ext = approx_sequence(cd, ms)
    sigma = sigma_matrix(cd)
    rep.add("sigma_det", sigma.det, 0.0, "sigma-matrix: direct elimination")
    rep.add("sigma_det_printed_closed_form", det_q_closed_form(cd), 0.0, "closed form as printed")
    rep.add("sigma_det_derived_closed_form", det_q_derived(cd), 0.0, "derived: (x1-x3)^2 = L")
    rep.add("rank1_pushforward", pp["rank1"], 0.0, "closed form: rank-1 summand")
    rep.add("rank2_limit_extrapolated", ext.limit, ext.error, "approx-sequence + Richardson", m0=ext.m0)
    rep.add("rank2_limit_printed", closed_form_P(cd), 0.0, "closed form as printed")
    rep.add("rank2_limit_derived", engine_limit_P(cd), 0.0, "product formula in closed form")
    printed_final = final_period(cd, pp["printed"], sigma)
    engine_final = final_period(cd, pp["rank1"] * ext.limit, sigma)
    rel_err = ext.error / max(abs(complex(ext.limit)), 1e-300)
    rep.add("period_assembled_printed", printed_final.value, 0.0, "printed pushforward / det Q")
    rep.add("period_assembled", engine_final.value, rel_err * abs(complex(engine_final.value)),
            "extrapolated pushforward / det Q")
    rep.add("theorem_value", theorem_value(cd), 0.0, "closed form in lambda as printed")
    rep.add("f_form_printed", f_form_printed(cd), 0.0, "closed form in c1, c2 as printed")
    rep.add("f_form_consistent", f_form_consistent(cd), 0.0, "printed pushforward over printed det Q")
    rep.add("assembled_over_theorem", engine_final.comparisons["ratio_to_theorem"], rel_err, "derived")
    rep.add("assembled_over_pi2", engine_final.value / ctx.pi**2, rel_err, "derived")
    rep.branch["theorem_sqrt_sign"] = engine_final.branch.get("theorem_sqrt_sign")
    rep.tables["approx"] = [r.as_dict() for r in recs]
    rep.checks += [
        Check("sigma_nonzero", "det Q is nonzero", abs(sigma.det) > 0, {"det": sigma.det}),
        Check("sigma_closed_form", "det Q equals L^2 Delta_Sigma^2 (1e-10)", _rel(sigma.det, det_q_derived(cd)) <= 1e-10,
              {"rel": _rel(sigma.det, det_q_derived(cd))}),
        Check("extrapolation", "approx-sequence limit matches the product formula (1e-4)",
              _rel(ext.limit, engine_limit_P(cd)) <= 1e-4 and rel_err <= 1e-4,
              {"rel": _rel(ext.limit, engine_limit_P(cd)), "error": ext.error}),
        Check("multiplicativity", "assembled * det Q = pushforward (1e-10)",
              _rel(engine_final.value * sigma.det, pp["rank1"] * ext.limit) <= 1e-10, {}),
    ]


def run_approx(cfg: RunConfig, rep: Report):
    ctx = get_context(cfg.precision)
    cd = _curve(cfg, ctx)
    rep.branch = _branch(cd)
    if cd.exceptional:
        return run_exceptional(cfg, rep, [cd])
    recs, ext = approx_sequence(cd, cfg.m)
    rep.tables["approx"] = [r.as_dict() for r in recs]
    rep.add("limit", ext.limit, ext.error, "approx-sequence + Richardson", order=ext.order, m0=ext.m0,
            monotone=ext.monotone)
    rep.add("limit_printed", closed_form_P(cd), 0.0, "closed form as printed")
    rep.add("limit_derived", engine_limit_P(cd), 0.0, "product formula in closed form")
    rel_err = ext.error / max(abs(complex(ext.limit)), 1e-300)
    if not math.isfinite(rel_err) or (len(cfg.m) >= 3 and rel_err > 1e-2):
        raise ConvergenceFailure(f"extrapolation error {rel_err:.3g} (relative)")
    rep.checks.append(Check("extrapolation", "extrapolated limit matches the product formula (1e-4)",
                            _rel(ext.limit, engine_limit_P(cd)) <= 1e-4, {"rel": _rel(ext.limit, engine_limit_P(cd))}))


def run_exceptional(cfg: RunConfig, rep: Report, cds=None):
    ctx = get_context(cfg.precision)
    if cds is None:
        if cfg.lam is None:
            cds = [critical_data(exceptional_root(ctx, s), ctx) for s in (1, -1)]
        else:
            cds = [_curve(cfg, ctx)]
    ms = cfg.m or DEFAULT_M
    for cd in cds:
        if not cd.exceptional:
            raise UsageError(f"lambda = {complex(cd.lam)} is not on the exceptional locus")
        tag = "+" if float(ctx.im(cd.lam)) > 0 else "-"
        rep.branch[f"exceptional{tag}"] = _branch(cd)
        out = exceptional_pipeline(cd, ms)
        ext = out["extrapolation"]
        sig = sigma_matrix_exceptional(cd)
        fin = final_period(cd, ext.limit, sig)
        rel_err = ext.error / max(abs(complex(ext.limit)), 1e-300)
        rep.add(f"{tag}limit", ext.limit, ext.error, "approx-sequence + Richardson", m0=ext.m0)
        rep.add(f"{tag}gamma_product", out["target"], 0.0, "Gamma(1/3)^2 Gamma(2/3)^2 = 4 pi^2/3")
        rep.add(f"{tag}limit_over_gamma_product", ext.limit / out["target"], rel_err, "derived")
        rep.add(f"{tag}sigma_det", sig.det, 0.0, "sigma-matrix: 2 s1")
        rep.add(f"{tag}period_assembled", fin.value, rel_err * abs(complex(fin.value)), "limit / (2 s1)")
        rep.add(f"{tag}target", exceptional_target(cd), 0.0, "2 pi^2 / (-3)^(1/4), (-3)^(1/4) = sqrt(2 lam - 1)")
        rep.add(f"{tag}tame_at_minus_m", out["tame_at_minus_m"], 0.0, "tame symbol", m=ms[-1])
        rep.tables[f"exceptional{tag}"] = [r.as_dict() for r in out["records"]]
        ratio = fin.value / exceptional_target(cd)
        rep.checks += [
            Check(f"{tag}extrapolation", "extrapolation error below 1e-4", rel_err <= 1e-4, {"rel_error": rel_err}),
            Check(f"{tag}tame", "tame symbol at -m equals m^2 - c1 (1e-10)",
                  _rel(out["tame_at_minus_m"], out["printed_tame_at_minus_m"]) <= 1e-10, {}),
            Check(f"{tag}assembled", "assembled value equals 2 pi^2/(-3)^(1/4) up to sign (1e-4)",
                  min(_rel(ratio, 1), _rel(ratio, -1)) <= 1e-4, {"ratio": ratio}),
        ]


def run_direct(cfg: RunConfig, rep: Report):
    if cfg.precision != "extended":
        log.warning("direct-curve mode is more reliable with --precision extended")
    ctx = get_context(cfg.precision)
    cd = _curve(cfg, ctx)
    rep.branch = _branch(cd)
    if cd.exceptional:
        raise UsageError("direct-curve mode covers the generic case only")
    st = _settings(cfg)
    pm = direct_curve_period(cd, st)
    alt = direct_curve_period(cd, st, curve_cycles(cd, 2.1, 0.3))
    sk = stokes_residuals(cd, st)
    th = theorem_value(cd)
    rep.add("det", pm.det, pm.det_error, "direct quadrature on the curve")
    rep.add("det_over_pi2", pm.det / ctx.pi**2, pm.det_error / float(ctx.pi**2), "derived")
    rep.add("theorem_value", th, 0.0, "closed form in lambda as printed")
    rep.add("ratio_to_theorem", pm.det / th, pm.det_error / abs(complex(th)), "derived")
    rep.tables["period_matrix"] = [
        {"cycle": lab, **{f: v for f, v in zip(pm.col_labels, row)}} for lab, row in zip(pm.row_labels, pm.entries)]
    homotopy = _rel(pm.det, alt.det)
    margin = abs(complex(pm.det)) / max(pm.det_error, 1e-300)
    rep.checks += [
        Check("stokes", "exact forms pair to zero (1e-8)", sk["max_abs"] <= 1e-8, {"max": sk["max_abs"]}),
        Check("homotopy", "determinant invariant under path homotopy (1e-6)", homotopy <= 1e-6, {"rel": homotopy}),
        Check("nonzero", "|det| > 1e3 x error budget", margin > 1e3, {"margin": margin}),
    ]


def run_verify(cfg: RunConfig, rep: Report):
    cc = CheckConfig(approx_precision="extended", direct_precision="extended")
    for fn in ALL_CHECKS:
        chk = fn(cc)
        print(chk.line(), file=sys.stderr)
        rep.checks.append(chk)


RUNNERS = {"period": run_period, "approx": run_approx, "direct": run_direct, "exceptional": run_exceptional,
           "verify": run_verify}


def run(cfg: RunConfig) -> tuple[Report, int]:
    rep = Report(__version__, cfg.echo())
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        RUNNERS[cfg.mode](cfg, rep)
    except (ConvergenceFailure, QuadratureError, TrackingError) as exc:
        rep.checks.append(Check("convergence", "numerical convergence", False, {"error": str(exc)}))
        code = EXIT_CONVERGENCE
    rep.timings["total"] = time.perf_counter() - t0
    if code == EXIT_OK and not rep.passed:
        code = EXIT_CHECK
    return rep, code


def render(rep: Report, cfg: RunConfig) -> str:
    if cfg.format == "csv":
        return rep.to_csv()
    return rep.to_json(timings=cfg.timings)


def main(argv=None) -> int:
    try:
        cfg, verbose = config_from_args(argv)
    except UsageError as exc:
        print(f"irrper: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="irrper: %(message)s")
    try:
        rep, code = run(cfg)
    except UsageError as exc:
        print(f"irrper: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(rep, cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for chk in rep.checks:
        if not chk.passed:
            print(chk.line(), file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
