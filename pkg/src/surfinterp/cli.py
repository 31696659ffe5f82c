"""Command-line front end.

    surfinterp bjorling --metric euclidean --input "circle(1)" --normal "radial(-1)"
    surfinterp interpolate --metric lorentz --input "circle(1)" --target "spiral(1,0.01)" --newton
    surfinterp gallery --metric euclidean --report gallery.json
    surfinterp verify --input f.json --metric lorentz
    surfinterp export --input "circle(1)" --normal "boosted(0)" --mesh out.obj

Exit codes: 0 all checks pass, 1 invalid input, 2 a numerical certificate
failed, 3 I/O error.  Errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from . import bjorling as bj
from . import interpolate as ip
from .analytic import DEFAULT_DEGREE, DiscDomain
from .curves import curve_to_json, load_curve_file, parse_curve_spec
from .errors import (
    CertificationError,
    NotImmersed,
    ParseError,
    ValidationError,
    ValidationFailed,
)
from .meshio import export_mesh
from .metric import Metric

SCHEMA_VERSION = 1
COMMANDS = ("bjorling", "interpolate", "verify", "gallery", "export")

TOLERANCES = {
    "isotropy": 1e-10,
    "conformality": 1e-8,
    "harmonicity": 1e-6,
    "mean_curvature": 1e-6,
    "mean_curvature_agreement": 1e-4,
    "margin_floor": 0.1,
    "boundary": 1e-10,
    "normal": 1e-8,
    "extension_isotropy": 1e-8,
    "extension_orthogonality": 1e-10,
    "extension_length": 1e-9,
    "containment": 1e-4,
    "newton": 1e-9,
}

SAMPLE_COUNTS = {"interval": 200, "boundary": 256, "disc_grid": 64, "containment": 50}


@dataclass
class RunConfig:
    command: str
    metric: Metric | None = None
    degree: int = DEFAULT_DEGREE
    grid: tuple = (64, 64)
    v_half_range: float = 0.5
    domain: tuple = (0.0, 1.2, 1.0)
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    newton: bool = False
    max_iter: int = 20
    input: str | None = None
    normal: str | None = None
    target: str | None = None
    mesh: str | None = None
    report: str | None = None
    save_curve: str | None = None

    def check(self):
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")
        if self.degree < 8:
            raise ParseError("degree must be at least 8")
        if min(self.grid) < 2:
            raise ParseError("grid dimensions must be at least 2")
        if not self.v_half_range > 0:
            raise ParseError("v-range must be positive")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ParseError(f"tolerance {k!r} must be positive")

    def echo(self) -> dict:
        return {
            "command": self.command,
            "metric": self.metric.value if self.metric else None,
            "degree": self.degree,
            "grid": list(self.grid),
            "v_half_range": self.v_half_range,
            "domain": list(self.domain),
            "tolerances": dict(sorted(self.tolerances.items())),
            "newton": self.newton,
            "max_iter": self.max_iter,
            "input": self.input,
            "normal": self.normal,
            "target": self.target,
        }


class Report:
    """Numeric fields plus pass flags that can be recomputed from them."""

    def __init__(self):
        self.metrics = {}
        self.flags = {}
        self.diagnostics = {}

    def flag(self, name, value, tol, relation="<"):
        value = float(value)
        ok = value < tol if relation == "<" else value > tol
        self.flags[name] = {"value": _num(value), "tolerance": tol, "relation": relation,
                            "pass": bool(ok)}

    @property
    def passed(self) -> bool:
        return all(f["pass"] for f in self.flags.values())

    def as_dict(self):
        return {"metrics": self.metrics, "flags": self.flags,
                "diagnostics": self.diagnostics, "pass": self.passed}


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


# -- parsing -----------------------------------------------------------------


def _parse_grid(text):
    try:
        nu, nv = (int(t) for t in str(text).lower().split("x"))
    except ValueError:
        raise ParseError(f"--grid expects NUxNV, got {text!r}") from None
    return nu, nv


def _parse_domain(text):
    try:
        vals = tuple(float(t) for t in str(text).split(","))
    except ValueError:
        vals = ()
    if len(vals) != 3:
        raise ParseError(f"--domain expects u0,R,r, got {text!r}")
    return vals


def _parse_tols(items, base):
    tols = dict(base)
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep or name not in TOLERANCES:
            raise ParseError(f"bad --tol {item!r}; known: {', '.join(sorted(TOLERANCES))}")
        try:
            tols[name] = float(val)
        except ValueError:
            raise ParseError(f"bad --tol value in {item!r}") from None
    return tols


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input (exit 1), not argparse's default 2
    def error(self, message):
        raise ParseError(message)


def build_parser():
    p = _Parser(prog="surfinterp", description="Minimal and maximal surfaces from Björling data.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--metric", choices=[m.value for m in Metric])
    p.add_argument("--degree", type=int)
    p.add_argument("--grid", help="NUxNV, default 64x64")
    p.add_argument("--v-range", type=float, dest="v_range", help="half range of v")
    p.add_argument("--domain", help="u0,R,r: disc center, radius and interval half width")
    p.add_argument("--tol", action="append", metavar="NAME=VAL")
    p.add_argument("--newton", action="store_true", default=None)
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--input", help="curve: builtin name or JSON file")
    p.add_argument("--normal", help="normal field along --input")
    p.add_argument("--target", help="second curve for interpolate")
    p.add_argument("--mesh", help="OBJ output (a directory for gallery)")
    p.add_argument("--report", help="JSON report output (default stdout)")
    p.add_argument("--save-curve", dest="save_curve", help="write the isotropic curve as JSON")
    return p


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    file_vals = {}
    if args.config:
        try:
            file_vals = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.config}: line {exc.lineno}: {exc.msg}") from None
        if not isinstance(file_vals, dict):
            raise ParseError("config file must hold a JSON object")

    def pick(name, default=None):
        val = getattr(args, name, None)
        if val is not None:
            return val
        return file_vals.get(name.replace("_", "-"), file_vals.get(name, default))

    metric = pick("metric")
    cfg = RunConfig(
        command=args.command,
        metric=Metric.parse(metric) if metric else None,
        degree=int(pick("degree", DEFAULT_DEGREE)),
        grid=_parse_grid(pick("grid", "64x64")),
        v_half_range=float(pick("v_range", 0.5)),
        domain=_parse_domain(pick("domain", "0,1.2,1.0")),
        tolerances=_parse_tols(args.tol, {**TOLERANCES, **file_vals.get("tolerances", {})}),
        newton=bool(pick("newton", False)),
        max_iter=int(pick("max_iter", 20)),
        input=pick("input"),
        normal=pick("normal"),
        target=pick("target"),
        mesh=pick("mesh"),
        report=pick("report"),
        save_curve=pick("save_curve"),
    )
    cfg.check()
    return cfg


# -- shared pieces -----------------------------------------------------------


def _disc(cfg):
    try:
        return DiscDomain(*cfg.domain)
    except ValueError as exc:
        raise ParseError(f"bad domain: {exc}") from None


def _ranges(dom: DiscDomain, v_half: float):
    return dom.interval, (-v_half, v_half)


def surface_checks(curve, cfg, u_range, v_range, report: Report):
    tol = cfg.tolerances
    nu, nv = cfg.grid
    patch = bj.sample_patch(curve, u_range, v_range, nu, nv)
    report.flag("isotropy_residual", curve.isotropy_residual, tol["isotropy"])
    report.flag("conformality_max", patch.conformality(), tol["conformality"])
    report.flag("harmonicity", bj.harmonicity_residual(curve, patch), tol["harmonicity"])
    report.flag("mean_curvature_max", patch.mean_curvature_max(tol["margin_floor"]),
                tol["mean_curvature"])
    report.flag("mean_curvature_agreement", patch.mean_curvature_disagreement(),
                tol["mean_curvature_agreement"])
    report.flag("patch_margin_min", float(patch.margin.min()), 0.0, ">")
    zeta = bj.immersion_margin(curve)
    report.metrics["immersion_margin"] = _num(zeta)
    try:
        budget = bj.eta_budget(curve)
        report.metrics["eta"] = _num(budget.eta)
        report.metrics["eta_S"] = _num(budget.S)
        report.metrics["eta_zeta"] = _num(budget.zeta)
    except NotImmersed:
        report.metrics["eta"] = None
        report.diagnostics["eta"] = "immersion margin on the closed disc is not positive"
    return patch


def _load(spec, dom, cfg, role="curve"):
    if spec is None:
        raise ParseError(f"missing {role} (use --input/--normal/--target)")
    return parse_curve_spec(spec, dom, cfg.degree, role)


def _isotropic_from_cfg(cfg, dom):
    """Björling solve when a normal is given, else a stored isotropic curve."""
    if cfg.normal is not None:
        a = _load(cfg.input, dom, cfg)
        n = _load(cfg.normal, dom, cfg, "normal")
        return bj.solve(bj.BjorlingData(a, n, cfg.metric)), a, n
    if cfg.input is None:
        raise ParseError("missing --input")
    f = load_curve_file(cfg.input)
    return bj.IsotropicCurve(f, cfg.metric, bj.isotropy_residual(f, metric=cfg.metric),
                             tolerance=cfg.tolerances["isotropy"]), None, None


def _write_mesh(patch, path):
    if path:
        export_mesh(patch, path)


# -- commands ----------------------------------------------------------------


def cmd_bjorling(cfg, report):
    dom = _disc(cfg)
    if cfg.normal is None:
        raise ParseError("bjorling needs --normal")
    curve, a, n = _isotropic_from_cfg(cfg, dom)
    patch = surface_checks(curve, cfg, *_ranges(dom, cfg.v_half_range), report)
    pos, nrm = bj.boundary_residuals(curve, a, n, SAMPLE_COUNTS["interval"])
    report.flag("boundary_trace", pos, cfg.tolerances["boundary"])
    report.flag("boundary_normal", nrm, cfg.tolerances["normal"])
    if cfg.save_curve:
        Path(cfg.save_curve).write_text(json.dumps(curve_to_json(curve.f), indent=2) + "\n")
    _write_mesh(patch, cfg.mesh)


def cmd_verify(cfg, report):
    dom = _disc(cfg)
    curve, a, n = _isotropic_from_cfg(cfg, dom)
    lo, hi = curve.domain.interval
    half = min(cfg.v_half_range, 0.99 * math.sqrt(curve.domain.radius**2 - curve.domain.half_width**2))
    surface_checks(curve, cfg, (lo, hi), (-half, half), report)
    if a is not None:
        pos, nrm = bj.boundary_residuals(curve, a, n, SAMPLE_COUNTS["interval"])
        report.flag("boundary_trace", pos, cfg.tolerances["boundary"])
        report.flag("boundary_normal", nrm, cfg.tolerances["normal"])


def cmd_export(cfg, report):
    if not cfg.mesh:
        raise ParseError("export needs --mesh")
    dom = _disc(cfg)
    curve, *_ = _isotropic_from_cfg(cfg, dom)
    lo, hi = curve.domain.interval
    patch = bj.sample_patch(curve, (lo, hi), (-cfg.v_half_range, cfg.v_half_range), *cfg.grid)
    export_mesh(patch, cfg.mesh)
    report.metrics["vertices"] = int(patch.positions.shape[0] * patch.positions.shape[1])


def cmd_interpolate(cfg, report):
    dom = _disc(cfg)
    tol = cfg.tolerances
    a = _load(cfg.input, dom, cfg)
    l = _load(cfg.target, dom, cfg)  # noqa: E741
    prob = ip.InterpolationProblem(a, l, cfg.metric)
    ext = ip.isotropic_extension(prob, tol["extension_isotropy"])
    report.flag("extension_isotropy", ext.C.isotropy_residual, tol["extension_isotropy"])
    report.flag("extension_orthogonality", ext.orthogonality, tol["extension_orthogonality"])
    report.flag("extension_length", ext.length_defect, tol["extension_length"])
    report.flag("extension_trace", ext.trace_error, tol["boundary"])

    n0 = _load(cfg.normal, dom, cfg, "normal") if cfg.normal else ext.n_l
    base = bj.solve(bj.BjorlingData(a, n0, cfg.metric))
    try:
        budget = bj.eta_budget(base)
        report.diagnostics["closeness"] = ip.closeness_report(prob, ext, base.d, budget).as_dict()
    except NotImmersed as exc:
        report.diagnostics["closeness"] = {"pass": False, "reason": str(exc)}

    cont = ip.containment_check(ext.C, a, SAMPLE_COUNTS["containment"], tol["containment"],
                                strict=False)
    report.flag("containment_max_residual", cont.max_residual, tol["containment"])

    if cfg.newton:
        state = ip.chord_newton(ext.C, a, base.d, cfg.metric, cfg.max_iter, tol["newton"])
        report.metrics["newton_residual_history"] = [_num(r) for r in state.residual_history]
        report.metrics["newton_iterations"] = state.iterations
        report.flag("newton_residual", state.residual_history[-1], tol["newton"])
        report.flag("newton_reality", state.reality_residual, tol["newton"])
        report.flag("newton_trace", state.boundary_residual, 10 * tol["newton"])

    lo, hi = dom.interval
    patch = surface_checks(ext.C, cfg, (lo, hi), (-cfg.v_half_range, cfg.v_half_range), report)
    _write_mesh(patch, cfg.mesh)


GALLERY = {
    Metric.EUCLIDEAN: [
        ("catenoid", (math.pi, 3.5, math.pi), "circle(1)", "radial(-1)", None),
        ("helicoid", (math.pi, 3.5, math.pi), "line(0,0,1)", "radial(1)", None),
        ("enneper", (0.0, 0.5, 0.4), "enneper-curve", "enneper-normal", 0.2),
    ],
    Metric.LORENTZ: [
        ("planar", (math.pi, 3.5, math.pi), "circle(1)", "boosted(0)", None),
        ("boosted", (math.pi, 3.5, math.pi), "circle(1)", "boosted(0.3)", None),
    ],
}


def cmd_gallery(cfg, report):
    metrics = [cfg.metric] if cfg.metric else [Metric.EUCLIDEAN, Metric.LORENTZ]
    out_dir = Path(cfg.mesh) if cfg.mesh else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    surfaces = {}
    for met in metrics:
        for name, dom_t, a_spec, n_spec, v_half in GALLERY[met]:
            dom = DiscDomain(*dom_t)
            a = parse_curve_spec(a_spec, dom, cfg.degree)
            n = parse_curve_spec(n_spec, dom, cfg.degree, "normal")
            curve = bj.solve(bj.BjorlingData(a, n, met))
            sub = Report()
            vh = v_half or cfg.v_half_range
            patch = surface_checks(curve, cfg, dom.interval, (-vh, vh), sub)
            pos, nrm = bj.boundary_residuals(curve, a, n, SAMPLE_COUNTS["interval"])
            sub.flag("boundary_trace", pos, cfg.tolerances["boundary"])
            sub.flag("boundary_normal", nrm, cfg.tolerances["normal"])
            sub.metrics["metric"] = met.value
            sub.metrics["domain"] = list(dom_t)
            if out_dir:
                export_mesh(patch, out_dir / f"{name}.obj")
            surfaces[name] = sub.as_dict()
            for k, v in sub.flags.items():
                report.flags[f"{name}.{k}"] = v
    report.diagnostics["surfaces"] = surfaces


HANDLERS = {
    "bjorling": cmd_bjorling,
    "interpolate": cmd_interpolate,
    "verify": cmd_verify,
    "gallery": cmd_gallery,
    "export": cmd_export,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.metric is None and cfg.command != "gallery":
        cfg.metric = Metric.LORENTZ
    report = Report()
    HANDLERS[cfg.command](cfg, report)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.echo(),
        "provenance": {"sample_counts": SAMPLE_COUNTS, "grid_nodes": cfg.grid[0] * cfg.grid[1]},
        **report.as_dict(),
    }
    return (0 if report.passed else 2), doc


def _error(exc, code):
    detail = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ValidationFailed):
        detail["violations"] = [v.as_dict() for v in exc.violations]
    report = getattr(exc, "report", None)
    if report is not None and hasattr(report, "max_residual"):
        detail["max_residual"] = report.max_residual
    print(json.dumps(detail, sort_keys=True), file=sys.stderr)
    return code


def dumps_report(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        code, doc = run(cfg)
        text = dumps_report(doc)
        if cfg.report:
            Path(cfg.report).write_text(text)
        else:
            sys.stdout.write(text)
        return code
    except ValidationError as exc:
        return _error(exc, 1)
    except ValueError as exc:
        return _error(exc, 1)
    except CertificationError as exc:
        return _error(exc, 2)
    except OSError as exc:
        return _error(exc, 3)


__all__ = ["RunConfig", "Report", "run", "main", "config_from_args"]
