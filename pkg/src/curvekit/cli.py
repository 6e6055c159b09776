"""Command-line front end.

Exit codes: 0 success, 1 failed verdict under ``--strict``, 2 malformed input
or flags, 3 numerical failure (the violated invariant is printed on stderr).
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import generating, mannheim
from ._io import atomic_write_text
from .curvespace import (
    KAPPA_MIN,
    frenet_apparatus,
    read_apparatus_csv,
    read_curve_csv,
    resample_by_arclength,
    write_apparatus_csv,
    write_curve_csv,
)
from .errors import CurveKitError, InvalidField, ParamOutOfRange, UnknownFamily
from .reconstruct import integrate_frenet, make_named_curve, profile_from_json

INPUT_ERRORS = (UnknownFamily, ParamOutOfRange, InvalidField)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    family: Optional[str] = None
    params: dict = field(default_factory=dict)
    field_spec: Optional[str] = None
    lambda0: Optional[float] = None
    lambda_auto: bool = False
    phi0: Optional[float] = None
    step: Optional[float] = None
    s_max: Optional[float] = None
    tolerances: dict = field(default_factory=dict)
    strict: bool = False

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise UsageError("--step must be positive")
        for name, path in {**self.inputs, **self.outputs}.items():
            if path is not None and not str(path):
                raise UsageError(f"empty path for {name}")


def config_from_args(args):
    """Validated :class:`RunConfig` view of a parsed (and config-merged) namespace."""
    get = lambda name: getattr(args, name, None)  # noqa: E731
    lam = get("lam")
    return RunConfig(
        command=" ".join(x for x in (get("command"), get("action")) if x),
        inputs={k: get(k) for k in ("input", "profile", "partner", "base_apparatus") if get(k) is not None},
        outputs={k: get(k) for k in ("out", "apparatus", "report") if get(k) is not None},
        family=get("family"),
        params=dict(get("param") or []),
        field_spec=get("field"),
        lambda0=get("lambda0") if lam in (None, "auto") else lam,
        lambda_auto=lam == "auto",
        phi0=get("phi0"),
        step=get("step"),
        s_max=get("s_max"),
        tolerances=dict(get("tolerances") or {}),
        strict=bool(get("strict")),
    )


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), float(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {k!r} is not a number") from None


def _lambda(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--lambda takes 'auto' or a number") from None


def build_parser():
    p = argparse.ArgumentParser(prog="curvekit", description="Space-curve and Mannheim-pair toolkit.")
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    sub = p.add_subparsers(dest="command")

    def add(name, parent=sub, **kw):
        sp = parent.add_parser(name, **kw)
        sp.add_argument("--config", help=argparse.SUPPRESS)
        return sp

    g = add("gen", help="named family -> curve CSV")
    g.add_argument("--family")
    g.add_argument("--param", action="append", type=_param, default=None, metavar="KEY=VALUE")
    g.add_argument("--s-max", type=float)
    g.add_argument("--step", type=float)
    g.add_argument("--out")
    g.add_argument("--apparatus", help="also write the integrated apparatus CSV")

    r = add("reconstruct", help="profile JSON -> curve CSV")
    r.add_argument("--profile")
    r.add_argument("--step", type=float)
    r.add_argument("--out")
    r.add_argument("--apparatus")

    f = add("frenet", help="curve CSV -> apparatus CSV")
    f.add_argument("--in", dest="input")
    f.add_argument("--out")
    f.add_argument("--kappa-min", type=float)

    m = add("mannheim", help="V-Mannheim checks")
    msub = m.add_subparsers(dest="action")
    for name, helptext in (("check", "apparatus CSV + field -> report JSON"), ("partner", "curve CSV -> partner CSV + report")):
        sp = add(name, msub, help=helptext)
        sp.add_argument("--in", dest="input")
        sp.add_argument("--field")
        sp.add_argument("--lambda", dest="lam", type=_lambda)
        sp.add_argument("--lambda0", type=float)
        sp.add_argument("--strict", action="store_true", default=None)
        if name == "check":
            sp.add_argument("--out", help="report JSON (default stdout)")
        else:
            sp.add_argument("--out", help="partner curve CSV")
            sp.add_argument("--report", help="report JSON (default stdout)")
            sp.add_argument("--step", type=float, help="partner resampling step (default: input step)")
            sp.add_argument("--base-apparatus", help="apparatus CSV of --in to use instead of estimating it")

    gen = add("generating", help="generating-curve construction and classification")
    gsub = gen.add_subparsers(dest="action")
    b = add("build", gsub, help="curve CSV + phi0 -> generated curve CSV")
    b.add_argument("--in", dest="input")
    b.add_argument("--phi0", type=float)
    b.add_argument("--out")
    b.add_argument("--apparatus")
    b.add_argument("--report")
    b.add_argument("--strict", action="store_true", default=None)
    c = add("classify", gsub, help="apparatus CSV -> classification JSON")
    c.add_argument("--in", dest="input")
    c.add_argument("--phi0", type=float)
    c.add_argument("--field")
    c.add_argument("--out")
    c.add_argument("--strict", action="store_true", default=None)

    pl = add("plot", help="curve CSV -> SVG projections")
    pl.add_argument("--in", dest="input")
    pl.add_argument("--partner")
    pl.add_argument("--out")
    return p


_CONFIG_ALIASES = {"in": "input", "lambda": "lam", "s-max": "s_max", "kappa-min": "kappa_min", "base-apparatus": "base_apparatus"}


def _load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    out = {}
    for k, v in cfg.items():
        k = _CONFIG_ALIASES.get(k, k).replace("-", "_")
        if k == "param" and isinstance(v, dict):
            v = [(a, float(b)) for a, b in v.items()]
        out[k] = v
    return out


def _merge(args, cfg):
    for k, v in cfg.items():
        if k in ("command", "action"):
            continue
        if getattr(args, k, None) is None:
            setattr(args, k, v)
    return args


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        flags = ", ".join("--" + ("in" if n == "input" else n.replace("_", "-")) for n in missing)
        raise UsageError(f"missing required option(s): {flags}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _emit_json(obj, path):
    text = json.dumps(_clean(obj), indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _tolerances(args, estimated=True):
    return mannheim.tolerances(estimated, getattr(args, "tolerances", None))


def _offset(args, V, s):
    """Resolve --lambda / --lambda0 into 'auto' or an OffsetFunction on grid s."""
    if args.lam == "auto" and args.lambda0 is not None:
        raise UsageError("give either --lambda auto or --lambda0, not both")
    if args.lam == "auto":
        return "auto"
    lam0 = args.lambda0 if args.lambda0 is not None else args.lam
    if lam0 is None:
        raise UsageError("missing --lambda auto or --lambda0")
    return mannheim.lambda_from_v(V, float(lam0), s[-1], s[1] - s[0])


def _cmd_gen(args):
    _need(args, "family")
    prof = make_named_curve(args.family, dict(args.param or []), args.s_max)
    _need(args, "out")
    curve, app = integrate_frenet(prof, step=args.step or 1e-3)
    write_curve_csv(args.out, curve)
    if args.apparatus:
        write_apparatus_csv(args.apparatus, app)
    return 0


def _cmd_reconstruct(args):
    _need(args, "profile", "out")
    try:
        with open(args.profile) as fh:
            obj = json.load(fh)
        prof, step = profile_from_json(obj)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad profile {args.profile}: {exc}") from exc
    curve, app = integrate_frenet(prof, step=args.step or step)
    write_curve_csv(args.out, curve)
    if args.apparatus:
        write_apparatus_csv(args.apparatus, app)
    return 0


def _cmd_frenet(args):
    _need(args, "input", "out")
    curve = read_curve_csv(args.input)
    app = frenet_apparatus(curve, kappa_min=args.kappa_min or KAPPA_MIN)
    write_apparatus_csv(args.out, app)
    return 0


def _cmd_mannheim_check(args):
    _need(args, "input", "field")
    V = mannheim.FrameVectorField.parse(args.field)
    app = read_apparatus_csv(args.input)
    lam = _offset(args, V, app.s)
    report = mannheim.check_curve(app, V, lam, _tolerances(args))
    _emit_json(report.to_json(), args.out)
    return 1 if args.strict and not report.verdict else 0


def _cmd_mannheim_partner(args):
    _need(args, "input", "field", "out")
    V = mannheim.FrameVectorField.parse(args.field)
    curve = read_curve_csv(args.input)
    if args.base_apparatus:
        app = read_apparatus_csv(args.base_apparatus)
        if len(app) != len(curve) or np.abs(app.s - curve.s).max() > 1e-9:
            raise UsageError("--base-apparatus grid does not match --in")
    else:
        app = frenet_apparatus(curve)
    lam = _offset(args, V, curve.s)
    report, partner, _ = mannheim.check_partner(curve, app, V, lam, _tolerances(args))
    w = partner.window
    resampled = resample_by_arclength(partner.curve.points[w], args.step or curve.step)
    write_curve_csv(args.out, resampled)
    _emit_json(report.to_json(), args.report)
    return 1 if args.strict and not report.verdict else 0


def _cmd_generating_build(args):
    _need(args, "input", "phi0", "out")
    curve = read_curve_csv(args.input)
    app = frenet_apparatus(curve)
    k_curve, k_app = generating.build_generated(curve, app, args.phi0)
    write_curve_csv(args.out, k_curve)
    if args.apparatus:
        write_apparatus_csv(args.apparatus, k_app)
    checks = generating.generated_residuals(app, k_curve, k_app, args.phi0)
    ok = checks["normal_tangent_max"] < 1e-4 and checks["second_derivative_residual"] < 1e-4 and checks["sign_constant"]
    if args.report:
        _emit_json({"verdict": ok, **checks}, args.report)
    return 1 if args.strict and not ok else 0


def _cmd_generating_classify(args):
    _need(args, "input")
    app = read_apparatus_csv(args.input)
    V = mannheim.FrameVectorField.parse(args.field) if args.field else None
    result = generating.classify(app, args.phi0, V)
    _emit_json(result.to_json(), args.out)
    return 1 if args.strict and result.label is None else 0


def _cmd_plot(args):
    _need(args, "input", "out")
    curve = read_curve_csv(args.input)
    partner = read_curve_csv(args.partner) if args.partner else None
    atomic_write_text(args.out, render_svg(curve.points, None if partner is None else partner.points))
    return 0


def render_svg(points, partner=None, panel=240, pad=16):
    """Three orthographic projections (xy, xz, yz) side by side.

    Each panel is scaled uniformly to fit all plotted curves; the partner, if
    given, is drawn dashed on top.  Coordinates are printed with 3 decimals so
    identical input gives identical bytes.
    """
    curves = [np.asarray(points, dtype=float)]
    if partner is not None:
        curves.append(np.asarray(partner, dtype=float))
    allp = np.vstack(curves)
    width = 3 * panel + 4 * pad
    height = panel + 2 * pad + 20
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    styles = ['stroke="#1f4e79" stroke-width="1.5"', 'stroke="#c0392b" stroke-width="1.2" stroke-dasharray="4 3"']
    for k, (i, j, name) in enumerate(((0, 1, "xy"), (0, 2, "xz"), (1, 2, "yz"))):
        x0 = pad + k * (panel + pad)
        lo = allp[:, [i, j]].min(axis=0)
        span = max(np.ptp(allp[:, [i, j]], axis=0).max(), 1e-12)
        scale = (panel - 2 * pad) / span
        out.append(f'<rect x="{x0}" y="{pad}" width="{panel}" height="{panel}" fill="none" stroke="#999"/>')
        out.append(f'<text x="{x0 + 4}" y="{pad + panel + 16}" font-family="monospace" font-size="12">{name}</text>')
        for pts, style in zip(curves, styles):
            u = x0 + pad + (pts[:, i] - lo[0]) * scale
            v = pad + panel - pad - (pts[:, j] - lo[1]) * scale
            coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(u, v))
            out.append(f'<polyline fill="none" {style} points="{coords}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


_DISPATCH = {
    ("gen", None): _cmd_gen,
    ("reconstruct", None): _cmd_reconstruct,
    ("frenet", None): _cmd_frenet,
    ("mannheim", "check"): _cmd_mannheim_check,
    ("mannheim", "partner"): _cmd_mannheim_partner,
    ("generating", "build"): _cmd_generating_build,
    ("generating", "classify"): _cmd_generating_classify,
    ("plot", None): _cmd_plot,
}


def _config_path(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    return known.config


def run(argv=None):
    """Parse ``argv`` and execute one subcommand; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg_path = _config_path(argv)
        if cfg_path:
            _merge(args, _load_config(cfg_path))
        key = (args.command, getattr(args, "action", None))
        if key not in _DISPATCH:
            parser.print_usage(sys.stderr)
            return 2
        config_from_args(args)
        return _DISPATCH[key](args)
    except INPUT_ERRORS as exc:
        print(f"curvekit: invalid input: {exc} [{exc.invariant}]", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"curvekit: {exc}", file=sys.stderr)
        return 2
    except CurveKitError as exc:
        print(f"curvekit: {type(exc).__name__}: invariant violated: {exc.invariant}: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"curvekit: malformed input: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
