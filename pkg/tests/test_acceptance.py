"""Acceptance criteria, one test per criterion.

Every test records a one-line PASS/FAIL summary (printed at the end of the
run by the terminal-summary hook in conftest) before asserting.
"""

import functools
import json

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from curvekit import generating as gen
from curvekit import mannheim as mh
from curvekit._numerics import rigid_align
from curvekit.cli import run
from curvekit.curvespace import SampledCurve, frenet_apparatus
from curvekit.errors import DegeneratePartner
from curvekit.reconstruct import CurvatureProfile, integrate_frenet, make_named_curve, mannheim_profile
from oracles import arange_closed, circle, helix


def criterion(n, title):
    """Record a PASS/FAIL line for criterion n; the test returns (ok, detail)."""

    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                ok, detail = fn(*args, **kwargs)
            except Exception as exc:
                ACCEPTANCE_LINES.append(f"ACCEPTANCE {n}: FAIL {title} ({type(exc).__name__}: {exc})")
                raise
            ACCEPTANCE_LINES.append(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {title} [{detail}]")
            print(ACCEPTANCE_LINES[-1])
            assert ok, detail

        return inner

    return wrap


@pytest.fixture(scope="module")
def accepted_partner(mannheim_run, field_T):
    _, curve, app, _ = mannheim_run
    partner = mh.build_partner(curve, app, field_T, 0.25)
    papp, corr = mh.partner_apparatus(partner)
    return partner, papp, corr


@criterion(1, "circle closure")
def test_01_circle_closure():
    curve, _ = integrate_frenet(CurvatureProfile(lambda s: 1.0, lambda s: 0.0, 2 * np.pi), step=1e-3)
    gap = float(np.linalg.norm(curve.points[-1] - curve.points[0]))
    return gap < 1e-8, f"gap={gap:.2e} < 1e-8"


@criterion(2, "helix oracle")
def test_02_helix_oracle():
    curve, _ = integrate_frenet(CurvatureProfile(lambda s: 0.4, lambda s: 0.2, 10.0), step=1e-3)
    ref = helix(2.0, 1.0, curve.s)[0]
    aligned, _ = rigid_align(curve.points, ref)
    gap = float(np.linalg.norm(aligned - ref, axis=1).max())
    s = arange_closed(10.0, 1e-3)
    app = frenet_apparatus(SampledCurve(s, helix(2.0, 1.0, s)[0]))
    ek = float(np.abs(app.kappa - 0.4).max())
    et = float(np.abs(app.tau - 0.2).max())
    ok = gap < 1e-6 and ek < 1e-5 and et < 1e-5
    return ok, f"gap={gap:.2e}, kappa err={ek:.2e}, tau err={et:.2e}"


@criterion(3, "Mannheim predicate and lambda fit")
def test_03_mannheim_predicate(mannheim_run, field_T):
    prof, _, app, est = mannheim_run
    s = np.linspace(0, 2, 2001)
    k, t = prof.kappa(s), prof.tau(s)
    analytic = float(np.abs(0.25 * (k * k + t * t) - k).max() / (0.25 * (k * k + t * t).max()))
    exact = float(np.abs(mh.vmannheim_residual(app, field_T, 0.25)).max())
    estimated = float(np.abs(mh.vmannheim_residual(est, field_T, 0.25)[est.interior]).max())
    fit, flat = mh.estimate_lambda(est, field_T)
    ok = analytic < 1e-12 and exact < 1e-12 and estimated < 1e-4 and abs(fit - 0.25) < 1e-6 and flat < 1e-3
    return ok, f"analytic={max(analytic, exact):.2e}, estimated={estimated:.2e}, lambda={fit:.10f}, flatness={flat:.2e}"


@criterion(4, "partner collinearity (iff)")
def test_04_partner_collinearity(mannheim_run, accepted_partner, field_T):
    _, curve, app, _ = mannheim_run
    _, papp, corr = accepted_partner
    good = mh.verify_collinear(app, papp, corr)
    wp, wc = mh.partner_apparatus(mh.build_partner(curve, app, field_T, 0.30))
    bad = mh.verify_collinear(app, wp, wc)
    ok = good.collinearity_max < 1e-4 and good.sign_constant and bad.collinearity_max > 1e-2
    return ok, (
        f"lambda=0.25: {good.collinearity_max:.2e} eps={good.epsilon:+d} constant={good.sign_constant}; "
        f"lambda=0.30: {bad.collinearity_max:.2e}"
    )


@criterion(5, "degenerate partner")
def test_05_degenerate_partner(field_T):
    curve, app = integrate_frenet(make_named_curve("helix", {"a": 2, "b": 1}), step=1e-3)
    try:
        mh.build_partner(curve, app, field_T, 2.0)
    except DegeneratePartner as exc:
        return True, f"DegeneratePartner: {exc.invariant}"
    return False, "no error raised"


@criterion(6, "partner ODE sign convention")
def test_06_partner_ode(accepted_partner, field_T):
    _, papp, corr = accepted_partner
    first = mh.partner_ode_residual(papp, 0.25, field_T, corr)
    prof = mannheim_profile(4.0, lambda s: 0.4 * s, "T", s_max=2.0, step=5e-4)
    curve, app = integrate_frenet(prof, step=5e-4)
    p2, c2 = mh.partner_apparatus(mh.build_partner(curve, app, field_T, 0.25))
    second = mh.partner_ode_residual(p2, 0.25, field_T, c2)
    ok = (
        first.residual_max < 1e-3
        and first.unique
        and second.unique
        and first.sign_convention == second.sign_convention
    )
    others = ", ".join(f"{k}={v:.2e}" for k, v in first.residuals.items())
    return ok, (
        f"{first.sign_convention}: {first.residual_max:.2e} (step 1e-3), {second.residual_max:.2e} (step 5e-4); {others}"
    )


@criterion(7, "speed ratio")
def test_07_speed_ratio(accepted_partner):
    partner, papp, _ = accepted_partner
    w = partner.window
    s = partner.curve.s[w]
    sbar = partner.s_bar[w]
    ratio = np.diff(s) / np.diff(sbar)
    tbar = 0.5 * (papp.tau[1:] + papp.tau[:-1])
    err = np.abs(ratio - np.sqrt(1 + 0.0625 * tbar**2))
    b = 2
    worst = float(err[b:-b].max())
    return worst < 1e-3, f"max |ds/dsbar - sqrt(1+lambda^2 tau_bar^2)|={worst:.2e}"


@criterion(8, "generating identities")
def test_08_generating_identities():
    M = make_named_curve("helix", {"a": 2, "b": 1}, s_max=5.0)
    prof = gen.generated_curvatures(M, 0.3)
    s = np.linspace(0, 5, 5001)
    pyth = float(np.abs(prof.kappa(s) ** 2 + prof.tau(s) ** 2 - 0.16).max())
    curve, app = integrate_frenet(M, step=1e-3)
    k_curve, k_app = gen.build_generated(curve, app, 0.3)
    chk = gen.generated_residuals(app, k_curve, k_app, 0.3)
    ok = pyth < 1e-12 and chk["normal_tangent_max"] < 1e-4 and chk["second_derivative_residual"] < 1e-4
    return ok, f"pythagoras={pyth:.2e}, |N_bar x T|={chk['normal_tangent_max']:.2e}, beta''-S_T gamma'={chk['second_derivative_residual']:.2e}"


@criterion(9, "generating closure and classification")
def test_09_closure_and_classify(helix_run):
    out, ok = [], True
    for kind, V, sign in (("cos", (1.0, 0.0, 0.0), 1), ("sin", (0.0, 0.0, 1.0), -1)):
        f = np.cos if kind == "cos" else np.sin
        base = CurvatureProfile(lambda s, f=f: 3 * f(s + 0.3), lambda s: 1.0, 1.15, lambda s: s)
        prof = gen.generated_curvatures(base, 0.3)
        s = np.linspace(0, 1.15, 1151)
        kb, tb = prof.kappa(s), prof.tau(s)
        closure = float(np.abs(kb**2 + tb**2 - 3 * (kb if kind == "cos" else tb)).max())
        curve, app = integrate_frenet(base, step=1e-3)
        k_curve, _ = gen.build_generated(curve, app, 0.3)
        fit, _ = mh.estimate_lambda(frenet_apparatus(k_curve), mh.FrameVectorField.constant(*V))
        R = sign / fit
        res = gen.classify(frenet_apparatus(curve), 0.3)
        theta0 = res.fitted["theta0"] + (np.pi / 2 if kind == "sin" else 0.0)
        label = "mannheim" if kind == "cos" else "b_mannheim"
        ok &= (
            closure < 1e-12
            and abs(R - 3) < 3e-3
            and res.label == label
            and abs(res.fitted["R"] - 3) < 3e-3
            and abs(theta0 - 0.3) < 3e-4
        )
        out.append(f"{kind}: closure={closure:.1e} R={R:.6f} {res.label} R_fit={res.fitted['R']:.6f} theta0={theta0:.6f}")
    h = gen.classify(frenet_apparatus(helix_run[0]))
    ok &= h.label is None
    out.append(f"helix: {h.label}")
    return ok, "; ".join(out)


@criterion(10, "spherical characterization")
def test_10_spherical():
    s = arange_closed(2 * np.pi, 1e-3)[:-1]
    great = SampledCurve(s, circle(1.0, s))
    good = gen.spherical_check(gen.s_M(great, 0.0), great).residual
    s = arange_closed(2 * np.pi * 0.8, 1e-3)
    small = SampledCurve(s, circle(0.8, s, 0.6))
    bad = gen.spherical_check(lambda x: np.ones_like(x), small).residual
    return good < 1e-4 and bad > 1e-2, f"great circle S_M={good:.2e}, small circle S_M=1: {bad:.2e}"


@criterion(11, "non-constant V")
def test_11_nonconstant_field():
    v = lambda s: 0.1 * np.sin(s)  # noqa: E731
    V = mh.FrameVectorField(lambda s: np.sqrt(1 - v(s) ** 2), v, 0.0)
    lam = mh.lambda_from_v(V, 0.5, 2.0, 1e-3)
    prof = mh.vmannheim_profile(V, lam, lambda s: 0.3 + 0.4 * s, 2.0, 1e-3)
    curve, app = integrate_frenet(prof, step=1e-3)
    pred = float(np.abs(mh.vmannheim_residual(app, V, lam)).max())
    papp, corr = mh.partner_apparatus(mh.build_partner(curve, app, V, lam))
    col = mh.verify_collinear(app, papp, corr)
    ode = mh.partner_ode_residual(papp, lam, V, corr)
    ok = col.collinearity_max < 1e-3 and ode.residual_max < 5e-3
    return ok, f"predicate={pred:.1e}, collinearity={col.collinearity_max:.2e}, ODE={ode.residual_max:.2e} ({ode.sign_convention})"


def _cli_runs(d):
    """Every subcommand once, all outputs under d; returns {name: bytes}."""
    s = np.linspace(0, 2, 2001)
    th = 0.4 * s
    (d / "m.json").write_text(json.dumps({
        "kind": "tabulated", "grid": s.tolist(), "kappa": (4 * np.cos(th) ** 2).tolist(),
        "tau": (4 * np.cos(th) * np.sin(th)).tolist(), "step": 1e-3,
    }))
    p = lambda name: str(d / name)  # noqa: E731
    T = "u=1,v=0,w=0"
    cmds = [
        ["gen", "--family", "helix", "--param", "a=2", "--param", "b=1", "--s-max", "5", "--out", p("h.csv"), "--apparatus", p("ha.csv")],
        ["reconstruct", "--profile", p("m.json"), "--out", p("m.csv"), "--apparatus", p("ma.csv")],
        ["frenet", "--in", p("h.csv"), "--out", p("he.csv")],
        ["mannheim", "check", "--in", p("ma.csv"), "--field", T, "--lambda", "auto", "--out", p("check.json")],
        ["mannheim", "partner", "--in", p("m.csv"), "--field", T, "--lambda0", "0.25", "--out", p("p.csv"), "--report", p("p.json")],
        ["generating", "build", "--in", p("h.csv"), "--phi0", "0.3", "--out", p("k.csv"), "--apparatus", p("ka.csv"), "--report", p("k.json")],
        ["generating", "classify", "--in", p("ma.csv"), "--phi0", "0.3", "--out", p("cls.json")],
        ["plot", "--in", p("m.csv"), "--partner", p("p.csv"), "--out", p("plot.svg")],
    ]
    codes = [run(c) for c in cmds]
    return codes, {f.name: f.read_bytes() for f in sorted(d.iterdir())}


@criterion(12, "CLI determinism")
def test_12_cli_determinism(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    codes_a, a = _cli_runs(tmp_path / "a")
    codes_b, b = _cli_runs(tmp_path / "b")
    # outputs embed no paths, so the two directories can be compared byte for byte
    differing = [k for k in a if a[k] != b.get(k)]
    ok = codes_a == codes_b == [0] * 8 and not differing and a.keys() == b.keys()
    return ok, f"{len(a)} files, 8 subcommands, exit codes {codes_a}, differing={differing}"
