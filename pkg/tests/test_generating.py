import numpy as np
import pytest

from curvekit import generating as gen
from curvekit import mannheim as mh
from curvekit.curvespace import SampledCurve, frenet_apparatus
from curvekit.errors import CurvatureSignChange, NotSpherical
from curvekit.reconstruct import CurvatureProfile, integrate_frenet, make_named_curve
from oracles import arange_closed, circle

# 30-digit value of S_T(3) = 0.4 cos(0.2 * 3) for the helix a=2, b=1 with theta0 = 0
S_T_AT_3 = 0.33013424596387132
S_DOMAIN = 1.15  # phi = s + 0.3 stays below pi/2


def base_profile(kind, R=3.0, theta0=0.3):
    f = np.cos if kind == "cos" else np.sin
    return CurvatureProfile(lambda s: R * f(s + theta0), lambda s: 1.0, S_DOMAIN, lambda s: s)


@pytest.fixture(scope="module")
def helix5():
    curve, app = integrate_frenet(make_named_curve("helix", {"a": 2, "b": 1}, s_max=5.0), step=1e-3)
    return curve, app


def test_s_T_helix(helix5):
    _, app = helix5
    prof = gen.s_T(app, 0.0)
    i = int(round(3.0 / 1e-3))
    assert prof.s_T[i] == pytest.approx(S_T_AT_3, rel=1e-10)
    assert prof(3.0) == pytest.approx(S_T_AT_3, rel=1e-10)
    assert np.abs(gen.s_T(app, 0.3).phi - (0.2 * app.s + 0.3)).max() < 1e-12


def test_s_T_planar_is_kappa_cos_theta0():
    s = np.linspace(0, 3, 301)
    app = frenet_apparatus(SampledCurve(s, circle(2.0, s)))
    prof = gen.s_T(app, 0.7)
    assert np.abs(prof.s_T - 0.5 * np.cos(0.7)).max() < 1e-6


def test_generated_profile_pythagoras():
    prof = gen.generated_curvatures(make_named_curve("helix", {"a": 2, "b": 1}, s_max=5.0), 0.3)
    s = np.linspace(0, 5, 501)
    kb, tb = prof.kappa(s), prof.tau(s)
    assert np.abs(kb**2 + tb**2 - 0.16).max() < 1e-12
    assert np.abs(kb - 0.4 * np.cos(0.2 * s + 0.3)).max() < 1e-15


def test_generated_curvature_sign_change():
    with pytest.raises(CurvatureSignChange):
        gen.generated_curvatures(make_named_curve("helix", {"a": 2, "b": 1}), 0.3)


def test_build_generated(helix5):
    curve, app = helix5
    k_curve, k_app = gen.build_generated(curve, app, 0.3)
    assert len(k_curve) == len(curve)
    chk = gen.generated_residuals(app, k_curve, k_app, 0.3)
    assert chk["normal_tangent_max"] < 1e-4
    assert chk["second_derivative_residual"] < 1e-4
    assert chk["pythagoras"] < 1e-12
    assert chk["sign_constant"] and chk["epsilon"] == 1


def test_build_generated_from_estimate(helix5):
    curve, _ = helix5
    est = frenet_apparatus(curve)
    k_curve, k_app = gen.build_generated(curve, est, 0.3)
    chk = gen.generated_residuals(est, k_curve, k_app, 0.3)
    assert chk["normal_tangent_max"] < 1e-4 and chk["second_derivative_residual"] < 1e-3


@pytest.mark.parametrize("kind", ["cos", "sin"])
def test_generated_closure_profiles(kind):
    prof = gen.generated_curvatures(base_profile(kind), 0.3)
    s = np.linspace(0, S_DOMAIN, 1001)
    kb, tb = prof.kappa(s), prof.tau(s)
    rhs = 3 * (kb if kind == "cos" else tb)
    assert np.abs(kb**2 + tb**2 - rhs).max() < 1e-12


def test_generated_closure_cos_estimated():
    curve, app = integrate_frenet(base_profile("cos"), step=1e-3)
    k_curve, _ = gen.build_generated(curve, app, 0.3)
    fit, flat = mh.estimate_lambda(frenet_apparatus(k_curve), mh.FrameVectorField.constant(1.0))
    assert 1 / fit == pytest.approx(3.0, abs=3e-3)
    assert flat < 1e-3


def test_generated_closure_sin_estimated():
    # with V = B the fitted offset is -1/R: u kappa - w tau = lambda (kappa^2 + tau^2)
    curve, app = integrate_frenet(base_profile("sin"), step=1e-3)
    k_curve, _ = gen.build_generated(curve, app, 0.3)
    fit, _ = mh.estimate_lambda(frenet_apparatus(k_curve), mh.FrameVectorField.constant(0.0, 0.0, 1.0))
    assert -1 / fit == pytest.approx(3.0, abs=3e-3)


@pytest.mark.parametrize("kind, label", [("cos", "mannheim"), ("sin", "b_mannheim")])
def test_classify_labels(kind, label):
    curve, _ = integrate_frenet(base_profile(kind), step=1e-3)
    est = frenet_apparatus(curve)
    res = gen.classify(est, 0.3)
    assert res.label == label
    assert res.fitted["R"] == pytest.approx(3.0, rel=1e-3)
    theta0 = 0.3 if kind == "cos" else 0.3 - np.pi / 2
    assert res.fitted["theta0"] == pytest.approx(theta0, abs=1e-3)
    assert gen.classify(est).label == "generating"


def test_classify_v_mannheim_and_field_pin():
    curve, _ = integrate_frenet(base_profile("cos", theta0=0.3), step=1e-3)
    est = frenet_apparatus(curve)
    res = gen.classify(est, 0.8)
    assert res.label == "v_mannheim"
    assert res.fitted["delta"] == pytest.approx(-0.5, abs=1e-3)
    d = res.fitted["delta"]
    assert gen.classify(est, 0.8, mh.FrameVectorField.constant(np.cos(d), 0, np.sin(d))).label == "v_mannheim"
    assert gen.classify(est, 0.8, mh.FrameVectorField.constant(1.0)).label is None


def test_classify_helix_is_none(helix_run):
    curve, _ = helix_run
    res = gen.classify(frenet_apparatus(curve))
    assert res.label is None
    assert res.to_json()["label"] == "none"
    assert res.fit_residual > 1e-3


def test_fit_sinusoid_exact():
    Phi = np.linspace(0, 2, 200)
    R, th, resid = gen.fit_sinusoid(2.5 * np.cos(Phi - 0.4), Phi)
    assert R == pytest.approx(2.5, rel=1e-13)
    assert th == pytest.approx(-0.4, abs=1e-13)
    assert resid < 1e-13


def test_sphere_fit_exact(rng):
    d = rng.normal(size=(40, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    fit = gen.fit_sphere(np.array([1.0, -2.0, 3.0]) + 2.5 * d)
    assert fit.residual < 1e-12
    assert fit.radius == pytest.approx(2.5, rel=1e-12)
    np.testing.assert_allclose(fit.center, [1, -2, 3], atol=1e-12)


def test_sphere_fit_planar_circle():
    s = np.linspace(0, 5, 200)
    fit = gen.fit_sphere(circle(1.5, s, z=0.7))
    assert fit.residual < 1e-12
    assert fit.radius == pytest.approx(1.5, rel=1e-12)


def test_spherical_characterization():
    s = arange_closed(2 * np.pi, 1e-3)[:-1]
    great = SampledCurve(s, circle(1.0, s))
    assert gen.spherical_check(gen.s_M(great, 0.0), great).residual < 1e-4
    r, z0 = 0.8, 0.6
    s = arange_closed(2 * np.pi * r, 1e-3)
    small = SampledCurve(s, circle(r, s, z0))
    assert gen.spherical_check(lambda x: np.ones_like(x), small).residual > 1e-2
    assert gen.spherical_check(gen.s_M(small, 0.0), small).residual < 1e-4


def test_s_M_requires_sphere(helix_run):
    curve, _ = helix_run
    with pytest.raises(NotSpherical):
        gen.s_M(curve, 0.0)
