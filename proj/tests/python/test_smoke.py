import math

import pytest

import rosencf


@pytest.fixture(scope="module")
def ctx8():
    return rosencf.Context(8)


@pytest.fixture(scope="module")
def ctx5():
    return rosencf.Context(5)


def test_context_constants(ctx8, ctx5):
    assert ctx8.k == 8 and ctx8.even and ctx8.ell == 4
    assert abs(ctx8.lam - 2 * math.cos(math.pi / 8)) < 1e-14
    assert ctx8.hurwitz_C == 0.5
    assert ctx8.min_poly == ["2", "0", "-4", "0", "1"]

    assert not ctx5.even
    r = ctx5.R
    assert abs(r * r + (2 - ctx5.lam) * r - 1) < 1e-14
    cf = ctx5.closed_form_constants()
    assert abs(cf["mediant_lenstra"] - (ctx5.lam - ctx5.R)) < 1e-14
    assert cf["mediant_lenstra"] > cf["hurwitz_C"]


def test_rejects_k3():
    with pytest.raises(Exception):
        rosencf.Context(3)


def test_rosen_and_mediant_steps(ctx8):
    c4 = rosencf.Context(4)
    x, eps, r, terminal = rosencf.rosen_step(c4, 0.3)
    assert (eps, r, terminal) == (1, 2, False)
    assert abs(x - 0.504906) < 1e-5

    sx, symbol, terminal = rosencf.mediant_step(c4, 0.3)
    assert symbol == "V+" and not terminal
    assert abs(sx - 0.521074) < 1e-5

    rep = rosencf.induced_length(c4, 0.3)
    assert rep["length"] == 1 and rep["verified"] and rep["matches_first_digit"]


def test_expansions_and_convergents(ctx8):
    c4 = rosencf.Context(4)
    digits = rosencf.expand(c4, 0.3, 8)["digits"]
    assert digits[0] == (1, 2)
    values = [e["value"] for e in rosencf.convergents(c4, 0.3, 12)]
    assert abs(values[-1] - 0.3) < 1e-9

    entries = rosencf.mediant_convergents(c4, 0.1, 8)
    mediants = [e for e in entries if not e["principal"]]
    lam = c4.lam
    # six level-0 mediants 1/(l lambda) for r_1 = 7
    for l, e in enumerate(mediants[:6], start=1):
        assert abs(e["value"] - 1 / (l * lam)) < 1e-12


def test_theta_series(ctx5):
    thetas = rosencf.theta_series(ctx5, 0.37, 40)
    assert len(thetas) == 40
    assert all(t > 0 for t in thetas)


def test_domains_and_measures(ctx8):
    fibers = rosencf.omega_star(ctx8)
    assert len(fibers) == 5
    assert fibers[-1]["y_lo"] == -1.0
    assert rosencf.omega0(ctx8)[-1]["y_hi"] == -1.0
    mu0 = rosencf.domain_measure(ctx8, "omega0")
    assert mu0 > 0
    clipped = rosencf.domain_measure(ctx8, "omega_star", clip_t=5.0)
    assert abs(clipped - ctx8.lam / 5.0) < 1e-12


def test_nat_ext_and_witness(ctx8):
    x, y, symbol = rosencf.nat_ext_step(ctx8, 1.0, -1.0)
    assert symbol == "U+"
    assert abs(x - (1 - ctx8.lam)) < 1e-14
    assert abs(y - (-1 - ctx8.lam)) < 1e-14

    w = rosencf.witness_orbit(ctx8)
    assert w["period"] == 4 and w["rosen_period"] == 3
    assert w["exact_certified"] and w["has_unit_point"]
    assert w["min_theta"] >= 0.5 - 1e-12


def test_geometric_lenstra(ctx8, ctx5):
    g8 = rosencf.geometric_lenstra(ctx8, "mediant")
    assert abs(g8["constant_corner"] - (ctx8.lam - 1)) < 1e-12
    assert abs(g8["constant_clipped"] - g8["constant_corner"]) < 1e-10
    g5 = rosencf.geometric_lenstra(ctx5, "rosen")
    assert abs(g5["constant_corner"] - ctx5.R / (ctx5.R + 1)) < 1e-12

    c4 = rosencf.Context(4)
    g4 = rosencf.geometric_lenstra(c4, "mediant")
    assert abs(g4["constant_corner"] - math.sqrt(2) / 2) < 1e-12


def test_bijectivity_smoke(ctx8):
    rep = rosencf.check_bijectivity(ctx8, 2000, 42)
    assert rep["containment_violations"] == 0
    assert rep["preimage_violations"] == 0


def test_entropy_smoke(ctx5):
    est = rosencf.lyapunov_entropy(ctx5, 200000, 3)
    assert abs(est["target"] - 3 * math.pi**2 / 10) < 1e-12
    assert est["rel_error"] < 0.05
