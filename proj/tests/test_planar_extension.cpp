#include <doctest.h>

#include "rosen/planar_extension.hpp"
#include "rosen/rng.hpp"

using namespace rosen;

namespace {

// midpoint-rule quadrature oracle for the measure of a finite rectangle
double quadrature_measure(double a, double b, double c, double d, int n = 400) {
    double hx = (b - a) / n, hy = (d - c) / n, acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = a + (i + 0.5) * hx, y = c + (j + 0.5) * hy;
            acc += hx * hy / ((x - y) * (x - y));
        }
    return acc;
}

}  // namespace

TEST_CASE("omega* fibers, even k = 8") {
    HeckeContext c(8);
    PlanarDomain dom = build_omega_star(c);
    REQUIRE(dom.fibers.size() == 5);
    // last fiber [lambda/2, 2/lambda) x [-1, 0]
    const Fiber& last = dom.fibers.back();
    CHECK(last.x_lo == c.half_lambda());
    CHECK(last.x_hi == c.two_over_lambda());
    CHECK(last.y_lo == -1);
    CHECK(last.y_hi == 0);
    // lowest finite corner of the first fiber: -1/L_1 ~ -2.848
    CHECK(abs(dom.fibers[0].y_hi + Real("2.847759")) < 1e-6);
    CHECK(dom.fibers[0].lower_infinite());
    // x-intervals tile [-lambda/2, 2/lambda)
    CHECK(dom.fibers[0].x_lo == -c.half_lambda());
    for (std::size_t j = 1; j < dom.fibers.size(); ++j)
        CHECK(dom.fibers[j].x_lo == dom.fibers[j - 1].x_hi);
}

TEST_CASE("omega* fibers, odd k = 9") {
    HeckeContext c(9);
    PlanarDomain dom = build_omega_star(c);
    REQUIRE(dom.fibers.size() == 10);  // 2 ell + 4
    const Fiber& last = dom.fibers.back();
    CHECK(last.x_lo == 1);
    CHECK(last.x_hi == c.two_over_lambda());
    CHECK(abs(last.y_lo + c.R()) < pow2(-200));  // [-R, 0]
    CHECK(last.y_hi == 0);
    const Fiber& second_last = dom.fibers[8];
    CHECK(second_last.x_lo == c.half_lambda());
    CHECK(second_last.x_hi == 1);
    CHECK(abs(second_last.y_lo + 1 / c.R()) < pow2(-200));  // [-1/R, 0]
}

TEST_CASE("omega0 sits inside omega*") {
    for (int k : {4, 5, 8, 9, 12}) {
        HeckeContext c(k);
        PlanarDomain om0 = build_omega0(c), oms = build_omega_star(c);
        REQUIRE(om0.fibers.size() == oms.fibers.size() - (c.even() ? 1 : 2));
        for (std::size_t j = 0; j + 1 < om0.fibers.size(); ++j) {
            CHECK(om0.fibers[j].x_lo == oms.fibers[j].x_lo);
            CHECK(om0.fibers[j].y_hi == oms.fibers[j].y_hi);
        }
        // the central fiber is truncated at -1 (even) or -1/R (odd)
        const Fiber& mid = om0.fibers.back();
        if (c.even())
            CHECK(mid.y_hi == -1);
        else
            CHECK(abs(mid.y_hi + 1 / c.R()) < pow2(-200));
        CHECK(mid.x_hi == c.half_lambda());
    }
}

TEST_CASE("rect_measure closed form vs quadrature oracle") {
    Real m1 = rect_measure(Real(0), Real(1), Real(-2), Real(-1));
    CHECK(abs(m1 - log(Real(4) / 3)) < pow2(-200));
    CHECK(std::fabs(static_cast<double>(m1) - quadrature_measure(0, 1, -2, -1)) < 1e-5);

    Real m2 = rect_measure(Real(1), Real(2), Real(-2), Real(-1));
    CHECK(abs(m2 - log(Real(9) / 8)) < pow2(-200));
    CHECK(m2 > 0);
    CHECK(std::fabs(static_cast<double>(m2) - quadrature_measure(1, 2, -2, -1)) < 1e-5);

    // infinite lower edge
    Real m3 = rect_measure(Real(1), Real(2), Real(-std::numeric_limits<double>::infinity()),
                           Real(-1));
    CHECK(abs(m3 - log(Real(3) / 2)) < pow2(-200));

    // diagonal corner diverges; crossings are rejected
    CHECK(boost::multiprecision::isinf(
        rect_measure(Real(0), Real(1), Real(-2), Real(0))));
    CHECK_THROWS_AS(rect_measure(Real(0), Real(1), Real(-2), Real(1) / 2),
                    std::domain_error);
}

TEST_CASE("clipped rectangle measure") {
    // full rectangle once t <= a - d
    Real full = rect_measure(Real(2), Real(3), Real(-1), Real(0));
    CHECK(abs(clipped_rect_measure(Real(2), Real(3), Real(-1), Real(0), Real(2)) - full) <
          pow2(-200));
    // empty once t >= b - c
    CHECK(clipped_rect_measure(Real(2), Real(3), Real(-1), Real(0), Real(5)) == 0);
    // intermediate t against the quadrature oracle on the sub-region
    double t = 2.7;
    double oracle = 0;
    {
        int n = 1200;
        double hx = 1.0 / n, hy = 1.0 / n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double x = 2 + (i + 0.5) * hx, y = -1 + (j + 0.5) * hy;
                if (x - y > t) oracle += hx * hy / ((x - y) * (x - y));
            }
    }
    CHECK(std::fabs(static_cast<double>(clipped_rect_measure(Real(2), Real(3), Real(-1),
                                                             Real(0), Real(t))) -
                    oracle) < 2e-4);
}

TEST_CASE("domain measures") {
    HeckeContext c(8);
    PlanarDomain om0 = build_omega0(c), oms = build_omega_star(c);
    Real mu0 = domain_measure(om0);
    CHECK(mu0 > 0);
    CHECK(!boost::multiprecision::isinf(mu0));
    // total mediant measure diverges at the (0, 0) corner
    CHECK(boost::multiprecision::isinf(domain_measure(oms)));
    // clipped at large t the measure is exactly lambda/t
    for (double t : {3.5, 5.0, 9.0}) {
        Real clipped = domain_measure(oms, Real(t));
        CHECK(abs(clipped - c.lambda() / t) < pow2(-200));
    }
    // k=4: mu(omega0) = log(1 + sqrt 2)
    HeckeContext c4(4);
    CHECK(abs(domain_measure(build_omega0(c4)) - log(1 + sqrt(Real(2)))) < pow2(-200));
}

TEST_CASE("natural extension step") {
    HeckeContext c(8);
    // S-hat(1, -1) = (1 - lambda, -1 - lambda)
    NatExtStep st = nat_ext_step(c, PlanarPoint{Real(1), Real(-1)});
    CHECK(st.symbol == MediantSymbol::Uplus);
    CHECK(abs(st.p.x - (1 - c.lambda())) < pow2(-200));
    CHECK(abs(st.p.y - (-1 - c.lambda())) < pow2(-200));

    // y = -inf on a U- branch maps to -lambda
    NatExtStep st2 = nat_ext_step(
        c, PlanarPoint{Real(-1) / 2, Real(-std::numeric_limits<double>::infinity())});
    CHECK(st2.symbol == MediantSymbol::Uminus);
    CHECK(abs(st2.p.y + c.lambda()) < pow2(-200));

    // (0.5, -3) sits on the U+ branch; its image stays in Omega*
    PlanarPoint p{Real(1) / 2, Real(-3)};
    NatExtStep st3 = nat_ext_step(c, p);
    CHECK(st3.symbol == MediantSymbol::Uplus);
    CHECK(abs(st3.p.x - (Real(2) - c.lambda())) < pow2(-200));
    CHECK(abs(st3.p.y - (Real(-1) / 3 - c.lambda())) < pow2(-200));
    CHECK(classify(build_omega_star(c), st3.p, pow2(-40)) == Membership::Inside);

    CHECK_THROWS_AS(nat_ext_step(c, PlanarPoint{Real(5), Real(-1)}), std::domain_error);
}

TEST_CASE("rosen extension is the U-time induced map") {
    HeckeContext c(9);
    // r_1 = 1 case: T-hat equals a single S-hat step
    PlanarPoint p{Real(-7) / 10, Real(-2)};
    RosenExtStep rs = rosen_ext_step(c, p);
    CHECK(rs.digit == Digit{-1, 1});
    NatExtStep ms = nat_ext_step(c, p);
    CHECK(ms.symbol == MediantSymbol::Uminus);
    CHECK(abs(rs.p.x - ms.p.x) < pow2(-200));
    CHECK(abs(rs.p.y - ms.p.y) < pow2(-200));
    // random points: S-hat^{k_m} = T-hat^m
    CHECK(check_induced_composition(c, 200, 10, 1337) < 1e-12);
}

TEST_CASE("even witness T-hat orbit is periodic with period ell - 1") {
    HeckeContext c(8);
    PlanarPoint p{1 - c.lambda(), -1 - c.lambda()};  // (tau_0, K_1)
    PlanarPoint q = p;
    for (int i = 0; i < c.ell() - 1; ++i) q = rosen_ext_step(c, q).p;
    CHECK(abs(q.x - p.x) < pow2(-200));
    CHECK(abs(q.y - p.y) < pow2(-200));
}

TEST_CASE("dual fibred system") {
    HeckeContext c8(8);
    {
        auto [img, br] = dual_step(c8, Real(-1) - c8.lambda());
        CHECK(br == DualBranch::IV);
        CHECK(abs(img + 1) < pow2(-200));
    }
    {
        auto [img, br] = dual_step(c8, Real(0));
        CHECK(br == DualBranch::III);
        CHECK(img == 0);
    }
    CHECK_THROWS_AS(dual_step(c8, Real(1)), std::domain_error);
    // even partition: B#(i) = [-lambda, -1) and B#(ii) = [-1, -1/lambda)
    auto cuts = dual_partition(c8);
    REQUIRE(cuts.size() == 3);
    CHECK(abs(cuts[0] + c8.lambda()) < pow2(-200));
    CHECK(cuts[1] == -1);  // R = 1 for even k
    CHECK(abs(cuts[2] + 1 / c8.lambda()) < pow2(-200));
    {
        auto [img, br] = dual_step(c8, Real(-1));
        (void)img;
        CHECK(br == DualBranch::II);
    }
    // odd partition splits at -1/R
    HeckeContext c9(9);
    auto cuts9 = dual_partition(c9);
    CHECK(abs(cuts9[1] + 1 / c9.R()) < pow2(-200));
}

TEST_CASE("dual functional equation") {
    for (int k : {4, 8, 9}) {
        HeckeContext c(k);
        DualEquationReport rep = check_dual_equation(c, 1000, 2024);
        CHECK(rep.samples == 1000);
        CHECK(rep.max_residual < 1e-12);
    }
}

TEST_CASE("measure invariance on random branch-interior rectangles") {
    for (int k : {4, 7, 8, 9, 12}) {
        HeckeContext c(k);
        InvarianceReport rep = check_invariance(c, 100, 99, pow2(-40));
        CHECK(rep.rectangles == 100);
        CHECK(rep.violations == 0);
        CHECK(rep.max_deviation < 1e-12);
    }
}

TEST_CASE("geometric Lenstra constants match the closed forms") {
    {
        HeckeContext c(8);
        auto rosen = geometric_lenstra(c, LenstraVariant::Rosen);
        CHECK(abs(rosen.t_corner - (c.lambda() + 2) / c.lambda()) < pow2(-200));
        CHECK(abs(rosen.constant_corner - c.lambda() / (c.lambda() + 2)) < pow2(-200));
        CHECK(abs(rosen.constant_clipped - rosen.constant_corner) < 1e-25);
        auto med = geometric_lenstra(c, LenstraVariant::Mediant);
        CHECK(abs(med.t_corner - 1 / (c.lambda() - 1)) < pow2(-200));
        CHECK(abs(med.constant_corner - (c.lambda() - 1)) < 1e-30);
        CHECK(abs(med.constant_clipped - (c.lambda() - 1)) < 1e-25);
    }
    {
        HeckeContext c(5);
        auto rosen = geometric_lenstra(c, LenstraVariant::Rosen);
        CHECK(abs(rosen.constant_corner - c.R() / (c.R() + 1)) < 1e-30);
        auto med = geometric_lenstra(c, LenstraVariant::Mediant);
        CHECK(abs(med.constant_corner - (c.lambda() - c.R())) < 1e-30);
        CHECK(abs(med.constant_clipped - (c.lambda() - c.R())) < 1e-25);
    }
    for (int k = 4; k <= 12; ++k) {
        HeckeContext c(k);
        ConstantsReport cf = c.closed_form_constants();
        auto rosen = geometric_lenstra(c, LenstraVariant::Rosen);
        auto med = geometric_lenstra(c, LenstraVariant::Mediant);
        CHECK(abs(rosen.constant_corner - cf.rosen_lenstra) < 1e-10);
        CHECK(abs(med.constant_corner - cf.mediant_lenstra) < 1e-10);
        CHECK(abs(rosen.constant_clipped - rosen.constant_corner) < 1e-20);
        CHECK(abs(med.constant_clipped - med.constant_corner) < 1e-20);
    }
}

TEST_CASE("k = 4 adjudication: both geometric routes support sqrt(2)/2") {
    // The translation argument yields t_1 = sqrt 2, not sqrt 2 + 1; the
    // clipped-integral route agrees, so the Lenstra constant is sqrt(2)/2.
    HeckeContext c(4);
    auto med = geometric_lenstra(c, LenstraVariant::Mediant);
    CHECK(abs(med.t_corner - sqrt(Real(2))) < pow2(-200));
    CHECK(abs(med.constant_corner - sqrt(Real(2)) / 2) < pow2(-200));
    CHECK(abs(med.constant_clipped - sqrt(Real(2)) / 2) < 1e-25);
    // the competing reading 1/(sqrt 2 + 1) is far from both routes
    CHECK(abs(med.constant_corner - (sqrt(Real(2)) - 1)) > Real(1) / 4);
}

TEST_CASE("translated star geometry") {
    for (int k : {4, 5, 8, 9}) {
        HeckeContext c(k);
        PlanarDomain t = build_translated_star(c);
        for (const Fiber& f : t.fibers) CHECK(f.lower_infinite());
        int merged = c.even() ? 1 : 2;
        for (int j = 0; j < merged; ++j)
            CHECK(abs(t.fibers[static_cast<std::size_t>(j)].y_hi + c.lambda()) < pow2(-200));
        CHECK(t.fibers.back().x_hi == c.half_lambda());
    }
}

TEST_CASE("witness orbit, even k = 8") {
    HeckeContext c(8);
    WitnessOrbit w = witness_orbit(c);
    CHECK(w.exact_certified);
    CHECK(w.period == c.ell());            // S-hat period
    CHECK(w.rosen_period == c.ell() - 1);  // T-hat period
    CHECK(abs(w.points[0].x - (1 - c.lambda())) < pow2(-200));   // tau_0 ~ -0.847759
    CHECK(abs(w.points[0].x + Real("0.847759")) < 1e-6);
    CHECK(abs(w.points[0].y + (c.lambda() + 1)) < pow2(-200));   // K_1 = -1/eta_0
    CHECK(abs(-1 / w.points[0].y - Real("0.351153")) < 1e-6);    // eta_0
    CHECK(abs(w.theta[0] - Real(1) / 2) < pow2(-200));           // theta(tau_0, eta_0) = 1/2
    CHECK(w.has_unit_point);
    CHECK(w.min_theta >= c.hurwitz_C() - pow2(-40));
    REQUIRE(w.equality_indices.size() >= 2);
    CHECK(w.equality_indices[0] == 0);
}

TEST_CASE("witness orbit, odd k") {
    {
        HeckeContext c(9);
        WitnessOrbit w = witness_orbit(c);
        CHECK(w.interval_certified);
        CHECK(w.return_distance < pow2(-100));
        CHECK(w.period > 2 * c.ell());  // extra points beyond the T-hat cycle
        CHECK(w.rosen_period == 2 * c.ell() + 1);
        CHECK(w.min_theta >= c.hurwitz_C() - pow2(-40));
        CHECK(abs(w.min_theta - c.hurwitz_C()) < 1e-25);
        CHECK(abs(w.points[0].x - (c.R() - c.lambda())) < 1e-25);
    }
    {
        HeckeContext c(5);
        WitnessOrbit w = witness_orbit(c);
        CHECK(w.interval_certified);
        CHECK(w.period == 5);
        CHECK(w.rosen_period == 3);
        CHECK(w.min_theta >= c.hurwitz_C() - pow2(-40));
    }
}

TEST_CASE("bijectivity audit at desk scale") {
    HeckeContext c(8);
    BijectivityReport rep = check_bijectivity(c, 20000, 42);
    CHECK(rep.containment_violations == 0);
    CHECK(rep.preimage_violations == 0);
    CHECK(rep.max_roundtrip_error < 1e-40);
    CHECK(rep.boundary_skipped < 100);
}

TEST_CASE("branch-by-branch images match the region proofs, even k = 8") {
    HeckeContext c(8);
    PlanarDomain dom = build_omega_star(c);
    auto pieces = image_decomposition(c, dom);
    CHECK(image_pieces_contained(c, pieces, pow2(-80)));
    Real tol = pow2(-200);

    // U+ piece of the central fiber goes to [phi_1, lambda/2) x [-inf, -lambda]
    bool found_uplus = false, found_right = false, found_vminus = false;
    for (const auto& pc : pieces) {
        if (pc.symbol == MediantSymbol::Uplus && pc.source.x_hi == c.half_lambda() &&
            pc.source.x_lo == c.inner_cut()) {
            found_uplus = true;
            CHECK(abs(pc.image.x_lo - c.phi()[1]) < tol);
            CHECK(abs(pc.image.x_hi - c.half_lambda()) < tol);
            CHECK(pc.image.lower_infinite());
            CHECK(abs(pc.image.y_hi + c.lambda()) < tol);
        }
        if (pc.symbol == MediantSymbol::Uplus && pc.source.x_lo == c.half_lambda()) {
            found_right = true;  // [lambda/2, 2/lambda) x [-1, 0]
            CHECK(abs(pc.image.x_lo + c.half_lambda()) < tol);
            CHECK(abs(pc.image.x_hi - c.phi()[1]) < tol);
            CHECK(pc.image.lower_infinite());
            CHECK(abs(pc.image.y_hi + (c.lambda() + 1)) < tol);
        }
        if (pc.symbol == MediantSymbol::Vminus) {
            found_vminus = true;  // image [0, 2/lambda] x [-1, -1/lambda]
            CHECK(abs(pc.image.x_lo) < tol);
            CHECK(abs(pc.image.x_hi - c.two_over_lambda()) < tol);
            CHECK(abs(pc.image.y_lo + 1) < tol);
            CHECK(abs(pc.image.y_hi + 1 / c.lambda()) < tol);
        }
    }
    CHECK(found_uplus);
    CHECK(found_right);
    CHECK(found_vminus);
}

TEST_CASE("branch-by-branch images match the region proofs, odd k = 9") {
    HeckeContext c(9);
    auto pieces = image_decomposition(c, build_omega_star(c));
    CHECK(image_pieces_contained(c, pieces, pow2(-80)));
    Real tol = pow2(-200);
    const Real& lam = c.lambda();
    int ell = c.ell();
    bool found_a = false, found_b = false;
    for (const auto& pc : pieces) {
        // [lambda/2, 1) x [-1/R, 0] -> [phi_{ell+1}, phi_1) x [-inf, -R - lambda]
        if (pc.source.x_lo == c.half_lambda() && pc.source.x_hi == 1) {
            found_a = true;
            CHECK(abs(pc.image.x_lo - c.phi()[static_cast<std::size_t>(ell + 1)]) < tol);
            CHECK(abs(pc.image.x_hi - c.phi()[1]) < tol);
            CHECK(pc.image.lower_infinite());
            CHECK(abs(pc.image.y_hi + (c.R() + lam)) < tol);
        }
        // [1, 2/lambda) x [-R, 0] -> [-lambda/2, phi_{ell+1}) x [-inf, -lambda - 1/R]
        if (pc.source.x_lo == 1) {
            found_b = true;
            CHECK(abs(pc.image.x_lo + c.half_lambda()) < tol);
            CHECK(abs(pc.image.x_hi - c.phi()[static_cast<std::size_t>(ell + 1)]) < tol);
            CHECK(abs(pc.image.y_hi + (lam + 1 / c.R())) < tol);
        }
    }
    CHECK(found_a);
    CHECK(found_b);
}

TEST_CASE("conjugacy with the BKS extension") {
    // (x, y) -> (x, -1/y) carries T-hat orbits to BKS orbits
    for (int k : {5, 8}) {
        HeckeContext c(k);
        RandomStream rng(77, static_cast<std::uint64_t>(k));
        PlanarDomain om0 = build_omega0(c);
        for (int trial = 0; trial < 100; ++trial) {
            const Fiber& f =
                om0.fibers[static_cast<std::size_t>(rng.next_u64() % om0.fibers.size())];
            Real x = rng.uniform(f.x_lo, f.x_hi);
            Real y = rng.uniform(f.y_hi - 3, f.y_hi);
            PlanarPoint p{x, y};
            Real w = -1 / y;
            Real bx = x;
            for (int s = 0; s < 50; ++s) {
                RosenExtStep rs = rosen_ext_step(c, p);
                if (rs.terminal) break;
                p = rs.p;
                auto [nbx, nw] = bks_step(c, bx, w);
                bx = nbx;
                w = nw;
                CHECK(abs(p.x - bx) < 1e-30);
                CHECK(abs(w + 1 / p.y) < 1e-30);
            }
        }
    }
}

TEST_CASE("membership classification with collar") {
    HeckeContext c(8);
    PlanarDomain dom = build_omega_star(c);
    Real collar = pow2(-40);
    CHECK(classify(dom, PlanarPoint{Real(1) / 10, Real(-5)}, collar) == Membership::Inside);
    CHECK(classify(dom, PlanarPoint{Real(1) / 10, Real(1) / 10}, collar) ==
          Membership::Outside);
    CHECK(classify(dom, PlanarPoint{Real(5), Real(-5)}, collar) == Membership::Outside);
    // branch cuts are interior to the fibers; exactly on a fiber edge: boundary
    CHECK(classify(dom, PlanarPoint{c.inner_cut(), Real(-5)}, collar) ==
          Membership::Inside);
    CHECK(classify(dom, PlanarPoint{Real(0), Real(-5)}, collar) == Membership::Boundary);
    // touching a fiber top from above within the collar: boundary
    CHECK(classify(dom, PlanarPoint{Real(1) / 10, pow2(-45)}, collar) ==
          Membership::Boundary);
    // y = -inf belongs to the closure of the infinite fibers
    CHECK(classify(dom, PlanarPoint{Real(1) / 10,
                                    Real(-std::numeric_limits<double>::infinity())},
                   collar) == Membership::Inside);
}

TEST_CASE("even witness orbits close exactly for every even index") {
    for (int k : {4, 6, 8, 10, 12, 14}) {
        HeckeContext c(k);
        WitnessOrbit w = witness_orbit(c);
        CHECK(w.exact_certified);
        CHECK(w.period == c.ell());
        CHECK(w.rosen_period == c.ell() - 1);
        CHECK(w.has_unit_point);
        CHECK(w.min_theta >= c.hurwitz_C() - pow2(-40));
        CHECK(!w.equality_indices.empty());
    }
}
