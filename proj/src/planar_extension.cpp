#include "rosen/planar_extension.hpp"

#include "rosen/parallel.hpp"
#include "rosen/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rosen {

namespace {

Real neg_inf() { return Real(-std::numeric_limits<double>::infinity()); }
Real pos_inf() { return Real(std::numeric_limits<double>::infinity()); }

bool is_inf(const Real& v) { return boost::multiprecision::isinf(v); }

void push_fiber(std::vector<Fiber>& fs, Real x_lo, Real x_hi, Real y_lo, Real y_hi) {
    if (!(x_lo < x_hi))
        throw std::logic_error("PlanarDomain: empty or misordered fiber");
    if (!fs.empty() && !(fs.back().x_hi <= x_lo))
        throw std::logic_error("PlanarDomain: fibers out of order");
    fs.push_back(Fiber{std::move(x_lo), std::move(x_hi), std::move(y_lo), std::move(y_hi)});
}

// forward matrices M_s as real maps, -inf = projective infinity
Real apply_symbol_forward(const HeckeContext& ctx, MediantSymbol s, const Real& v) {
    const Real& lam = ctx.lambda();
    bool infinite = is_inf(v);
    switch (s) {
        case MediantSymbol::Uminus:  // [[0,-1],[1,lambda]]: -1/(v+lambda)
            if (infinite) return Real(0);
            if (v + lam == 0) return neg_inf();
            return -1 / (v + lam);
        case MediantSymbol::Uplus:  // [[0,1],[1,lambda]]: 1/(v+lambda)
            if (infinite) return Real(0);
            if (v + lam == 0) return neg_inf();
            return 1 / (v + lam);
        case MediantSymbol::Vminus:  // [[-1,0],[lambda,1]]: -v/(lambda v+1)
            if (infinite) return -1 / lam;
            if (lam * v + 1 == 0) return neg_inf();
            return -v / (lam * v + 1);
        case MediantSymbol::Vplus:  // [[1,0],[lambda,1]]: v/(lambda v+1)
            if (infinite) return 1 / lam;
            if (lam * v + 1 == 0) return neg_inf();
            return v / (lam * v + 1);
        case MediantSymbol::Ident:
            return v;
    }
    throw std::logic_error("apply_symbol_forward: bad symbol");
}

// |S'(x)| on the branch of symbol s
Real branch_derivative(const HeckeContext& ctx, MediantSymbol s, const Real& x) {
    const Real& lam = ctx.lambda();
    switch (s) {
        case MediantSymbol::Uminus:
        case MediantSymbol::Uplus:
            return 1 / (x * x);
        case MediantSymbol::Vminus: {
            Real d = lam * x + 1;
            return 1 / (d * d);
        }
        case MediantSymbol::Vplus: {
            Real d = 1 - lam * x;
            return 1 / (d * d);
        }
        case MediantSymbol::Ident:
            return Real(1);
    }
    throw std::logic_error("branch_derivative: bad symbol");
}

MediantSymbol branch_of(const HeckeContext& ctx, const Real& x) {
    if (x == 0) return MediantSymbol::Ident;
    if (x < -ctx.inner_cut()) return MediantSymbol::Uminus;
    if (x < 0) return MediantSymbol::Vminus;
    if (x <= ctx.inner_cut()) return MediantSymbol::Vplus;
    return MediantSymbol::Uplus;
}

}  // namespace

const Fiber* PlanarDomain::fiber_for(const Real& x) const {
    for (const Fiber& f : fibers)
        if (x >= f.x_lo && x < f.x_hi) return &f;
    return nullptr;
}

PlanarDomain build_omega_star(const HeckeContext& ctx) {
    PlanarDomain dom;
    dom.label = DomainLabel::OmegaStar;
    dom.k = ctx.k();
    const auto& phi = ctx.phi();
    const auto& L = ctx.L();
    const int ell = ctx.ell();
    if (ctx.even()) {
        for (int j = 1; j <= ell - 1; ++j)
            push_fiber(dom.fibers, phi[static_cast<std::size_t>(j - 1)],
                       phi[static_cast<std::size_t>(j)], neg_inf(),
                       -1 / L[static_cast<std::size_t>(j)]);
        push_fiber(dom.fibers, Real(0), ctx.half_lambda(), neg_inf(), Real(0));
        push_fiber(dom.fibers, ctx.half_lambda(), ctx.two_over_lambda(), Real(-1), Real(0));
    } else {
        // J_{2i-1} = [phi_{i-1}, phi_{ell+i}), J_{2i} = [phi_{ell+i}, phi_i)
        for (int j = 1; j <= 2 * ell + 1; ++j) {
            int i = (j + 1) / 2;
            Real x_lo = (j % 2 == 1) ? phi[static_cast<std::size_t>(i - 1)]
                                     : phi[static_cast<std::size_t>(ell + i)];
            Real x_hi = (j % 2 == 1) ? phi[static_cast<std::size_t>(ell + i)]
                                     : phi[static_cast<std::size_t>(i)];
            push_fiber(dom.fibers, x_lo, x_hi, neg_inf(), -1 / L[static_cast<std::size_t>(j)]);
        }
        push_fiber(dom.fibers, Real(0), ctx.half_lambda(), neg_inf(), Real(0));
        push_fiber(dom.fibers, ctx.half_lambda(), Real(1), -1 / ctx.R(), Real(0));
        push_fiber(dom.fibers, Real(1), ctx.two_over_lambda(), -ctx.R(), Real(0));
    }
    return dom;
}

PlanarDomain build_omega0(const HeckeContext& ctx) {
    PlanarDomain star = build_omega_star(ctx);
    PlanarDomain dom;
    dom.label = DomainLabel::Omega0;
    dom.k = ctx.k();
    // Omega* fibers over I_k, with the central fiber truncated at -1 (even)
    // or -1/R (odd); the fibers right of lambda/2 drop out.
    std::size_t central = star.fibers.size() - (ctx.even() ? 2 : 3);
    for (std::size_t j = 0; j < central; ++j) dom.fibers.push_back(star.fibers[j]);
    Fiber mid = star.fibers[central];
    mid.y_hi = ctx.even() ? Real(-1) : -1 / ctx.R();
    dom.fibers.push_back(mid);
    return dom;
}

PlanarDomain build_translated_star(const HeckeContext& ctx) {
    PlanarDomain star = build_omega_star(ctx);
    PlanarDomain dom;
    dom.label = DomainLabel::TranslatedStar;
    dom.k = ctx.k();
    const int finite_count = ctx.even() ? 1 : 2;
    const std::size_t n = star.fibers.size();
    // The finite fibers, translated by -lambda, stack exactly onto the
    // leftmost fibers; the merged fibers reach -inf with top -lambda.
    for (std::size_t j = 0; j < n - static_cast<std::size_t>(finite_count); ++j) {
        Fiber f = star.fibers[j];
        if (j < static_cast<std::size_t>(finite_count)) {
            const Fiber& moved = star.fibers[n - static_cast<std::size_t>(finite_count) + j];
            Real tx_lo = moved.x_lo - ctx.lambda();
            Real tx_hi = moved.x_hi - ctx.lambda();
            Real ty_lo = moved.y_lo - ctx.lambda();
            if (abs(tx_lo - f.x_lo) > pow2(-64) || abs(tx_hi - f.x_hi) > pow2(-64) ||
                abs(ty_lo - f.y_hi) > pow2(-64))
                throw std::logic_error("build_translated_star: translated block misfits");
            f.y_hi = moved.y_hi - ctx.lambda();  // = -lambda
        }
        dom.fibers.push_back(std::move(f));
    }
    return dom;
}

Membership classify(const PlanarDomain& dom, const PlanarPoint& p, const Real& collar) {
    bool near_cut = abs(p.x - dom.x_max()) < collar;
    for (const Fiber& f : dom.fibers)
        if (abs(p.x - f.x_lo) < collar) near_cut = true;
    const Fiber* f = dom.fiber_for(p.x);
    if (!f) return near_cut ? Membership::Boundary : Membership::Outside;
    if (p.y > f->y_hi)
        return (p.y - f->y_hi < collar) ? Membership::Boundary : Membership::Outside;
    if (!f->lower_infinite() && p.y < f->y_lo)
        return (f->y_lo - p.y < collar) ? Membership::Boundary : Membership::Outside;
    if (near_cut || f->y_hi - p.y < collar ||
        (!f->lower_infinite() && p.y - f->y_lo < collar))
        return Membership::Boundary;
    return Membership::Inside;
}

NatExtStep nat_ext_step(const HeckeContext& ctx, const PlanarPoint& p) {
    MediantStepResult st = mediant_step(ctx, p.x);
    NatExtStep out{PlanarPoint{st.x, p.y}, st.symbol, st.terminal};
    if (!st.terminal) out.p.y = apply_symbol_inverse(ctx, st.symbol, p.y);
    return out;
}

RosenExtStep rosen_ext_step(const HeckeContext& ctx, const PlanarPoint& p) {
    RosenStep st = rosen_step(ctx, p.x);
    RosenExtStep out{PlanarPoint{st.x, p.y}, st.digit, st.terminal};
    if (st.terminal) return out;
    // [[-r lambda, eps], [1, 0]] applied to y
    Real rl = ctx.lambda() * static_cast<long>(st.digit.r);
    if (is_inf(p.y))
        out.p.y = -rl;
    else if (p.y == 0)
        out.p.y = neg_inf();
    else
        out.p.y = st.digit.eps / p.y - rl;
    return out;
}

std::pair<Real, Real> bks_step(const HeckeContext& ctx, const Real& x, const Real& w) {
    RosenStep st = rosen_step(ctx, x);
    if (st.terminal) throw std::domain_error("bks_step: terminal point");
    Real rl = ctx.lambda() * static_cast<long>(st.digit.r);
    return {st.x, 1 / (rl + st.digit.eps * w)};
}

std::pair<Real, DualBranch> dual_step(const HeckeContext& ctx, const Real& y) {
    if (y > 0) throw std::domain_error("dual_step: y must be <= 0");
    const Real& lam = ctx.lambda();
    if (is_inf(y)) return {Real(0), DualBranch::IV};
    if (y < -lam) return {1 / (y + lam), DualBranch::IV};
    if (y < -1 / ctx.R()) return {-1 / (y + lam), DualBranch::I};
    if (y < -1 / lam) return {-y / (lam * y + 1), DualBranch::II};
    return {y / (lam * y + 1), DualBranch::III};
}

std::vector<Real> dual_partition(const HeckeContext& ctx) {
    return {-ctx.lambda(), -1 / ctx.R(), -1 / ctx.lambda()};
}

Real rect_measure(const Real& a, const Real& b, const Real& c, const Real& d) {
    if (!(b > a) || !(d >= c)) throw std::invalid_argument("rect_measure: empty rectangle");
    if (d > a) throw std::domain_error("rect_measure: rectangle crosses the diagonal");
    if (d == a) return pos_inf();
    if (is_inf(c)) return log((b - d) / (a - d));
    return log(((a - c) * (b - d)) / ((b - c) * (a - d)));
}

Real clipped_rect_measure(const Real& a, const Real& b, const Real& c,
                          const Real& d, const Real& t) {
    if (!(t > 0)) throw std::invalid_argument("clipped_rect_measure: t must be > 0");
    if (!(b > a) || !(d >= c)) throw std::invalid_argument("clipped_rect_measure: empty rectangle");
    if (d > a) throw std::domain_error("clipped_rect_measure: rectangle crosses the diagonal");
    auto clamp = [&](const Real& v) {
        if (is_inf(v)) return a;
        if (v < a) return a;
        if (v > b) return b;
        return v;
    };
    Real x1 = is_inf(c) ? a : clamp(c + t);
    Real x2 = clamp(d + t);
    Real total = 0;
    if (x2 > x1) {
        total += (x2 - x1) / t;
        if (!is_inf(c)) total -= log((x2 - c) / (x1 - c));
    }
    if (b > x2) total += rect_measure(x2, b, c, d);
    return total;
}

Real domain_measure(const PlanarDomain& dom, const std::optional<Real>& clip_t) {
    Real total = 0;
    for (const Fiber& f : dom.fibers) {
        Real m = clip_t ? clipped_rect_measure(f.x_lo, f.x_hi, f.y_lo, f.y_hi, *clip_t)
                        : rect_measure(f.x_lo, f.x_hi, f.y_lo, f.y_hi);
        if (is_inf(m)) return pos_inf();
        total += m;
    }
    return total;
}

LenstraGeometry geometric_lenstra(const HeckeContext& ctx, LenstraVariant variant) {
    PlanarDomain dom = (variant == LenstraVariant::Rosen) ? build_omega0(ctx)
                                                          : build_translated_star(ctx);
    LenstraGeometry out;
    out.variant = variant;
    out.t_corner = neg_inf();
    out.argmax_fiber = 0;
    for (std::size_t j = 0; j < dom.fibers.size(); ++j) {
        if (!dom.fibers[j].lower_infinite())
            throw std::logic_error("geometric_lenstra: fiber with a finite floor");
        Real corner = dom.fibers[j].x_hi - dom.fibers[j].y_hi;
        out.corner_values.push_back(corner);
        if (corner > out.t_corner) {
            out.t_corner = corner;
            out.argmax_fiber = j;
        }
    }
    out.constant_corner = 1 / out.t_corner;

    // Independent route: the deficit lambda/t - mu(clip t) vanishes exactly
    // once the slope-1 strip fits under every fiber top; bisect on that.
    // The threshold sits just above the evaluation noise floor so that the
    // quadratic flatness of the deficit near t* costs only ~prec/2 bits.
    Real delta = pow2(-static_cast<long>(ctx.precision_bits()) + 30);
    auto fits = [&](const Real& t) {
        Real deficit = ctx.lambda() / t - domain_measure(dom, t);
        return deficit < delta;
    };
    Real lo = Real(1) / 100, hi = Real(100);
    if (fits(lo) || !fits(hi))
        throw std::logic_error("geometric_lenstra: bisection bracket failed");
    for (int i = 0; i < 2 * static_cast<int>(ctx.precision_bits()) / 3; ++i) {
        Real mid = (lo + hi) / 2;
        (fits(mid) ? hi : lo) = mid;
    }
    out.t_clipped = hi;
    out.constant_clipped = 1 / hi;
    return out;
}

namespace {

WitnessOrbit witness_orbit_even(const HeckeContext& ctx) {
    WitnessOrbit out;
    const FieldPtr& f = ctx.field();
    ZLambda one = ZLambda::from_int(f, 1);
    ZLambda lam = ZLambda::lambda(f);
    ProjPoint x0{one - lam, one};        // tau_0 = 1 - lambda
    ProjPoint y0{-(lam + one), one};     // K_1 = -(lambda + 1)
    ProjPoint x = x0, y = y0;
    const long cap = 64 * ctx.k();
    out.min_theta = pos_inf();
    for (long i = 0; i < cap; ++i) {
        // Theta = 1/(x - y) exactly as a field element
        ZLambda diff_num = x.num * y.den - y.num * x.den;
        ZLambda diff_den = x.den * y.den;
        if (diff_den.sign() < 0) {
            diff_num = -diff_num;
            diff_den = -diff_den;
        }
        Real theta = diff_den.to_real() / diff_num.to_real();
        out.points.push_back(PlanarPoint{x.to_real(), y.to_real()});
        out.theta.push_back(theta);
        if (theta < out.min_theta) out.min_theta = theta;
        // equality Theta == 1/2  <=>  x - y == 2
        if ((diff_num - diff_den * 2).is_zero()) out.equality_indices.push_back(i);
        if (x == ProjPoint{one, one} && y == ProjPoint{-one, one}) out.has_unit_point = true;

        MediantSymbol s = exact_symbol(ctx, x);
        out.symbols.push_back(s);
        if (s == MediantSymbol::Uminus || s == MediantSymbol::Uplus) ++out.rosen_period;
        MobiusZL m = symbol_matrix_inverse(f, s);
        x = m.apply(x);
        y = m.apply(y);
        if (x == x0 && y == y0) {
            out.period = i + 1;
            out.exact_certified = true;
            out.return_distance = 0;
            return out;
        }
    }
    throw std::logic_error("witness_orbit: even orbit did not close");
}

WitnessOrbit witness_orbit_odd(const HeckeContext& ctx) {
    WitnessOrbit out;
    unsigned prec = std::max(512u, 2 * ctx.precision_bits());
    PrecisionScope scope(prec);
    // fresh constants at the working precision
    Real pi;
    mpfr_const_pi(pi.backend().data(), MPFR_RNDN);
    Real lam = 2 * cos(pi / ctx.k());
    Real R = ((lam - 2) + sqrt((2 - lam) * (2 - lam) + 4)) / 2;
    Real C = 1 / (2 * sqrt((1 - lam / 2) * (1 - lam / 2) + 1));
    Real cut = 2 / (3 * lam);

    Real x = R - lam;            // tau_0
    Real y = -(lam + 1 / R);     // K_1 = -1/L_1
    const Real x0 = x, y0 = y;
    Real tol = pow2(-100);
    Real log_dx = 0, log_dy = 0;
    const long cap = 64 * ctx.k();
    out.min_theta = pos_inf();
    for (long i = 0; i < cap; ++i) {
        out.points.push_back(PlanarPoint{x, y});
        Real theta = 1 / (x - y);
        out.theta.push_back(theta);
        if (theta < out.min_theta) out.min_theta = theta;
        if (abs(theta - C) < pow2(-80)) out.equality_indices.push_back(i);

        MediantSymbol s;
        if (x < -cut)
            s = MediantSymbol::Uminus;
        else if (x < 0)
            s = MediantSymbol::Vminus;
        else if (x <= cut)
            s = MediantSymbol::Vplus;
        else
            s = MediantSymbol::Uplus;
        out.symbols.push_back(s);
        if (s == MediantSymbol::Uminus || s == MediantSymbol::Uplus) ++out.rosen_period;
        switch (s) {
            case MediantSymbol::Uminus:
                log_dx += -2 * log(abs(x));
                log_dy += -2 * log(abs(y));
                x = -1 / x - lam;
                y = -1 / y - lam;
                break;
            case MediantSymbol::Uplus:
                log_dx += -2 * log(abs(x));
                log_dy += -2 * log(abs(y));
                x = 1 / x - lam;
                y = 1 / y - lam;
                break;
            case MediantSymbol::Vminus:
                log_dx += -2 * log(abs(lam * x + 1));
                log_dy += -2 * log(abs(lam * y + 1));
                x = -x / (lam * x + 1);
                y = -y / (lam * y + 1);
                break;
            case MediantSymbol::Vplus:
                log_dx += -2 * log(abs(1 - lam * x));
                log_dy += -2 * log(abs(1 - lam * y));
                x = x / (1 - lam * x);
                y = y / (1 - lam * y);
                break;
            default:
                throw std::logic_error("witness_orbit: terminal symbol in odd orbit");
        }
        Real dist = abs(x - x0) + abs(y - y0);
        if (dist < tol) {
            out.period = i + 1;
            out.return_distance = dist;
            // expanding in x, contracting in y: the numeric cycle shadows a
            // genuine periodic orbit
            out.interval_certified = log_dx > log(Real(2)) && log_dy < -log(Real(2));
            return out;
        }
    }
    throw std::logic_error("witness_orbit: odd orbit did not close within 2^-100");
}

}  // namespace

WitnessOrbit witness_orbit(const HeckeContext& ctx) {
    return ctx.even() ? witness_orbit_even(ctx) : witness_orbit_odd(ctx);
}

namespace {

// Inverse-CDF sample of the fiber measure restricted to y <= y_cap.
PlanarPoint sample_fiber_by_measure(const Fiber& f, const Real& y_cap, const Real& y_floor,
                                    RandomStream& rng) {
    Real c = (f.lower_infinite() || f.y_lo < y_floor) ? y_floor : f.y_lo;
    Real d = (f.y_hi < y_cap) ? f.y_hi : y_cap;
    // x from the marginal 1/(x-d) - 1/(x-c)
    Real u = rng.next_real();
    Real la = log((f.x_lo - d) / (f.x_lo - c));
    Real lb = log((f.x_hi - d) / (f.x_hi - c));
    Real w = exp(la + u * (lb - la));
    Real x = (d - c * w) / (1 - w);
    // y | x from 1/(x-y)^2
    Real v = rng.next_real();
    Real inv = (1 - v) / (x - c) + v / (x - d);
    Real y = x - 1 / inv;
    return {x, y};
}

}  // namespace

BijectivityReport check_bijectivity(const HeckeContext& ctx, long n_samples,
                                    std::uint64_t seed) {
    PlanarDomain dom = build_omega_star(ctx);
    const Real collar = pow2(-40);
    const Real y_floor = -10 * ctx.lambda();
    const Real diag_gap = Real(1) / 1000;

    // Fiber weights: measure of the fiber clipped to [y_floor, y_hi] and
    // kept a hair off the diagonal corner.
    std::vector<Real> weights;
    Real total_w = 0;
    for (const Fiber& f : dom.fibers) {
        Real c = (f.lower_infinite() || f.y_lo < y_floor) ? y_floor : f.y_lo;
        Real d = f.y_hi;
        if (d > f.x_lo - diag_gap) d = f.x_lo - diag_gap;  // dodge the corner
        Real w = (d > c) ? rect_measure(f.x_lo, f.x_hi, c, d) : Real(0);
        weights.push_back(w);
        total_w += w;
    }

    const int n_blocks = 16;
    struct Block {
        long boundary = 0, containment = 0, preimage = 0;
        Real max_err{0};
        std::vector<PlanarPoint> offenders;
    };
    auto run = [&](int block) {
        Block blk;
        RandomStream rng(seed, static_cast<std::uint64_t>(block));
        long quota = n_samples / n_blocks + (block < n_samples % n_blocks ? 1 : 0);
        for (long i = 0; i < quota; ++i) {
            // 90% measure-weighted below the diagonal gap, 10% uniform in the
            // clipped rectangle so the corner sliver is exercised too.
            PlanarPoint p;
            if (rng.next_double() < 0.9) {
                Real pick = total_w * rng.next_real();
                std::size_t fj = 0;
                while (fj + 1 < weights.size() && pick > weights[fj]) {
                    pick -= weights[fj];
                    ++fj;
                }
                const Fiber& f = dom.fibers[fj];
                Real cap = f.x_lo - diag_gap;
                p = sample_fiber_by_measure(f, cap, y_floor, rng);
            } else {
                const Fiber& f =
                    dom.fibers[static_cast<std::size_t>(rng.next_u64() % dom.fibers.size())];
                Real c = f.lower_infinite() ? y_floor : f.y_lo;
                p.x = rng.uniform(f.x_lo, f.x_hi);
                p.y = rng.uniform(c, f.y_hi);
            }
            if (classify(dom, p, collar) != Membership::Inside) {
                ++blk.boundary;
                continue;
            }
            NatExtStep st = nat_ext_step(ctx, p);
            Membership fwd = classify(dom, st.p, collar);
            if (fwd == Membership::Outside) {
                ++blk.containment;
                if (blk.offenders.size() < 5) blk.offenders.push_back(p);
                continue;
            }
            if (fwd == Membership::Boundary) {
                ++blk.boundary;
                continue;
            }
            // exactly one inverse branch should land back inside Omega*
            int inside_count = 0;
            bool near_boundary = false;
            Real err{0};
            for (MediantSymbol s : {MediantSymbol::Uminus, MediantSymbol::Vminus,
                                    MediantSymbol::Vplus, MediantSymbol::Uplus}) {
                PlanarPoint q{apply_symbol_forward(ctx, s, st.p.x),
                              apply_symbol_forward(ctx, s, st.p.y)};
                if (branch_of(ctx, q.x) != s) {
                    Real d1 = abs(q.x + ctx.inner_cut()), d2 = abs(q.x),
                         d3 = abs(q.x - ctx.inner_cut());
                    if (d1 < collar || d2 < collar || d3 < collar) near_boundary = true;
                    continue;
                }
                Membership m = classify(dom, q, collar);
                if (m == Membership::Boundary) near_boundary = true;
                if (m == Membership::Inside) {
                    ++inside_count;
                    if (s == st.symbol) err = abs(q.x - p.x) + abs(q.y - p.y);
                }
            }
            if (inside_count != 1) {
                if (near_boundary) {
                    ++blk.boundary;
                } else {
                    ++blk.preimage;
                    if (blk.offenders.size() < 5) blk.offenders.push_back(p);
                }
                continue;
            }
            if (err > blk.max_err) blk.max_err = err;
        }
        return blk;
    };

    std::vector<Block> blocks = run_blocks<Block>(n_blocks, run);
    BijectivityReport rep;
    rep.samples = n_samples;
    rep.max_roundtrip_error = 0;
    for (const Block& b : blocks) {
        rep.boundary_skipped += b.boundary;
        rep.containment_violations += b.containment;
        rep.preimage_violations += b.preimage;
        if (b.max_err > rep.max_roundtrip_error) rep.max_roundtrip_error = b.max_err;
        for (const PlanarPoint& p : b.offenders)
            if (rep.offenders.size() < 10) rep.offenders.push_back(p);
    }
    return rep;
}

std::vector<ImagePiece> image_decomposition(const HeckeContext& ctx,
                                            const PlanarDomain& dom) {
    std::vector<ImagePiece> out;
    std::vector<Real> cuts = {-ctx.inner_cut(), Real(0), ctx.inner_cut()};
    for (const Fiber& f : dom.fibers) {
        std::vector<Real> xs = {f.x_lo};
        for (const Real& c : cuts)
            if (c > f.x_lo && c < f.x_hi) xs.push_back(c);
        xs.push_back(f.x_hi);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            Fiber piece{xs[i], xs[i + 1], f.y_lo, f.y_hi};
            Real mid = (piece.x_lo + piece.x_hi) / 2;
            MediantSymbol s = branch_of(ctx, mid);
            Real ix1 = apply_symbol_inverse(ctx, s, piece.x_lo);
            Real ix2 = apply_symbol_inverse(ctx, s, piece.x_hi);
            Real iy1 = apply_symbol_inverse(ctx, s, piece.y_lo);
            Real iy2 = apply_symbol_inverse(ctx, s, piece.y_hi);
            Fiber image{std::min(ix1, ix2), std::max(ix1, ix2),
                        std::min(iy1, iy2), std::max(iy1, iy2)};
            out.push_back(ImagePiece{piece, s, image});
        }
    }
    return out;
}

bool image_pieces_contained(const HeckeContext& ctx, const std::vector<ImagePiece>& pieces,
                            const Real& tol) {
    PlanarDomain dom = build_omega_star(ctx);
    for (const ImagePiece& pc : pieces) {
        // every fiber overlapping the image x-range must contain its y-range
        bool covered = false;
        for (const Fiber& f : dom.fibers) {
            if (f.x_hi <= pc.image.x_lo + tol || f.x_lo >= pc.image.x_hi - tol) continue;
            covered = true;
            if (pc.image.y_hi > f.y_hi + tol) return false;
            if (!f.lower_infinite() &&
                (pc.image.lower_infinite() || pc.image.y_lo < f.y_lo - tol))
                return false;
        }
        if (!covered) return false;
    }
    return true;
}

InvarianceReport check_invariance(const HeckeContext& ctx, int n_rectangles,
                                  std::uint64_t seed, const Real& tol) {
    PlanarDomain dom = build_omega_star(ctx);
    std::vector<ImagePiece> pieces = image_decomposition(ctx, dom);
    RandomStream rng(seed, 0);
    const Real y_floor = -10 * ctx.lambda();

    InvarianceReport rep;
    rep.max_deviation = 0;
    int made = 0;
    while (made < n_rectangles) {
        const ImagePiece& pc = pieces[static_cast<std::size_t>(rng.next_u64() % pieces.size())];
        const Fiber& f = pc.source;
        Real wx = f.x_hi - f.x_lo;
        Real x1 = f.x_lo + wx * (Real(1) / 20 + rng.next_real() * 2 / 5);
        Real x2 = x1 + wx * (Real(1) / 100 + rng.next_real() * 2 / 5);
        if (x2 >= f.x_hi) continue;
        Real c = f.lower_infinite() ? y_floor : f.y_lo;
        Real top = f.y_hi;
        if (top > x1 - Real(1) / 100) top = x1 - Real(1) / 100;  // stay off the diagonal
        if (!(top > c)) continue;
        Real y1 = c + (top - c) * rng.next_real();
        Real y2 = y1 + (top - y1) * rng.next_real();
        if (!(y2 > y1)) continue;

        Real m1 = rect_measure(x1, x2, y1, y2);
        Real ix1 = apply_symbol_inverse(ctx, pc.symbol, x1);
        Real ix2 = apply_symbol_inverse(ctx, pc.symbol, x2);
        Real iy1 = apply_symbol_inverse(ctx, pc.symbol, y1);
        Real iy2 = apply_symbol_inverse(ctx, pc.symbol, y2);
        Real m2 = rect_measure(std::min(ix1, ix2), std::max(ix1, ix2),
                               std::min(iy1, iy2), std::max(iy1, iy2));
        Real dev = abs(m1 - m2);
        if (dev > rep.max_deviation) rep.max_deviation = dev;
        if (dev > tol) ++rep.violations;
        ++made;
    }
    rep.rectangles = n_rectangles;
    return rep;
}

DualEquationReport check_dual_equation(const HeckeContext& ctx, long n_samples,
                                       std::uint64_t seed) {
    RandomStream rng(seed, 1);
    const Real& lam = ctx.lambda();
    Real margin = Real(1) / 50;
    DualEquationReport rep;
    rep.max_residual = 0;

    struct Ranges {
        Real x_lo, x_hi, y_lo, y_hi;
        MediantSymbol sym;
        DualBranch branch;
    };
    std::vector<Ranges> table = {
        {-ctx.half_lambda(), -ctx.inner_cut(), -lam, -1 / ctx.R(), MediantSymbol::Uminus,
         DualBranch::I},
        {-ctx.inner_cut(), Real(0), -1 / ctx.R(), -1 / lam, MediantSymbol::Vminus,
         DualBranch::II},
        {Real(0), ctx.inner_cut(), -1 / lam, Real(0), MediantSymbol::Vplus, DualBranch::III},
        {ctx.inner_cut(), ctx.two_over_lambda(), -10 * lam, -lam, MediantSymbol::Uplus,
         DualBranch::IV},
    };

    for (long i = 0; i < n_samples; ++i) {
        const Ranges& r = table[static_cast<std::size_t>(rng.next_u64() % table.size())];
        Real wx = r.x_hi - r.x_lo, wy = r.y_hi - r.y_lo;
        Real x = rng.uniform(r.x_lo + margin * wx, r.x_hi - margin * wx);
        Real y = rng.uniform(r.y_lo + margin * wy, r.y_hi - margin * wy);

        MediantStepResult st = mediant_step(ctx, x);
        if (st.symbol != r.sym) throw std::logic_error("check_dual_equation: branch mismatch");
        auto [ty, br] = dual_step(ctx, y);
        if (br != r.branch) throw std::logic_error("check_dual_equation: dual branch mismatch");

        Real sx = st.x;
        Real lhs = 1 / ((sx - y) * (sx - y)) * branch_derivative(ctx, st.symbol, x);
        // |T#'(y)| branch formulas
        Real dual_deriv;
        switch (br) {
            case DualBranch::I:
            case DualBranch::IV:
                dual_deriv = 1 / ((y + lam) * (y + lam));
                break;
            default: {
                Real den = lam * y + 1;
                dual_deriv = 1 / (den * den);
            }
        }
        Real rhs = 1 / ((x - ty) * (x - ty)) * dual_deriv;
        Real res = abs(lhs - rhs);
        if (res > rep.max_residual) rep.max_residual = res;
    }
    rep.samples = n_samples;
    return rep;
}

Real check_induced_composition(const HeckeContext& ctx, int n_points, int rosen_steps,
                               std::uint64_t seed) {
    PlanarDomain om0 = build_omega0(ctx);
    RandomStream rng(seed, 2);
    const Real y_floor = -10 * ctx.lambda();
    Real max_dev = 0;
    for (int i = 0; i < n_points; ++i) {
        const Fiber& f =
            om0.fibers[static_cast<std::size_t>(rng.next_u64() % om0.fibers.size())];
        PlanarPoint p = sample_fiber_by_measure(f, f.y_hi, y_floor, rng);
        PlanarPoint via_rosen = p, via_mediant = p;
        bool skip = false;
        for (int s = 0; s < rosen_steps && !skip; ++s) {
            RosenExtStep rs = rosen_ext_step(ctx, via_rosen);
            if (rs.terminal) {
                skip = true;
                break;
            }
            via_rosen = rs.p;
            // advance S-hat to its next U time
            for (;;) {
                NatExtStep ms = nat_ext_step(ctx, via_mediant);
                if (ms.terminal) {
                    skip = true;
                    break;
                }
                via_mediant = ms.p;
                if (ms.symbol == MediantSymbol::Uminus || ms.symbol == MediantSymbol::Uplus)
                    break;
            }
        }
        if (skip) continue;
        Real dev = abs(via_rosen.x - via_mediant.x) + abs(via_rosen.y - via_mediant.y);
        if (dev > max_dev) max_dev = dev;
    }
    return max_dev;
}

}  // namespace rosen
