#include "rosen/rosen_maps.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rosen {

namespace {

double log2_approx(const Real& v) {
    if (v == 0) return -1e18;
    long exp2;
    // mpfr_get_d_2exp gives v = d * 2^exp2 with 0.5 <= |d| < 1
    double d = mpfr_get_d_2exp(&exp2, v.backend().data(), MPFR_RNDN);
    return std::log2(std::fabs(d)) + static_cast<double>(exp2);
}

/**
 * Error budget of a guarded walk, kept as log2 of an absolute bound.
 * Escalation is requested when an orbit point approaches a branch cut
 * closer than 8x the bound.
 */
struct ErrorBudget {
    unsigned prec;
    double log2_err;

    explicit ErrorBudget(unsigned precision_bits)
        : prec(precision_bits), log2_err(-static_cast<double>(precision_bits)) {}

    bool too_close(const Real& distance) const {
        return log2_approx(distance) < log2_err + 3.0;
    }

    void after_step(double log2_deriv, const Real& image) {
        double rounding = -static_cast<double>(prec) + log2_approx(abs(image) + 1) + 2;
        double propagated = log2_err + log2_deriv;
        log2_err = std::max(propagated, rounding) + 1.0;
    }
};

struct GuardNeedsEscalation {};

// Rosen step with digit-boundary guard: the digit r flips when
// |1/(lambda x)| + 1/2 crosses an integer.
RosenStep guarded_rosen_step(const HeckeContext& ctx, const Real& x,
                             ErrorBudget* guard) {
    if (!ctx.in_rosen_interval(x))
        throw std::domain_error("rosen_step: x outside [-lambda/2, lambda/2)");
    RosenStep out{Real(0), Digit{+1, 0}, false};
    if (x == 0) {
        out.terminal = true;
        return out;
    }
    int eps = (x > 0) ? 1 : -1;
    Real ax = abs(x);
    Real t = 1 / (ctx.lambda() * ax) + Real(1) / 2;
    Real frac = t - floor(t);
    if (guard) {
        // distance to the digit boundary, measured back in x units
        Real dist_t = (frac < Real(1) / 2) ? frac : 1 - frac;
        Real dist_x = dist_t * ctx.lambda() * ax * ax;
        if (guard->too_close(dist_x)) throw GuardNeedsEscalation{};
    }
    std::int64_t r = floor_to_int64(t);
    out.digit = Digit{eps, r};
    out.x = 1 / ax - ctx.lambda() * static_cast<long>(r);
    if (guard) guard->after_step(-2 * log2_approx(ax), out.x);
    return out;
}

MediantStepResult guarded_mediant_step(const HeckeContext& ctx, const Real& x,
                                       ErrorBudget* guard) {
    if (!ctx.in_mediant_interval(x))
        throw std::domain_error("mediant_step: x outside [-lambda/2, 2/lambda)");
    MediantStepResult out{Real(0), MediantSymbol::Ident, false};
    if (x == 0) {
        out.terminal = true;
        return out;
    }
    const Real& cut = ctx.inner_cut();
    if (guard) {
        Real d1 = abs(x + cut), d2 = abs(x), d3 = abs(x - cut);
        Real dist = (d1 < d2) ? d1 : d2;
        if (d3 < dist) dist = d3;
        if (guard->too_close(dist)) throw GuardNeedsEscalation{};
    }
    double log2_deriv = 0;
    if (x < -cut) {
        out.symbol = MediantSymbol::Uminus;
        out.x = -1 / x - ctx.lambda();
        log2_deriv = -2 * log2_approx(abs(x));
    } else if (x < 0) {
        out.symbol = MediantSymbol::Vminus;
        Real den = ctx.lambda() * x + 1;
        out.x = -x / den;
        log2_deriv = -2 * log2_approx(abs(den));
    } else if (x <= cut) {
        out.symbol = MediantSymbol::Vplus;
        Real den = 1 - ctx.lambda() * x;
        out.x = x / den;
        log2_deriv = -2 * log2_approx(abs(den));
    } else {
        out.symbol = MediantSymbol::Uplus;
        out.x = 1 / x - ctx.lambda();
        log2_deriv = -2 * log2_approx(abs(x));
    }
    if (guard) guard->after_step(log2_deriv, out.x);
    return out;
}

constexpr unsigned kMaxEscalationBits = 1u << 14;

// Run a short walk with precision escalation; `body` receives the working
// precision and a fresh copy of x, and throws GuardNeedsEscalation.
template <typename Body>
void run_guarded(const HeckeContext& ctx, Body&& body) {
    for (unsigned prec = ctx.precision_bits();; prec *= 2) {
        if (prec > kMaxEscalationBits)
            throw std::domain_error(
                "guarded orbit: input sits on (or too near) a branch boundary");
        PrecisionScope scope(prec);
        try {
            body(prec);
            return;
        } catch (const GuardNeedsEscalation&) {
            continue;
        }
    }
}

}  // namespace

const char* symbol_name(MediantSymbol s) {
    switch (s) {
        case MediantSymbol::Uminus: return "U-";
        case MediantSymbol::Uplus: return "U+";
        case MediantSymbol::Vminus: return "V-";
        case MediantSymbol::Vplus: return "V+";
        case MediantSymbol::Ident: return "Id";
    }
    return "?";
}

MobiusZL symbol_matrix(const FieldPtr& field, MediantSymbol s) {
    switch (s) {
        case MediantSymbol::Uminus: return MobiusZL::u_minus(field);
        case MediantSymbol::Uplus: return MobiusZL::u_plus(field);
        case MediantSymbol::Vminus: return MobiusZL::v_minus(field);
        case MediantSymbol::Vplus: return MobiusZL::v_plus(field);
        case MediantSymbol::Ident: return MobiusZL::identity(field);
    }
    throw std::logic_error("symbol_matrix: bad symbol");
}

MobiusZL symbol_matrix_inverse(const FieldPtr& field, MediantSymbol s) {
    return symbol_matrix(field, s).inverse();
}

RosenStep rosen_step(const HeckeContext& ctx, const Real& x) {
    return guarded_rosen_step(ctx, x, nullptr);
}

MediantStepResult mediant_step(const HeckeContext& ctx, const Real& x) {
    return guarded_mediant_step(ctx, x, nullptr);
}

DigitString expand(const HeckeContext& ctx, const Real& x, int n) {
    DigitString out;
    try {
        run_guarded(ctx, [&](unsigned prec) {
            DigitString attempt;
            ErrorBudget guard(prec);
            Real cur(x, Real::default_precision());
            for (int i = 0; i < n; ++i) {
                RosenStep st = guarded_rosen_step(ctx, cur, &guard);
                if (st.terminal) {
                    attempt.terminated = true;
                    break;
                }
                attempt.digits.push_back(st.digit);
                cur = st.x;
            }
            out = std::move(attempt);
        });
    } catch (const std::domain_error&) {
        out.boundary_stopped = true;
    }
    return out;
}

SymbolString symbol_expand(const HeckeContext& ctx, const Real& x, int n) {
    SymbolString out;
    try {
        run_guarded(ctx, [&](unsigned prec) {
            SymbolString attempt;
            ErrorBudget guard(prec);
            Real cur(x, Real::default_precision());
            for (int i = 0; i < n; ++i) {
                MediantStepResult st = guarded_mediant_step(ctx, cur, &guard);
                if (st.terminal) {
                    attempt.terminated = true;
                    break;
                }
                attempt.symbols.push_back(st.symbol);
                cur = st.x;
            }
            out = std::move(attempt);
        });
    } catch (const std::domain_error&) {
        out.boundary_stopped = true;
    }
    return out;
}

BigInt field_floor(const ZLambda& num, const ZLambda& den) {
    if (den.sign() <= 0) throw std::invalid_argument("field_floor: den must be > 0");
    for (unsigned prec = 128; prec <= kMaxEscalationBits; prec *= 2) {
        PrecisionScope scope(prec);
        Real ratio = num.eval(prec).mid() / den.eval(prec).mid();
        BigInt m = floor(ratio).convert_to<BigInt>();
        // verify m <= num/den < m + 1 exactly
        if ((num - den * m).sign() >= 0 && (num - den * (m + 1)).sign() < 0)
            return m;
    }
    throw std::logic_error("field_floor: could not certify floor");
}

Digit exact_digit(const HeckeContext& ctx, const ProjPoint& x) {
    const FieldPtr& f = ctx.field();
    int sden = x.den.sign();
    if (sden == 0) throw std::domain_error("exact_digit: x is infinite");
    ZLambda p = (sden > 0) ? x.num : -x.num;
    ZLambda q = (sden > 0) ? x.den : -x.den;
    int eps = p.sign();
    if (eps == 0) throw std::domain_error("exact_digit: x = 0 is terminal");
    ZLambda ap = (eps > 0) ? p : -p;
    // |1/(lambda x)| + 1/2 = (2 q + lambda |p|) / (2 lambda |p|)
    ZLambda lam = ZLambda::lambda(f);
    ZLambda num = q * 2 + lam * ap;
    ZLambda den = lam * ap * 2;
    BigInt r = field_floor(num, den);
    if (r < 1) throw std::logic_error("exact_digit: r < 1");
    if (r > (BigInt(1) << 62)) throw std::domain_error("exact_digit: digit overflow");
    return Digit{eps, static_cast<std::int64_t>(r)};
}

MediantSymbol exact_symbol(const HeckeContext& ctx, const ProjPoint& x) {
    const FieldPtr& f = ctx.field();
    int sden = x.den.sign();
    if (sden == 0) throw std::domain_error("exact_symbol: x is infinite");
    ZLambda p = (sden > 0) ? x.num : -x.num;
    ZLambda q = (sden > 0) ? x.den : -x.den;
    int sx = p.sign();
    if (sx == 0) return MediantSymbol::Ident;
    ZLambda lam = ZLambda::lambda(f);
    // x vs -2/(3 lambda): sign(3 lambda p + 2 q)
    int cmp_lo = (lam * p * 3 + q * 2).sign();
    if (sx < 0) return (cmp_lo < 0) ? MediantSymbol::Uminus : MediantSymbol::Vminus;
    // x vs 2/(3 lambda): sign(3 lambda p - 2 q)
    int cmp_hi = (lam * p * 3 - q * 2).sign();
    return (cmp_hi <= 0) ? MediantSymbol::Vplus : MediantSymbol::Uplus;
}

DigitString expand_exact(const HeckeContext& ctx, const ProjPoint& x, int n) {
    DigitString out;
    ProjPoint cur = x;
    for (int i = 0; i < n; ++i) {
        if (cur.num.is_zero()) {
            out.terminated = true;
            break;
        }
        Digit d = exact_digit(ctx, cur);
        out.digits.push_back(d);
        cur = MobiusZL::rosen_branch(ctx.field(), d.eps, BigInt(d.r)).apply(cur);
    }
    return out;
}

SymbolString symbol_expand_exact(const HeckeContext& ctx, const ProjPoint& x, int n) {
    SymbolString out;
    ProjPoint cur = x;
    for (int i = 0; i < n; ++i) {
        if (cur.num.is_zero()) {
            out.terminated = true;
            break;
        }
        MediantSymbol s = exact_symbol(ctx, cur);
        out.symbols.push_back(s);
        cur = symbol_matrix_inverse(ctx.field(), s).apply(cur);
    }
    return out;
}

InducedReport induced_length(const HeckeContext& ctx, const Real& x, const Real& tol) {
    InducedReport rep;
    rep.deviation = 0;
    try {
        run_guarded(ctx, [&](unsigned prec) {
            InducedReport attempt;
            attempt.deviation = 0;
            ErrorBudget guard_t(prec), guard_s(prec);
            Real cur(x, Real::default_precision());
            RosenStep t = guarded_rosen_step(ctx, cur, &guard_t);
            if (t.terminal) {
                attempt.terminal = true;
                rep = attempt;
                return;
            }
            Real s = cur;
            long steps = 0;
            MediantSymbol sym;
            do {
                MediantStepResult m = guarded_mediant_step(ctx, s, &guard_s);
                if (m.terminal) {
                    attempt.terminal = true;
                    rep = attempt;
                    return;
                }
                sym = m.symbol;
                s = m.x;
                ++steps;
            } while (sym != MediantSymbol::Uminus && sym != MediantSymbol::Uplus);
            attempt.length = steps - 1;  // ell(x): V-steps before the first U
            attempt.deviation = abs(s - t.x);
            attempt.verified = attempt.deviation < tol;
            attempt.matches_first_digit = (attempt.length + 1 == t.digit.r);
            rep = attempt;
        });
    } catch (const std::domain_error&) {
        rep.boundary_stopped = true;
    }
    return rep;
}

ConvergentState ConvergentState::initial(const FieldPtr& field) {
    return {ZLambda::from_int(field, 1), ZLambda::from_int(field, 0),
            ZLambda::from_int(field, 0), ZLambda::from_int(field, 1)};
}

ConvergentState ConvergentState::advance(const FieldPtr& field, const Digit& d) const {
    ZLambda lr = ZLambda::lambda(field) * BigInt(d.r);
    ZLambda e = ZLambda::from_int(field, d.eps);
    return {p_cur, lr * p_cur + e * p_prev, q_cur, lr * q_cur + e * q_prev};
}

ZLambda ConvergentState::det_abs() const {
    ZLambda det = p_prev * q_cur - q_prev * p_cur;
    return (det.sign() < 0) ? -det : det;
}

std::vector<ConvergentState> convergents(const HeckeContext& ctx,
                                         const std::vector<Digit>& digits) {
    std::vector<ConvergentState> out;
    out.reserve(digits.size());
    ConvergentState st = ConvergentState::initial(ctx.field());
    for (const Digit& d : digits) {
        st = st.advance(ctx.field(), d);
        out.push_back(st);
    }
    return out;
}

std::vector<MediantEntry> mediant_convergents_from_symbols(
    const HeckeContext& ctx, const std::vector<MediantSymbol>& symbols) {
    std::vector<MediantEntry> out;
    out.reserve(symbols.size());
    MobiusZL prod = MobiusZL::identity(ctx.field());
    long level = 0, offset = 0;
    for (MediantSymbol s : symbols) {
        if (s == MediantSymbol::Ident) break;
        prod = prod * symbol_matrix(ctx.field(), s);
        bool is_u = (s == MediantSymbol::Uminus || s == MediantSymbol::Uplus);
        if (is_u) {
            ++level;
            offset = 0;
        } else {
            ++offset;
        }
        MediantEntry e{prod.a, prod.c, is_u, is_u ? level - 1 : level, offset};
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<MediantEntry> mediant_convergents(const HeckeContext& ctx,
                                              const Real& x, int depth) {
    if (depth < 1) throw std::invalid_argument("mediant_convergents: depth >= 1");
    SymbolString syms = symbol_expand(ctx, x, depth);
    return mediant_convergents_from_symbols(ctx, syms.symbols);
}

Real theta_direct(const HeckeContext& ctx, const Real& x, const ZLambda& a,
                  const ZLambda& c) {
    if (c.sign() <= 0) throw std::invalid_argument("theta_direct: c must be > 0");
    unsigned prec = ctx.precision_bits();
    Real cv = c.eval(prec).mid();
    Real av = a.eval(prec).mid();
    return cv * abs(cv * x - av);
}

Real apply_symbol_inverse(const HeckeContext& ctx, MediantSymbol s, const Real& v) {
    const Real& lam = ctx.lambda();
    bool infinite = boost::multiprecision::isinf(v);
    switch (s) {
        case MediantSymbol::Uminus:
            if (infinite) return -lam;
            if (v == 0) return Real(-std::numeric_limits<double>::infinity());
            return -1 / v - lam;
        case MediantSymbol::Uplus:
            if (infinite) return -lam;
            if (v == 0) return Real(-std::numeric_limits<double>::infinity());
            return 1 / v - lam;
        case MediantSymbol::Vminus: {
            if (infinite) return -1 / lam;
            Real den = lam * v + 1;
            if (den == 0) return Real(-std::numeric_limits<double>::infinity());
            return -v / den;
        }
        case MediantSymbol::Vplus: {
            if (infinite) return -1 / lam;
            Real den = 1 - lam * v;
            if (den == 0) return Real(-std::numeric_limits<double>::infinity());
            return v / den;
        }
        case MediantSymbol::Ident:
            return v;
    }
    throw std::logic_error("apply_symbol_inverse: bad symbol");
}

ThetaSeries theta_orbit(const HeckeContext& ctx, const Real& x, int n) {
    if (n < 1) throw std::invalid_argument("theta_orbit: n >= 1");
    ThetaSeries out;
    SymbolString syms = symbol_expand(ctx, x, n);
    out.terminated = syms.terminated;
    out.boundary_stopped = syms.boundary_stopped;

    // Symbols are branch-certified by the guarded walk; replay them on both
    // coordinates, the y side exactly.
    Real cur = x;
    ProjPoint y{ZLambda::from_int(ctx.field(), 1), ZLambda::from_int(ctx.field(), 0)};
    for (MediantSymbol s : syms.symbols) {
        cur = apply_symbol_inverse(ctx, s, cur);
        y = symbol_matrix_inverse(ctx.field(), s).apply(y);
        Real yv = y.to_real();
        out.symbols.push_back(s);
        out.xs.push_back(cur);
        out.ys.push_back(yv);
        out.theta.push_back(1 / (cur - yv));
    }
    return out;
}

std::string format_digits(const std::vector<Digit>& digits) {
    std::ostringstream os;
    for (const Digit& d : digits)
        os << "(" << (d.eps > 0 ? "+1" : "-1") << ":" << d.r << ")";
    return os.str();
}

std::string format_symbols(const std::vector<MediantSymbol>& symbols) {
    std::ostringstream os;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i) os << " ";
        os << symbol_name(symbols[i]);
    }
    return os.str();
}

}  // namespace rosen
