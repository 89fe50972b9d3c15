#include <CLI11.hpp>
#include <json.hpp>

#include "rosen/ergodic_stats.hpp"
#include "rosen/rng.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace rosen;
using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

struct GlobalConfig {
    int k = 8;
    unsigned precision = 256;
    std::uint64_t seed = 1;
    std::string format = "text";
    std::string out;
    unsigned digits = 30;
};

void emit(const GlobalConfig& cfg, const std::string& payload) {
    if (cfg.out.empty()) {
        std::cout << payload << "\n";
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
        f << payload << "\n";
    }
}

std::string fmt(const Real& v, unsigned digits) { return to_decimal(v, digits); }

/**
 * Exact input literals: decimal numbers or rational expressions in lambda,
 * e.g. "0.3", "-lambda/2", "(1-l)/2", "2/(3*l)". Parsed into an exact
 * element of Q(lambda) so algebraic constants like (1-lambda)/2 are
 * representable losslessly.
 */
class LiteralParser {
public:
    LiteralParser(const FieldPtr& field, std::string text)
        : field_(field), text_(std::move(text)) {}

    ProjPoint parse() {
        pos_ = 0;
        ProjPoint v = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw std::invalid_argument("trailing characters in literal: " + text_);
        return v;
    }

private:
    ZLambda zint(const BigInt& n) { return ZLambda::from_int(field_, n); }
    ProjPoint make_int(const BigInt& n) { return {zint(n), zint(1)}; }

    static ProjPoint add(const ProjPoint& a, const ProjPoint& b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    static ProjPoint sub(const ProjPoint& a, const ProjPoint& b) {
        return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    static ProjPoint mul(const ProjPoint& a, const ProjPoint& b) {
        return {a.num * b.num, a.den * b.den};
    }
    static ProjPoint div(const ProjPoint& a, const ProjPoint& b) {
        if (b.num.is_zero()) throw std::invalid_argument("division by zero in literal");
        return {a.num * b.den, a.den * b.num};
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ProjPoint parse_expr() {
        ProjPoint v = parse_term();
        for (;;) {
            if (eat('+'))
                v = add(v, parse_term());
            else if (eat('-'))
                v = sub(v, parse_term());
            else
                return v;
        }
    }

    ProjPoint parse_term() {
        ProjPoint v = parse_factor();
        for (;;) {
            if (eat('*'))
                v = mul(v, parse_factor());
            else if (eat('/'))
                v = div(v, parse_factor());
            else
                return v;
        }
    }

    ProjPoint parse_factor() {
        skip_ws();
        if (eat('(')) {
            ProjPoint v = parse_expr();
            if (!eat(')')) throw std::invalid_argument("missing ')' in literal");
            return v;
        }
        if (eat('-')) return sub(make_int(0), parse_factor());
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            std::string word = text_.substr(start, pos_ - start);
            if (word == "l" || word == "lambda") return {ZLambda::lambda(field_), zint(1)};
            throw std::invalid_argument("unknown symbol in literal: " + word);
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ == start) throw std::invalid_argument("cannot parse literal: " + text_);
        std::string num = text_.substr(start, pos_ - start);
        std::size_t dot = num.find('.');
        if (dot == std::string::npos) return make_int(BigInt(num));
        std::string digits = num.substr(0, dot) + num.substr(dot + 1);
        BigInt scale = 1;
        for (std::size_t i = 0; i < num.size() - dot - 1; ++i) scale *= 10;
        return {zint(BigInt(digits)), zint(scale)};
    }

    FieldPtr field_;
    std::string text_;
    std::size_t pos_ = 0;
};

ProjPoint parse_x(const HeckeContext& ctx, const std::string& text) {
    return LiteralParser(ctx.field(), text).parse();
}

json fiber_json(const Fiber& f, unsigned digits) {
    json j;
    j["x_lo"] = fmt(f.x_lo, digits);
    j["x_hi"] = fmt(f.x_hi, digits);
    j["y_lo"] = f.lower_infinite() ? json("-inf") : json(fmt(f.y_lo, digits));
    j["y_hi"] = fmt(f.y_hi, digits);
    return j;
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo, hi;
    int steps;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 2 ||
        !(hi > lo) || !(lo > 0))
        throw std::invalid_argument("grid: expected lo:hi:steps with 0 < lo < hi");
    std::vector<double> g;
    for (int i = 0; i < steps; ++i) g.push_back(lo + (hi - lo) * i / (steps - 1));
    return g;
}

int cmd_context(const GlobalConfig& cfg) {
    HeckeContext ctx(cfg.k, cfg.precision);
    if (cfg.format != "text") {
        emit(cfg, ctx.to_json(cfg.digits));
        return 0;
    }
    ConstantsReport cr = ctx.closed_form_constants();
    std::ostringstream os;
    os << "Hecke index k = " << ctx.k() << " (" << (ctx.even() ? "even" : "odd")
       << ", ell = " << ctx.ell() << ")\n";
    os << "lambda          = " << fmt(ctx.lambda(), cfg.digits) << "\n";
    os << "R               = " << fmt(ctx.R(), cfg.digits) << "\n";
    os << "C(k)            = " << fmt(ctx.hurwitz_C(), cfg.digits) << "\n";
    os << "Rosen Lenstra   = " << fmt(cr.rosen_lenstra, cfg.digits) << "\n";
    os << "mediant Lenstra = " << fmt(cr.mediant_lenstra, cfg.digits) << "\n";
    os << "min_poly        = [";
    for (std::size_t i = 0; i < ctx.min_poly().size(); ++i)
        os << (i ? ", " : "") << ctx.min_poly()[i].str();
    os << "]\nphi             = [";
    for (std::size_t i = 0; i < ctx.phi().size(); ++i)
        os << (i ? ", " : "") << fmt(ctx.phi()[i], 12);
    os << "]\nL               = [";
    for (std::size_t i = 1; i < ctx.L().size(); ++i)
        os << (i > 1 ? ", " : "") << fmt(ctx.L()[i], 12);
    os << "]";
    emit(cfg, os.str());
    return 0;
}

int cmd_expand(const GlobalConfig& cfg, const std::string& x_text, int depth) {
    HeckeContext ctx(cfg.k, cfg.precision);
    ProjPoint x = parse_x(ctx, x_text);
    Real xv = x.num.is_zero() ? Real(0) : x.to_real();
    {
        // exact membership in [-lambda/2, lambda/2): boundary literals like
        // -lambda/2 must not fall to floating roundoff
        int sden = x.den.sign();
        ZLambda num = (sden > 0) ? x.num : -x.num;
        ZLambda den = (sden > 0) ? x.den : -x.den;
        ZLambda lam = ZLambda::lambda(ctx.field());
        if ((num * 2 + lam * den).sign() < 0 || (num * 2 - lam * den).sign() >= 0)
            throw std::domain_error("x outside [-lambda/2, lambda/2)");
    }

    DigitString digits = expand_exact(ctx, x, depth);
    SymbolString symbols = symbol_expand_exact(ctx, x, 4 * depth);
    auto convs = convergents(ctx, digits.digits);
    auto mediants = mediant_convergents_from_symbols(ctx, symbols.symbols);
    ThetaSeries theta =
        digits.terminated ? ThetaSeries{} : theta_orbit(ctx, xv, std::min(depth * 4, 200));

    json j;
    j["schema_version"] = kSchemaVersion;
    j["k"] = ctx.k();
    j["x"] = fmt(xv, cfg.digits);
    j["digits"] = format_digits(digits.digits);
    j["terminated"] = digits.terminated;
    j["symbols"] = format_symbols(symbols.symbols);
    j["convergents"] = json::array();
    for (const auto& st : convs) {
        json e;
        e["p"] = st.p_cur.coeff_strings();
        e["q"] = st.q_cur.coeff_strings();
        e["value"] = fmt(st.p_cur.to_real() / st.q_cur.to_real(), cfg.digits);
        j["convergents"].push_back(e);
    }
    j["mediants"] = json::array();
    for (const auto& m : mediants) {
        if (j["mediants"].size() >= static_cast<std::size_t>(depth)) break;
        json e;
        e["kind"] = m.principal ? "principal" : "mediant";
        e["level"] = m.level;
        e["offset"] = m.offset;
        e["num"] = m.num.coeff_strings();
        e["den"] = m.den.coeff_strings();
        e["value"] = fmt(m.num.to_real() / m.den.to_real(), cfg.digits);
        j["mediants"].push_back(e);
    }
    j["theta"] = json::array();
    for (const Real& t : theta.theta) j["theta"].push_back(fmt(t, cfg.digits));

    if (cfg.format != "text") {
        emit(cfg, j.dump(2));
        return 0;
    }
    std::ostringstream os;
    os << "x        = " << j["x"].get<std::string>() << "\n";
    os << "digits   = " << j["digits"].get<std::string>()
       << (digits.terminated ? "   (finite: G_k-rational)" : "") << "\n";
    os << "symbols  = " << j["symbols"].get<std::string>() << "\n";
    os << "convergents:\n";
    for (const auto& e : j["convergents"])
        os << "  p = " << e["p"].dump() << "  q = " << e["q"].dump()
           << "  value = " << e["value"].get<std::string>() << "\n";
    os << "interleaved mediant list:\n";
    for (const auto& e : j["mediants"])
        os << "  [" << e["kind"].get<std::string>() << " m=" << e["level"]
           << " l=" << e["offset"] << "] " << e["value"].get<std::string>() << "\n";
    os << "theta series:";
    for (const auto& t : j["theta"]) os << " " << t.get<std::string>().substr(0, 12);
    emit(cfg, os.str());
    return 0;
}

int cmd_domain(const GlobalConfig& cfg, bool dual, bool image) {
    HeckeContext ctx(cfg.k, cfg.precision);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["k"] = ctx.k();
    PlanarDomain om0 = build_omega0(ctx), oms = build_omega_star(ctx);
    j["omega0"] = json::array();
    for (const Fiber& f : om0.fibers) j["omega0"].push_back(fiber_json(f, cfg.digits));
    j["omega_star"] = json::array();
    for (const Fiber& f : oms.fibers) j["omega_star"].push_back(fiber_json(f, cfg.digits));
    if (image) {
        j["image"] = json::array();
        for (const ImagePiece& pc : image_decomposition(ctx, oms)) {
            json e;
            e["symbol"] = symbol_name(pc.symbol);
            e["source"] = fiber_json(pc.source, cfg.digits);
            e["image"] = fiber_json(pc.image, cfg.digits);
            j["image"].push_back(e);
        }
    }
    if (dual) {
        j["dual_partition"] = json::array();
        for (const Real& c : dual_partition(ctx))
            j["dual_partition"].push_back(fmt(c, cfg.digits));
    }
    emit(cfg, j.dump(2));
    return 0;
}

int cmd_witness(const GlobalConfig& cfg) {
    HeckeContext ctx(cfg.k, cfg.precision);
    WitnessOrbit w = witness_orbit(ctx);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["k"] = ctx.k();
    j["tau0"] = fmt(w.points[0].x, cfg.digits);
    j["period"] = w.period;
    j["rosen_period"] = w.rosen_period;
    j["min_theta"] = fmt(w.min_theta, cfg.digits);
    j["hurwitz_C"] = fmt(ctx.hurwitz_C(), cfg.digits);
    j["certification"] =
        w.exact_certified ? "exact" : (w.interval_certified ? "interval" : "none");
    j["return_distance"] = fmt(w.return_distance, 8);
    j["equality_indices"] = w.equality_indices;
    j["has_unit_point"] = w.has_unit_point;
    j["points"] = json::array();
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        json e;
        e["x"] = fmt(w.points[i].x, cfg.digits);
        e["y"] = fmt(w.points[i].y, cfg.digits);
        e["theta"] = fmt(w.theta[i], cfg.digits);
        e["symbol"] = symbol_name(w.symbols[i]);
        j["points"].push_back(e);
    }
    if (cfg.format != "text") {
        emit(cfg, j.dump(2));
        return 0;
    }
    std::ostringstream os;
    os << "witness tau_0 = " << j["tau0"].get<std::string>() << " (k = " << ctx.k() << ")\n"
       << "S-hat period " << w.period << ", T-hat period " << w.rosen_period << ", "
       << j["certification"].get<std::string>() << " certification\n"
       << "min Theta = " << j["min_theta"].get<std::string>()
       << "  vs  C(k) = " << j["hurwitz_C"].get<std::string>() << "\n";
    for (const auto& e : j["points"])
        os << "  (" << e["x"].get<std::string>().substr(0, 14) << ", "
           << e["y"].get<std::string>().substr(0, 14)
           << ")  Theta = " << e["theta"].get<std::string>().substr(0, 14) << "  "
           << e["symbol"].get<std::string>() << "\n";
    emit(cfg, os.str());
    return 0;
}

json run_verify(const HeckeContext& ctx, long samples, std::uint64_t seed) {
    json checks = json::array();
    auto add = [&](const std::string& name, bool pass, const json& detail) {
        json c;
        c["name"] = name;
        c["pass"] = pass;
        for (auto& [key, val] : detail.items()) c[key] = val;
        checks.push_back(c);
    };

    {
        BijectivityReport r = check_bijectivity(ctx, samples, seed);
        json d;
        d["samples"] = r.samples;
        d["containment_violations"] = r.containment_violations;
        d["preimage_violations"] = r.preimage_violations;
        d["boundary_skipped"] = r.boundary_skipped;
        d["max_roundtrip_error"] = fmt(r.max_roundtrip_error, 8);
        d["offenders"] = json::array();
        for (const PlanarPoint& p : r.offenders) {
            json pt;
            pt["x"] = fmt(p.x, 20);
            pt["y"] = fmt(p.y, 20);
            d["offenders"].push_back(pt);
        }
        add("bijectivity", r.containment_violations == 0 && r.preimage_violations == 0, d);
    }
    {
        InvarianceReport r = check_invariance(ctx, 100, seed + 1, pow2(-40));
        json d;
        d["rectangles"] = r.rectangles;
        d["max_deviation"] = fmt(r.max_deviation, 8);
        add("measure_invariance", r.violations == 0, d);
    }
    {
        DualEquationReport r = check_dual_equation(ctx, 1000, seed + 2);
        json d;
        d["samples"] = r.samples;
        d["max_residual"] = fmt(r.max_residual, 8);
        add("dual_functional_equation", r.max_residual < 1e-12, d);
    }
    {
        RandomStream rng(seed + 3, 0);
        Real tol = Real(1) / Real("1e12");
        long tested = 0;
        bool ok = true;
        Real worst = 0;
        while (tested < 2000) {
            Real x = rng.uniform(-ctx.half_lambda(), ctx.half_lambda());
            InducedReport r = induced_length(ctx, x, tol);
            if (r.terminal || r.boundary_stopped) continue;
            ok = ok && r.verified && r.matches_first_digit;
            if (r.deviation > worst) worst = r.deviation;
            ++tested;
        }
        json d;
        d["samples"] = tested;
        d["max_deviation"] = fmt(worst, 8);
        add("induced_relation", ok, d);
    }
    {
        WitnessOrbit w = witness_orbit(ctx);
        json d;
        d["period"] = w.period;
        d["rosen_period"] = w.rosen_period;
        d["min_theta"] = fmt(w.min_theta, 20);
        d["certification"] =
            w.exact_certified ? "exact" : (w.interval_certified ? "interval" : "none");
        bool pass = (w.exact_certified || w.interval_certified) &&
                    w.min_theta >= ctx.hurwitz_C() - Real(1) / Real("1e12") &&
                    (!ctx.even() || w.has_unit_point);
        add("witness_orbit", pass, d);
    }
    {
        ConstantsReport cf = ctx.closed_form_constants();
        auto rosen = geometric_lenstra(ctx, LenstraVariant::Rosen);
        auto med = geometric_lenstra(ctx, LenstraVariant::Mediant);
        json d;
        d["rosen_geometric"] = fmt(rosen.constant_corner, 20);
        d["rosen_closed_form"] = fmt(cf.rosen_lenstra, 20);
        d["mediant_geometric"] = fmt(med.constant_corner, 20);
        d["mediant_closed_form"] = fmt(cf.mediant_lenstra, 20);
        d["mediant_clipped_route"] = fmt(med.constant_clipped, 20);
        bool pass = abs(rosen.constant_corner - cf.rosen_lenstra) < 1e-10 &&
                    abs(med.constant_corner - cf.mediant_lenstra) < 1e-10 &&
                    abs(med.constant_clipped - med.constant_corner) < 1e-10 &&
                    cf.mediant_lenstra > cf.hurwitz_C;
        add("geometric_constants", pass, d);
    }
    {
        RandomStream rng(seed + 4, 0);
        bool ok = true;
        for (int i = 0; i < 50; ++i) {
            Real x = rng.uniform(-ctx.half_lambda(), ctx.half_lambda());
            DigitString dd = expand(ctx, x, 20);
            auto cs = convergents(ctx, dd.digits);
            for (const auto& st : cs) {
                bool good = st.det_abs() == ZLambda::from_int(ctx.field(), 1) &&
                            st.q_cur.sign() > 0;
                ok = ok && good;
            }
        }
        json d;
        d["expansions"] = 50;
        add("determinant_invariant", ok, d);
    }
    return checks;
}

int cmd_verify(const GlobalConfig& cfg, long samples) {
    HeckeContext ctx(cfg.k, cfg.precision);
    json checks = run_verify(ctx, samples, cfg.seed);
    bool all = true;
    json failures = json::array();
    for (const auto& c : checks) {
        if (!c["pass"].get<bool>()) {
            all = false;
            failures.push_back(c["name"]);
        }
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["k"] = cfg.k;
    j["seed"] = cfg.seed;
    j["samples"] = samples;
    j["all_pass"] = all;
    j["failures"] = failures;
    j["checks"] = checks;
    if (cfg.format == "text") {
        std::ostringstream os;
        for (const auto& c : checks)
            os << (c["pass"].get<bool>() ? "PASS " : "FAIL ")
               << c["name"].get<std::string>() << "\n";
        os << (all ? "all checks passed" : "SOME CHECKS FAILED");
        emit(cfg, os.str());
    } else {
        emit(cfg, j.dump(2));
    }
    return all ? 0 : 1;
}

int cmd_stats(const GlobalConfig& cfg, long n_iter, int seeds, const std::string& grid_spec,
              bool entropy_only, bool breakpoint_only, bool borel_only, bool counting_only) {
    HeckeContext ctx(cfg.k, cfg.precision);
    bool all = !(entropy_only || breakpoint_only || borel_only || counting_only);
    std::vector<double> grid = parse_grid(grid_spec);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["k"] = cfg.k;
    j["seed"] = cfg.seed;
    j["n_iter"] = n_iter;

    std::ostringstream csv;
    csv << "t,count,count_over_N,count_over_Nt\n";

    if (all || counting_only) {
        RandomStream rng(cfg.seed, 424242);
        Real x = rng.uniform(-ctx.half_lambda(), ctx.half_lambda());
        CountingReport rep = count_small_theta(ctx, x, n_iter, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double cn = static_cast<double>(rep.counts[i]) / static_cast<double>(rep.N);
            csv << grid[i] << "," << rep.counts[i] << "," << cn << "," << cn / grid[i]
                << "\n";
        }
        json c;
        c["N"] = rep.N;
        c["terminated"] = rep.terminated;
        j["counting"] = c;
    }
    if (all || breakpoint_only) {
        BreakpointEstimate est = breakpoint_estimate(ctx, seeds, n_iter, grid, cfg.seed);
        ConstantsReport cf = ctx.closed_form_constants();
        json b;
        b["L_hat"] = est.L_hat;
        b["plateau"] = est.plateau;
        b["seeds"] = est.seeds;
        b["closed_form"] = fmt(cf.mediant_lenstra, 20);
        b["rel_error"] = std::fabs(est.L_hat - static_cast<double>(cf.mediant_lenstra)) /
                         static_cast<double>(cf.mediant_lenstra);
        if (cfg.k == 4) {
            // the two competing closed-form candidates, adjudicated empirically
            double ca = static_cast<double>(sqrt(Real(2)) / 2);
            double cb = static_cast<double>(sqrt(Real(2)) - 1);
            b["candidate_sqrt2_over_2"] = ca;
            b["candidate_sqrt2_minus_1"] = cb;
            b["favors"] = (std::fabs(est.L_hat - ca) < std::fabs(est.L_hat - cb))
                              ? "sqrt2_over_2"
                              : "sqrt2_minus_1";
        }
        j["breakpoint"] = b;
    }
    if (all || entropy_only) {
        EntropyEstimate est = lyapunov_entropy(ctx, n_iter, cfg.seed);
        json e;
        e["h_hat"] = est.h_hat;
        e["mu_omega0"] = est.mu_omega0;
        e["krengel"] = est.krengel;
        e["target"] = est.target;
        e["rel_error"] = est.rel_error;
        e["N"] = est.N;
        j["entropy"] = e;
    }
    if (all || borel_only) {
        BorelReport rep = borel_frequency(ctx, seeds, n_iter, cfg.seed);
        WitnessDecay decay = witness_theta_decay(ctx, n_iter, 0.01);
        json b;
        b["frequency"] = rep.frequency;
        b["seeds"] = rep.seeds;
        b["witness_hits"] = decay.hits;
        b["witness_last_hit"] = decay.last_hit;
        j["borel"] = b;
    }

    if (cfg.format == "csv" && (all || counting_only)) {
        emit(cfg, csv.str() + "# " + j.dump());
        return 0;
    }
    emit(cfg, j.dump(2));
    return 0;
}

int cmd_audit(const GlobalConfig& cfg, int x_count, int word_len, double margin) {
    HeckeContext ctx(cfg.k, cfg.precision);
    auto pool = enumerate_gk_rationals(ctx, word_len, 1e6);
    double L = static_cast<double>(ctx.closed_form_constants().mediant_lenstra);
    RandomStream rng(cfg.seed, 31337);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["k"] = cfg.k;
    j["pool_size"] = pool.size();
    j["threshold_below"] = L - margin;
    j["threshold_above"] = L + 0.05;
    long violations_below = 0, counterexamples_above = 0, inconclusive = 0;
    json offenders = json::array();
    for (int i = 0; i < x_count; ++i) {
        Real x = rng.uniform(-ctx.half_lambda(), ctx.half_lambda());
        AuditReport below = legendre_audit(ctx, x, L - margin, pool);
        violations_below += static_cast<long>(below.violations.size());
        inconclusive += below.inconclusive;
        for (const auto& v : below.violations) {
            json e;
            e["x"] = fmt(x, cfg.digits);
            e["a"] = v.rational.a.coeff_strings();
            e["c"] = v.rational.c.coeff_strings();
            e["theta"] = v.theta;
            offenders.push_back(e);
        }
    }
    auto cex = find_legendre_counterexample(ctx, pool, L + 0.05);
    if (cex) {
        ++counterexamples_above;
        json e;
        e["x"] = fmt(cex->x, cfg.digits);
        e["a"] = cex->rational.a.coeff_strings();
        e["c"] = cex->rational.c.coeff_strings();
        e["theta"] = cex->theta;
        j["counterexample"] = e;
    }
    j["x_count"] = x_count;
    j["violations_below_constant"] = violations_below;
    j["counterexamples_above_constant"] = counterexamples_above;
    j["inconclusive"] = inconclusive;
    j["offenders"] = offenders;
    bool pass = (violations_below == 0 && counterexamples_above > 0);
    j["pass"] = pass;
    emit(cfg, j.dump(2));
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rosen continued fractions, mediant maps and their planar extensions"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalConfig cfg;
    app.add_option("--k", cfg.k, "Hecke group index (>= 4)")->check(CLI::Range(4, 1000));
    app.add_option("--precision", cfg.precision, "working precision in bits (>= 128)")
        ->check(CLI::Range(128u, 65536u));
    app.add_option("--seed", cfg.seed, "base RNG seed");
    app.add_option("--format", cfg.format, "output format: text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--out", cfg.out, "write output to a file instead of stdout");
    app.add_option("--digits", cfg.digits, "significant digits in reports (0 = full precision)");

    auto* c_context = app.add_subcommand("context", "index-k constants and tables");

    std::string x_text = "0.3";
    int depth = 10;
    auto* c_expand = app.add_subcommand("expand", "digit/symbol expansions and convergents");
    c_expand->add_option("--x", x_text,
                         "point: decimal or exact literal in lambda, e.g. (1-l)/2");
    c_expand->add_option("--depth", depth, "number of digits")->check(CLI::Range(1, 10000));

    bool dual = false, image = false;
    auto* c_domain = app.add_subcommand("domain", "natural-extension domains as JSON");
    c_domain->add_flag("--dual", dual, "include the dual partition B#");
    c_domain->add_flag("--image", image, "include branch-by-branch image rectangles");

    long samples = 100000;
    auto* c_verify = app.add_subcommand("verify", "run the full verification suite");
    c_verify->add_option("--samples", samples, "Monte-Carlo sample count")
        ->check(CLI::Range(static_cast<long>(1), static_cast<long>(100000000)));

    long n_iter = 1000000;
    int seeds = 5;
    std::string grid_spec = "0.01:2.0:200";
    bool w_entropy = false, w_breakpoint = false, w_borel = false, w_counting = false;
    auto* c_stats = app.add_subcommand("stats", "orbit statistics experiments");
    c_stats->add_option("--n-iter", n_iter, "orbit length")
        ->check(CLI::Range(1L, 2000000000L));
    c_stats->add_option("--seeds", seeds, "number of independent orbits");
    c_stats->add_option("--grid", grid_spec, "threshold grid lo:hi:steps");
    c_stats->add_flag("--entropy", w_entropy, "entropy estimate only");
    c_stats->add_flag("--breakpoint", w_breakpoint, "Lenstra breakpoint only");
    c_stats->add_flag("--borel", w_borel, "Borel frequency only");
    c_stats->add_flag("--counting", w_counting, "counting curve only");

    auto* c_witness = app.add_subcommand("witness", "periodic witness orbit of tau_0");

    int x_count = 100, word_len = 8;
    double margin = 0.01;
    auto* c_audit = app.add_subcommand(
        "legendre-audit", "audit good approximations against the convergent lists");
    c_audit->add_option("--x-count", x_count, "number of random points");
    c_audit->add_option("--word-len", word_len, "generator word length for the rational pool")
        ->check(CLI::Range(1, 12));
    c_audit->add_option("--margin", margin, "threshold margin below the Legendre constant");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_context->parsed()) return cmd_context(cfg);
        if (c_expand->parsed()) return cmd_expand(cfg, x_text, depth);
        if (c_domain->parsed()) return cmd_domain(cfg, dual, image);
        if (c_verify->parsed()) return cmd_verify(cfg, samples);
        if (c_stats->parsed())
            return cmd_stats(cfg, n_iter, seeds, grid_spec, w_entropy, w_breakpoint, w_borel,
                             w_counting);
        if (c_witness->parsed()) return cmd_witness(cfg);
        if (c_audit->parsed()) return cmd_audit(cfg, x_count, word_len, margin);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
