#include "rosen/hecke_context.hpp"

#include <json.hpp>

#include <cmath>

namespace rosen {

namespace {

// One Rosen step at full precision; used only to walk the phi orbit.
Real rosen_image(const Real& lambda, const Real& x) {
    Real t = 1 / abs(x);
    Real r = floor(t / lambda + Real(1) / 2);
    return t - lambda * r;
}

void check_small(const Real& v, unsigned precision_bits, const char* what) {
    if (abs(v) > pow2(-static_cast<long>(precision_bits) / 2))
        throw std::logic_error(std::string("HeckeContext: ") + what +
                               " failed its closing identity");
}

}  // namespace

HeckeContext::HeckeContext(int k, unsigned precision_bits)
    : k_(k), precision_bits_(precision_bits) {
    if (k < 4)
        throw std::domain_error(
            "HeckeContext: k must be >= 4 (k = 3 is the classical case and unsupported)");
    if (precision_bits < 64)
        throw std::domain_error("HeckeContext: precision must be >= 64 bits");
    // construction pins the process-wide working precision; values built
    // here keep it afterwards through operand propagation
    Real::default_precision(digits10_for_bits(precision_bits));

    even_ = (k % 2 == 0);
    ell_ = even_ ? k / 2 : (k - 3) / 2;
    field_ = make_field(k);

    Interval lam = field_->lambda_enclosure();
    lambda_ = lam.mid();

    // min_poly(lambda) must vanish within evaluation precision
    {
        Real horner = 0;
        const auto& mp = field_->min_poly();
        for (std::size_t i = mp.size(); i-- > 0;) horner = horner * lambda_ + Real(mp[i]);
        check_small(horner, precision_bits, "minimal polynomial at lambda");
    }

    half_lambda_ = lambda_ / 2;
    two_over_lambda_ = 2 / lambda_;
    inner_cut_ = 2 / (3 * lambda_);

    if (even_)
        build_even();
    else
        build_odd();
}

void HeckeContext::build_even() {
    const int ell = ell_;
    R_ = 1;
    hurwitz_ = Real(1) / 2;

    phi_.assign(static_cast<std::size_t>(ell), Real(0));
    phi_[0] = -half_lambda_;
    for (int j = 1; j <= ell - 1; ++j) phi_[static_cast<std::size_t>(j)] = rosen_image(lambda_, phi_[static_cast<std::size_t>(j - 1)]);
    check_small(phi_[static_cast<std::size_t>(ell - 1)], precision_bits_, "phi_{ell-1} = 0");
    phi_[static_cast<std::size_t>(ell - 1)] = 0;

    // phi_0 < phi_1 < ... < phi_{ell-1} = 0
    for (int j = 1; j <= ell - 1; ++j)
        if (!(phi_[static_cast<std::size_t>(j - 1)] < phi_[static_cast<std::size_t>(j)]))
            throw std::logic_error("HeckeContext: phi orbit not increasing (even case)");

    L_.assign(static_cast<std::size_t>(ell), Real(0));
    L_[1] = 1 / (lambda_ + 1);
    for (int j = 2; j <= ell - 1; ++j) L_[static_cast<std::size_t>(j)] = 1 / (lambda_ - L_[static_cast<std::size_t>(j - 1)]);
    check_small(1 / (lambda_ - L_[static_cast<std::size_t>(ell - 1)]) - 1, precision_bits_,
                "even L recurrence closes at 1");
}

void HeckeContext::build_odd() {
    const int ell = ell_;
    R_ = ((lambda_ - 2) + sqrt((2 - lambda_) * (2 - lambda_) + 4)) / 2;
    check_small(R_ * R_ + (2 - lambda_) * R_ - 1, precision_bits_, "R quadratic");
    if (!(half_lambda_ < R_ && R_ < 1))
        throw std::logic_error("HeckeContext: expected lambda/2 < R < 1");
    hurwitz_ = 1 / (2 * sqrt((1 - half_lambda_) * (1 - half_lambda_) + 1));

    const int top = 2 * ell + 1;
    phi_.assign(static_cast<std::size_t>(top) + 1, Real(0));
    phi_[0] = -half_lambda_;
    for (int j = 1; j <= top; ++j) phi_[static_cast<std::size_t>(j)] = rosen_image(lambda_, phi_[static_cast<std::size_t>(j - 1)]);
    check_small(phi_[static_cast<std::size_t>(top)], precision_bits_, "phi_{2 ell + 1} = 0");
    phi_[static_cast<std::size_t>(top)] = 0;

    // Interleaving stated in the construction: the two chains sit left of
    // -2/(3 lambda) and phi_ell lands in (-2/(3 lambda), -2/(5 lambda)).
    for (int j = 0; j <= 2 * ell; ++j) {
        if (j == ell) continue;
        if (!(phi_[static_cast<std::size_t>(j)] < -inner_cut_))
            throw std::logic_error("HeckeContext: phi chain escaped its interval (odd case)");
    }
    if (!(-inner_cut_ < phi_[static_cast<std::size_t>(ell)] &&
          phi_[static_cast<std::size_t>(ell)] < -2 / (5 * lambda_)))
        throw std::logic_error("HeckeContext: phi_ell not in (-2/(3l), -2/(5l))");
    // Fiber endpoints need phi_0 < phi_{ell+1} < phi_1 < phi_{ell+2} < ...
    for (int j = 1; j <= ell; ++j) {
        if (!(phi_[static_cast<std::size_t>(j - 1)] < phi_[static_cast<std::size_t>(ell + j)] &&
              phi_[static_cast<std::size_t>(ell + j)] < phi_[static_cast<std::size_t>(j)]))
            throw std::logic_error("HeckeContext: phi chains not interleaved");
    }

    L_.assign(static_cast<std::size_t>(2 * ell + 3), Real(0));
    auto set_or_check = [&](int j, const Real& v) {
        Real& slot = L_[static_cast<std::size_t>(j)];
        if (slot == 0) {
            slot = v;
        } else {
            check_small(slot - v, precision_bits_, "odd L table consistency");
        }
    };
    set_or_check(2 * ell, lambda_ - 1 / R_);
    set_or_check(2 * ell + 1, lambda_ - R_);
    set_or_check(1, 1 / (2 * lambda_ - L_[static_cast<std::size_t>(2 * ell)]));
    set_or_check(2, 1 / (2 * lambda_ - L_[static_cast<std::size_t>(2 * ell + 1)]));
    for (int j = 3; j <= 2 * ell + 2; ++j)
        set_or_check(j, 1 / (lambda_ - L_[static_cast<std::size_t>(j - 2)]));
    check_small(L_[static_cast<std::size_t>(2 * ell + 2)] - R_, precision_bits_,
                "L_{2 ell + 2} = R");
}

bool HeckeContext::in_rosen_interval(const Real& x) const {
    return x >= -half_lambda_ && x < half_lambda_;
}

bool HeckeContext::in_mediant_interval(const Real& x) const {
    return x >= -half_lambda_ && x < two_over_lambda_;
}

ConstantsReport HeckeContext::closed_form_constants() const {
    ConstantsReport r;
    r.hurwitz_C = hurwitz_;
    if (even_) {
        r.rosen_lenstra = lambda_ / (lambda_ + 2);
        r.mediant_lenstra = (k_ == 4) ? sqrt(Real(2)) / 2 : lambda_ - 1;
    } else {
        r.rosen_lenstra = R_ / (R_ + 1);
        r.mediant_lenstra = lambda_ - R_;
    }
    if (!(r.mediant_lenstra > r.hurwitz_C))
        throw std::logic_error("closed_form_constants: mediant Lenstra <= C(k)");
    return r;
}

std::string HeckeContext::to_json(unsigned sig_digits) const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["k"] = k_;
    j["precision_bits"] = precision_bits_;
    j["lambda"] = to_decimal(lambda_, sig_digits);
    j["parity"] = even_ ? "even" : "odd";
    j["ell"] = ell_;
    j["R"] = to_decimal(R_, sig_digits);
    j["C"] = to_decimal(hurwitz_, sig_digits);
    j["phi"] = nlohmann::ordered_json::array();
    for (const Real& v : phi_) j["phi"].push_back(to_decimal(v, sig_digits));
    j["L"] = nlohmann::ordered_json::array();
    for (std::size_t i = 1; i < L_.size(); ++i) j["L"].push_back(to_decimal(L_[i], sig_digits));
    j["min_poly"] = nlohmann::ordered_json::array();
    for (const BigInt& c : field_->min_poly()) j["min_poly"].push_back(c.str());
    return j.dump(2);
}

}  // namespace rosen
