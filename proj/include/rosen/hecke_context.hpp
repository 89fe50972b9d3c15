#pragma once

#include "rosen/zlambda.hpp"

#include <string>
#include <vector>

namespace rosen {

struct ConstantsReport {
    Real rosen_lenstra;    // lambda/(lambda+2) even, R/(R+1) odd
    Real mediant_lenstra;  // lambda-1 even k>4, lambda-R odd, sqrt(2)/2 at k=4
    Real hurwitz_C;
};

/**
 * All index-k constants shared by the dynamical and planar modules:
 * lambda_k, parity data, R, the Hurwitz constant C(k), and the phi/L
 * boundary tables of the planar natural extensions. Immutable after
 * construction.
 */
class HeckeContext {
public:
    explicit HeckeContext(int k, unsigned precision_bits = 256);

    int k() const { return k_; }
    unsigned precision_bits() const { return precision_bits_; }
    bool even() const { return even_; }
    // k = 2*ell (even) or k = 2*ell + 3 (odd)
    int ell() const { return ell_; }

    const FieldPtr& field() const { return field_; }
    const Real& lambda() const { return lambda_; }
    ZLambda lambda_exact() const { return ZLambda::lambda(field_); }
    const std::vector<BigInt>& min_poly() const { return field_->min_poly(); }

    // 1 for even k, else the positive root of x^2 + (2-lambda)x - 1.
    const Real& R() const { return R_; }
    const Real& hurwitz_C() const { return hurwitz_; }

    // phi_j = T^j(-lambda/2); even: j = 0..ell-1 (phi_{ell-1} = 0),
    // odd: j = 0..2*ell+1 (phi_{2*ell+1} = 0).
    const std::vector<Real>& phi() const { return phi_; }
    // 1-based table as in the boundary recurrences; index 0 is unused.
    const std::vector<Real>& L() const { return L_; }

    // Interval endpoints, cached at full precision.
    const Real& half_lambda() const { return half_lambda_; }          // lambda/2
    const Real& two_over_lambda() const { return two_over_lambda_; }  // 2/lambda
    const Real& inner_cut() const { return inner_cut_; }              // 2/(3 lambda)

    bool in_rosen_interval(const Real& x) const;    // [-lambda/2, lambda/2)
    bool in_mediant_interval(const Real& x) const;  // [-lambda/2, 2/lambda)

    ConstantsReport closed_form_constants() const;

    std::string to_json(unsigned sig_digits = 30) const;

private:
    void build_even();
    void build_odd();

    int k_;
    unsigned precision_bits_;
    bool even_;
    int ell_;
    FieldPtr field_;
    Real lambda_, R_, hurwitz_;
    Real half_lambda_, two_over_lambda_, inner_cut_;
    std::vector<Real> phi_;
    std::vector<Real> L_;
};

}  // namespace rosen
