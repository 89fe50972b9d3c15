#pragma once

#include "rosen/numeric.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace rosen {

/**
 * The real field Q(lambda_k), lambda_k = 2 cos(pi/k), presented by the
 * minimal polynomial of lambda_k over Z. The polynomial is extracted from
 * the cyclotomic polynomial Phi_{2k} via x^m psi(x + 1/x) = Phi_{2k}(x),
 * m = phi(2k)/2, so it is monic, integral and irreducible.
 */
class LambdaField {
public:
    explicit LambdaField(int k);

    int k() const { return k_; }
    int degree() const { return degree_; }
    const std::vector<BigInt>& min_poly() const { return min_poly_; }

    // Rigorous enclosure of lambda_k at the current working precision.
    Interval lambda_enclosure() const;

    static std::vector<BigInt> cyclotomic(int n);

private:
    int k_;
    int degree_;
    std::vector<BigInt> min_poly_;  // constant term first, monic
};

using FieldPtr = std::shared_ptr<const LambdaField>;

FieldPtr make_field(int k);

/**
 * Exact element of Z[lambda_k]: integer coefficient vector of length
 * deg(min_poly), constant term first, always reduced. Representation is
 * canonical, so equality is coefficient-wise.
 */
class ZLambda {
public:
    ZLambda() = default;
    ZLambda(FieldPtr field, std::vector<BigInt> coeffs);

    static ZLambda from_int(const FieldPtr& field, const BigInt& n);
    static ZLambda lambda(const FieldPtr& field);

    const FieldPtr& field() const { return field_; }
    const std::vector<BigInt>& coeffs() const { return coeffs_; }

    bool is_zero() const;
    bool operator==(const ZLambda& o) const;
    bool operator!=(const ZLambda& o) const { return !(*this == o); }

    ZLambda operator+(const ZLambda& o) const;
    ZLambda operator-(const ZLambda& o) const;
    ZLambda operator-() const;
    ZLambda operator*(const ZLambda& o) const;
    ZLambda operator*(const BigInt& n) const;

    /**
     * Sign of the real value at lambda_k. Exact: returns 0 only for the
     * zero vector, otherwise escalates evaluation precision until the
     * enclosure separates from zero.
     */
    int sign() const;

    // Rigorous enclosure at (at least) the requested precision.
    Interval eval(unsigned precision_bits) const;

    // Point value at the current working precision (midpoint of enclosure).
    Real to_real() const;

    std::string str() const;
    // coefficient vector as decimal strings, constant term first
    std::vector<std::string> coeff_strings() const;

private:
    void reduce(std::vector<BigInt>& c) const;

    FieldPtr field_;
    std::vector<BigInt> coeffs_;
};

void require_same_field(const ZLambda& a, const ZLambda& b);

/**
 * Projective point with Z[lambda] homogeneous coordinates (num : den);
 * (1 : 0) is the point at infinity.
 */
struct ProjPoint {
    ZLambda num, den;

    bool is_infinity() const { return den.is_zero(); }
    bool operator==(const ProjPoint& o) const;

    // Sign of the finite value num/den.
    int sign() const;

    Real to_real() const;  // +inf sign convention: throws at infinity
};

/**
 * 2x2 matrix over Z[lambda] acting as a Mobius transformation. All
 * generator words used here have determinant +-1.
 */
struct MobiusZL {
    ZLambda a, b, c, d;

    static MobiusZL identity(const FieldPtr& field);
    // The four generators U-, U+, V-, V+ and the Rosen digit matrices.
    static MobiusZL u_minus(const FieldPtr& field);
    static MobiusZL u_plus(const FieldPtr& field);
    static MobiusZL v_minus(const FieldPtr& field);
    static MobiusZL v_plus(const FieldPtr& field);
    // [[-r lambda, eps], [1, 0]], the local form of the Rosen map.
    static MobiusZL rosen_branch(const FieldPtr& field, int eps, const BigInt& r);

    ZLambda det() const;
    MobiusZL operator*(const MobiusZL& o) const;
    bool operator==(const MobiusZL& o) const;

    // Inverse for determinant +-1 matrices.
    MobiusZL inverse() const;

    MobiusZL pow(unsigned e) const;

    ProjPoint apply(const ProjPoint& p) const;
    Real apply(const Real& x) const;
};

}  // namespace rosen
