#include "rosen/zlambda.hpp"

#include <algorithm>
#include <sstream>

namespace rosen {

namespace {

// (x^n - 1) has Phi_d as a factor for every d | n; divide them out.
std::vector<BigInt> poly_div_exact(const std::vector<BigInt>& num,
                                   const std::vector<BigInt>& den) {
    std::vector<BigInt> rem = num;
    const std::size_t dn = den.size() - 1;
    if (den.back() != 1) throw std::logic_error("poly_div_exact: divisor not monic");
    std::vector<BigInt> quot(rem.size() - dn, BigInt(0));
    for (std::size_t i = rem.size(); i-- > dn;) {
        BigInt c = rem[i];
        if (c == 0) continue;
        quot[i - dn] = c;
        for (std::size_t j = 0; j <= dn; ++j) rem[i - dn + j] -= c * den[j];
    }
    for (const BigInt& c : rem)
        if (c != 0) throw std::logic_error("poly_div_exact: nonzero remainder");
    return quot;
}

}  // namespace

std::vector<BigInt> LambdaField::cyclotomic(int n) {
    // x^n - 1 divided by Phi_d for all proper divisors d of n.
    std::vector<BigInt> p(static_cast<std::size_t>(n) + 1, BigInt(0));
    p[0] = -1;
    p[static_cast<std::size_t>(n)] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        p = poly_div_exact(p, cyclotomic(d));
    }
    return p;
}

LambdaField::LambdaField(int k) : k_(k) {
    if (k < 4)
        throw std::domain_error("LambdaField: index k must be >= 4");
    std::vector<BigInt> phi2k = cyclotomic(2 * k);
    const int n = static_cast<int>(phi2k.size()) - 1;  // = totient(2k), even
    const int m = n / 2;
    degree_ = m;

    // Solve x^m psi(x + 1/x) = Phi_{2k}(x): peel coefficients top-down,
    // subtracting c_j x^{m-j} (x^2+1)^j from the remainder.
    std::vector<BigInt> rem = phi2k;
    std::vector<BigInt> psi(static_cast<std::size_t>(m) + 1, BigInt(0));
    // (x^2+1)^j expanded incrementally
    for (int j = m; j >= 0; --j) {
        BigInt c = rem[static_cast<std::size_t>(m + j)];
        psi[static_cast<std::size_t>(j)] = c;
        if (c != 0) {
            // subtract c * x^{m-j} * (x^2+1)^j
            std::vector<BigInt> binom(static_cast<std::size_t>(j) + 1);
            BigInt b = 1;
            for (int i = 0; i <= j; ++i) {
                binom[static_cast<std::size_t>(i)] = b;
                b = b * (j - i) / (i + 1);
            }
            for (int i = 0; i <= j; ++i)
                rem[static_cast<std::size_t>(m - j + 2 * i)] -= c * binom[static_cast<std::size_t>(i)];
        }
    }
    for (const BigInt& c : rem)
        if (c != 0) throw std::logic_error("LambdaField: Chebyshev substitution failed");
    if (psi.back() != 1) throw std::logic_error("LambdaField: minimal polynomial not monic");
    min_poly_ = std::move(psi);
}

Interval LambdaField::lambda_enclosure() const {
    // lambda = 2 cos(pi/k); mpfr rounds to nearest within 1 ulp and the
    // padding absorbs that.
    Real pi;
    mpfr_const_pi(pi.backend().data(), MPFR_RNDN);
    Real v = 2 * cos(pi / k_);
    Interval r(v, v);
    r.pad();
    r.pad();
    return r;
}

FieldPtr make_field(int k) { return std::make_shared<const LambdaField>(k); }

ZLambda::ZLambda(FieldPtr field, std::vector<BigInt> coeffs)
    : field_(std::move(field)), coeffs_(std::move(coeffs)) {
    if (!field_) throw std::invalid_argument("ZLambda: null field");
    if (coeffs_.size() != static_cast<std::size_t>(field_->degree()))
        reduce(coeffs_);
}

ZLambda ZLambda::from_int(const FieldPtr& field, const BigInt& n) {
    std::vector<BigInt> c(static_cast<std::size_t>(field->degree()), BigInt(0));
    c[0] = n;
    return ZLambda(field, std::move(c));
}

ZLambda ZLambda::lambda(const FieldPtr& field) {
    std::vector<BigInt> c(static_cast<std::size_t>(field->degree()), BigInt(0));
    if (field->degree() < 2)
        throw std::logic_error("ZLambda::lambda: field degree < 2");
    c[1] = 1;
    return ZLambda(field, std::move(c));
}

void ZLambda::reduce(std::vector<BigInt>& c) const {
    const std::vector<BigInt>& mp = field_->min_poly();
    const std::size_t d = mp.size() - 1;  // degree, mp monic
    while (c.size() > d) {
        BigInt top = c.back();
        c.pop_back();
        if (top == 0) continue;
        const std::size_t shift = c.size() - d;
        for (std::size_t j = 0; j < d; ++j) c[shift + j] -= top * mp[j];
    }
    c.resize(d, BigInt(0));
}

bool ZLambda::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const BigInt& c) { return c == 0; });
}

bool ZLambda::operator==(const ZLambda& o) const {
    require_same_field(*this, o);
    return coeffs_ == o.coeffs_;
}

void require_same_field(const ZLambda& a, const ZLambda& b) {
    if (!a.field() || !b.field() || a.field()->k() != b.field()->k())
        throw std::invalid_argument("ZLambda: mixed-field operands");
}

ZLambda ZLambda::operator+(const ZLambda& o) const {
    require_same_field(*this, o);
    std::vector<BigInt> c(coeffs_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coeffs_[i];
    return ZLambda(field_, std::move(c));
}

ZLambda ZLambda::operator-(const ZLambda& o) const { return *this + (-o); }

ZLambda ZLambda::operator-() const {
    std::vector<BigInt> c(coeffs_);
    for (BigInt& x : c) x = -x;
    return ZLambda(field_, std::move(c));
}

ZLambda ZLambda::operator*(const ZLambda& o) const {
    require_same_field(*this, o);
    const std::size_t d = coeffs_.size();
    std::vector<BigInt> prod(2 * d - 1, BigInt(0));
    for (std::size_t i = 0; i < d; ++i) {
        if (coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < d; ++j)
            if (o.coeffs_[j] != 0) prod[i + j] += coeffs_[i] * o.coeffs_[j];
    }
    reduce(prod);
    return ZLambda(field_, std::move(prod));
}

ZLambda ZLambda::operator*(const BigInt& n) const {
    std::vector<BigInt> c(coeffs_);
    for (BigInt& x : c) x *= n;
    return ZLambda(field_, std::move(c));
}

Interval ZLambda::eval(unsigned precision_bits) const {
    PrecisionScope scope(precision_bits);
    Interval lam = field_->lambda_enclosure();
    Interval acc = Interval::from_bigint(coeffs_.back());
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;)
        acc = acc * lam + Interval::from_bigint(coeffs_[i]);
    return acc;
}

int ZLambda::sign() const {
    if (is_zero()) return 0;
    for (unsigned prec = 128; prec <= (1u << 20); prec *= 2) {
        Interval e = eval(prec);
        if (!e.contains_zero()) return e.sign();
    }
    throw std::logic_error("ZLambda::sign: enclosure never separated from zero");
}

Real ZLambda::to_real() const {
    return eval(current_precision_bits()).mid();
}

std::string ZLambda::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (i) os << ", ";
        os << coeffs_[i];
    }
    os << "]";
    return os.str();
}

std::vector<std::string> ZLambda::coeff_strings() const {
    std::vector<std::string> out;
    out.reserve(coeffs_.size());
    for (const BigInt& c : coeffs_) out.push_back(c.str());
    return out;
}

bool ProjPoint::operator==(const ProjPoint& o) const {
    if ((num.is_zero() && den.is_zero()) || (o.num.is_zero() && o.den.is_zero()))
        throw std::logic_error("ProjPoint: degenerate 0:0 coordinates");
    return (num * o.den - o.num * den).is_zero();
}

int ProjPoint::sign() const {
    if (is_infinity()) throw std::domain_error("ProjPoint::sign at infinity");
    return num.sign() * den.sign();
}

Real ProjPoint::to_real() const {
    if (is_infinity()) throw std::domain_error("ProjPoint::to_real at infinity");
    return num.to_real() / den.to_real();
}

MobiusZL MobiusZL::identity(const FieldPtr& f) {
    ZLambda one = ZLambda::from_int(f, 1), zero = ZLambda::from_int(f, 0);
    return {one, zero, zero, one};
}

MobiusZL MobiusZL::u_minus(const FieldPtr& f) {
    ZLambda one = ZLambda::from_int(f, 1), zero = ZLambda::from_int(f, 0);
    return {zero, -one, one, ZLambda::lambda(f)};
}

MobiusZL MobiusZL::u_plus(const FieldPtr& f) {
    ZLambda one = ZLambda::from_int(f, 1), zero = ZLambda::from_int(f, 0);
    return {zero, one, one, ZLambda::lambda(f)};
}

MobiusZL MobiusZL::v_minus(const FieldPtr& f) {
    ZLambda one = ZLambda::from_int(f, 1), zero = ZLambda::from_int(f, 0);
    return {-one, zero, ZLambda::lambda(f), one};
}

MobiusZL MobiusZL::v_plus(const FieldPtr& f) {
    ZLambda one = ZLambda::from_int(f, 1), zero = ZLambda::from_int(f, 0);
    return {one, zero, ZLambda::lambda(f), one};
}

MobiusZL MobiusZL::rosen_branch(const FieldPtr& f, int eps, const BigInt& r) {
    if (eps != 1 && eps != -1) throw std::invalid_argument("rosen_branch: eps");
    ZLambda one = ZLambda::from_int(f, 1), zero = ZLambda::from_int(f, 0);
    return {ZLambda::lambda(f) * (-r), ZLambda::from_int(f, eps), one, zero};
}

ZLambda MobiusZL::det() const { return a * d - b * c; }

MobiusZL MobiusZL::operator*(const MobiusZL& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
}

bool MobiusZL::operator==(const MobiusZL& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
}

MobiusZL MobiusZL::inverse() const {
    ZLambda dt = det();
    if (dt == ZLambda::from_int(a.field(), 1)) return {d, -b, -c, a};
    if (dt == ZLambda::from_int(a.field(), -1)) return {-d, b, c, -a};
    throw std::domain_error("MobiusZL::inverse: determinant not +-1");
}

MobiusZL MobiusZL::pow(unsigned e) const {
    MobiusZL acc = identity(a.field());
    MobiusZL base = *this;
    while (e) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

ProjPoint MobiusZL::apply(const ProjPoint& p) const {
    return {a * p.num + b * p.den, c * p.num + d * p.den};
}

Real MobiusZL::apply(const Real& x) const {
    return (a.to_real() * x + b.to_real()) / (c.to_real() * x + d.to_real());
}

}  // namespace rosen
