#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rosen {

using BigInt = boost::multiprecision::mpz_int;
using Real = boost::multiprecision::mpfr_float;

// mpfr precision is given in bits everywhere in this library; boost wants
// decimal digits, so convert with a little headroom.
inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(static_cast<double>(bits) * 0.3010299957) + 4;
}

inline unsigned current_precision_bits() {
    return static_cast<unsigned>(static_cast<double>(Real::default_precision()) / 0.3010299957) + 1;
}

/**
 * Scoped working-precision guard. Values constructed while the guard is
 * alive carry the requested precision; boost propagates operand precision
 * through arithmetic, so fresh constants must be rebuilt inside the scope.
 * Not safe to use concurrently with arithmetic in other threads.
 */
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits)
        : saved_(Real::default_precision()) {
        Real::default_precision(digits10_for_bits(bits));
    }
    ~PrecisionScope() { Real::default_precision(saved_); }

    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

inline Real pow2(long e) {
    return boost::multiprecision::ldexp(Real(1), e);
}

/**
 * Closed interval [lo, hi] with outward padding after every operation.
 * Rigorous enough for sign determination of algebraic numbers: each
 * operation widens the enclosure by a few ulps of the current precision.
 */
struct Interval {
    Real lo, hi;

    Interval() : lo(0), hi(0) {}
    Interval(Real l, Real h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw std::logic_error("Interval: lo > hi");
    }

    static Interval exact(const Real& v) { return Interval(v, v); }

    // Enclosure of a big integer at the current working precision.
    static Interval from_bigint(const BigInt& z) {
        Real v(z);
        Interval r(v, v);
        r.pad();
        return r;
    }

    Real width() const { return hi - lo; }
    Real mid() const { return (lo + hi) / 2; }
    bool contains_zero() const { return lo <= 0 && hi >= 0; }

    // -1, 0 (straddles zero), +1
    int sign() const {
        if (lo > 0) return 1;
        if (hi < 0) return -1;
        return 0;
    }

    void pad() {
        long p = static_cast<long>(Real::default_precision() * 3.321928095) + 1;
        Real eps = pow2(-p + 3);
        Real mag = (boost::multiprecision::abs(lo) < boost::multiprecision::abs(hi)
                        ? boost::multiprecision::abs(hi)
                        : boost::multiprecision::abs(lo));
        Real delta = eps * (mag + 1);
        lo -= delta;
        hi += delta;
    }

    Interval operator+(const Interval& o) const {
        Interval r(lo + o.lo, hi + o.hi);
        r.pad();
        return r;
    }
    Interval operator-(const Interval& o) const {
        Interval r(lo - o.hi, hi - o.lo);
        r.pad();
        return r;
    }
    Interval operator-() const { return Interval(-hi, -lo); }

    Interval operator*(const Interval& o) const {
        Real a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        Real mn = a, mx = a;
        for (const Real* v : {&b, &c, &d}) {
            if (*v < mn) mn = *v;
            if (*v > mx) mx = *v;
        }
        Interval r(mn, mx);
        r.pad();
        return r;
    }
};

// Decimal string with a fixed number of significant digits (0 = full).
inline std::string to_decimal(const Real& x, unsigned sig_digits = 30) {
    return x.str(sig_digits == 0 ? 0 : static_cast<std::streamsize>(sig_digits));
}

// floor() to int64 with an overflow guard; inputs this large mean the orbit
// walked into a numerically useless regime.
inline std::int64_t floor_to_int64(const Real& x) {
    Real f = boost::multiprecision::floor(x);
    if (boost::multiprecision::abs(f) > Real(static_cast<std::int64_t>(1) << 62))
        throw std::domain_error("floor_to_int64: value out of range");
    return static_cast<std::int64_t>(f);
}

}  // namespace rosen
