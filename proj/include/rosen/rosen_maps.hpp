#pragma once

#include "rosen/hecke_context.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rosen {

struct Digit {
    int eps;           // sgn of the iterate
    std::int64_t r;    // floor(|1/(lambda x)| + 1/2) >= 1

    bool operator==(const Digit& o) const { return eps == o.eps && r == o.r; }
};

enum class MediantSymbol { Uminus, Uplus, Vminus, Vplus, Ident };

const char* symbol_name(MediantSymbol s);
MobiusZL symbol_matrix(const FieldPtr& field, MediantSymbol s);
MobiusZL symbol_matrix_inverse(const FieldPtr& field, MediantSymbol s);

struct RosenStep {
    Real x;        // T(x)
    Digit digit;   // meaningless when terminal
    bool terminal;
};

struct MediantStepResult {
    Real x;  // S(x)
    MediantSymbol symbol;
    bool terminal;  // symbol == Ident
};

// One step of the Rosen map T on [-lambda/2, lambda/2); x = 0 is the
// terminal fixed point.
RosenStep rosen_step(const HeckeContext& ctx, const Real& x);

// One step of the mediant map S on [-lambda/2, 2/lambda).
MediantStepResult mediant_step(const HeckeContext& ctx, const Real& x);

struct DigitString {
    std::vector<Digit> digits;
    bool terminated = false;         // orbit reached 0 (G_k-rational)
    bool boundary_stopped = false;   // walk gave up on a boundary-collar point
};

struct SymbolString {
    std::vector<MediantSymbol> symbols;
    bool terminated = false;
    bool boundary_stopped = false;
};

/**
 * Digit/symbol expansions with a guarded floating orbit: each step carries
 * a running error bound; when the orbit gets within 8x that bound of a
 * branch cut the whole walk restarts at doubled precision.
 */
DigitString expand(const HeckeContext& ctx, const Real& x, int n);
SymbolString symbol_expand(const HeckeContext& ctx, const Real& x, int n);

// Exact expansions for points of Q(lambda); terminal detection is exact.
DigitString expand_exact(const HeckeContext& ctx, const ProjPoint& x, int n);
SymbolString symbol_expand_exact(const HeckeContext& ctx, const ProjPoint& x, int n);

// floor(num/den) for exact field elements, den > 0.
BigInt field_floor(const ZLambda& num, const ZLambda& den);

// Exact Rosen digit of a nonzero field element.
Digit exact_digit(const HeckeContext& ctx, const ProjPoint& x);
// Exact mediant branch of a field element in J_k.
MediantSymbol exact_symbol(const HeckeContext& ctx, const ProjPoint& x);

struct InducedReport {
    long length = 0;       // ell(x)
    bool verified = false; // |S^{ell+1}(x) - T(x)| < tol
    bool matches_first_digit = false;  // ell(x) + 1 == r_1(x)
    Real deviation;
    bool terminal = false;
    bool boundary_stopped = false;
};

// Return time of S into the union of outer branches; the induced step
// S^{ell(x)+1} must reproduce T(x).
InducedReport induced_length(const HeckeContext& ctx, const Real& x,
                             const Real& tol);

/**
 * Exact convergent state: columns (p_{n-1}, q_{n-1}) and (p_n, q_n) of the
 * digit-matrix product, always with |p_{n-1} q_n - q_{n-1} p_n| = 1.
 */
struct ConvergentState {
    ZLambda p_prev, p_cur, q_prev, q_cur;

    // 0-step state: (p_{-1}, q_{-1}) = (1, 0), (p_0, q_0) = (0, 1).
    static ConvergentState initial(const FieldPtr& field);
    ConvergentState advance(const FieldPtr& field, const Digit& d) const;
    // |p_{n-1} q_n - q_{n-1} p_n| as an exact element (should be 1).
    ZLambda det_abs() const;
};

std::vector<ConvergentState> convergents(const HeckeContext& ctx,
                                         const std::vector<Digit>& digits);

struct MediantEntry {
    ZLambda num, den;  // value of M_1...M_i applied to infinity
    bool principal;    // U-symbol position (principal convergent)
    long level;        // m: number of U symbols seen before this entry
    long offset;       // l: V-steps since the last U time (0 at U times)
};

// The interleaved list (M_1...M_i (infinity) : i = 1..depth).
std::vector<MediantEntry> mediant_convergents(const HeckeContext& ctx,
                                              const Real& x, int depth);
std::vector<MediantEntry> mediant_convergents_from_symbols(
    const HeckeContext& ctx, const std::vector<MediantSymbol>& symbols);

// Theta(x, a/c) = c^2 |x - a/c| = c |c x - a|, c > 0.
Real theta_direct(const HeckeContext& ctx, const Real& x, const ZLambda& a,
                  const ZLambda& c);

// M_s^{-1} applied to a real value; -inf stands for the projective point at
// infinity, and any infinite image comes back as -inf.
Real apply_symbol_inverse(const HeckeContext& ctx, MediantSymbol s, const Real& v);

struct ThetaSeries {
    std::vector<Real> theta;      // Theta_i = 1/(x_i - y_i), i = 1..n
    std::vector<Real> xs;         // x_i = S^i(x)
    std::vector<Real> ys;         // y_i = (M_1...M_i)^{-1}(infinity)
    std::vector<MediantSymbol> symbols;
    bool terminated = false;
    bool boundary_stopped = false;
};

// Theta along the natural-extension orbit of (x, infinity); the second
// coordinate is tracked exactly.
ThetaSeries theta_orbit(const HeckeContext& ctx, const Real& x, int n);

std::string format_digits(const std::vector<Digit>& digits);
std::string format_symbols(const std::vector<MediantSymbol>& symbols);

}  // namespace rosen
