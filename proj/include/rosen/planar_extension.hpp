#pragma once

#include "rosen/rosen_maps.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace rosen {

enum class DomainLabel { Omega0, OmegaStar, TranslatedStar };

// One vertical fiber J x [y_lo, y_hi]; y_lo may be -inf.
struct Fiber {
    Real x_lo, x_hi;
    Real y_lo, y_hi;

    bool lower_infinite() const { return boost::multiprecision::isinf(y_lo); }
};

struct PlanarDomain {
    DomainLabel label;
    int k = 0;
    std::vector<Fiber> fibers;  // ordered by x_lo, disjoint x-intervals

    const Fiber* fiber_for(const Real& x) const;
    Real x_min() const { return fibers.front().x_lo; }
    Real x_max() const { return fibers.back().x_hi; }
};

struct PlanarPoint {
    Real x, y;  // y may be -inf
};

enum class Membership { Inside, Boundary, Outside };

// Domain of the Rosen natural extension (all fibers reach -inf).
PlanarDomain build_omega0(const HeckeContext& ctx);
// Domain of the mediant natural extension.
PlanarDomain build_omega_star(const HeckeContext& ctx);
// Omega* with the finite right-hand fibers translated by -lambda onto the
// leftmost fibers; every fiber then reaches -inf. Measure-equivalent to
// Omega* for slope-1 clipping, which is what the Lenstra geometry needs.
PlanarDomain build_translated_star(const HeckeContext& ctx);

Membership classify(const PlanarDomain& dom, const PlanarPoint& p, const Real& collar);

// The natural-extension map S-hat: branch picked by x, the same Mobius
// matrix applied to both coordinates.
struct NatExtStep {
    PlanarPoint p;
    MediantSymbol symbol;
    bool terminal;
};
NatExtStep nat_ext_step(const HeckeContext& ctx, const PlanarPoint& p);

// The Rosen extension T-hat on Omega0.
struct RosenExtStep {
    PlanarPoint p;
    Digit digit;
    bool terminal;
};
RosenExtStep rosen_ext_step(const HeckeContext& ctx, const PlanarPoint& p);

// The BKS form of the extension, conjugate to T-hat by (x, y) -> (x, -1/y).
std::pair<Real, Real> bks_step(const HeckeContext& ctx, const Real& x, const Real& w);

enum class DualBranch { I, II, III, IV };

// Schweiger's backward algorithm T# on (-inf, 0].
std::pair<Real, DualBranch> dual_step(const HeckeContext& ctx, const Real& y);
// Partition points of B#: {-lambda, -1/R, -1/lambda}.
std::vector<Real> dual_partition(const HeckeContext& ctx);

/**
 * mu-hat of [a,b] x [c,d] under dx dy / (x - y)^2, c possibly -inf.
 * Requires d <= a (rectangle below the diagonal); d == a gives +inf.
 * Closed form log((a-c)(b-d) / ((b-c)(a-d))).
 */
Real rect_measure(const Real& a, const Real& b, const Real& c, const Real& d);

// mu-hat of the same rectangle intersected with {x - y > t}, t > 0.
Real clipped_rect_measure(const Real& a, const Real& b, const Real& c,
                          const Real& d, const Real& t);

// Total measure of a domain, optionally clipped to {x - y > t}; +inf when
// unclipped and some fiber touches the diagonal.
Real domain_measure(const PlanarDomain& dom, const std::optional<Real>& clip_t = std::nullopt);

enum class LenstraVariant { Rosen, Mediant };

struct LenstraGeometry {
    LenstraVariant variant;
    // Route 1: slope-1 corner maximum over the relevant domain.
    Real t_corner;
    Real constant_corner;  // 1 / t_corner
    std::size_t argmax_fiber;
    std::vector<Real> corner_values;
    // Route 2: smallest t with clipped measure == lambda / t (property of
    // the clipped integral), found by bisection; independent of route 1.
    Real t_clipped;
    Real constant_clipped;
};

LenstraGeometry geometric_lenstra(const HeckeContext& ctx, LenstraVariant variant);

struct WitnessOrbit {
    std::vector<PlanarPoint> points;  // periodic S-hat orbit from (tau_0, K_1)
    std::vector<MediantSymbol> symbols;
    long period = 0;        // S-hat period
    long rosen_period = 0;  // number of U symbols per period (T-hat period)
    std::vector<Real> theta;
    Real min_theta;
    std::vector<long> equality_indices;  // theta == C(k)
    bool exact_certified = false;     // even case: closed in Z[lambda]
    bool interval_certified = false;  // odd case: 2^-100 return + hyperbolicity
    Real return_distance;
    bool has_unit_point = false;  // even case: (1, -1) with Theta = 1/2 exactly
};

WitnessOrbit witness_orbit(const HeckeContext& ctx);

struct BijectivityReport {
    long samples = 0;
    long boundary_skipped = 0;
    long containment_violations = 0;
    long preimage_violations = 0;
    Real max_roundtrip_error;
    std::vector<PlanarPoint> offenders;  // capped
};

// Monte-Carlo containment and single-preimage audit of S-hat on Omega*.
BijectivityReport check_bijectivity(const HeckeContext& ctx, long n_samples,
                                    std::uint64_t seed);

struct InvarianceReport {
    long rectangles = 0;
    long violations = 0;
    Real max_deviation;
};

// mu-hat(rect) vs mu-hat(S-hat(rect)) for random branch-interior rectangles.
InvarianceReport check_invariance(const HeckeContext& ctx, int n_rectangles,
                                  std::uint64_t seed, const Real& tol);

struct DualEquationReport {
    long samples = 0;
    Real max_residual;
};

// K(Sx, y)|S'(x)| = K(x, T#y)|(T#)'(y)| on digit-matched pairs.
DualEquationReport check_dual_equation(const HeckeContext& ctx, long n_samples,
                                       std::uint64_t seed);

// max |S-hat^{k_m}(p) - T-hat^m(p)| over random p in Omega0.
Real check_induced_composition(const HeckeContext& ctx, int n_points, int rosen_steps,
                               std::uint64_t seed);

struct ImagePiece {
    Fiber source;        // fiber piece lying in a single branch
    MediantSymbol symbol;
    Fiber image;         // its image rectangle under S-hat
};

// Branch-by-branch image rectangles of a domain under S-hat.
std::vector<ImagePiece> image_decomposition(const HeckeContext& ctx,
                                            const PlanarDomain& dom);

// All image pieces contained in Omega* (tolerance for corner rounding)?
bool image_pieces_contained(const HeckeContext& ctx, const std::vector<ImagePiece>& pieces,
                            const Real& tol);

}  // namespace rosen
