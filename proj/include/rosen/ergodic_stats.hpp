#pragma once

#include "rosen/planar_extension.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rosen {

struct CountingReport {
    long N = 0;
    std::vector<double> grid;         // sorted thresholds t
    std::vector<long> counts;         // C(N, x, t): mediant-time tallies
    std::vector<long> rosen_counts;   // C_0(N, x, t): tallies at U times only
    bool terminated = false;
};

// Tally Theta_n < t along the natural-extension orbit of (x, -inf).
CountingReport count_small_theta(const HeckeContext& ctx, const Real& x, long N,
                                 const std::vector<double>& grid);

struct BreakpointEstimate {
    double L_hat = 0;
    double plateau = 0;
    std::vector<double> grid;
    std::vector<double> f_over_t;  // seed-averaged normalized count / t
    long N = 0;
    int seeds = 0;
};

/**
 * Empirical Lenstra breakpoint: the normalized small-Theta count is linear
 * in t below the constant; L_hat is the last grid point whose count/t sits
 * within 1% of the small-t plateau.
 */
BreakpointEstimate breakpoint_estimate(const HeckeContext& ctx, int seeds, long N,
                                       const std::vector<double>& grid,
                                       std::uint64_t seed_base = 1);

struct EntropyEstimate {
    double h_hat = 0;      // Birkhoff average of log |T'| along a T-orbit
    double mu_omega0 = 0;  // mu-hat(Omega_0)
    double krengel = 0;    // h_hat * mu_omega0
    double target = 0;     // (k-2) pi^2 / (2k)
    double rel_error = 0;
    long N = 0;
};

EntropyEstimate lyapunov_entropy(const HeckeContext& ctx, long N, std::uint64_t seed);

struct BorelReport {
    double frequency = 0;  // mean fraction of n <= N with theta_n < C(k)
    long N = 0;
    int seeds = 0;
};

BorelReport borel_frequency(const HeckeContext& ctx, int seeds, long N,
                            std::uint64_t seed_base = 1);

struct WitnessDecay {
    long last_hit = -1;  // last n with Theta_n(tau_0) < C(k) - margin
    long hits = 0;
    long N = 0;
};

// Along the witness orbit the small-Theta count must stop growing.
WitnessDecay witness_theta_decay(const HeckeContext& ctx, long N, double margin);

// Running max of v |x - u/v| over the first N mediant-orbit entries.
double max_scaled_error(const HeckeContext& ctx, const Real& x, long N);

struct GkRational {
    ZLambda a, c;  // value a/c with c > 0 exactly
    double value = 0;
    double denom = 0;
};

/**
 * Breadth-first closure of z -> -1/z and z -> z +- lambda applied to
 * infinity, deduped by exact value, filtered to I_k and denominators
 * below q_cap.
 */
std::vector<GkRational> enumerate_gk_rationals(const HeckeContext& ctx, int max_word_len,
                                               double q_cap);

struct AuditEntry {
    GkRational rational;
    double theta;
};

struct AuditReport {
    std::vector<AuditEntry> violations;  // good approximations that are
                                         // certifiably not mediant convergents
    long inconclusive = 0;
    long checked = 0;
    bool terminal = false;  // x coincides with a pool rational
};

/**
 * Legendre audit: every pool rational with Theta(x, a/c) < threshold must
 * appear in the mediant-convergent list of x. Membership is decided by
 * exact value comparison against a list expanded deep enough that all
 * later denominators exceed the pool cap.
 */
AuditReport legendre_audit(const HeckeContext& ctx, const Real& x, double threshold,
                           const std::vector<GkRational>& pool);

struct Counterexample {
    GkRational rational;
    Real x;
    double theta;
};

/**
 * Sharpness search: plant x in the annulus Theta(x, a/c) = u for u between
 * the Legendre constant and `threshold`; for some of these x the rational
 * is not a convergent, witnessing that the constant cannot be raised.
 */
std::optional<Counterexample> find_legendre_counterexample(
    const HeckeContext& ctx, const std::vector<GkRational>& pool, double threshold);

}  // namespace rosen
