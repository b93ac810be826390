#ifndef HARQOPT_INR_HPP
#define HARQOPT_INR_HPP

#include <cstdint>
#include <vector>

#include "harqopt/fading.hpp"
#include "harqopt/types.hpp"

namespace harqopt {

/// Incremental redundancy HARQ: a mother codeword is punctured into M+1 pieces
/// with strictly decreasing equivalent rates R^(1) > ... > R^(M+1). After m
/// rounds the data decodes iff
///   A_m(g) = sum_{n<=m} c_n log(1 + g P_n) >= 1,  c_n = 1/R^(n) - 1/R^(n-1)
/// with R^(0) = +inf. Rates are the primary representation; slot lengths are
/// derived and normalized to l_1 = 1, so the payload Q never appears.
struct InrRateSchedule {
    std::vector<double> rates; // R^(1)..R^(M+1), nats per channel use

    InrRateSchedule() = default;
    explicit InrRateSchedule(std::vector<double> r) : rates(std::move(r)) { validate(); }
    InrRateSchedule(std::initializer_list<double> r) : rates(r) { validate(); }

    /// R^(m) = R/m
    static InrRateSchedule fixed_length(double initial_rate, int max_retransmissions);

    int rounds() const { return static_cast<int>(rates.size()); }
    double initial_rate() const { return rates.front(); }
    double final_rate() const { return rates.back(); }

    /// c_m = 1/R^(m) - 1/R^(m-1), 1-based; c_1 = 1/R^(1)
    double coefficient(int m) const {
        double inv_prev = (m >= 2) ? 1.0 / rates[static_cast<std::size_t>(m) - 2] : 0.0;
        return 1.0 / rates[static_cast<std::size_t>(m) - 1] - inv_prev;
    }

    /// l_m / l_1 (slot lengths are proportional to the coefficients)
    std::vector<double> lengths() const;

    /// l_1 + ... + l_m in units of l_1
    double cumulative_length(int m) const;

    bool is_fixed_length(double rel_tol = 1e-9) const;

    void validate() const;
};

/// Per-round energies xi_n = l_n P_n and cumulative sums, in units of l_1.
struct EnergySchedule {
    std::vector<double> per_round;
    std::vector<double> cumulative;
};

EnergySchedule inr_energy_schedule(const InrRateSchedule& schedule, const PowerPolicy& policy);

/// A_m(g), the accumulated normalized mutual information after m rounds.
double inr_accumulated_info(const InrRateSchedule& schedule, const PowerPolicy& policy, double g, int m);

/// Equivalent transmission power after m rounds:
///   P^(m) = R^(m) sum_{n<=m} P_n c_n = xi^(m) / l^(m)
double inr_equivalent_power(const InrRateSchedule& schedule, const PowerPolicy& policy, int m);

/// Root of A_{M+1}(g) = 1 by bracketed bisection (1e-12 relative); the outage
/// probability is F_G of this gain.
double inr_outage_threshold(const InrRateSchedule& schedule, const PowerPolicy& policy);

/// Root of A_m(g) = 1, +inf when rounds 1..m carry no power.
double inr_decode_threshold(const InrRateSchedule& schedule, const PowerPolicy& policy, int m);

DecodeProfile inr_decode_profile(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading);

double inr_outage(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading);

/// Continuous-model average power (and, via inr_continuous_metrics, the
/// expected energy per packet). Collapses to P exactly for uniform policies.
double inr_avg_power_continuous(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading);

/// eta = sum_m R^(m) Pr{S_m}
double inr_throughput_continuous(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading);

Metrics inr_continuous_metrics(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading);

/// Bursting model: ratio-of-expectations average power and throughput, with
/// the reach-round probabilities F_G(g*_{n-1}) reusing the decode thresholds.
Metrics inr_bursting_metrics(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading);

/// P = (e^{R^(M+1)} - 1)/F_G^{-1}(epsilon)
double inr_short_term_power(const InrRateSchedule& schedule, double epsilon, const FadingSpec& fading);

/// Monte Carlo outage when the gain changes every round (fixed-length coding
/// only): Pr{sum log(1 + g_n P_n) < R}. Deterministic per seed.
double inr_fast_fading_outage(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading,
                              std::uint64_t mc_budget, std::uint64_t seed);

} // namespace harqopt

#endif
