#ifndef HARQOPT_RTD_HPP
#define HARQOPT_RTD_HPP

#include <cstdint>

#include "harqopt/fading.hpp"
#include "harqopt/types.hpp"

namespace harqopt {

/// Repetition time diversity HARQ: the same rate-R codeword is repeated up to
/// M+1 times; the receiver maximum-ratio-combines, so after m rounds the data
/// decodes iff log(1 + g sum_{n<=m} P_n) >= R.
struct RtdSpec {
    double rate = 1.0;          // initial rate R, nats per channel use
    int max_retransmissions = 1; // M; M+1 total rounds

    RtdSpec() = default;
    RtdSpec(double r, int m) : rate(r), max_retransmissions(m) { validate(); }

    int rounds() const { return max_retransmissions + 1; }

    void validate() const {
        if (!(rate > 0.0)) throw std::invalid_argument("RtdSpec: rate must be > 0");
        if (max_retransmissions < 0) throw std::invalid_argument("RtdSpec: M must be >= 0");
    }
};

/// Pr{decoded at round m} and the outage probability under block fading.
/// The m = 1 term uses the empty-sum convention (F_G of +inf is 1).
DecodeProfile rtd_decode_profile(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

/// Long-term average power of the continuous model:
///   Pbar = sum_m P^(m) Pr{S_m} + P^(M+1) Pr{outage},  P^(m) = (1/m) sum_{n<=m} P_n.
/// Collapses to P exactly for uniform policies.
double rtd_avg_power_continuous(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

/// F_G((e^R - 1)/sum P_n); 1 for an all-zero policy.
double rtd_outage(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

/// Smallest uniform per-round power meeting outage <= epsilon:
///   P = (e^R - 1)/((M+1) F_G^{-1}(epsilon))
double rtd_short_term_power(const RtdSpec& spec, double epsilon, const FadingSpec& fading);

/// eta = sum_m (R/m) Pr{S_m}, continuous model.
double rtd_throughput_continuous(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

/// Bursting model (one packet per fading block): average power is the ratio of
/// expected packet energy to expected packet channel uses; throughput likewise.
Metrics rtd_bursting_metrics(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

/// All continuous-model closed forms in one Metrics record.
Metrics rtd_continuous_metrics(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

/// Outage when the gain changes every round: Pr{log(1 + sum g_n P_n) < R}.
/// Fast fading with positive, pairwise-distinct powers uses the hypoexponential
/// closed form for the CDF of sum g_n P_n; anything else falls back to Monte
/// Carlo with the given budget (deterministic per seed).
double rtd_fast_fading_outage(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading,
                              std::uint64_t mc_budget, std::uint64_t seed);

/// Chebyshev-based lower bound on the continuous-model average power for
/// policies with nondecreasing rounds. Loose, especially at low rates.
double rtd_avg_power_lower_bound(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

} // namespace harqopt

#endif
