#include "harqopt/rtd.hpp"

#include <algorithm>
#include <cmath>

namespace harqopt {

namespace {

void check_rounds(const RtdSpec& spec, const PowerPolicy& policy) {
    spec.validate();
    policy.validate();
    if (policy.rounds() != spec.rounds())
        throw std::invalid_argument("rtd: policy must have M+1 rounds");
}

// F_G((e^R - 1)/s) with the empty-sum convention: s = 0 means threshold +inf.
double cdf_at_threshold(const FadingSpec& fading, double rate_gap, double cum_power) {
    if (cum_power <= 0.0) return 1.0;
    return gain_cdf(fading, rate_gap / cum_power);
}

} // namespace

DecodeProfile rtd_decode_profile(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    check_rounds(spec, policy);
    if (policy.total() <= 0.0) throw DegeneratePolicyError("rtd_decode_profile: all-zero policy");
    const double a = std::expm1(spec.rate);
    const auto cum = policy.cumulative();

    DecodeProfile prof;
    prof.p_success.resize(cum.size());
    double prev = 1.0; // F_G at the round-0 threshold (empty sum)
    for (std::size_t m = 0; m < cum.size(); ++m) {
        const double cur = cdf_at_threshold(fading, a, cum[m]);
        prof.p_success[m] = prev - cur;
        prev = cur;
    }
    prof.p_outage = prev;
    return prof;
}

double rtd_outage(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    check_rounds(spec, policy);
    return cdf_at_threshold(fading, std::expm1(spec.rate), policy.total());
}

double rtd_avg_power_continuous(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    const auto prof = rtd_decode_profile(spec, policy, fading);
    const auto cum = policy.cumulative();
    double pbar = 0.0;
    for (std::size_t m = 0; m < cum.size(); ++m) {
        const double equiv = cum[m] / static_cast<double>(m + 1);
        pbar += equiv * prof.p_success[m];
    }
    pbar += cum.back() / static_cast<double>(cum.size()) * prof.p_outage;
    return pbar;
}

double rtd_short_term_power(const RtdSpec& spec, double epsilon, const FadingSpec& fading) {
    spec.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::domain_error("rtd_short_term_power: epsilon must be in (0,1)");
    return std::expm1(spec.rate) / (static_cast<double>(spec.rounds()) * gain_inv_cdf(fading, epsilon));
}

double rtd_throughput_continuous(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    check_rounds(spec, policy);
    if (policy.total() <= 0.0) return 0.0;
    const auto prof = rtd_decode_profile(spec, policy, fading);
    double eta = 0.0;
    for (std::size_t m = 0; m < prof.p_success.size(); ++m)
        eta += spec.rate / static_cast<double>(m + 1) * prof.p_success[m];
    return eta;
}

Metrics rtd_bursting_metrics(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    check_rounds(spec, policy);
    if (policy.total() <= 0.0) throw DegeneratePolicyError("rtd_bursting_metrics: all-zero policy");
    const double a = std::expm1(spec.rate);
    const auto cum = policy.cumulative();
    const int rounds = policy.rounds();

    // E{energy} = P_1 + sum_{m>=2} P_m F_G(a / cum_{m-1});
    // E{uses}   = 1 + sum_{m=1}^{M} F_G(a / cum_m)        (units of L)
    double energy = policy.powers[0];
    double uses = 1.0;
    for (int m = 2; m <= rounds; ++m) {
        const double reach = cdf_at_threshold(fading, a, cum[static_cast<std::size_t>(m) - 2]);
        energy += policy.powers[static_cast<std::size_t>(m) - 1] * reach;
        uses += reach;
    }

    const double outage = cdf_at_threshold(fading, a, cum.back());
    Metrics metrics;
    metrics.outage = outage;
    metrics.avg_power = energy / uses;
    metrics.throughput = spec.rate * (1.0 - outage) / uses;
    metrics.expected_rounds = uses;
    metrics.energy_per_packet = energy;
    return metrics;
}

Metrics rtd_continuous_metrics(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    Metrics metrics;
    metrics.outage = rtd_outage(spec, policy, fading);
    metrics.avg_power = rtd_avg_power_continuous(spec, policy, fading);
    metrics.throughput = rtd_throughput_continuous(spec, policy, fading);
    const Metrics bursting = rtd_bursting_metrics(spec, policy, fading);
    metrics.expected_rounds = bursting.expected_rounds;
    metrics.energy_per_packet = bursting.energy_per_packet;
    return metrics;
}

namespace {

bool pairwise_distinct_positive(const std::vector<double>& powers, double rel_tol) {
    for (double p : powers)
        if (!(p > 0.0)) return false;
    for (std::size_t i = 0; i < powers.size(); ++i)
        for (std::size_t j = i + 1; j < powers.size(); ++j)
            if (std::abs(powers[i] - powers[j]) <= rel_tol * std::max(powers[i], powers[j])) return false;
    return true;
}

// CDF at t of sum_n X_n, X_n ~ Exp(rate_n) independent with distinct rates
double hypoexponential_cdf(const std::vector<double>& rates, double t) {
    double cdf = 1.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        double coef = 1.0;
        for (std::size_t j = 0; j < rates.size(); ++j) {
            if (j == i) continue;
            coef *= rates[j] / (rates[j] - rates[i]);
        }
        cdf -= coef * std::exp(-rates[i] * t);
    }
    return std::min(1.0, std::max(0.0, cdf));
}

} // namespace

double rtd_fast_fading_outage(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading,
                              std::uint64_t mc_budget, std::uint64_t seed) {
    check_rounds(spec, policy);
    const double a = std::expm1(spec.rate);

    if (fading.temporal == TemporalModel::Fast && pairwise_distinct_positive(policy.powers, 1e-9)) {
        std::vector<double> rates(policy.powers.size());
        for (std::size_t i = 0; i < rates.size(); ++i) rates[i] = fading.lambda / policy.powers[i];
        return hypoexponential_cdf(rates, a);
    }

    // Monte Carlo fallback: Block, Correlated, or repeated/zero powers
    GainProcess proc(fading, seed);
    std::uint64_t outages = 0;
    for (std::uint64_t i = 0; i < mc_budget; ++i) {
        proc.reset();
        double snr = 0.0;
        for (double p : policy.powers) snr += proc.next() * p;
        if (snr < a) ++outages;
    }
    return static_cast<double>(outages) / static_cast<double>(mc_budget);
}

double rtd_avg_power_lower_bound(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    check_rounds(spec, policy);
    const auto cum = policy.cumulative();
    const int rounds = policy.rounds();
    const double mean = mean_gain(fading);

    // The exact identity moves the policy-dependent part into terms with
    // nonpositive coefficients (given nondecreasing rounds); bounding
    // Pr{decodable by round m} <= e^{-R} (1 + E{G} sum_{n<=m} P_n) can only
    // lower the value. The remaining term is sum P / (M+1) exactly.
    double bound = cum.back() / static_cast<double>(rounds);
    for (int m = 1; m <= rounds - 1; ++m) {
        const double cs = cum[static_cast<std::size_t>(m) - 1];
        const double coef = (cs - static_cast<double>(m) * policy.powers[static_cast<std::size_t>(m)]) /
                            (static_cast<double>(m) * static_cast<double>(m + 1));
        bound += std::exp(-spec.rate) * coef * (1.0 + mean * cs);
    }
    return bound;
}

} // namespace harqopt
