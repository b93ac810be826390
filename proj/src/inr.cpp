#include "harqopt/inr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace harqopt {

InrRateSchedule InrRateSchedule::fixed_length(double initial_rate, int max_retransmissions) {
    if (!(initial_rate > 0.0)) throw std::invalid_argument("InrRateSchedule: rate must be > 0");
    if (max_retransmissions < 0) throw std::invalid_argument("InrRateSchedule: M must be >= 0");
    std::vector<double> r(static_cast<std::size_t>(max_retransmissions) + 1);
    for (std::size_t m = 0; m < r.size(); ++m) r[m] = initial_rate / static_cast<double>(m + 1);
    return InrRateSchedule(std::move(r));
}

void InrRateSchedule::validate() const {
    if (rates.empty()) throw std::invalid_argument("InrRateSchedule: needs at least one round");
    for (double r : rates)
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("InrRateSchedule: rates must be finite and > 0");
    for (std::size_t m = 1; m < rates.size(); ++m)
        if (!(rates[m] < rates[m - 1])) throw std::invalid_argument("InrRateSchedule: rates must be strictly decreasing");
}

std::vector<double> InrRateSchedule::lengths() const {
    // l_n / sum_{j<=m} l_j = R^(m) c_n, so l_n is proportional to c_n; l_1 = 1
    std::vector<double> len(rates.size());
    const double c1 = coefficient(1);
    for (int m = 1; m <= rounds(); ++m) len[static_cast<std::size_t>(m) - 1] = coefficient(m) / c1;
    return len;
}

double InrRateSchedule::cumulative_length(int m) const {
    // sum_{j<=m} l_j = 1/(R^(m) c_1) since sum_{n<=m} c_n = 1/R^(m)
    return 1.0 / (rates[static_cast<std::size_t>(m) - 1] * coefficient(1));
}

bool InrRateSchedule::is_fixed_length(double rel_tol) const {
    for (int m = 1; m <= rounds(); ++m) {
        const double expect = rates.front() / static_cast<double>(m);
        if (std::abs(rates[static_cast<std::size_t>(m) - 1] - expect) > rel_tol * expect) return false;
    }
    return true;
}

namespace {

void check_rounds(const InrRateSchedule& schedule, const PowerPolicy& policy) {
    schedule.validate();
    policy.validate();
    if (policy.rounds() != schedule.rounds())
        throw std::invalid_argument("inr: policy must have as many rounds as the rate schedule");
}

} // namespace

EnergySchedule inr_energy_schedule(const InrRateSchedule& schedule, const PowerPolicy& policy) {
    check_rounds(schedule, policy);
    const auto len = schedule.lengths();
    EnergySchedule energy;
    energy.per_round.resize(len.size());
    energy.cumulative.resize(len.size());
    double s = 0.0;
    for (std::size_t n = 0; n < len.size(); ++n) {
        energy.per_round[n] = len[n] * policy.powers[n];
        s += energy.per_round[n];
        energy.cumulative[n] = s;
    }
    return energy;
}

double inr_accumulated_info(const InrRateSchedule& schedule, const PowerPolicy& policy, double g, int m) {
    double acc = 0.0;
    for (int n = 1; n <= m; ++n)
        acc += schedule.coefficient(n) * std::log1p(g * policy.powers[static_cast<std::size_t>(n) - 1]);
    return acc;
}

double inr_equivalent_power(const InrRateSchedule& schedule, const PowerPolicy& policy, int m) {
    double s = 0.0;
    for (int n = 1; n <= m; ++n) s += policy.powers[static_cast<std::size_t>(n) - 1] * schedule.coefficient(n);
    return schedule.rates[static_cast<std::size_t>(m) - 1] * s;
}

double inr_decode_threshold(const InrRateSchedule& schedule, const PowerPolicy& policy, int m) {
    check_rounds(schedule, policy);
    if (m < 1 || m > schedule.rounds()) throw std::invalid_argument("inr_decode_threshold: round out of range");
    bool any_power = false;
    for (int n = 1; n <= m; ++n) any_power = any_power || policy.powers[static_cast<std::size_t>(n) - 1] > 0.0;
    if (!any_power) return std::numeric_limits<double>::infinity();

    // A_m is strictly increasing from 0; bracket by doubling, then bisect to
    // 1e-12 relative
    double hi = 1.0;
    while (inr_accumulated_info(schedule, policy, hi, m) < 1.0) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("inr_decode_threshold: failed to bracket the root");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inr_accumulated_info(schedule, policy, mid, m) < 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double inr_outage_threshold(const InrRateSchedule& schedule, const PowerPolicy& policy) {
    if (policy.total() <= 0.0) throw DegeneratePolicyError("inr_outage_threshold: all-zero policy");
    return inr_decode_threshold(schedule, policy, schedule.rounds());
}

DecodeProfile inr_decode_profile(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading) {
    check_rounds(schedule, policy);
    if (policy.total() <= 0.0) throw DegeneratePolicyError("inr_decode_profile: all-zero policy");

    DecodeProfile prof;
    prof.p_success.resize(static_cast<std::size_t>(schedule.rounds()));
    double prev = 1.0; // F_G(g*_0), g*_0 = +inf
    for (int m = 1; m <= schedule.rounds(); ++m) {
        const double g = inr_decode_threshold(schedule, policy, m);
        const double cur = std::isinf(g) ? 1.0 : gain_cdf(fading, g);
        prof.p_success[static_cast<std::size_t>(m) - 1] = prev - cur;
        prev = cur;
    }
    prof.p_outage = prev;
    return prof;
}

double inr_outage(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading) {
    return gain_cdf(fading, inr_outage_threshold(schedule, policy));
}

double inr_avg_power_continuous(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading) {
    const auto prof = inr_decode_profile(schedule, policy, fading);
    double pbar = 0.0;
    for (int m = 1; m <= schedule.rounds(); ++m)
        pbar += inr_equivalent_power(schedule, policy, m) * prof.p_success[static_cast<std::size_t>(m) - 1];
    pbar += inr_equivalent_power(schedule, policy, schedule.rounds()) * prof.p_outage;
    return pbar;
}

double inr_throughput_continuous(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading) {
    if (policy.total() <= 0.0) return 0.0;
    const auto prof = inr_decode_profile(schedule, policy, fading);
    double eta = 0.0;
    for (int m = 1; m <= schedule.rounds(); ++m)
        eta += schedule.rates[static_cast<std::size_t>(m) - 1] * prof.p_success[static_cast<std::size_t>(m) - 1];
    return eta;
}

namespace {

// Theta_n = Pr{not decoded by round n-1} = F_G(g*_{n-1}); Theta_1 = 1.
std::vector<double> reach_probabilities(const InrRateSchedule& schedule, const PowerPolicy& policy,
                                        const FadingSpec& fading) {
    std::vector<double> theta(static_cast<std::size_t>(schedule.rounds()));
    theta[0] = 1.0;
    for (int n = 2; n <= schedule.rounds(); ++n) {
        const double g = inr_decode_threshold(schedule, policy, n - 1);
        theta[static_cast<std::size_t>(n) - 1] = std::isinf(g) ? 1.0 : gain_cdf(fading, g);
    }
    return theta;
}

} // namespace

Metrics inr_bursting_metrics(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading) {
    check_rounds(schedule, policy);
    if (policy.total() <= 0.0) throw DegeneratePolicyError("inr_bursting_metrics: all-zero policy");

    const auto theta = reach_probabilities(schedule, policy, fading);
    const auto len = schedule.lengths();
    double energy = 0.0;
    double uses = 0.0;
    for (int n = 1; n <= schedule.rounds(); ++n) {
        const std::size_t i = static_cast<std::size_t>(n) - 1;
        energy += policy.powers[i] * len[i] * theta[i];
        uses += len[i] * theta[i];
    }
    const double outage = inr_outage(schedule, policy, fading);
    const double q_per_l1 = schedule.initial_rate(); // Q/l_1 = R^(1)

    Metrics metrics;
    metrics.outage = outage;
    metrics.avg_power = energy / uses;
    metrics.throughput = q_per_l1 * (1.0 - outage) / uses;
    metrics.expected_rounds = uses;
    metrics.energy_per_packet = energy;
    return metrics;
}

Metrics inr_continuous_metrics(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading) {
    Metrics metrics;
    metrics.outage = inr_outage(schedule, policy, fading);
    metrics.avg_power = inr_avg_power_continuous(schedule, policy, fading);
    metrics.throughput = inr_throughput_continuous(schedule, policy, fading);
    const Metrics bursting = inr_bursting_metrics(schedule, policy, fading);
    metrics.expected_rounds = bursting.expected_rounds;
    metrics.energy_per_packet = bursting.energy_per_packet;
    return metrics;
}

double inr_short_term_power(const InrRateSchedule& schedule, double epsilon, const FadingSpec& fading) {
    schedule.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::domain_error("inr_short_term_power: epsilon must be in (0,1)");
    return std::expm1(schedule.final_rate()) / gain_inv_cdf(fading, epsilon);
}

double inr_fast_fading_outage(const InrRateSchedule& schedule, const PowerPolicy& policy, const FadingSpec& fading,
                              std::uint64_t mc_budget, std::uint64_t seed) {
    check_rounds(schedule, policy);
    // per-round gains equalize the slot lengths, so only fixed-length coding
    // has a well-defined decode rule here
    if (!schedule.is_fixed_length())
        throw UnsupportedConfigError("inr_fast_fading_outage: needs a fixed-length schedule");

    const double rate = schedule.initial_rate();
    GainProcess proc(fading, seed);
    std::uint64_t outages = 0;
    for (std::uint64_t i = 0; i < mc_budget; ++i) {
        proc.reset();
        double acc = 0.0;
        for (double p : policy.powers) acc += std::log1p(proc.next() * p);
        if (acc < rate) ++outages;
    }
    return static_cast<double>(outages) / static_cast<double>(mc_budget);
}

} // namespace harqopt
