#include <doctest.h>

#include <cmath>
#include <numeric>

#include "harqopt/rtd.hpp"
#include "oracles.hpp"

using namespace harqopt;

namespace {
const FadingSpec kRayleigh = FadingSpec::block(1.0);
}

TEST_SUITE_BEGIN("rtd");

TEST_CASE("decode profile at the reference point") {
    const RtdSpec spec(1.0, 1);
    const PowerPolicy policy({10.0, 10.0});
    const auto prof = rtd_decode_profile(spec, policy, kRayleigh);
    CHECK(prof.p_success[0] == doctest::Approx(0.8421238520626434).epsilon(1e-12));
    CHECK(prof.p_success[1] == doctest::Approx(0.0755492117583687).epsilon(1e-10));
    CHECK(prof.p_outage == doctest::Approx(0.0823269361789879).epsilon(1e-12));
}

TEST_CASE("single round is a complement pair") {
    const auto prof = rtd_decode_profile(RtdSpec(1.0, 0), PowerPolicy({10.0}), kRayleigh);
    CHECK(prof.p_success[0] == doctest::Approx(0.8421238520626434).epsilon(1e-12));
    CHECK(prof.p_outage == doctest::Approx(1.0 - 0.8421238520626434).epsilon(1e-12));
}

TEST_CASE("huge first-round power decodes immediately") {
    const auto prof = rtd_decode_profile(RtdSpec(2.5, 1), PowerPolicy({1e14, 1.0}), kRayleigh);
    CHECK(prof.p_success[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("profile sums to one for random policies") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const int m = 1 + static_cast<int>(gen() % 4);
        std::vector<double> p(static_cast<std::size_t>(m));
        for (auto& v : p) v = std::pow(10.0, -1.0 + 4.0 * u(gen));
        if (rep % 5 == 0) p[gen() % p.size()] = 0.0; // zero rounds allowed mid-policy
        if (std::accumulate(p.begin(), p.end(), 0.0) <= 0.0) continue;
        const RtdSpec spec(0.2 + 3.0 * u(gen), m - 1);
        const PowerPolicy policy(p);
        const auto prof = rtd_decode_profile(spec, policy, kRayleigh);
        CHECK(prof.sum() == doctest::Approx(1.0).epsilon(1e-12));
        const double eta = rtd_throughput_continuous(spec, policy, kRayleigh);
        CHECK(eta >= 0.0);
        CHECK(eta <= spec.rate * (1.0 + 1e-12));
    }
}

TEST_CASE("average power: uniform collapse and reference policy") {
    CHECK(rtd_avg_power_continuous(RtdSpec(1.0, 1), PowerPolicy({7.5, 7.5}), kRayleigh) == doctest::Approx(7.5).epsilon(1e-14));
    CHECK(rtd_avg_power_continuous(RtdSpec(1.0, 0), PowerPolicy({3.25}), kRayleigh) == doctest::Approx(3.25).epsilon(1e-14));
    CHECK(rtd_avg_power_continuous(RtdSpec(1.0, 3), PowerPolicy::uniform(12.0, 4), kRayleigh) ==
          doctest::Approx(12.0).epsilon(1e-14));
    // near-optimal two-round policy from the grid oracle regime
    const double pbar = rtd_avg_power_continuous(RtdSpec(1.0, 1), PowerPolicy({38.4, 1679.3}), kRayleigh);
    CHECK(pbar == doctest::Approx(74.30334013609033).epsilon(1e-12));
    CHECK(to_db(pbar) == doctest::Approx(18.71008336910886).epsilon(1e-10));
}

TEST_CASE("outage closed form, zero power, swap invariance") {
    const RtdSpec spec(1.0, 1);
    CHECK(rtd_outage(spec, PowerPolicy({10.0, 10.0}), kRayleigh) == doctest::Approx(0.0823269361789879).epsilon(1e-12));
    CHECK(rtd_outage(spec, PowerPolicy({1000.0, 717.7}), kRayleigh) ==
          doctest::Approx(gain_cdf(kRayleigh, std::expm1(1.0) / 1717.7)).epsilon(1e-14));
    CHECK(std::abs(rtd_outage(spec, PowerPolicy({1000.0, 717.7}), kRayleigh) - 1e-3) < 5e-6);
    CHECK(rtd_outage(spec, PowerPolicy({0.0, 0.0}), kRayleigh) == 1.0);
    // equals the decode-profile outage entry
    CHECK(rtd_outage(spec, PowerPolicy({5.0, 9.0}), kRayleigh) ==
          rtd_decode_profile(spec, PowerPolicy({5.0, 9.0}), kRayleigh).p_outage);
    CHECK(rtd_outage(spec, PowerPolicy({3.0, 41.0}), kRayleigh) ==
          rtd_outage(spec, PowerPolicy({41.0, 3.0}), kRayleigh));
    // strictly decreasing in each power
    const double base = rtd_outage(spec, PowerPolicy({5.0, 9.0}), kRayleigh);
    CHECK(rtd_outage(spec, PowerPolicy({5.5, 9.0}), kRayleigh) < base);
    CHECK(rtd_outage(spec, PowerPolicy({5.0, 9.5}), kRayleigh) < base);
}

TEST_CASE("short-term power anchors") {
    CHECK(rtd_short_term_power(RtdSpec(1.0, 1), 1e-3, kRayleigh) == doctest::Approx(858.7112721415114).epsilon(1e-12));
    CHECK(to_db(rtd_short_term_power(RtdSpec(1.0, 1), 1e-3, kRayleigh)) ==
          doctest::Approx(29.338471638381954).epsilon(1e-10));
    CHECK(rtd_short_term_power(RtdSpec(1.0, 0), 1e-3, kRayleigh) == doctest::Approx(1717.4225442830227).epsilon(1e-12));
    // relaxed constraint: power vanishes as epsilon -> 1
    CHECK(rtd_short_term_power(RtdSpec(1.0, 0), 0.999999, kRayleigh) < 0.2);
    CHECK_THROWS_AS(rtd_short_term_power(RtdSpec(1.0, 0), 0.0, kRayleigh), std::domain_error);
    CHECK_THROWS_AS(rtd_short_term_power(RtdSpec(1.0, 0), 1.0, kRayleigh), std::domain_error);
    // the uniform policy at that power meets the constraint exactly
    const double p = rtd_short_term_power(RtdSpec(1.0, 2), 1e-2, kRayleigh);
    CHECK(rtd_outage(RtdSpec(1.0, 2), PowerPolicy::uniform(p, 3), kRayleigh) == doctest::Approx(1e-2).epsilon(1e-12));
}

TEST_CASE("continuous throughput") {
    CHECK(rtd_throughput_continuous(RtdSpec(1.0, 1), PowerPolicy({10.0, 10.0}), kRayleigh) ==
          doctest::Approx(0.8798984579418277).epsilon(1e-12));
    CHECK(rtd_throughput_continuous(RtdSpec(1.0, 1), PowerPolicy({1e14, 1.0}), kRayleigh) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rtd_throughput_continuous(RtdSpec(1.0, 1), PowerPolicy({0.0, 0.0}), kRayleigh) == 0.0);
}

TEST_CASE("bursting metrics: uniform collapse, reference values, route identity") {
    const RtdSpec spec(1.0, 1);
    CHECK(rtd_bursting_metrics(spec, PowerPolicy({4.0, 4.0}), kRayleigh).avg_power == doctest::Approx(4.0).epsilon(1e-14));

    const auto metrics = rtd_bursting_metrics(spec, PowerPolicy({10.0, 10.0}), kRayleigh);
    CHECK(metrics.throughput == doctest::Approx(0.7925485514627426).epsilon(1e-12));
    CHECK(metrics.expected_rounds == doctest::Approx(1.1578761479373565).epsilon(1e-12));
    CHECK(metrics.outage == doctest::Approx(0.0823269361789879).epsilon(1e-12));

    // phi must equal E{energy}/E{uses} assembled term by term from the
    // decode profile (the telescoped closed form vs the direct sums)
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int rounds = 1 + static_cast<int>(gen() % 4);
        std::vector<double> p(static_cast<std::size_t>(rounds));
        for (auto& v : p) v = std::pow(10.0, 3.5 * u(gen));
        const RtdSpec s(0.3 + 2.0 * u(gen), rounds - 1);
        const PowerPolicy policy(p);
        const auto prof = rtd_decode_profile(s, policy, kRayleigh);
        const auto cum = policy.cumulative();
        double e_energy = 0.0, e_uses = 0.0;
        for (int m = 1; m <= rounds; ++m) {
            e_energy += cum[static_cast<std::size_t>(m) - 1] * prof.p_success[static_cast<std::size_t>(m) - 1];
            e_uses += m * prof.p_success[static_cast<std::size_t>(m) - 1];
        }
        e_energy += cum.back() * prof.p_outage;
        e_uses += rounds * prof.p_outage;
        const auto got = rtd_bursting_metrics(s, policy, kRayleigh);
        CHECK(got.avg_power == doctest::Approx(e_energy / e_uses).epsilon(1e-12));
        CHECK(got.expected_rounds == doctest::Approx(e_uses).epsilon(1e-12));
        CHECK(got.energy_per_packet == doctest::Approx(e_energy).epsilon(1e-12));
    }
}

TEST_CASE("closed forms agree with an independent packet simulation") {
    oracles::McProblem prob;
    prob.rate = 1.0;
    prob.powers = {10.0, 10.0};
    prob.lambda = 1.0;

    const RtdSpec spec(1.0, 1);
    const PowerPolicy policy({10.0, 10.0});

    prob.bursting = true;
    auto mc = oracles::simulate_block_fading(prob, 400000, 17);
    const auto burst = rtd_bursting_metrics(spec, policy, kRayleigh);
    CHECK(std::abs(mc.outage - burst.outage) < 4.0 * mc.outage_se + 1e-9);
    CHECK(std::abs(mc.avg_power - burst.avg_power) < 4.0 * mc.avg_power_se + 1e-9);
    CHECK(std::abs(mc.throughput - burst.throughput) < 4.0 * mc.throughput_se + 1e-9);

    prob.bursting = false;
    mc = oracles::simulate_block_fading(prob, 200000, 23);
    CHECK(std::abs(mc.avg_power - rtd_avg_power_continuous(spec, policy, kRayleigh)) < 4.0 * mc.avg_power_se + 1e-9);
    CHECK(std::abs(mc.throughput - rtd_throughput_continuous(spec, policy, kRayleigh)) < 4.0 * mc.throughput_se + 1e-9);

    // the skewed near-optimal policy, where the continuous/bursting gap is wide
    prob.powers = {38.4, 1679.3};
    prob.bursting = false;
    mc = oracles::simulate_block_fading(prob, 400000, 29);
    CHECK(std::abs(mc.avg_power - 74.30334013609033) < 4.0 * mc.avg_power_se + 1e-9);
}

TEST_CASE("fast fading: hypoexponential closed form vs MC and degeneracies") {
    const RtdSpec spec(1.0, 1);
    const double closed = rtd_fast_fading_outage(spec, PowerPolicy({10.0, 20.0}), FadingSpec::fast(1.0), 1, 1);
    CHECK(closed == doctest::Approx(0.006777724420619302).epsilon(1e-12));

    oracles::McProblem prob;
    prob.rate = 1.0;
    prob.powers = {10.0, 20.0};
    const auto [mc, se] = oracles::simulate_fast_outage(prob, 2000000, 31);
    CHECK(std::abs(mc - closed) < 4.0 * se);

    // M = 0 equals the block-fading outage
    CHECK(rtd_fast_fading_outage(RtdSpec(1.0, 0), PowerPolicy({10.0}), FadingSpec::fast(1.0), 1, 1) ==
          doctest::Approx(rtd_outage(RtdSpec(1.0, 0), PowerPolicy({10.0}), kRayleigh)).epsilon(1e-12));

    // repeated powers take the MC fallback and stay near the Erlang value
    const double erlang = 1.0 - std::exp(-std::expm1(1.0) / 10.0) * (1.0 + std::expm1(1.0) / 10.0);
    const double mc_equal =
        rtd_fast_fading_outage(spec, PowerPolicy({10.0, 10.0}), FadingSpec::fast(1.0), 2000000, 77);
    CHECK(mc_equal == doctest::Approx(erlang).epsilon(0.05));

    // beta = 1 correlated fading reproduces block fading
    const double mc_block =
        rtd_fast_fading_outage(spec, PowerPolicy({10.0, 20.0}), FadingSpec::correlated(1.0, 1.0), 500000, 5);
    const double block = rtd_outage(spec, PowerPolicy({10.0, 20.0}), kRayleigh);
    CHECK(mc_block == doctest::Approx(block).epsilon(0.05));
}

TEST_CASE("telescoped average-power identity") {
    // Pbar = sum_m ((cum_m - m P_{m+1})/(m(m+1))) Pr{decodable by m} + sum P/(M+1),
    // the rearrangement the lower bound starts from
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int rounds = 1 + static_cast<int>(gen() % 4);
        std::vector<double> p(static_cast<std::size_t>(rounds));
        for (auto& v : p) v = std::pow(10.0, 3.5 * u(gen));
        const RtdSpec spec(0.3 + 2.5 * u(gen), rounds - 1);
        const PowerPolicy policy(p);
        const auto cum = policy.cumulative();
        const double a = std::expm1(spec.rate);
        double identity = cum.back() / rounds;
        for (int m = 1; m <= rounds - 1; ++m) {
            const double cs = cum[static_cast<std::size_t>(m) - 1];
            const double decodable = 1.0 - gain_cdf(kRayleigh, a / cs);
            identity += (cs - m * p[static_cast<std::size_t>(m)]) / (m * (m + 1.0)) * decodable;
        }
        CHECK(identity == doctest::Approx(rtd_avg_power_continuous(spec, policy, kRayleigh)).epsilon(1e-12));
    }
}

TEST_CASE("Chebyshev lower bound") {
    // M = 0: the bound is the exact power
    CHECK(rtd_avg_power_lower_bound(RtdSpec(1.0, 0), PowerPolicy({1717.4225442830227}), kRayleigh) ==
          doctest::Approx(1717.4225442830227).epsilon(1e-12));

    // uniform policies make the first sum vanish: bound equals Pbar exactly
    for (double r : {1.0, 4.0}) {
        const RtdSpec spec(r, 2);
        const double p = rtd_short_term_power(spec, 1e-3, kRayleigh);
        const PowerPolicy uniform = PowerPolicy::uniform(p, 3);
        const double bound = rtd_avg_power_lower_bound(spec, uniform, kRayleigh);
        const double pbar = rtd_avg_power_continuous(spec, uniform, kRayleigh);
        CHECK(bound == doctest::Approx(pbar).epsilon(1e-12));
        CHECK(to_db(pbar) - to_db(bound) < 3.0);
    }

    // nondecreasing policies meeting the constraint: bound below the true Pbar
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int rounds = 2 + static_cast<int>(gen() % 3);
        std::vector<double> p(static_cast<std::size_t>(rounds));
        double v = std::pow(10.0, 1.0 + u(gen));
        for (auto& x : p) {
            x = v;
            v *= 1.0 + 3.0 * u(gen);
        }
        const RtdSpec spec(0.5 + 2.0 * u(gen), rounds - 1);
        const PowerPolicy policy(p);
        CHECK(rtd_avg_power_lower_bound(spec, policy, kRayleigh) <=
              rtd_avg_power_continuous(spec, policy, kRayleigh) + 1e-9);
    }
}

TEST_CASE("M=1 bursting prefers the larger power in the second round") {
    // phi(P, P+D) <= phi(P+D, P), equivalently F(a/(P+D)) F(a/P) <= 1
    const RtdSpec spec(1.0, 1);
    for (double p : {0.5, 2.0, 10.0, 80.0}) {
        for (double delta : {0.0, 0.1, 3.0, 50.0}) {
            const double inc = rtd_bursting_metrics(spec, PowerPolicy({p, p + delta}), kRayleigh).avg_power;
            const double dec = rtd_bursting_metrics(spec, PowerPolicy({p + delta, p}), kRayleigh).avg_power;
            CHECK(inc <= dec * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("degenerate and malformed inputs") {
    CHECK_THROWS_AS(rtd_decode_profile(RtdSpec(1.0, 1), PowerPolicy({0.0, 0.0}), kRayleigh), DegeneratePolicyError);
    CHECK_THROWS_AS(rtd_bursting_metrics(RtdSpec(1.0, 1), PowerPolicy({0.0, 0.0}), kRayleigh), DegeneratePolicyError);
    CHECK_THROWS_AS(rtd_decode_profile(RtdSpec(1.0, 2), PowerPolicy({1.0, 1.0}), kRayleigh), std::invalid_argument);
    CHECK_THROWS_AS(PowerPolicy({-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(RtdSpec(0.0, 1), std::invalid_argument);
}

TEST_SUITE_END();
