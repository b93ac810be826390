#include <doctest.h>

#include <cmath>

#include "harqopt/simulator.hpp"

using namespace harqopt;

namespace {
const FadingSpec kRayleigh = FadingSpec::block(1.0);
}

TEST_SUITE_BEGIN("simulator");

TEST_CASE("uniform policies pin the power ratio exactly") {
    const auto config = SimConfig::for_rtd(RtdSpec(1.0, 1), Model::Bursting, PowerPolicy::uniform(7.0, 2), kRayleigh,
                                           20000, 5);
    const auto metrics = simulate(config);
    CHECK(metrics.avg_power.value == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(metrics.avg_power.se == doctest::Approx(0.0).epsilon(1e-12));

    const auto cont = simulate(SimConfig::for_rtd(RtdSpec(1.0, 1), Model::Continuous,
                                                  PowerPolicy::uniform(7.0, 2), kRayleigh, 20000, 5));
    CHECK(cont.avg_power.value == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("uniform continuous throughput matches the closed form") {
    const RtdSpec spec(1.0, 1);
    const PowerPolicy policy = PowerPolicy::uniform(10.0, 2);
    const auto metrics = simulate(SimConfig::for_rtd(spec, Model::Continuous, policy, kRayleigh, 2000000, 3));
    const double closed = rtd_throughput_continuous(spec, policy, kRayleigh);
    CHECK(std::abs(metrics.throughput.value - closed) < 4.0 * metrics.throughput.se + 1e-9);
}

TEST_CASE("bursting estimates match the closed forms within 4 sigma") {
    const RtdSpec spec(1.0, 1);
    const PowerPolicy policy({10.0, 10.0});
    const auto metrics = simulate(SimConfig::for_rtd(spec, Model::Bursting, policy, kRayleigh, 400000, 11));
    const auto closed = rtd_bursting_metrics(spec, policy, kRayleigh);
    CHECK(std::abs(metrics.outage.value - closed.outage) < 4.0 * metrics.outage.se + 1e-9);
    CHECK(std::abs(metrics.avg_power.value - closed.avg_power) < 4.0 * metrics.avg_power.se + 1e-9);
    CHECK(std::abs(metrics.throughput.value - closed.throughput) < 4.0 * metrics.throughput.se + 1e-9);
    CHECK(std::abs(metrics.expected_rounds.value - closed.expected_rounds) < 4.0 * metrics.expected_rounds.se + 1e-9);
}

TEST_CASE("continuous block estimates match the per-block channel-use averages") {
    const RtdSpec spec(1.0, 1);
    const PowerPolicy policy({38.4, 1679.3});
    const auto metrics = simulate(SimConfig::for_rtd(spec, Model::Continuous, policy, kRayleigh, 3000000, 13));
    const auto closed = rtd_continuous_metrics(spec, policy, kRayleigh);
    CHECK(std::abs(metrics.avg_power.value - closed.avg_power) < 4.0 * metrics.avg_power.se + 1e-9);
    CHECK(std::abs(metrics.throughput.value - closed.throughput) < 4.0 * metrics.throughput.se + 1e-9);
    CHECK(std::abs(metrics.outage.value - closed.outage) < 4.0 * metrics.outage.se + 1e-9);
}

TEST_CASE("INR never loses to RTD on the same gains") {
    // common random numbers: the same seed produces the same per-packet gains,
    // so the superadditivity of accumulated information is a per-sample fact
    const auto fixed1 = InrRateSchedule::fixed_length(1.0, 1);
    const PowerPolicy policy({6.0, 25.0});
    const auto rtd = simulate(SimConfig::for_rtd(RtdSpec(1.0, 1), Model::Bursting, policy, kRayleigh, 200000, 21));
    const auto inr = simulate(SimConfig::for_inr(fixed1, Model::Bursting, policy, kRayleigh, 200000, 21));
    CHECK(inr.outage.value <= rtd.outage.value);
    CHECK(inr.expected_rounds.value <= rtd.expected_rounds.value);
}

TEST_CASE("correlated beta=1 equals block fading run for run") {
    const RtdSpec spec(1.0, 1);
    const PowerPolicy policy({10.0, 30.0});
    auto block = SimConfig::for_rtd(spec, Model::Bursting, policy, kRayleigh, 50000, 33);
    auto corr = SimConfig::for_rtd(spec, Model::Bursting, policy, FadingSpec::correlated(1.0, 1.0), 50000, 33);
    const auto a = simulate(block);
    const auto b = simulate(corr);
    CHECK(a.outage.value == b.outage.value);
    CHECK(a.avg_power.value == b.avg_power.value);
    CHECK(a.throughput.value == b.throughput.value);
}

TEST_CASE("reproducibility") {
    const auto config = SimConfig::for_rtd(RtdSpec(1.0, 2), Model::Bursting, PowerPolicy({3.0, 9.0, 81.0}),
                                           FadingSpec::correlated(0.7, 1.0), 50000, 99);
    const auto a = simulate(config);
    const auto b = simulate(config);
    CHECK(a.outage.value == b.outage.value);
    CHECK(a.avg_power.value == b.avg_power.value);
    CHECK(a.throughput.value == b.throughput.value);
    CHECK(a.outage.se == b.outage.se);
}

TEST_CASE("fast fading outage via the simulator matches the hypoexponential form") {
    const RtdSpec spec(1.0, 1);
    const PowerPolicy policy({10.0, 20.0});
    const auto metrics =
        simulate(SimConfig::for_rtd(spec, Model::Bursting, policy, FadingSpec::fast(1.0), 2000000, 41));
    const double closed = rtd_fast_fading_outage(spec, policy, FadingSpec::fast(1.0), 1, 1);
    CHECK(std::abs(metrics.outage.value - closed) < 4.0 * metrics.outage.se + 1e-9);
}

TEST_CASE("reinforcement with zero steps reproduces the static policy exactly") {
    const RtdSpec spec(1.0, 1);
    const FadingSpec fading = FadingSpec::correlated(0.9, 1.0);
    const ReinforcementPolicy rl{25.0, 0.0, 0.0, 0.0, 0.0};
    const auto adaptive = simulate_reinforcement(rl, spec, fading, 100000, 7);
    const auto fixed =
        simulate(SimConfig::for_rtd(spec, Model::Continuous, PowerPolicy::uniform(25.0, 2), fading, 100000, 7));
    CHECK(adaptive.metrics.outage.value == fixed.outage.value);
    CHECK(adaptive.metrics.avg_power.value == fixed.avg_power.value);
    CHECK(adaptive.metrics.throughput.value == fixed.throughput.value);
    CHECK(adaptive.trajectory.min_power == 25.0);
    CHECK(adaptive.trajectory.max_power == 25.0);
    CHECK(adaptive.trajectory.final_power == 25.0);
}

TEST_CASE("reinforcement state power stays positive and outcomes stay sane") {
    const ReinforcementPolicy rl{10.0, 0.4, 0.4, 0.4, 0.4};
    const auto run = simulate_reinforcement(rl, RtdSpec(1.0, 1), FadingSpec::correlated(0.9, 1.0), 100000, 17);
    CHECK(run.trajectory.min_power > 0.0);
    CHECK(run.metrics.outage.value >= 0.0);
    CHECK(run.metrics.outage.value <= 1.0);
    CHECK(run.metrics.avg_power.value > 0.0);
}

TEST_CASE("reinforcement tuning: singleton static grid returns the static point") {
    const RtdSpec spec(1.0, 1);
    const FadingSpec fading = FadingSpec::correlated(0.9, 1.0);
    const double p_static = calibrate_scale_to_outage(spec, {1.0, 1.0}, fading, Model::Continuous, 1e-2, 100000, 3);
    ReinforcementGrids grids;
    grids.d1 = grids.d2 = grids.d3 = grids.d4 = {0.0};
    grids.p_initial = {p_static};
    const auto tuned = tune_reinforcement(spec, fading, 1e-2, grids, 100000, 3);
    REQUIRE(tuned.feasible);
    CHECK(tuned.best.p_initial == p_static);
    CHECK(tuned.best.d1 == 0.0);

    // a target no grid point reaches is reported infeasible
    ReinforcementGrids weak;
    weak.d1 = weak.d2 = weak.d3 = weak.d4 = {0.0};
    weak.p_initial = {0.001};
    CHECK_FALSE(tune_reinforcement(spec, fading, 1e-6, weak, 20000, 3).feasible);
}

TEST_CASE("scale calibration hits its targets") {
    const RtdSpec spec(1.0, 1);
    const double s = calibrate_scale_to_outage(spec, {1.0, 4.0}, kRayleigh, Model::Bursting, 0.05, 200000, 9);
    const auto at = simulate(SimConfig::for_rtd(spec, Model::Bursting,
                                                PowerPolicy({s, 4.0 * s}), kRayleigh, 200000, 9));
    CHECK(at.outage.value == doctest::Approx(0.05).epsilon(0.05));

    const double s2 = calibrate_scale_to_avg_power(spec, {1.0, 4.0}, kRayleigh, Model::Bursting, 10.0, 200000, 9);
    const auto at2 = simulate(SimConfig::for_rtd(spec, Model::Bursting,
                                                 PowerPolicy({s2, 4.0 * s2}), kRayleigh, 200000, 9));
    CHECK(at2.avg_power.value == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(
        simulate(SimConfig::for_inr(InrRateSchedule({1.2, 0.5}), Model::Continuous, PowerPolicy({1.0, 1.0}),
                                    FadingSpec::fast(1.0), 10, 1)),
        UnsupportedConfigError);
    CHECK_THROWS_AS(simulate_reinforcement(ReinforcementPolicy{1.0, 0.0, 0.0, 0.0, 0.0}, RtdSpec(1.0, 2),
                                           FadingSpec::correlated(0.9, 1.0), 10, 1),
                    UnsupportedConfigError);
    ReinforcementPolicy bad{1.0, 1.5, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_SUITE_END();
