#include "harqopt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harqopt/rng.hpp"

namespace harqopt {

SimConfig SimConfig::for_rtd(const RtdSpec& spec, Model model, const PowerPolicy& policy, const FadingSpec& fading,
                             std::uint64_t n_packets, std::uint64_t seed) {
    SimConfig config;
    config.protocol = Protocol::Rtd;
    config.model = model;
    config.rtd = spec;
    config.policy = policy;
    config.fading = fading;
    config.n_packets = n_packets;
    config.seed = seed;
    config.validate();
    return config;
}

SimConfig SimConfig::for_inr(const InrRateSchedule& schedule, Model model, const PowerPolicy& policy,
                             const FadingSpec& fading, std::uint64_t n_packets, std::uint64_t seed) {
    SimConfig config;
    config.protocol = Protocol::Inr;
    config.model = model;
    config.inr = schedule;
    config.rtd = RtdSpec(schedule.initial_rate(), schedule.rounds() - 1);
    config.policy = policy;
    config.fading = fading;
    config.n_packets = n_packets;
    config.seed = seed;
    config.validate();
    return config;
}

void SimConfig::validate() const {
    fading.validate();
    policy.validate();
    if (n_packets < 1) throw std::invalid_argument("SimConfig: n_packets must be >= 1");
    if (packets_per_block < 1) throw std::invalid_argument("SimConfig: packets_per_block must be >= 1");
    if (n_batches < 1) throw std::invalid_argument("SimConfig: n_batches must be >= 1");
    if (protocol == Protocol::Inr) {
        inr.validate();
        if (policy.rounds() != inr.rounds()) throw std::invalid_argument("SimConfig: policy/schedule round mismatch");
        if (fading.temporal != TemporalModel::Block && !inr.is_fixed_length())
            throw UnsupportedConfigError("SimConfig: variable-length INR needs block fading");
    } else {
        rtd.validate();
        if (policy.rounds() != rtd.rounds()) throw std::invalid_argument("SimConfig: policy needs M+1 rounds");
    }
}

void ReinforcementPolicy::validate() const {
    if (!(p_initial > 0.0)) throw std::invalid_argument("ReinforcementPolicy: p_initial must be > 0");
    for (double down : {d1, d3})
        if (!(down >= 0.0 && down < 1.0)) throw std::invalid_argument("ReinforcementPolicy: d1,d3 must be in [0,1)");
    for (double up : {d2, d4})
        if (!(up >= 0.0)) throw std::invalid_argument("ReinforcementPolicy: d2,d4 must be >= 0");
}

namespace {

struct ProtocolContext {
    bool inr = false;
    double decode_target = 0.0;     // e^R - 1 for RTD (linear SNR), 1.0 for INR
    std::vector<double> coef;       // INR information coefficients
    std::vector<double> len;        // slot lengths, units of l_1
    double full_length = 0.0;       // l^(M+1)
    double q_nats = 0.0;            // delivered nats on success, per l_1

    static ProtocolContext make(const SimConfig& config) {
        ProtocolContext ctx;
        const int rounds = config.policy.rounds();
        if (config.protocol == Protocol::Inr) {
            ctx.inr = true;
            ctx.decode_target = 1.0;
            ctx.coef.resize(static_cast<std::size_t>(rounds));
            for (int m = 1; m <= rounds; ++m) ctx.coef[static_cast<std::size_t>(m) - 1] = config.inr.coefficient(m);
            ctx.len = config.inr.lengths();
            ctx.q_nats = config.inr.initial_rate();
        } else {
            ctx.decode_target = std::expm1(config.rtd.rate);
            ctx.len.assign(static_cast<std::size_t>(rounds), 1.0);
            ctx.q_nats = config.rtd.rate;
        }
        for (double l : ctx.len) ctx.full_length += l;
        return ctx;
    }
};

template <typename GainFn>
PacketOutcome run_packet(const ProtocolContext& ctx, const std::vector<double>& powers, GainFn&& gain) {
    PacketOutcome out;
    double acc = 0.0;
    for (std::size_t m = 0; m < powers.size(); ++m) {
        const double g = gain();
        const double p = powers[m];
        out.energy += ctx.len[m] * p;
        out.channel_uses += ctx.len[m];
        out.rounds_used = static_cast<int>(m) + 1;
        acc += ctx.inr ? ctx.coef[m] * std::log1p(g * p) : g * p;
        if (acc >= ctx.decode_target) {
            out.decoded = true;
            break;
        }
    }
    out.info_nats = out.decoded ? ctx.q_nats : 0.0;
    return out;
}

struct BatchSums {
    double energy = 0.0, uses = 0.0, nats = 0.0, outages = 0.0, units = 0.0;
    double raw_energy = 0.0; // per-packet energy, block mode only
};

// batch-means standard error of a ratio (or mean) assembled per batch
Estimate ratio_estimate(const std::vector<BatchSums>& batches, double num_total, double den_total,
                        double (*num)(const BatchSums&), double (*den)(const BatchSums&)) {
    Estimate est;
    est.value = num_total / den_total;
    double mean = 0.0;
    int used = 0;
    std::vector<double> vals;
    vals.reserve(batches.size());
    for (const auto& b : batches) {
        if (den(b) <= 0.0) continue;
        vals.push_back(num(b) / den(b));
        mean += vals.back();
        ++used;
    }
    if (used >= 2) {
        mean /= used;
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        est.se = std::sqrt(ss / (used - 1)) / std::sqrt(static_cast<double>(used));
    }
    return est;
}

SimMetrics assemble(const std::vector<BatchSums>& batches) {
    BatchSums total;
    for (const auto& b : batches) {
        total.energy += b.energy;
        total.uses += b.uses;
        total.nats += b.nats;
        total.outages += b.outages;
        total.units += b.units;
    }
    SimMetrics metrics;
    metrics.avg_power = ratio_estimate(batches, total.energy, total.uses, [](const BatchSums& b) { return b.energy; },
                                       [](const BatchSums& b) { return b.uses; });
    metrics.throughput = ratio_estimate(batches, total.nats, total.uses, [](const BatchSums& b) { return b.nats; },
                                        [](const BatchSums& b) { return b.uses; });
    metrics.outage = ratio_estimate(batches, total.outages, total.units, [](const BatchSums& b) { return b.outages; },
                                    [](const BatchSums& b) { return b.units; });
    metrics.expected_rounds = ratio_estimate(batches, total.uses, total.units, [](const BatchSums& b) { return b.uses; },
                                             [](const BatchSums& b) { return b.units; });
    metrics.energy_per_packet = total.energy / total.units;
    return metrics;
}

// Bursting, any temporal model: a fresh fading realization per packet, the
// gain advancing once per transmitted codeword within it. Also serves the
// continuous model under Fast/Correlated fading, where the chain persists
// across packets instead of being reset.
SimMetrics simulate_packet_stream(const SimConfig& config, bool reset_per_packet) {
    const ProtocolContext ctx = ProtocolContext::make(config);
    GainProcess proc(config.fading, config.seed);
    std::vector<BatchSums> batches(static_cast<std::size_t>(config.n_batches));
    const std::uint64_t per_batch = (config.n_packets + batches.size() - 1) / batches.size();

    std::uint64_t done = 0;
    for (std::size_t b = 0; b < batches.size() && done < config.n_packets; ++b) {
        BatchSums& sums = batches[b];
        for (std::uint64_t i = 0; i < per_batch && done < config.n_packets; ++i, ++done) {
            if (reset_per_packet) proc.reset();
            const PacketOutcome out = run_packet(ctx, config.policy.powers, [&] { return proc.next(); });
            sums.energy += out.energy;
            sums.uses += out.channel_uses;
            sums.nats += out.info_nats;
            sums.outages += out.decoded ? 0.0 : 1.0;
            sums.units += 1.0;
        }
    }
    SimMetrics metrics = assemble(batches);
    metrics.packets = done;
    return metrics;
}

// Continuous model under block fading: every packet of a block repeats the
// same outcome, so each block contributes its per-channel-use averages once
// (equal block weights = equal L_c durations). The straddling packet at the
// block edge is dropped, as blocks host whole packets only.
SimMetrics simulate_continuous_block(const SimConfig& config) {
    const ProtocolContext ctx = ProtocolContext::make(config);
    FadingSpec block_draws = config.fading;
    block_draws.temporal = TemporalModel::Block;
    GainProcess proc(block_draws, config.seed);
    std::vector<BatchSums> batches(static_cast<std::size_t>(config.n_batches));

    const double slot_uses = static_cast<double>(config.packets_per_block) * ctx.full_length;
    const std::uint64_t n_blocks =
        std::max<std::uint64_t>(1, (config.n_packets + config.packets_per_block - 1) /
                                       static_cast<std::uint64_t>(config.packets_per_block));
    const std::uint64_t per_batch = (n_blocks + batches.size() - 1) / batches.size();

    std::uint64_t packets = 0;
    std::uint64_t done = 0;
    for (std::size_t b = 0; b < batches.size() && done < n_blocks; ++b) {
        BatchSums& sums = batches[b];
        for (std::uint64_t i = 0; i < per_batch && done < n_blocks; ++i, ++done) {
            proc.reset();
            const double g = proc.next();
            const PacketOutcome out = run_packet(ctx, config.policy.powers, [&] { return g; });
            sums.energy += out.energy / out.channel_uses;
            sums.uses += out.channel_uses;
            sums.nats += out.info_nats / out.channel_uses;
            sums.outages += out.decoded ? 0.0 : 1.0;
            sums.units += 1.0;
            sums.raw_energy += out.energy;
            packets += static_cast<std::uint64_t>(slot_uses / out.channel_uses);
        }
    }

    SimMetrics metrics;
    BatchSums total;
    for (const auto& b : batches) {
        total.energy += b.energy;
        total.uses += b.uses;
        total.nats += b.nats;
        total.outages += b.outages;
        total.units += b.units;
        total.raw_energy += b.raw_energy;
    }
    metrics.avg_power = ratio_estimate(batches, total.energy, total.units, [](const BatchSums& b) { return b.energy; },
                                       [](const BatchSums& b) { return b.units; });
    metrics.throughput = ratio_estimate(batches, total.nats, total.units, [](const BatchSums& b) { return b.nats; },
                                        [](const BatchSums& b) { return b.units; });
    metrics.outage = ratio_estimate(batches, total.outages, total.units, [](const BatchSums& b) { return b.outages; },
                                    [](const BatchSums& b) { return b.units; });
    metrics.expected_rounds = ratio_estimate(batches, total.uses, total.units, [](const BatchSums& b) { return b.uses; },
                                             [](const BatchSums& b) { return b.units; });
    metrics.energy_per_packet = total.raw_energy / total.units;
    metrics.packets = packets;
    return metrics;
}

} // namespace

SimMetrics simulate(const SimConfig& config) {
    config.validate();
    if (config.model == Model::Bursting) return simulate_packet_stream(config, /*reset_per_packet=*/true);
    // Correlated with beta = 1 is block fading; a single never-changing chain
    // would make the continuous time average degenerate
    if (config.fading.effective_beta() == 1.0) return simulate_continuous_block(config);
    return simulate_packet_stream(config, /*reset_per_packet=*/false);
}

ReinforcementResult simulate_reinforcement(const ReinforcementPolicy& policy, const RtdSpec& spec,
                                           const FadingSpec& fading, std::uint64_t n_packets, std::uint64_t seed) {
    policy.validate();
    spec.validate();
    fading.validate();
    if (spec.max_retransmissions != 1)
        throw UnsupportedConfigError("simulate_reinforcement: presented for M = 1");

    const double target = std::expm1(spec.rate);
    GainProcess proc(fading, seed);
    const int n_batches = 100;
    std::vector<BatchSums> batches(static_cast<std::size_t>(n_batches));
    const std::uint64_t per_batch = (n_packets + batches.size() - 1) / batches.size();

    double state = policy.p_initial;
    PowerTrajectorySummary traj;
    traj.min_power = state;
    traj.max_power = state;
    double power_sum = 0.0;
    std::uint64_t transmissions = 0;

    std::uint64_t done = 0;
    for (std::size_t b = 0; b < batches.size() && done < n_packets; ++b) {
        BatchSums& sums = batches[b];
        for (std::uint64_t i = 0; i < per_batch && done < n_packets; ++i, ++done) {
            double acc = 0.0;
            double energy = 0.0;
            double uses = 0.0;
            bool decoded = false;

            // round 1 at the current state power
            {
                const double g = proc.next();
                const double p = state;
                energy += p;
                uses += 1.0;
                acc += g * p;
                power_sum += p;
                ++transmissions;
                if (acc >= target) {
                    decoded = true;
                    state *= (1.0 - policy.d1);
                }
            }
            // round 2 at the updated state power (retransmit after the d2 bump)
            if (!decoded) {
                state *= (1.0 + policy.d2);
                const double g = proc.next();
                const double p = state;
                energy += p;
                uses += 1.0;
                acc += g * p;
                power_sum += p;
                ++transmissions;
                if (acc >= target) {
                    decoded = true;
                    state *= (1.0 - policy.d3);
                } else {
                    state *= (1.0 + policy.d4);
                }
            }

            traj.min_power = std::min(traj.min_power, state);
            traj.max_power = std::max(traj.max_power, state);
            sums.energy += energy;
            sums.uses += uses;
            sums.nats += decoded ? spec.rate : 0.0;
            sums.outages += decoded ? 0.0 : 1.0;
            sums.units += 1.0;
        }
    }

    ReinforcementResult result;
    result.metrics = assemble(batches);
    result.metrics.packets = done;
    traj.mean_power = power_sum / static_cast<double>(transmissions);
    traj.final_power = state;
    result.trajectory = traj;
    return result;
}

ReinforcementGrids ReinforcementGrids::defaults_around(double p_center) {
    ReinforcementGrids grids;
    grids.d1 = grids.d2 = grids.d3 = grids.d4 = {0.0, 0.05, 0.1, 0.2, 0.4};
    grids.p_initial.resize(8);
    static const double factors[8] = {0.7, 0.8, 0.9, 1.0, 1.15, 1.3, 1.5, 1.75};
    for (int i = 0; i < 8; ++i) grids.p_initial[static_cast<std::size_t>(i)] = p_center * factors[i];
    return grids;
}

TuneResult tune_reinforcement(const RtdSpec& spec, const FadingSpec& fading, double epsilon,
                              const ReinforcementGrids& grids, std::uint64_t n_packets, std::uint64_t seed) {
    if (grids.d1.empty() || grids.d2.empty() || grids.d3.empty() || grids.d4.empty() || grids.p_initial.empty())
        throw std::invalid_argument("tune_reinforcement: grids must be nonempty");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::domain_error("tune_reinforcement: epsilon must be in (0,1)");

    TuneResult result;
    double best_power = std::numeric_limits<double>::infinity();
    for (double p0 : grids.p_initial)
        for (double d1 : grids.d1)
            for (double d2 : grids.d2)
                for (double d3 : grids.d3)
                    for (double d4 : grids.d4) {
                        ReinforcementPolicy cand{p0, d1, d2, d3, d4};
                        const ReinforcementResult run = simulate_reinforcement(cand, spec, fading, n_packets, seed);
                        const double out = run.metrics.outage.value;
                        if (out > epsilon + 2.0 * run.metrics.outage.se) continue;
                        if (run.metrics.avg_power.value < best_power) {
                            best_power = run.metrics.avg_power.value;
                            result.feasible = true;
                            result.best = cand;
                            result.achieved = run;
                        }
                    }
    return result;
}

namespace {

SimMetrics scaled_run(const RtdSpec& spec, const std::vector<double>& shape, double scale, const FadingSpec& fading,
                      Model model, std::uint64_t n_packets, std::uint64_t seed) {
    std::vector<double> powers(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) powers[i] = scale * shape[i];
    return simulate(SimConfig::for_rtd(spec, model, PowerPolicy(std::move(powers)), fading, n_packets, seed));
}

} // namespace

double calibrate_scale_to_outage(const RtdSpec& spec, const std::vector<double>& shape, const FadingSpec& fading,
                                 Model model, double target_outage, std::uint64_t n_packets, std::uint64_t seed) {
    if (static_cast<int>(shape.size()) != spec.rounds())
        throw std::invalid_argument("calibrate_scale_to_outage: shape needs M+1 entries");
    auto outage_at = [&](double s) {
        return scaled_run(spec, shape, s, fading, model, n_packets, seed).outage.value;
    };
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (outage_at(hi) > target_outage) {
        hi *= 4.0;
        if (++guard > 60) throw NumericError("calibrate_scale_to_outage: cannot reach target outage");
    }
    guard = 0;
    while (outage_at(lo) < target_outage) {
        lo /= 4.0;
        if (++guard > 60) throw NumericError("calibrate_scale_to_outage: target outage above range");
    }
    for (int it = 0; it < 24; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (outage_at(mid) > target_outage)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

double calibrate_scale_to_avg_power(const RtdSpec& spec, const std::vector<double>& shape, const FadingSpec& fading,
                                    Model model, double target_avg_power, std::uint64_t n_packets,
                                    std::uint64_t seed) {
    if (static_cast<int>(shape.size()) != spec.rounds())
        throw std::invalid_argument("calibrate_scale_to_avg_power: shape needs M+1 entries");
    auto power_at = [&](double s) {
        return scaled_run(spec, shape, s, fading, model, n_packets, seed).avg_power.value;
    };
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (power_at(hi) < target_avg_power) {
        hi *= 4.0;
        if (++guard > 60) throw NumericError("calibrate_scale_to_avg_power: cannot reach target power");
    }
    guard = 0;
    while (power_at(lo) > target_avg_power) {
        lo /= 4.0;
        if (++guard > 60) throw NumericError("calibrate_scale_to_avg_power: target power below range");
    }
    for (int it = 0; it < 30; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (power_at(mid) < target_avg_power)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

} // namespace harqopt
