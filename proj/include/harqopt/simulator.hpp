#ifndef HARQOPT_SIMULATOR_HPP
#define HARQOPT_SIMULATOR_HPP

#include <cstdint>
#include <vector>

#include "harqopt/optimizer.hpp"

namespace harqopt {

/// One simulated packet: rounds actually transmitted, decode flag, spent
/// energy, channel uses (units of l_1) and delivered information nats.
struct PacketOutcome {
    int rounds_used = 0;
    bool decoded = false;
    double energy = 0.0;
    double channel_uses = 0.0;
    double info_nats = 0.0;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0; // batch-means standard error
};

struct SimMetrics {
    Estimate outage;
    Estimate avg_power;      // sum energy / sum channel uses (per-block under continuous block fading)
    Estimate throughput;     // sum nats / sum channel uses
    Estimate expected_rounds; // channel uses per packet, units of l_1
    double energy_per_packet = 0.0;
    std::uint64_t packets = 0;
};

/// Packet-level Monte Carlo for every (protocol, model, temporal) combination.
/// Bursting draws a fresh fading realization per packet; continuous block
/// fading reuses one gain across a block of packets_per_block maximal-length
/// packet slots; Fast/Correlated advance the Gauss-Markov state once per
/// transmitted codeword (continuously across packets in the continuous model).
/// Single-threaded and bit-reproducible per seed; standard errors come from
/// batch means (n_batches) to respect serial correlation.
struct SimConfig {
    Protocol protocol = Protocol::Rtd;
    Model model = Model::Bursting;
    RtdSpec rtd;
    InrRateSchedule inr; // used when protocol == Inr
    PowerPolicy policy;
    FadingSpec fading;
    std::uint64_t n_packets = 100000;
    int packets_per_block = 100; // continuous block fading only
    int n_batches = 100;
    std::uint64_t seed = 1;

    static SimConfig for_rtd(const RtdSpec& spec, Model model, const PowerPolicy& policy, const FadingSpec& fading,
                             std::uint64_t n_packets, std::uint64_t seed);
    static SimConfig for_inr(const InrRateSchedule& schedule, Model model, const PowerPolicy& policy,
                             const FadingSpec& fading, std::uint64_t n_packets, std::uint64_t seed);

    void validate() const;
};

SimMetrics simulate(const SimConfig& config);

/// Multiplicative power adaptation driven by per-packet ACK/NACK history
/// (continuous model, M = 1 RTD). State power stays positive for any d >= 0.
struct ReinforcementPolicy {
    double p_initial = 1.0;
    double d1 = 0.0; // decoded in round 1:      P <- (1-d1) P
    double d2 = 0.0; // failed round 1:          P <- (1+d2) P, then retransmit
    double d3 = 0.0; // decoded in round 2:      P <- (1-d3) P
    double d4 = 0.0; // outage after round 2:    P <- (1+d4) P

    void validate() const;
};

struct PowerTrajectorySummary {
    double min_power = 0.0;
    double max_power = 0.0;
    double mean_power = 0.0; // per-transmission average of the state power
    double final_power = 0.0;
};

struct ReinforcementResult {
    SimMetrics metrics;
    PowerTrajectorySummary trajectory;
};

/// Algorithm-2 style adaptation with both rounds of a packet transmitted at
/// the state power current at transmit time (round 2 sees the (1+d2) update).
/// With d1=d2=d3=d4=0 this reproduces the static uniform-policy continuous
/// simulation exactly, sample for sample.
ReinforcementResult simulate_reinforcement(const ReinforcementPolicy& policy, const RtdSpec& spec,
                                           const FadingSpec& fading, std::uint64_t n_packets, std::uint64_t seed);

struct ReinforcementGrids {
    std::vector<double> d1, d2, d3, d4;
    std::vector<double> p_initial;

    /// d_i in {0, 0.05, 0.1, 0.2, 0.4}; 8 multiples of p_center including 1x.
    static ReinforcementGrids defaults_around(double p_center);
};

struct TuneResult {
    bool feasible = false;
    ReinforcementPolicy best;
    ReinforcementResult achieved;
};

/// Exhaustive grid search minimizing measured average power among settings
/// whose empirical outage is <= epsilon + 2 standard errors. Every grid point
/// is simulated with the same seed; deterministic tie-breaking.
TuneResult tune_reinforcement(const RtdSpec& spec, const FadingSpec& fading, double epsilon,
                              const ReinforcementGrids& grids, std::uint64_t n_packets, std::uint64_t seed);

/// Scale s (bisected, common random numbers) such that the simulated outage of
/// s * shape meets target_outage; the shape is per-round relative weights.
double calibrate_scale_to_outage(const RtdSpec& spec, const std::vector<double>& shape, const FadingSpec& fading,
                                 Model model, double target_outage, std::uint64_t n_packets, std::uint64_t seed);

/// Scale s such that the simulated average power of s * shape equals
/// target_avg_power (linear).
double calibrate_scale_to_avg_power(const RtdSpec& spec, const std::vector<double>& shape, const FadingSpec& fading,
                                    Model model, double target_avg_power, std::uint64_t n_packets,
                                    std::uint64_t seed);

} // namespace harqopt

#endif
