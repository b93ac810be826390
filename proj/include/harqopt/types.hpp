#ifndef HARQOPT_TYPES_HPP
#define HARQOPT_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace harqopt {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegeneratePolicyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Per-round transmit powers P_1..P_{M+1}, linear scale (noise power N0 = 1).
/// dB conversion happens only at the CLI boundary.
struct PowerPolicy {
    std::vector<double> powers;

    PowerPolicy() = default;
    explicit PowerPolicy(std::vector<double> p) : powers(std::move(p)) { validate(); }

    static PowerPolicy uniform(double p, int rounds) {
        return PowerPolicy(std::vector<double>(static_cast<std::size_t>(rounds), p));
    }

    int rounds() const { return static_cast<int>(powers.size()); }

    double total() const {
        double s = 0.0;
        for (double p : powers) s += p;
        return s;
    }

    /// cumulative[m] = P_1 + ... + P_{m+1} (0-based)
    std::vector<double> cumulative() const {
        std::vector<double> c(powers.size());
        double s = 0.0;
        for (std::size_t i = 0; i < powers.size(); ++i) {
            s += powers[i];
            c[i] = s;
        }
        return c;
    }

    void validate() const {
        if (powers.empty())
            throw std::invalid_argument("PowerPolicy: needs at least one round");
        for (double p : powers) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw std::invalid_argument("PowerPolicy: powers must be finite and >= 0");
        }
    }
};

/// Pr{decoded at round m} for m = 1..M+1 plus the outage probability.
/// Entries sum to 1 up to rounding.
struct DecodeProfile {
    std::vector<double> p_success;
    double p_outage = 0.0;

    double sum() const {
        double s = p_outage;
        for (double p : p_success) s += p;
        return s;
    }
};

/// Closed-form performance summary of one (protocol, model, policy) configuration.
/// expected_rounds is E{channel uses}/l_1 (literally the expected round count for
/// RTD and fixed-length coding); energy_per_packet is in units of power x l_1.
struct Metrics {
    double outage = 0.0;
    double avg_power = 0.0;
    double throughput = 0.0;
    double expected_rounds = 0.0;
    double energy_per_packet = 0.0;
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace harqopt

#endif
