#ifndef HARQOPT_OPTIMIZER_HPP
#define HARQOPT_OPTIMIZER_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "harqopt/inr.hpp"
#include "harqopt/rtd.hpp"

namespace harqopt {

enum class Protocol { Rtd, Inr };
enum class Model { Continuous, Bursting };

/// Outage-limited average-power minimization problem. The objective is the
/// block-fading closed form for (protocol, model); the constraint is
/// outage <= epsilon, which binds at the optimum. The Asymptotic kind is the
/// small-per-round-power limit of the fixed-length problem (decode thresholds
/// linearized, constraint sum P = R/F_G^{-1}(epsilon)); it exists so the
/// large-M allocators can be cross-checked against the same search.
struct Objective {
    enum class Kind { RtdContinuous, RtdBursting, InrContinuous, InrBursting, AsymptoticContinuous };

    Kind kind = Kind::RtdContinuous;
    RtdSpec rtd;           // used by Rtd* and Asymptotic kinds
    InrRateSchedule inr;   // used by Inr* kinds
    FadingSpec fading;
    double epsilon = 1e-3;

    static Objective rtd_objective(const RtdSpec& spec, Model model, const FadingSpec& fading, double epsilon);
    static Objective inr_objective(const InrRateSchedule& schedule, Model model, const FadingSpec& fading,
                                   double epsilon);
    static Objective asymptotic_objective(const RtdSpec& spec, const FadingSpec& fading, double epsilon);

    Protocol protocol() const {
        return (kind == Kind::InrContinuous || kind == Kind::InrBursting) ? Protocol::Inr : Protocol::Rtd;
    }
    int rounds() const { return protocol() == Protocol::Inr ? inr.rounds() : rtd.rounds(); }

    void validate() const;
};

struct OptimizerConfig {
    int population = 20;             // J
    int elite = 5;                   // b, perturbations kept around the best vector
    int max_iters = 5000;
    double convergence_tol = 1e-6;   // relative best-objective improvement
    int convergence_window = 50;     // consecutive quiet iterations before stopping
    int restarts = 10;
    double perturbation_scale = 0.25; // initial per-coordinate log-normal std
    double perturbation_anneal = 0.95;
    double perturbation_floor = 1e-3;
    std::uint64_t seed = 1;
    std::pair<double, double> init_power_range = {0.0, 0.0}; // {0,0}: derived from the problem

    void validate() const;
};

struct MonotonicityReport {
    bool powers_nondecreasing = false;
    bool energies_nondecreasing = false;
    double max_power_violation_rel = 0.0;  // max over m of (P_m - P_{m+1})/P_{m+1}, clipped at 0
    double max_energy_violation_rel = 0.0;
};

struct OptimizationResult {
    PowerPolicy best_policy;
    Metrics achieved;
    double objective = 0.0;
    std::vector<double> trace; // best objective after each iteration, nonincreasing
    bool converged = false;
    int iterations = 0;
    MonotonicityReport monotonicity;
};

/// Last-round power putting the outage constraint exactly at epsilon given
/// rounds 1..M; nullopt when the remaining budget is negative (candidate is
/// eliminated), 0 when the partial policy already meets the constraint.
std::optional<double> solve_last_round_power(const Objective& objective, const std::vector<double>& partial);

/// Restart-based random search: J candidates, the best kept, b log-normal
/// perturbations of it, the rest redrawn, annealed until the best objective
/// stalls. Deterministic per (objective, config) including seed; M = 0 returns
/// the closed-form unique point.
OptimizationResult optimize(const Objective& objective, const OptimizerConfig& config);

/// Average power of the fixed-length protocols in the small-power limit, i.e.
/// the objective of the Asymptotic kind (decode thresholds at Z^(m) =
/// R/sum_{n<=m} P_n instead of their exact roots).
double asymptotic_avg_power(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading);

/// Large-M allocator from the stationarity recursion of the asymptotic
/// objective with the linearizing step (F_G(Z^(m)) - F_G(Z^(m-1)) ~
/// f_G(Z^(m))(Z^(m) - Z^(m-1))) applied for m >= 2:
///   Z^(m+1) = (m/(m+1)) Z^(m)^2 / Z^(m-1)
/// The m = 1 stationarity uses F_G(Z^(0)) = 1 exactly. Shooting on Z^(1) by
/// bisection until Z^(M+1) = F_G^{-1}(epsilon) to 1e-9 relative; powers are
/// P_m = R (1/Z^(m) - 1/Z^(m-1)). Intended regime: many retransmissions,
/// per-round powers small enough that log(1+x) ~ x at the thresholds.
PowerPolicy geometric_allocation(const RtdSpec& spec, double epsilon, const FadingSpec& fading);

/// Same two-point boundary problem solved on the exact first-order conditions
/// of the asymptotic objective (no linearizing step):
///   Z^(m+1) = (m/(m+1)) Z^(m)^2 f_G(Z^(m)) / (F_G(Z^(m-1)) - F_G(Z^(m)) + Z^(m) f_G(Z^(m)))
/// Matches the asymptotic-objective optimum even where the linearized
/// recursion does not.
PowerPolicy stationary_allocation(const RtdSpec& spec, double epsilon, const FadingSpec& fading);

/// Short-term baseline power of the objective's problem, linear scale.
double short_term_baseline_power(const Objective& objective);

/// dB gap between the short-term (uniform) baseline and the optimized
/// long-term average power. Nonnegative: the uniform point is feasible.
double power_efficiency_db(const Objective& objective, const OptimizerConfig& config);

/// (eta_short - eta_long)/eta_long in percent, both policies evaluated at the
/// same average power (the optimized Pbar*).
double relative_throughput_loss_pct(const Objective& objective, const OptimizerConfig& config);

} // namespace harqopt

#endif
