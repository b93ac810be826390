#include "harqopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harqopt/rng.hpp"

namespace harqopt {

Objective Objective::rtd_objective(const RtdSpec& spec, Model model, const FadingSpec& fading, double epsilon) {
    Objective obj;
    obj.kind = model == Model::Continuous ? Kind::RtdContinuous : Kind::RtdBursting;
    obj.rtd = spec;
    obj.fading = fading;
    obj.epsilon = epsilon;
    obj.validate();
    return obj;
}

Objective Objective::inr_objective(const InrRateSchedule& schedule, Model model, const FadingSpec& fading,
                                   double epsilon) {
    Objective obj;
    obj.kind = model == Model::Continuous ? Kind::InrContinuous : Kind::InrBursting;
    obj.inr = schedule;
    obj.rtd = RtdSpec(schedule.initial_rate(), schedule.rounds() - 1);
    obj.fading = fading;
    obj.epsilon = epsilon;
    obj.validate();
    return obj;
}

Objective Objective::asymptotic_objective(const RtdSpec& spec, const FadingSpec& fading, double epsilon) {
    Objective obj;
    obj.kind = Kind::AsymptoticContinuous;
    obj.rtd = spec;
    obj.fading = fading;
    obj.epsilon = epsilon;
    obj.validate();
    return obj;
}

void Objective::validate() const {
    fading.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw std::invalid_argument("Objective: epsilon must be in (0,1)");
    if (protocol() == Protocol::Inr)
        inr.validate();
    else
        rtd.validate();
}

void OptimizerConfig::validate() const {
    if (population < 1 || elite < 1 || max_iters < 1 || restarts < 1 || convergence_window < 1)
        throw std::invalid_argument("OptimizerConfig: counts must be >= 1");
    if (elite >= population) throw std::invalid_argument("OptimizerConfig: elite count must be < population");
    if (!(convergence_tol > 0.0) || !(perturbation_scale > 0.0) || !(perturbation_floor > 0.0))
        throw std::invalid_argument("OptimizerConfig: tolerances must be > 0");
    if (!(perturbation_anneal > 0.0 && perturbation_anneal <= 1.0))
        throw std::invalid_argument("OptimizerConfig: anneal factor must be in (0,1]");
}

double asymptotic_avg_power(const RtdSpec& spec, const PowerPolicy& policy, const FadingSpec& fading) {
    spec.validate();
    policy.validate();
    if (policy.rounds() != spec.rounds()) throw std::invalid_argument("asymptotic_avg_power: policy needs M+1 rounds");
    if (policy.total() <= 0.0) throw DegeneratePolicyError("asymptotic_avg_power: all-zero policy");
    const auto cum = policy.cumulative();
    double pbar = 0.0;
    double prev = 1.0;
    for (std::size_t m = 0; m < cum.size(); ++m) {
        const double z = spec.rate / cum[m]; // linearized decode threshold
        const double cur = gain_cdf(fading, z);
        pbar += cum[m] / static_cast<double>(m + 1) * (prev - cur);
        prev = cur;
    }
    pbar += cum.back() / static_cast<double>(cum.size()) * prev;
    return pbar;
}

namespace {

double evaluate_objective(const Objective& obj, const PowerPolicy& policy) {
    switch (obj.kind) {
        case Objective::Kind::RtdContinuous: return rtd_avg_power_continuous(obj.rtd, policy, obj.fading);
        case Objective::Kind::RtdBursting: return rtd_bursting_metrics(obj.rtd, policy, obj.fading).avg_power;
        case Objective::Kind::InrContinuous: return inr_avg_power_continuous(obj.inr, policy, obj.fading);
        case Objective::Kind::InrBursting: return inr_bursting_metrics(obj.inr, policy, obj.fading).avg_power;
        case Objective::Kind::AsymptoticContinuous: return asymptotic_avg_power(obj.rtd, policy, obj.fading);
    }
    throw std::logic_error("evaluate_objective: unknown kind");
}

Metrics achieved_metrics(const Objective& obj, const PowerPolicy& policy) {
    switch (obj.kind) {
        case Objective::Kind::RtdContinuous: return rtd_continuous_metrics(obj.rtd, policy, obj.fading);
        case Objective::Kind::RtdBursting: return rtd_bursting_metrics(obj.rtd, policy, obj.fading);
        case Objective::Kind::InrContinuous: return inr_continuous_metrics(obj.inr, policy, obj.fading);
        case Objective::Kind::InrBursting: return inr_bursting_metrics(obj.inr, policy, obj.fading);
        case Objective::Kind::AsymptoticContinuous: {
            Metrics metrics;
            metrics.avg_power = asymptotic_avg_power(obj.rtd, policy, obj.fading);
            metrics.outage = gain_cdf(obj.fading, obj.rtd.rate / policy.total());
            metrics.throughput = std::numeric_limits<double>::quiet_NaN();
            metrics.expected_rounds = std::numeric_limits<double>::quiet_NaN();
            metrics.energy_per_packet = std::numeric_limits<double>::quiet_NaN();
            return metrics;
        }
    }
    throw std::logic_error("achieved_metrics: unknown kind");
}

MonotonicityReport monotonicity_report(const Objective& obj, const PowerPolicy& policy) {
    MonotonicityReport report;
    auto check = [](const std::vector<double>& v, double& worst) {
        bool ok = true;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const double scale = std::max(v[i + 1], 1e-300);
            const double viol = (v[i] - v[i + 1]) / scale;
            worst = std::max(worst, viol);
            if (v[i] > v[i + 1] + 1e-6 * scale) ok = false;
        }
        return ok;
    };
    report.powers_nondecreasing = check(policy.powers, report.max_power_violation_rel);
    if (obj.protocol() == Protocol::Inr) {
        const auto energy = inr_energy_schedule(obj.inr, policy);
        report.energies_nondecreasing = check(energy.per_round, report.max_energy_violation_rel);
    } else {
        report.energies_nondecreasing = report.powers_nondecreasing;
        report.max_energy_violation_rel = report.max_power_violation_rel;
    }
    return report;
}

} // namespace

double short_term_baseline_power(const Objective& objective) {
    switch (objective.kind) {
        case Objective::Kind::RtdContinuous:
        case Objective::Kind::RtdBursting:
            return rtd_short_term_power(objective.rtd, objective.epsilon, objective.fading);
        case Objective::Kind::InrContinuous:
        case Objective::Kind::InrBursting:
            return inr_short_term_power(objective.inr, objective.epsilon, objective.fading);
        case Objective::Kind::AsymptoticContinuous:
            return objective.rtd.rate /
                   (static_cast<double>(objective.rtd.rounds()) * gain_inv_cdf(objective.fading, objective.epsilon));
    }
    throw std::logic_error("short_term_baseline_power: unknown kind");
}

std::optional<double> solve_last_round_power(const Objective& objective, const std::vector<double>& partial) {
    objective.validate();
    const int free_rounds = objective.rounds() - 1;
    if (static_cast<int>(partial.size()) != free_rounds)
        throw std::invalid_argument("solve_last_round_power: expected M leading powers");
    const double gstar = gain_inv_cdf(objective.fading, objective.epsilon);

    if (objective.protocol() == Protocol::Inr) {
        double acc = 0.0;
        for (int n = 1; n <= free_rounds; ++n)
            acc += objective.inr.coefficient(n) * std::log1p(gstar * partial[static_cast<std::size_t>(n) - 1]);
        if (acc >= 1.0) return 0.0;
        const double c_last = objective.inr.coefficient(objective.inr.rounds());
        return std::expm1((1.0 - acc) / c_last) / gstar;
    }

    const double budget = objective.kind == Objective::Kind::AsymptoticContinuous
                              ? objective.rtd.rate / gstar
                              : std::expm1(objective.rtd.rate) / gstar;
    double used = 0.0;
    for (double p : partial) used += p;
    const double last = budget - used;
    if (last < 0.0) return std::nullopt;
    return last;
}

namespace {

PowerPolicy closed_form_single_round(const Objective& obj) {
    const auto p = solve_last_round_power(obj, {});
    return PowerPolicy({p.value()});
}

struct Candidate {
    std::vector<double> free_powers; // P_1..P_M
    double last = 0.0;
    double value = std::numeric_limits<double>::infinity();
    bool feasible = false;
};

void evaluate_candidate(const Objective& obj, Candidate& cand) {
    const auto last = solve_last_round_power(obj, cand.free_powers);
    if (!last) {
        cand.feasible = false;
        cand.value = std::numeric_limits<double>::infinity();
        return;
    }
    cand.last = *last;
    std::vector<double> powers = cand.free_powers;
    powers.push_back(cand.last);
    cand.feasible = true;
    cand.value = evaluate_objective(obj, PowerPolicy(std::move(powers)));
}

// deterministic ordering: objective first, then lexicographic on the powers
bool better(const Candidate& a, const Candidate& b) {
    if (!b.feasible) return a.feasible;
    if (!a.feasible) return false;
    if (a.value != b.value) return a.value < b.value;
    return std::lexicographical_compare(a.free_powers.begin(), a.free_powers.end(), b.free_powers.begin(),
                                        b.free_powers.end());
}

} // namespace

OptimizationResult optimize(const Objective& objective, const OptimizerConfig& config) {
    objective.validate();
    config.validate();

    OptimizationResult result;
    const int free_dims = objective.rounds() - 1;

    if (free_dims == 0) {
        result.best_policy = closed_form_single_round(objective);
        result.objective = evaluate_objective(objective, result.best_policy);
        result.achieved = achieved_metrics(objective, result.best_policy);
        result.trace = {result.objective};
        result.converged = true;
        result.iterations = 0;
        result.monotonicity = monotonicity_report(objective, result.best_policy);
        return result;
    }

    auto range = config.init_power_range;
    if (range.first <= 0.0 || range.second <= 0.0) {
        // uniform short-term baseline interior to the sampling range
        range = {1e-2, 10.0 * short_term_baseline_power(objective)};
    }
    if (!(range.second > range.first)) throw std::invalid_argument("optimize: bad init_power_range");

    Candidate global_best;
    bool any_converged = false;
    int total_iters = 0;
    double trace_floor = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < config.restarts; ++restart) {
        std::vector<Candidate> pop(static_cast<std::size_t>(config.population));
        auto draw_random = [&](Candidate& cand, std::uint64_t iter, std::uint64_t slot) {
            Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(restart), iter, slot));
            cand.free_powers.resize(static_cast<std::size_t>(free_dims));
            for (auto& p : cand.free_powers) p = rng.log_uniform(range.first, range.second);
            evaluate_candidate(objective, cand);
        };
        for (std::size_t j = 0; j < pop.size(); ++j) draw_random(pop[j], 0, j);

        // the uniform short-term point joins the initial population, so the
        // returned policy is never worse than the baseline
        pop.back().free_powers.assign(static_cast<std::size_t>(free_dims),
                                      short_term_baseline_power(objective));
        evaluate_candidate(objective, pop.back());

        Candidate best;
        for (const auto& cand : pop)
            if (better(cand, best)) best = cand;

        double sigma = config.perturbation_scale;
        int quiet = 0;

        for (int iter = 1; iter <= config.max_iters; ++iter, ++total_iters) {
            // slot 1 keeps the best-so-far; slots 2..b+1 are perturbations of
            // it; the remaining slots are redrawn
            pop[0] = best;
            if (best.feasible) {
                for (int j = 1; j <= config.elite; ++j) {
                    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(restart),
                                        static_cast<std::uint64_t>(iter), 1000 + static_cast<std::uint64_t>(j)));
                    Candidate cand;
                    cand.free_powers = best.free_powers;
                    for (auto& p : cand.free_powers) p *= std::exp(sigma * rng.normal());
                    evaluate_candidate(objective, cand);
                    pop[static_cast<std::size_t>(j)] = cand;
                }
            } else {
                for (int j = 1; j <= config.elite; ++j)
                    draw_random(pop[static_cast<std::size_t>(j)], static_cast<std::uint64_t>(iter),
                                static_cast<std::uint64_t>(j));
            }
            for (int j = config.elite + 1; j < config.population; ++j)
                draw_random(pop[static_cast<std::size_t>(j)], static_cast<std::uint64_t>(iter),
                            static_cast<std::uint64_t>(j));

            sigma = std::max(config.perturbation_floor, sigma * config.perturbation_anneal);

            const double prev_value = best.value;
            for (const auto& cand : pop)
                if (better(cand, best)) best = cand;
            trace_floor = std::min(trace_floor, best.value);
            result.trace.push_back(trace_floor);

            if (best.feasible) {
                const double improvement =
                    std::isfinite(prev_value) ? (prev_value - best.value) / std::max(prev_value, 1e-300) : 1.0;
                quiet = improvement < config.convergence_tol ? quiet + 1 : 0;
                if (quiet >= config.convergence_window) {
                    any_converged = true;
                    break;
                }
            }
        }
        if (better(best, global_best)) global_best = best;
    }

    if (!global_best.feasible)
        throw InfeasibleError("optimize: no feasible candidate found; widen init_power_range");

    std::vector<double> powers = global_best.free_powers;
    powers.push_back(global_best.last);
    result.best_policy = PowerPolicy(std::move(powers));
    result.objective = global_best.value;
    result.achieved = achieved_metrics(objective, result.best_policy);
    result.converged = any_converged;
    result.iterations = total_iters;
    result.monotonicity = monotonicity_report(objective, result.best_policy);
    return result;
}

namespace {

// Two-point boundary solve shared by the large-M allocators: forward-propagate
// Z^(1)..Z^(M+1) from a trial Z^(1), shoot until Z^(M+1) = F_G^{-1}(epsilon).
template <typename Step>
PowerPolicy shoot_allocation(const RtdSpec& spec, double epsilon, const FadingSpec& fading, Step step_m1,
                             bool exact_steps) {
    spec.validate();
    fading.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::domain_error("allocation: epsilon must be in (0,1)");
    if (spec.max_retransmissions < 1)
        throw std::invalid_argument("allocation: needs at least one retransmission round");

    const int rounds = spec.rounds();
    const double target = gain_inv_cdf(fading, epsilon);

    auto propagate = [&](double z1, std::vector<double>& z) {
        z.assign(static_cast<std::size_t>(rounds) + 1, 0.0); // z[1..rounds]
        z[1] = z1;
        z[2] = step_m1(z1);
        for (int m = 2; m < rounds; ++m) {
            const double zm = z[static_cast<std::size_t>(m)];
            const double zp = z[static_cast<std::size_t>(m) - 1];
            double next;
            if (exact_steps) {
                // survival-space form of zm^2 f(zm) / (F(zp) - F(zm) + zm f(zm))
                next = static_cast<double>(m) / (m + 1.0) * zm * zm / (cdf_gap_over_pdf(fading, zm, zp) + zm);
            } else {
                next = static_cast<double>(m) / (m + 1.0) * zm * zm / zp;
            }
            z[static_cast<std::size_t>(m) + 1] = next;
        }
        return z[static_cast<std::size_t>(rounds)];
    };

    std::vector<double> z;
    double lo = target;
    double hi = std::max(1.0, 2.0 * target);
    int guard = 0;
    while (propagate(hi, z) < target) {
        hi *= 2.0;
        if (++guard > 2000) throw NumericError("allocation: shooting failed to bracket Z^(1)");
    }
    if (propagate(lo, z) > target) throw NumericError("allocation: shooting bracket is inverted");

    double zend = 0.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        zend = propagate(mid, z);
        if (zend < target)
            lo = mid;
        else
            hi = mid;
        if (std::abs(zend - target) <= 1e-9 * target && (hi - lo) <= 1e-12 * hi) break;
    }
    propagate(hi, z); // final state with Z^(rounds) >= target side of the bracket

    std::vector<double> powers(static_cast<std::size_t>(rounds));
    powers[0] = spec.rate / z[1];
    for (int m = 2; m <= rounds; ++m)
        powers[static_cast<std::size_t>(m) - 1] =
            spec.rate * (1.0 / z[static_cast<std::size_t>(m)] - 1.0 / z[static_cast<std::size_t>(m) - 1]);
    return PowerPolicy(std::move(powers));
}

} // namespace

namespace {

// m=1 stationarity with F_G(Z^(0)) = 1 kept exact:
//   1/(2 Z^(2)) = (1 - F)/(f Z1^2) + 1/Z1, with (1-F)/f in survival space
double stationarity_step_m1(const FadingSpec& fading, double z1) {
    const double mills = cdf_gap_over_pdf(fading, z1, std::numeric_limits<double>::infinity());
    return 1.0 / (2.0 * (mills / (z1 * z1) + 1.0 / z1));
}

} // namespace

PowerPolicy geometric_allocation(const RtdSpec& spec, double epsilon, const FadingSpec& fading) {
    auto step_m1 = [&](double z1) { return stationarity_step_m1(fading, z1); };
    return shoot_allocation(spec, epsilon, fading, step_m1, /*exact_steps=*/false);
}

PowerPolicy stationary_allocation(const RtdSpec& spec, double epsilon, const FadingSpec& fading) {
    auto step_m1 = [&](double z1) { return stationarity_step_m1(fading, z1); };
    return shoot_allocation(spec, epsilon, fading, step_m1, /*exact_steps=*/true);
}

double power_efficiency_db(const Objective& objective, const OptimizerConfig& config) {
    const double baseline = short_term_baseline_power(objective);
    const OptimizationResult result = optimize(objective, config);
    return to_db(baseline) - to_db(result.objective);
}

double relative_throughput_loss_pct(const Objective& objective, const OptimizerConfig& config) {
    if (objective.kind == Objective::Kind::AsymptoticContinuous)
        throw UnsupportedConfigError("relative_throughput_loss_pct: undefined for the asymptotic objective");
    const OptimizationResult result = optimize(objective, config);
    const PowerPolicy uniform = PowerPolicy::uniform(result.objective, objective.rounds());

    double eta_short = 0.0;
    double eta_long = 0.0;
    const bool bursting =
        objective.kind == Objective::Kind::RtdBursting || objective.kind == Objective::Kind::InrBursting;
    if (objective.protocol() == Protocol::Inr) {
        eta_short = bursting ? inr_bursting_metrics(objective.inr, uniform, objective.fading).throughput
                             : inr_throughput_continuous(objective.inr, uniform, objective.fading);
        eta_long = bursting ? inr_bursting_metrics(objective.inr, result.best_policy, objective.fading).throughput
                            : inr_throughput_continuous(objective.inr, result.best_policy, objective.fading);
    } else {
        eta_short = bursting ? rtd_bursting_metrics(objective.rtd, uniform, objective.fading).throughput
                             : rtd_throughput_continuous(objective.rtd, uniform, objective.fading);
        eta_long = bursting ? rtd_bursting_metrics(objective.rtd, result.best_policy, objective.fading).throughput
                            : rtd_throughput_continuous(objective.rtd, result.best_policy, objective.fading);
    }
    return 100.0 * (eta_short - eta_long) / eta_long;
}

} // namespace harqopt
