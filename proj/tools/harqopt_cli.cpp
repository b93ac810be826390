// harqopt: experiment runner for outage-limited HARQ power allocation.
// Subcommands: evaluate (closed forms for an explicit policy), optimize
// (Algorithm-1 / geometric / short-term allocation), figure (curve tables).
// Powers cross this boundary in dB; everything inside the library is linear.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "harqopt/optimizer.hpp"
#include "harqopt/simulator.hpp"

using namespace harqopt;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": cannot parse '" + item + "'");
        }
        if (used != item.size()) throw std::invalid_argument(std::string(what) + ": cannot parse '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return values;
}

std::string format_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows; // cells preformatted
    std::vector<std::vector<json>> json_rows;   // same records, native types

    void add_row(const std::vector<json>& cells) {
        std::vector<std::string> text;
        text.reserve(cells.size());
        for (const auto& c : cells) {
            if (c.is_string())
                text.push_back(c.get<std::string>());
            else if (c.is_number_integer())
                text.push_back(std::to_string(c.get<long long>()));
            else if (c.is_null())
                text.push_back("");
            else
                text.push_back(format_cell(c.get<double>()));
        }
        rows.push_back(std::move(text));
        json_rows.push_back(cells);
    }

    void write(const std::string& path, const std::string& format) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output path: " + path);
        if (format == "json") {
            json array = json::array();
            for (const auto& row : json_rows) {
                json record;
                for (std::size_t i = 0; i < columns.size(); ++i) record[columns[i]] = row[i];
                array.push_back(record);
            }
            out << array.dump(2) << "\n";
            return;
        }
        for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << "\n";
        }
    }
};

struct CommonOptions {
    std::string protocol = "rtd";
    std::string model = "continuous";
    int max_retransmissions = 1;
    double rate = 1.0;
    double lambda = 1.0;
    std::string epsilon_list;
    std::string beta_list;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";

    Model parsed_model() const {
        if (model == "continuous") return Model::Continuous;
        if (model == "bursting") return Model::Bursting;
        throw std::invalid_argument("model must be continuous or bursting");
    }
    bool is_inr() const {
        if (protocol == "rtd") return false;
        if (protocol == "inr") return true;
        throw std::invalid_argument("protocol must be rtd or inr");
    }
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_model = true) {
    // later occurrences win, so command-line flags override config-file values
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--protocol", opt.protocol, "rtd or inr")->capture_default_str();
    if (with_model) cmd->add_option("--model", opt.model, "continuous or bursting")->capture_default_str();
    cmd->add_option("--M", opt.max_retransmissions, "max retransmissions (M+1 rounds)")->capture_default_str();
    cmd->add_option("--R", opt.rate, "initial rate, nats per channel use")->capture_default_str();
    cmd->add_option("--lambda", opt.lambda, "Rayleigh gain rate parameter")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "master seed for anything randomized")->capture_default_str();
    cmd->add_option("--out", opt.out_path, "output table path")->required();
    cmd->add_option("--format", opt.format, "csv or json")->capture_default_str();
}

Metrics closed_form_metrics(const CommonOptions& opt, const PowerPolicy& policy, const FadingSpec& fading) {
    if (opt.is_inr()) {
        const auto schedule = InrRateSchedule::fixed_length(opt.rate, opt.max_retransmissions);
        return opt.parsed_model() == Model::Bursting ? inr_bursting_metrics(schedule, policy, fading)
                                                     : inr_continuous_metrics(schedule, policy, fading);
    }
    const RtdSpec spec(opt.rate, opt.max_retransmissions);
    return opt.parsed_model() == Model::Bursting ? rtd_bursting_metrics(spec, policy, fading)
                                                 : rtd_continuous_metrics(spec, policy, fading);
}

// ---------------------------------------------------------------- evaluate --

int cmd_evaluate(const CommonOptions& opt, const std::string& powers_db) {
    const auto db_values = parse_list(powers_db, "--powers-db");
    if (static_cast<int>(db_values.size()) != opt.max_retransmissions + 1)
        throw std::invalid_argument("--powers-db needs M+1 entries");
    std::vector<double> linear(db_values.size());
    for (std::size_t i = 0; i < db_values.size(); ++i) linear[i] = from_db(db_values[i]);
    const PowerPolicy policy(linear);
    const FadingSpec fading = FadingSpec::block(opt.lambda);

    std::vector<double> epsilons;
    if (!opt.epsilon_list.empty()) epsilons = parse_list(opt.epsilon_list, "--epsilon");

    Table table;
    table.columns = {"protocol", "model", "M", "R", "epsilon"};
    for (int m = 1; m <= opt.max_retransmissions + 1; ++m) table.columns.push_back("P" + std::to_string(m) + "_db");
    for (const char* c : {"avg_power_db", "outage", "throughput", "expected_rounds"}) table.columns.push_back(c);

    const Metrics metrics = closed_form_metrics(opt, policy, fading);
    auto emit = [&](json epsilon_cell) {
        std::vector<json> row = {opt.protocol, opt.model, opt.max_retransmissions, opt.rate, epsilon_cell};
        for (double db : db_values) row.push_back(db);
        row.push_back(to_db(metrics.avg_power));
        row.push_back(metrics.outage);
        row.push_back(metrics.throughput);
        row.push_back(metrics.expected_rounds);
        table.add_row(row);
    };
    if (epsilons.empty())
        emit(nullptr);
    else
        for (double eps : epsilons) emit(eps);

    table.write(opt.out_path, opt.format);
    std::printf("evaluate: %s %s M=%d R=%g -> avg_power %.4f dB, outage %.6g, throughput %.6g\n",
                opt.protocol.c_str(), opt.model.c_str(), opt.max_retransmissions, opt.rate, to_db(metrics.avg_power),
                metrics.outage, metrics.throughput);
    return 0;
}

// ---------------------------------------------------------------- optimize --

int cmd_optimize(const CommonOptions& opt, const std::string& method, int restarts, int iters,
                 const std::string& policy_out) {
    const FadingSpec fading = FadingSpec::block(opt.lambda);
    const auto epsilons = parse_list(opt.epsilon_list.empty() ? "1e-3" : opt.epsilon_list, "--epsilon");
    const Model model = opt.parsed_model();

    Table table;
    table.columns = {"protocol", "model", "method", "M", "R", "epsilon"};
    for (int m = 1; m <= opt.max_retransmissions + 1; ++m) table.columns.push_back("P" + std::to_string(m) + "_db");
    for (const char* c : {"avg_power_db", "outage", "throughput", "expected_rounds", "baseline_db", "delta_phi_db"})
        table.columns.push_back(c);

    json policies = json::array();
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const double eps = epsilons[i];
        const Objective objective =
            opt.is_inr()
                ? Objective::inr_objective(InrRateSchedule::fixed_length(opt.rate, opt.max_retransmissions), model,
                                           fading, eps)
                : Objective::rtd_objective(RtdSpec(opt.rate, opt.max_retransmissions), model, fading, eps);
        const double baseline = short_term_baseline_power(objective);

        PowerPolicy policy;
        if (method == "alg1") {
            OptimizerConfig config;
            config.seed = derive_seed(opt.seed, i);
            config.restarts = restarts;
            config.max_iters = iters;
            policy = optimize(objective, config).best_policy;
        } else if (method == "geometric") {
            policy = geometric_allocation(RtdSpec(opt.rate, opt.max_retransmissions), eps, fading);
        } else if (method == "short-term") {
            policy = PowerPolicy::uniform(baseline, opt.max_retransmissions + 1);
        } else {
            throw std::invalid_argument("method must be alg1, geometric or short-term");
        }

        const Metrics metrics = closed_form_metrics(opt, policy, fading);
        const double delta_db = to_db(baseline) - to_db(metrics.avg_power);
        std::printf("optimize: epsilon=%g method=%s -> avg_power %.4f dB (baseline %.4f dB, delta_phi %.3f dB)\n",
                    eps, method.c_str(), to_db(metrics.avg_power), to_db(baseline), delta_db);

        std::vector<json> row = {opt.protocol, opt.model, method, opt.max_retransmissions, opt.rate, eps};
        for (double p : policy.powers) row.push_back(to_db(p));
        row.push_back(to_db(metrics.avg_power));
        row.push_back(metrics.outage);
        row.push_back(metrics.throughput);
        row.push_back(metrics.expected_rounds);
        row.push_back(to_db(baseline));
        row.push_back(delta_db);
        table.add_row(row);

        json record;
        record["epsilon"] = eps;
        record["method"] = method;
        record["powers_db"] = json::array();
        for (double p : policy.powers) record["powers_db"].push_back(to_db(p));
        record["avg_power_db"] = to_db(metrics.avg_power);
        record["outage"] = metrics.outage;
        record["throughput"] = metrics.throughput;
        policies.push_back(record);
    }

    table.write(opt.out_path, opt.format);
    if (!policy_out.empty()) {
        std::ofstream out(policy_out, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open policy output path: " + policy_out);
        out << policies.dump(2) << "\n";
    }
    return 0;
}

// ------------------------------------------------------------------ figure --

std::vector<double> default_epsilon_grid() { return {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1}; }

OptimizerConfig figure_config(std::uint64_t seed, std::uint64_t index) {
    OptimizerConfig config;
    config.seed = derive_seed(seed, index);
    return config;
}

double optimized_db(Objective::Kind kind, double rate, int max_retx, const FadingSpec& fading, double eps,
                    std::uint64_t seed, std::uint64_t index, PowerPolicy* policy_out = nullptr) {
    Objective objective;
    if (kind == Objective::Kind::InrContinuous || kind == Objective::Kind::InrBursting)
        objective = Objective::inr_objective(InrRateSchedule::fixed_length(rate, max_retx),
                                             kind == Objective::Kind::InrBursting ? Model::Bursting
                                                                                  : Model::Continuous,
                                             fading, eps);
    else
        objective = Objective::rtd_objective(RtdSpec(rate, max_retx),
                                             kind == Objective::Kind::RtdBursting ? Model::Bursting
                                                                                  : Model::Continuous,
                                             fading, eps);
    const auto result = optimize(objective, figure_config(seed, index));
    if (policy_out) *policy_out = result.best_policy;
    return to_db(result.objective);
}

int cmd_figure(int figure_id, const CommonOptions& opt, std::uint64_t rl_points) {
    const FadingSpec block = FadingSpec::block(opt.lambda);
    std::vector<double> epsilons =
        opt.epsilon_list.empty() ? default_epsilon_grid() : parse_list(opt.epsilon_list, "--epsilon");
    std::vector<double> betas =
        opt.beta_list.empty() ? std::vector<double>{0.0, 0.5, 0.9, 1.0} : parse_list(opt.beta_list, "--beta");

    Table table;
    std::uint64_t run = 0;

    switch (figure_id) {
        case 3: {
            // average power and per-round powers vs epsilon, RTD continuous, two rates
            table.columns = {"epsilon", "R", "short_term_db", "long_term_db", "P1_db", "P2_db"};
            for (double rate : {opt.rate, opt.rate / 2.0}) {
                for (double eps : epsilons) {
                    const RtdSpec spec(rate, 1);
                    PowerPolicy policy;
                    const double lt =
                        optimized_db(Objective::Kind::RtdContinuous, rate, 1, block, eps, opt.seed, run++, &policy);
                    table.add_row({eps, rate, to_db(rtd_short_term_power(spec, eps, block)), lt,
                                   to_db(policy.powers[0]), to_db(policy.powers[1])});
                }
            }
            break;
        }
        case 4: {
            table.columns = {"epsilon", "short_term_db", "continuous_long_term_db", "bursting_long_term_db"};
            for (double eps : epsilons) {
                const RtdSpec spec(opt.rate, 1);
                table.add_row({eps, to_db(rtd_short_term_power(spec, eps, block)),
                               optimized_db(Objective::Kind::RtdContinuous, opt.rate, 1, block, eps, opt.seed, run++),
                               optimized_db(Objective::Kind::RtdBursting, opt.rate, 1, block, eps, opt.seed, run++)});
            }
            break;
        }
        case 5: {
            table.columns = {"epsilon", "delta_phi_M1_db", "delta_phi_M2_db", "delta_phi_M3_db"};
            for (double eps : epsilons) {
                std::vector<json> row = {eps};
                for (int m = 1; m <= 3; ++m) {
                    const double baseline = to_db(rtd_short_term_power(RtdSpec(opt.rate, m), eps, block));
                    row.push_back(baseline -
                                  optimized_db(Objective::Kind::RtdContinuous, opt.rate, m, block, eps, opt.seed,
                                               run++));
                }
                table.add_row(row);
            }
            break;
        }
        case 6: {
            table.columns = {"epsilon",     "rtd_short_db", "inr_short_db",  "rtd_cont_db",
                             "rtd_burst_db", "inr_cont_db",  "inr_burst_db"};
            for (double eps : epsilons) {
                table.add_row(
                    {eps, to_db(rtd_short_term_power(RtdSpec(opt.rate, 1), eps, block)),
                     to_db(inr_short_term_power(InrRateSchedule::fixed_length(opt.rate, 1), eps, block)),
                     optimized_db(Objective::Kind::RtdContinuous, opt.rate, 1, block, eps, opt.seed, run++),
                     optimized_db(Objective::Kind::RtdBursting, opt.rate, 1, block, eps, opt.seed, run++),
                     optimized_db(Objective::Kind::InrContinuous, opt.rate, 1, block, eps, opt.seed, run++),
                     optimized_db(Objective::Kind::InrBursting, opt.rate, 1, block, eps, opt.seed, run++)});
            }
            break;
        }
        case 7: {
            table.columns = {"epsilon"};
            for (const char* scheme : {"rtd_cont", "rtd_burst", "inr_cont", "inr_burst"}) {
                table.columns.push_back(std::string(scheme) + "_P1_db");
                table.columns.push_back(std::string(scheme) + "_P2_db");
            }
            const Objective::Kind kinds[] = {Objective::Kind::RtdContinuous, Objective::Kind::RtdBursting,
                                             Objective::Kind::InrContinuous, Objective::Kind::InrBursting};
            for (double eps : epsilons) {
                std::vector<json> row = {eps};
                for (auto kind : kinds) {
                    PowerPolicy policy;
                    optimized_db(kind, opt.rate, 1, block, eps, opt.seed, run++, &policy);
                    row.push_back(to_db(policy.powers[0]));
                    row.push_back(to_db(policy.powers[1]));
                }
                table.add_row(row);
            }
            break;
        }
        case 8: {
            table.columns = {"epsilon", "rtd_M1_db", "rtd_M2_db", "inr_M1_db", "inr_M2_db"};
            for (double eps : epsilons)
                table.add_row({eps, to_db(rtd_short_term_power(RtdSpec(opt.rate, 1), eps, block)),
                               to_db(rtd_short_term_power(RtdSpec(opt.rate, 2), eps, block)),
                               to_db(inr_short_term_power(InrRateSchedule::fixed_length(opt.rate, 1), eps, block)),
                               to_db(inr_short_term_power(InrRateSchedule::fixed_length(opt.rate, 2), eps, block))});
            break;
        }
        case 9: {
            // throughput under the short-term power meeting each epsilon
            table.columns = {"epsilon", "power_rtd_db", "eta_rtd_cont", "eta_rtd_burst", "power_inr_db",
                             "eta_inr_cont", "eta_inr_burst"};
            const auto schedule = InrRateSchedule::fixed_length(opt.rate, 1);
            for (double eps : epsilons) {
                const double p_rtd = rtd_short_term_power(RtdSpec(opt.rate, 1), eps, block);
                const double p_inr = inr_short_term_power(schedule, eps, block);
                const PowerPolicy rtd_u = PowerPolicy::uniform(p_rtd, 2);
                const PowerPolicy inr_u = PowerPolicy::uniform(p_inr, 2);
                table.add_row({eps, to_db(p_rtd), rtd_throughput_continuous(RtdSpec(opt.rate, 1), rtd_u, block),
                               rtd_bursting_metrics(RtdSpec(opt.rate, 1), rtd_u, block).throughput, to_db(p_inr),
                               inr_throughput_continuous(schedule, inr_u, block),
                               inr_bursting_metrics(schedule, inr_u, block).throughput});
            }
            break;
        }
        case 10: {
            // throughput of short- vs long-term allocation at equal average power
            table.columns = {"epsilon", "rtd_eta_short", "rtd_eta_long", "inr_eta_short", "inr_eta_long"};
            const auto schedule = InrRateSchedule::fixed_length(opt.rate, 1);
            for (double eps : epsilons) {
                PowerPolicy rtd_policy, inr_policy;
                const double rtd_db_val =
                    optimized_db(Objective::Kind::RtdContinuous, opt.rate, 1, block, eps, opt.seed, run++, &rtd_policy);
                const double inr_db_val =
                    optimized_db(Objective::Kind::InrContinuous, opt.rate, 1, block, eps, opt.seed, run++, &inr_policy);
                const PowerPolicy rtd_u = PowerPolicy::uniform(from_db(rtd_db_val), 2);
                const PowerPolicy inr_u = PowerPolicy::uniform(from_db(inr_db_val), 2);
                table.add_row({eps, rtd_throughput_continuous(RtdSpec(opt.rate, 1), rtd_u, block),
                               rtd_throughput_continuous(RtdSpec(opt.rate, 1), rtd_policy, block),
                               inr_throughput_continuous(schedule, inr_u, block),
                               inr_throughput_continuous(schedule, inr_policy, block)});
            }
            break;
        }
        case 11: {
            table.columns = {"epsilon", "delta_phi_db", "delta_eta_pct"};
            for (double eps : epsilons) {
                const auto objective = Objective::rtd_objective(RtdSpec(opt.rate, 1), Model::Continuous, block, eps);
                table.add_row({eps, power_efficiency_db(objective, figure_config(opt.seed, run)),
                               relative_throughput_loss_pct(objective, figure_config(opt.seed, run))});
                ++run;
            }
            break;
        }
        case 12: {
            // average power needed at a fixed outage, uniform vs shaped rounds
            table.columns = {"beta", "epsilon", "uniform_db", "optimized_db"};
            const RtdSpec spec(opt.rate, 1);
            const std::vector<double> shapes = {1.0, 1.7, 3.0, 5.0, 9.0, 16.0};
            const std::vector<double> fig_eps = opt.epsilon_list.empty() ? std::vector<double>{1e-2} : epsilons;
            for (double eps : fig_eps) {
                for (double beta : betas) {
                    const FadingSpec fading = FadingSpec::correlated(beta, opt.lambda);
                    const double uni =
                        calibrate_scale_to_outage(spec, {1.0, 1.0}, fading, Model::Continuous, eps, 200000, opt.seed);
                    double best = uni;
                    for (double r : shapes) {
                        const double s = calibrate_scale_to_outage(spec, {1.0, r}, fading, Model::Continuous, eps,
                                                                   200000, opt.seed);
                        const auto metrics = simulate(SimConfig::for_rtd(spec, Model::Continuous,
                                                                         PowerPolicy({s, r * s}), fading, 200000,
                                                                         opt.seed));
                        best = std::min(best, metrics.avg_power.value);
                    }
                    table.add_row({beta, eps, to_db(uni), to_db(best)});
                }
            }
            break;
        }
        case 13: {
            // outage at a fixed 10 dB average power, uniform vs shaped rounds
            table.columns = {"beta", "avg_power_db", "outage_uniform", "outage_optimized"};
            const RtdSpec spec(opt.rate, 1);
            const std::vector<double> shapes = {1.0, 1.7, 3.0, 5.0, 9.0, 16.0};
            const double target = from_db(10.0);
            for (double beta : betas) {
                const FadingSpec fading = FadingSpec::correlated(beta, opt.lambda);
                const double s_uni = calibrate_scale_to_avg_power(spec, {1.0, 1.0}, fading, Model::Continuous, target,
                                                                  200000, opt.seed);
                const double out_uni = simulate(SimConfig::for_rtd(spec, Model::Continuous,
                                                                   PowerPolicy({s_uni, s_uni}), fading, 200000,
                                                                   opt.seed))
                                           .outage.value;
                double out_best = out_uni;
                for (double r : shapes) {
                    const double s = calibrate_scale_to_avg_power(spec, {1.0, r}, fading, Model::Continuous, target,
                                                                  200000, opt.seed);
                    out_best = std::min(out_best, simulate(SimConfig::for_rtd(spec, Model::Continuous,
                                                                              PowerPolicy({s, r * s}), fading, 200000,
                                                                              opt.seed))
                                                      .outage.value);
                }
                table.add_row({beta, 10.0, out_uni, out_best});
            }
            break;
        }
        case 14: {
            // static vs reinforcement-tuned average power at matched outage
            table.columns = {"epsilon", "beta", "static_db", "reinforcement_db", "reinforcement_outage",
                             "d1", "d2", "d3", "d4"};
            const RtdSpec spec(opt.rate, 1);
            const double beta = betas.size() == 1 ? betas.front() : 0.9;
            const FadingSpec fading = FadingSpec::correlated(beta, opt.lambda);
            const std::vector<double> fig_eps = opt.epsilon_list.empty() ? std::vector<double>{1e-2} : epsilons;
            for (double eps : fig_eps) {
                const double p_static =
                    calibrate_scale_to_outage(spec, {1.0, 1.0}, fading, Model::Continuous, eps, 200000, opt.seed);
                const auto tuned = tune_reinforcement(spec, fading, eps, ReinforcementGrids::defaults_around(p_static),
                                                      rl_points, opt.seed);
                if (!tuned.feasible) throw InfeasibleError("figure 14: no feasible reinforcement setting");
                table.add_row({eps, beta, to_db(p_static), to_db(tuned.achieved.metrics.avg_power.value),
                               tuned.achieved.metrics.outage.value, tuned.best.d1, tuned.best.d2, tuned.best.d3,
                               tuned.best.d4});
            }
            break;
        }
        default:
            throw std::invalid_argument("unknown figure id (supported: 3..14)");
    }

    table.write(opt.out_path, opt.format);
    std::printf("figure %d: wrote %zu rows to %s\n", figure_id, table.rows.size(), opt.out_path.c_str());
    return 0;
}

// Expand "--config FILE" into the equivalent long options, in place. The file
// is flat key=value (keys match the long option names, '#' comments allowed);
// the expansion is inserted where the flag stood, so flags placed after it
// override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t span = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            span = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            span = 1;
        } else {
            continue;
        }
        std::ifstream file(path);
        if (!file) throw std::invalid_argument("cannot open config file: " + path);
        std::vector<std::string> expanded;
        std::string line;
        while (std::getline(file, line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto last = line.find_last_not_of(" \t\r");
            line = line.substr(first, last - first + 1);
            const auto eq = line.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::invalid_argument("config file: expected key=value, got '" + line + "'");
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
            while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.erase(value.begin());
            if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                                      (value.front() == '\'' && value.back() == '\'')))
                value = value.substr(1, value.size() - 2);
            expanded.push_back("--" + key + "=" + value);
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                   args.begin() + static_cast<std::ptrdiff_t>(i + span));
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(i), expanded.begin(), expanded.end());
        break;
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"outage-limited HARQ power allocation toolkit"};
    app.require_subcommand(1);

    CommonOptions eval_opt, optim_opt, fig_opt;
    std::string powers_db;
    std::string method = "alg1";
    std::string policy_out;
    int restarts = 10;
    int iters = 5000;
    int figure_id = 0;
    std::uint64_t rl_points = 20000;

    auto* evaluate = app.add_subcommand("evaluate", "closed-form metrics for an explicit policy");
    add_common(evaluate, eval_opt);
    evaluate->add_option("--powers-db", powers_db, "per-round powers in dB, comma separated")->required();
    evaluate->add_option("--epsilon", eval_opt.epsilon_list, "outage constraints to echo, comma separated");

    auto* optimize_cmd = app.add_subcommand("optimize", "outage-constrained power allocation");
    add_common(optimize_cmd, optim_opt);
    optimize_cmd->add_option("--epsilon", optim_opt.epsilon_list, "outage constraints, comma separated")
        ->capture_default_str();
    optimize_cmd->add_option("--method", method, "alg1, geometric or short-term")->capture_default_str();
    optimize_cmd->add_option("--restarts", restarts, "independent optimizer restarts")->capture_default_str();
    optimize_cmd->add_option("--iters", iters, "max iterations per restart")->capture_default_str();
    optimize_cmd->add_option("--policy-out", policy_out, "write the best policies as JSON");

    auto* figure = app.add_subcommand("figure", "regenerate a figure's curves as a table");
    add_common(figure, fig_opt, /*with_model=*/false);
    figure->add_option("--figure", figure_id, "figure id, 3..14")->required();
    figure->add_option("--epsilon", fig_opt.epsilon_list, "x-axis outage grid, comma separated");
    figure->add_option("--beta", fig_opt.beta_list, "correlation grid for figures 12-14");
    figure->add_option("--rl-points", rl_points, "packets per reinforcement tuning run (figure 14)")
        ->capture_default_str();

    for (auto* cmd : {evaluate, optimize_cmd, figure})
        cmd->add_option("--config", "flat key=value configuration file (keys match the long option names)")
            ->type_name("FILE");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(evaluate)) return cmd_evaluate(eval_opt, powers_db);
        if (app.got_subcommand(optimize_cmd)) return cmd_optimize(optim_opt, method, restarts, iters, policy_out);
        return cmd_figure(figure_id, fig_opt, rl_points);
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    }
}
