#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "harqopt/optimizer.hpp"
#include "harqopt/simulator.hpp"

namespace py = pybind11;
using namespace harqopt;

namespace {

py::array_t<double> gain_path_array(const FadingSpec& spec, std::size_t n, std::uint64_t seed) {
    const auto path = sample_gain_path(spec, n, seed);
    return py::array_t<double>(static_cast<py::ssize_t>(path.size()), path.data());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Outage-limited HARQ power allocation: closed forms, optimizers and Monte Carlo";

    py::register_exception<InfeasibleError>(m, "InfeasibleError");
    py::register_exception<NumericError>(m, "NumericError");
    py::register_exception<UnsupportedConfigError>(m, "UnsupportedConfigError");
    py::register_exception<DegeneratePolicyError>(m, "DegeneratePolicyError");

    m.def("to_db", &to_db, py::arg("linear"));
    m.def("from_db", &from_db, py::arg("db"));

    // fading
    py::enum_<TemporalModel>(m, "TemporalModel")
        .value("Block", TemporalModel::Block)
        .value("Fast", TemporalModel::Fast)
        .value("Correlated", TemporalModel::Correlated);

    py::class_<FadingSpec>(m, "FadingSpec")
        .def(py::init<>())
        .def_static("block", &FadingSpec::block, py::arg("lam") = 1.0)
        .def_static("fast", &FadingSpec::fast, py::arg("lam") = 1.0)
        .def_static("correlated", &FadingSpec::correlated, py::arg("beta"), py::arg("lam") = 1.0)
        .def_readwrite("lam", &FadingSpec::lambda)
        .def_readwrite("temporal", &FadingSpec::temporal)
        .def_readwrite("beta", &FadingSpec::beta);

    m.def("gain_cdf", &gain_cdf, py::arg("spec"), py::arg("g"));
    m.def("gain_pdf", &gain_pdf, py::arg("spec"), py::arg("g"));
    m.def("gain_inv_cdf", &gain_inv_cdf, py::arg("spec"), py::arg("p"));
    m.def("mean_gain", &mean_gain, py::arg("spec"));
    m.def("sample_gain_path", &gain_path_array, py::arg("spec"), py::arg("n_steps"), py::arg("seed"));

    // policies and metrics
    py::class_<PowerPolicy>(m, "PowerPolicy")
        .def(py::init<std::vector<double>>(), py::arg("powers"))
        .def_static("uniform", &PowerPolicy::uniform, py::arg("power"), py::arg("rounds"))
        .def_readonly("powers", &PowerPolicy::powers)
        .def("total", &PowerPolicy::total)
        .def("__len__", [](const PowerPolicy& p) { return p.powers.size(); });

    py::class_<DecodeProfile>(m, "DecodeProfile")
        .def_readonly("p_success", &DecodeProfile::p_success)
        .def_readonly("p_outage", &DecodeProfile::p_outage)
        .def("sum", &DecodeProfile::sum);

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("outage", &Metrics::outage)
        .def_readonly("avg_power", &Metrics::avg_power)
        .def_readonly("throughput", &Metrics::throughput)
        .def_readonly("expected_rounds", &Metrics::expected_rounds)
        .def_readonly("energy_per_packet", &Metrics::energy_per_packet);

    // RTD closed forms
    py::class_<RtdSpec>(m, "RtdSpec")
        .def(py::init<double, int>(), py::arg("rate"), py::arg("max_retransmissions"))
        .def_readonly("rate", &RtdSpec::rate)
        .def_readonly("max_retransmissions", &RtdSpec::max_retransmissions)
        .def("rounds", &RtdSpec::rounds);

    m.def("rtd_decode_profile", &rtd_decode_profile, py::arg("spec"), py::arg("policy"), py::arg("fading"));
    m.def("rtd_avg_power_continuous", &rtd_avg_power_continuous, py::arg("spec"), py::arg("policy"),
          py::arg("fading"));
    m.def("rtd_outage", &rtd_outage, py::arg("spec"), py::arg("policy"), py::arg("fading"));
    m.def("rtd_short_term_power", &rtd_short_term_power, py::arg("spec"), py::arg("epsilon"), py::arg("fading"));
    m.def("rtd_throughput_continuous", &rtd_throughput_continuous, py::arg("spec"), py::arg("policy"),
          py::arg("fading"));
    m.def("rtd_bursting_metrics", &rtd_bursting_metrics, py::arg("spec"), py::arg("policy"), py::arg("fading"));
    m.def("rtd_continuous_metrics", &rtd_continuous_metrics, py::arg("spec"), py::arg("policy"), py::arg("fading"));
    m.def("rtd_fast_fading_outage", &rtd_fast_fading_outage, py::arg("spec"), py::arg("policy"), py::arg("fading"),
          py::arg("mc_budget"), py::arg("seed"));
    m.def("rtd_avg_power_lower_bound", &rtd_avg_power_lower_bound, py::arg("spec"), py::arg("policy"),
          py::arg("fading"));

    // INR closed forms
    py::class_<InrRateSchedule>(m, "InrRateSchedule")
        .def(py::init<std::vector<double>>(), py::arg("rates"))
        .def_static("fixed_length", &InrRateSchedule::fixed_length, py::arg("initial_rate"),
                    py::arg("max_retransmissions"))
        .def_readonly("rates", &InrRateSchedule::rates)
        .def("rounds", &InrRateSchedule::rounds)
        .def("lengths", &InrRateSchedule::lengths)
        .def("is_fixed_length", &InrRateSchedule::is_fixed_length, py::arg("rel_tol") = 1e-9);

    m.def("inr_decode_profile", &inr_decode_profile, py::arg("schedule"), py::arg("policy"), py::arg("fading"));
    m.def("inr_outage_threshold", &inr_outage_threshold, py::arg("schedule"), py::arg("policy"));
    m.def("inr_outage", &inr_outage, py::arg("schedule"), py::arg("policy"), py::arg("fading"));
    m.def("inr_avg_power_continuous", &inr_avg_power_continuous, py::arg("schedule"), py::arg("policy"),
          py::arg("fading"));
    m.def("inr_throughput_continuous", &inr_throughput_continuous, py::arg("schedule"), py::arg("policy"),
          py::arg("fading"));
    m.def("inr_bursting_metrics", &inr_bursting_metrics, py::arg("schedule"), py::arg("policy"), py::arg("fading"));
    m.def("inr_continuous_metrics", &inr_continuous_metrics, py::arg("schedule"), py::arg("policy"),
          py::arg("fading"));
    m.def("inr_short_term_power", &inr_short_term_power, py::arg("schedule"), py::arg("epsilon"), py::arg("fading"));
    m.def("inr_fast_fading_outage", &inr_fast_fading_outage, py::arg("schedule"), py::arg("policy"),
          py::arg("fading"), py::arg("mc_budget"), py::arg("seed"));

    // optimizer
    py::enum_<Protocol>(m, "Protocol").value("Rtd", Protocol::Rtd).value("Inr", Protocol::Inr);
    py::enum_<Model>(m, "Model").value("Continuous", Model::Continuous).value("Bursting", Model::Bursting);

    py::class_<Objective>(m, "Objective")
        .def_static("rtd", &Objective::rtd_objective, py::arg("spec"), py::arg("model"), py::arg("fading"),
                    py::arg("epsilon"))
        .def_static("inr", &Objective::inr_objective, py::arg("schedule"), py::arg("model"), py::arg("fading"),
                    py::arg("epsilon"))
        .def_static("asymptotic", &Objective::asymptotic_objective, py::arg("spec"), py::arg("fading"),
                    py::arg("epsilon"))
        .def_readonly("epsilon", &Objective::epsilon);

    py::class_<OptimizerConfig>(m, "OptimizerConfig")
        .def(py::init<>())
        .def_readwrite("population", &OptimizerConfig::population)
        .def_readwrite("elite", &OptimizerConfig::elite)
        .def_readwrite("max_iters", &OptimizerConfig::max_iters)
        .def_readwrite("convergence_tol", &OptimizerConfig::convergence_tol)
        .def_readwrite("convergence_window", &OptimizerConfig::convergence_window)
        .def_readwrite("restarts", &OptimizerConfig::restarts)
        .def_readwrite("perturbation_scale", &OptimizerConfig::perturbation_scale)
        .def_readwrite("perturbation_anneal", &OptimizerConfig::perturbation_anneal)
        .def_readwrite("perturbation_floor", &OptimizerConfig::perturbation_floor)
        .def_readwrite("seed", &OptimizerConfig::seed)
        .def_readwrite("init_power_range", &OptimizerConfig::init_power_range);

    py::class_<MonotonicityReport>(m, "MonotonicityReport")
        .def_readonly("powers_nondecreasing", &MonotonicityReport::powers_nondecreasing)
        .def_readonly("energies_nondecreasing", &MonotonicityReport::energies_nondecreasing);

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("best_policy", &OptimizationResult::best_policy)
        .def_readonly("achieved", &OptimizationResult::achieved)
        .def_readonly("objective", &OptimizationResult::objective)
        .def_readonly("trace", &OptimizationResult::trace)
        .def_readonly("converged", &OptimizationResult::converged)
        .def_readonly("iterations", &OptimizationResult::iterations)
        .def_readonly("monotonicity", &OptimizationResult::monotonicity);

    m.def("solve_last_round_power", &solve_last_round_power, py::arg("objective"), py::arg("partial"));
    m.def("optimize", &optimize, py::arg("objective"), py::arg("config") = OptimizerConfig{},
          py::call_guard<py::gil_scoped_release>());
    m.def("asymptotic_avg_power", &asymptotic_avg_power, py::arg("spec"), py::arg("policy"), py::arg("fading"));
    m.def("geometric_allocation", &geometric_allocation, py::arg("spec"), py::arg("epsilon"), py::arg("fading"));
    m.def("stationary_allocation", &stationary_allocation, py::arg("spec"), py::arg("epsilon"), py::arg("fading"));
    m.def("short_term_baseline_power", &short_term_baseline_power, py::arg("objective"));
    m.def("power_efficiency_db", &power_efficiency_db, py::arg("objective"), py::arg("config") = OptimizerConfig{},
          py::call_guard<py::gil_scoped_release>());
    m.def("relative_throughput_loss_pct", &relative_throughput_loss_pct, py::arg("objective"),
          py::arg("config") = OptimizerConfig{}, py::call_guard<py::gil_scoped_release>());

    // simulator
    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("se", &Estimate::se);

    py::class_<SimMetrics>(m, "SimMetrics")
        .def_readonly("outage", &SimMetrics::outage)
        .def_readonly("avg_power", &SimMetrics::avg_power)
        .def_readonly("throughput", &SimMetrics::throughput)
        .def_readonly("expected_rounds", &SimMetrics::expected_rounds)
        .def_readonly("energy_per_packet", &SimMetrics::energy_per_packet)
        .def_readonly("packets", &SimMetrics::packets);

    py::class_<SimConfig>(m, "SimConfig")
        .def_static("for_rtd", &SimConfig::for_rtd, py::arg("spec"), py::arg("model"), py::arg("policy"),
                    py::arg("fading"), py::arg("n_packets"), py::arg("seed"))
        .def_static("for_inr", &SimConfig::for_inr, py::arg("schedule"), py::arg("model"), py::arg("policy"),
                    py::arg("fading"), py::arg("n_packets"), py::arg("seed"))
        .def_readwrite("packets_per_block", &SimConfig::packets_per_block)
        .def_readwrite("n_batches", &SimConfig::n_batches);

    m.def("simulate", &simulate, py::arg("config"), py::call_guard<py::gil_scoped_release>());

    py::class_<ReinforcementPolicy>(m, "ReinforcementPolicy")
        .def(py::init([](double p0, double d1, double d2, double d3, double d4) {
                 ReinforcementPolicy policy{p0, d1, d2, d3, d4};
                 policy.validate();
                 return policy;
             }),
             py::arg("p_initial"), py::arg("d1") = 0.0, py::arg("d2") = 0.0, py::arg("d3") = 0.0, py::arg("d4") = 0.0)
        .def_readonly("p_initial", &ReinforcementPolicy::p_initial)
        .def_readonly("d1", &ReinforcementPolicy::d1)
        .def_readonly("d2", &ReinforcementPolicy::d2)
        .def_readonly("d3", &ReinforcementPolicy::d3)
        .def_readonly("d4", &ReinforcementPolicy::d4);

    py::class_<PowerTrajectorySummary>(m, "PowerTrajectorySummary")
        .def_readonly("min_power", &PowerTrajectorySummary::min_power)
        .def_readonly("max_power", &PowerTrajectorySummary::max_power)
        .def_readonly("mean_power", &PowerTrajectorySummary::mean_power)
        .def_readonly("final_power", &PowerTrajectorySummary::final_power);

    py::class_<ReinforcementResult>(m, "ReinforcementResult")
        .def_readonly("metrics", &ReinforcementResult::metrics)
        .def_readonly("trajectory", &ReinforcementResult::trajectory);

    py::class_<ReinforcementGrids>(m, "ReinforcementGrids")
        .def(py::init<>())
        .def_static("defaults_around", &ReinforcementGrids::defaults_around, py::arg("p_center"))
        .def_readwrite("d1", &ReinforcementGrids::d1)
        .def_readwrite("d2", &ReinforcementGrids::d2)
        .def_readwrite("d3", &ReinforcementGrids::d3)
        .def_readwrite("d4", &ReinforcementGrids::d4)
        .def_readwrite("p_initial", &ReinforcementGrids::p_initial);

    py::class_<TuneResult>(m, "TuneResult")
        .def_readonly("feasible", &TuneResult::feasible)
        .def_readonly("best", &TuneResult::best)
        .def_readonly("achieved", &TuneResult::achieved);

    m.def("simulate_reinforcement", &simulate_reinforcement, py::arg("policy"), py::arg("spec"), py::arg("fading"),
          py::arg("n_packets"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
    m.def("tune_reinforcement", &tune_reinforcement, py::arg("spec"), py::arg("fading"), py::arg("epsilon"),
          py::arg("grids"), py::arg("n_packets"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
    m.def("calibrate_scale_to_outage", &calibrate_scale_to_outage, py::arg("spec"), py::arg("shape"),
          py::arg("fading"), py::arg("model"), py::arg("target_outage"), py::arg("n_packets"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());
    m.def("calibrate_scale_to_avg_power", &calibrate_scale_to_avg_power, py::arg("spec"), py::arg("shape"),
          py::arg("fading"), py::arg("model"), py::arg("target_avg_power"), py::arg("n_packets"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());
}
