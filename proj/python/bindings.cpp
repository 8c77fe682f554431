#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "regcop/pipeline.hpp"

namespace py = pybind11;
using namespace regcop;

namespace {

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<ModelVariant> variants_or_all(const std::vector<ModelVariant>& v)
{
    return v.empty() ? std::vector<ModelVariant>(kAllVariants.begin(), kAllVariants.end()) : v;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Regime-switching factor copula credit loss engine";
    m.attr("__version__") = "0.1.0";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DependencyError>(m, "DependencyError", PyExc_RuntimeError);
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::class_<NormalParams>(m, "NormalParams")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("mean"), py::arg("std"))
        .def_static("from_variance", &NormalParams::from_variance)
        .def_property_readonly("mean", &NormalParams::mean)
        .def_property_readonly("std", &NormalParams::std)
        .def_property_readonly("variance", &NormalParams::variance)
        .def("__repr__", [](const NormalParams& p) {
            std::ostringstream os;
            os << "NormalParams(mean=" << p.mean() << ", std=" << p.std() << ")";
            return os.str();
        });

    py::class_<MixtureParams>(m, "MixtureParams")
        .def(py::init([](double omega, NormalParams h, NormalParams q) {
                 MixtureParams mp{omega, h, q};
                 mp.validate();
                 return mp;
             }),
             py::arg("omega"), py::arg("hectic"), py::arg("quiet"))
        .def_readwrite("omega", &MixtureParams::omega)
        .def_readwrite("hectic", &MixtureParams::hectic)
        .def_readwrite("quiet", &MixtureParams::quiet)
        .def("unconditional", &MixtureParams::unconditional);

    m.def("norm_pdf", &norm_pdf, py::arg("x"), py::arg("p") = NormalParams{});
    m.def("norm_cdf", &norm_cdf, py::arg("x"), py::arg("p") = NormalParams{});
    m.def("norm_inv_cdf", &norm_inv_cdf, py::arg("q"), py::arg("p") = NormalParams{});
    m.def("mixture_pdf", &mixture_pdf, py::arg("z"), py::arg("m"));

    py::class_<MixtureFit>(m, "MixtureFit")
        .def_readonly("params", &MixtureFit::params)
        .def_readonly("loglik", &MixtureFit::loglik)
        .def_readonly("iterations", &MixtureFit::iterations)
        .def_readonly("converged", &MixtureFit::converged)
        .def_readonly("boundary_hit", &MixtureFit::boundary_hit)
        .def_readonly("loglik_trace", &MixtureFit::loglik_trace);

    m.def(
        "fit_mixture_em",
        [](const std::vector<double>& z, double tol, int max_iter) {
            return fit_mixture_em(std::span<const double>(z), EmConfig{tol, max_iter});
        },
        py::arg("z"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500);
    m.def("posterior_hectic", &posterior_hectic, py::arg("z"), py::arg("m"));

    py::class_<LoadingSet>(m, "LoadingSet")
        .def(py::init([](std::string id, double a, double ah, double aq) {
                 return LoadingSet{std::move(id), a, ah, aq};
             }),
             py::arg("obligor_id") = "", py::arg("alpha") = 0.0, py::arg("alpha_h") = 0.0,
             py::arg("alpha_q") = 0.0)
        .def_readwrite("obligor_id", &LoadingSet::obligor_id)
        .def_readwrite("alpha", &LoadingSet::alpha)
        .def_readwrite("alpha_h", &LoadingSet::alpha_h)
        .def_readwrite("alpha_q", &LoadingSet::alpha_q);

    m.def(
        "weighted_correlation",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& w) { return weighted_correlation(x, y, w); },
        py::arg("x"), py::arg("y"), py::arg("w"));

    py::enum_<Regime>(m, "Regime")
        .value("Hectic", Regime::Hectic)
        .value("Quiet", Regime::Quiet)
        .value("Unconditional", Regime::Unconditional);

    py::class_<LatentSpec>(m, "LatentSpec")
        .def(py::init([](NormalParams z, double loading, Regime r) {
                 return LatentSpec{z, loading, r};
             }),
             py::arg("z_dist"), py::arg("loading"), py::arg("regime") = Regime::Unconditional)
        .def_readwrite("z_dist", &LatentSpec::z_dist)
        .def_readwrite("loading", &LatentSpec::loading)
        .def_readwrite("regime", &LatentSpec::regime);

    m.def("latent_value", &latent_value, py::arg("spec"), py::arg("z"), py::arg("eps"));
    m.def("latent_cdf_params", &latent_cdf_params, py::arg("spec"));
    m.def("pairwise_correlation", &pairwise_correlation, py::arg("alpha_i"), py::arg("alpha_j"),
          py::arg("var_z"));
    m.def("conditional_pd", &conditional_pd, py::arg("hazard_p"), py::arg("spec"), py::arg("z"));
    m.def(
        "default_time",
        [](double u, double intensity, const LatentSpec& spec) {
            return default_time(u, intensity, spec).tau;
        },
        py::arg("u"), py::arg("intensity"), py::arg("spec"));

    py::class_<RecoverySpec>(m, "RecoverySpec")
        .def_static("calibrate", &RecoverySpec::calibrate, py::arg("hazard_p"),
                    py::arg("recovery"), py::arg("recovery_floor") = 0.0)
        .def_readonly("base_recovery", &RecoverySpec::base_recovery)
        .def_readonly("floor_recovery", &RecoverySpec::floor_recovery)
        .def_readonly("hazard_p", &RecoverySpec::hazard_p)
        .def_readonly("adjusted_p", &RecoverySpec::adjusted_p)
        .def_property_readonly("shift", &RecoverySpec::shift);

    m.def("calibrate_adjusted_pd", &calibrate_adjusted_pd, py::arg("hazard_p"),
          py::arg("recovery"), py::arg("recovery_floor") = 0.0);
    m.def("state_lgd", &state_lgd, py::arg("z"), py::arg("spec"), py::arg("rs"));
    m.def("state_recovery", &state_recovery, py::arg("z"), py::arg("spec"), py::arg("rs"));
    m.def(
        "hazard_from_spread",
        [](double spread, double recovery) { return hazard_from_spread({"", spread, recovery}); },
        py::arg("spread"), py::arg("recovery"));

    py::enum_<ModelVariant>(m, "ModelVariant")
        .value("FC", ModelVariant::FC)
        .value("RFL", ModelVariant::RFL)
        .value("RR", ModelVariant::RR)
        .value("RRFL", ModelVariant::RRFL);

    py::class_<Obligor>(m, "Obligor")
        .def(py::init([](std::string id, double p, double r, double r_bar, double exposure,
                         LoadingSet l) {
                 Obligor ob{std::move(id), p, r, r_bar, exposure, std::move(l)};
                 ob.validate();
                 return ob;
             }),
             py::arg("id"), py::arg("hazard_p"), py::arg("recovery"),
             py::arg("recovery_floor") = 0.0, py::arg("exposure") = kDefaultExposure,
             py::arg("loadings") = LoadingSet{})
        .def_readwrite("id", &Obligor::id)
        .def_readwrite("hazard_p", &Obligor::hazard_p)
        .def_readwrite("recovery", &Obligor::recovery)
        .def_readwrite("recovery_floor", &Obligor::recovery_floor)
        .def_readwrite("exposure", &Obligor::exposure)
        .def_readwrite("loadings", &Obligor::loadings);

    py::class_<ScenarioSet>(m, "ScenarioSet")
        .def("__len__", &ScenarioSet::size)
        .def_property_readonly("n_obligors", &ScenarioSet::n_obligors)
        .def_property_readonly("seed", &ScenarioSet::seed)
        .def_property_readonly("z", [](const ScenarioSet& s) { return to_vector(s.z_values()); })
        .def_property_readonly("pi_hectic",
                               [](const ScenarioSet& s) { return to_vector(s.pi_values()); })
        .def("eps", [](const ScenarioSet& s, std::size_t i) {
            if (i >= s.size()) throw py::index_error();
            return to_vector(s[i].eps);
        });

    m.def("generate_scenarios", &generate_scenarios, py::arg("m"), py::arg("z_dist"),
          py::arg("n_obligors"), py::arg("n_scenarios"), py::arg("seed"), py::arg("threads") = 1);

    py::class_<ModelEvaluation>(m, "ModelEvaluation")
        .def_readonly("variant", &ModelEvaluation::variant)
        .def_readonly("actual_loss", &ModelEvaluation::actual_loss)
        .def_readonly("expected_loss", &ModelEvaluation::expected_loss)
        .def_readonly("ae", &ModelEvaluation::ae)
        .def_readonly("abs_ae", &ModelEvaluation::abs_ae)
        .def_readonly("mae", &ModelEvaluation::mae)
        .def_readonly("ratio", &ModelEvaluation::ratio)
        .def_readonly("simulated_loss", &ModelEvaluation::simulated_loss);

    py::class_<EvaluationReport>(m, "EvaluationReport")
        .def_readonly("n_obligors", &EvaluationReport::n_obligors)
        .def_readonly("n_scenarios", &EvaluationReport::n_scenarios)
        .def_readonly("models", &EvaluationReport::models)
        .def("at", &EvaluationReport::at, py::return_value_policy::copy);

    m.def(
        "evaluate_models",
        [](const Portfolio& p, const ScenarioSet& s, double actual, const MixtureParams& mix,
           const std::vector<ModelVariant>& variants,
           const NormalParams* threshold_dist, double horizon) {
            EngineConfig cfg = EngineConfig::for_mixture(mix);
            if (threshold_dist) cfg.threshold_dist = *threshold_dist;
            cfg.horizon = horizon;
            const auto vs = variants_or_all(variants);
            return evaluate_models(p, s, actual, vs, cfg);
        },
        py::arg("portfolio"), py::arg("scenarios"), py::arg("actual_loss"),
        py::arg("mixture"), py::arg("variants") = std::vector<ModelVariant>{},
        py::arg("threshold_dist") = nullptr, py::arg("horizon") = 1.0,
        "Thresholds default to the mixture's moment-matched normal.");

    m.def(
        "run_pipeline",
        [](const std::string& command, const py::kwargs& kw) {
            RunConfig cfg;
            for (const auto& [key, value] : kw) {
                const auto k = key.cast<std::string>();
                if (k == "seed") cfg.seed = value.cast<std::uint64_t>();
                else if (k == "scenarios") cfg.n_scenarios = value.cast<std::size_t>();
                else if (k == "z_mean") cfg.z_mean = value.cast<double>();
                else if (k == "z_var") cfg.z_variance = value.cast<double>();
                else if (k == "horizon") cfg.horizon = value.cast<double>();
                else if (k == "r_bar") cfg.r_bar_default = value.cast<double>();
                else if (k == "actual_loss") cfg.actual_loss = value.cast<double>();
                else if (k == "out") cfg.out_dir = value.cast<std::string>();
                else if (k == "returns") cfg.returns = value.cast<std::string>();
                else if (k == "portfolio") cfg.portfolio = value.cast<std::string>();
                else if (k == "percent")
                    cfg.unit = value.cast<bool>() ? io::ReturnUnit::Percent : io::ReturnUnit::Decimal;
                else if (k == "threads") cfg.threads = value.cast<unsigned>();
                else throw DomainError("unknown option '" + k + "'");
            }
            std::ostringstream log;
            std::vector<std::string> out;
            for (const auto& p : run_pipeline(cfg, command, log)) out.push_back(p.string());
            return out;
        },
        py::arg("command"));
}
