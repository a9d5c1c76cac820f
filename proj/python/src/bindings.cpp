#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "elqkd/detection_sim.hpp"
#include "elqkd/entropy.hpp"
#include "elqkd/rate_models.hpp"
#include "elqkd/root_finding.hpp"
#include "elqkd/serialization.hpp"
#include "elqkd/threshold.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

// Probabilities cross the boundary as plain floats; out-of-range values
// raise ValueError.
namespace pybind11::detail {
template <>
struct type_caster<elqkd::Probability> {
  PYBIND11_TYPE_CASTER(elqkd::Probability, const_name("float"));

  bool load(handle src, bool convert) {
    type_caster<double> inner;
    if (!inner.load(src, convert)) return false;
    value = elqkd::Probability{static_cast<double>(inner)};
    return true;
  }

  static handle cast(elqkd::Probability p, return_value_policy, handle) {
    return PyFloat_FromDouble(p.value());
  }
};
}  // namespace pybind11::detail

namespace py = pybind11;
using namespace elqkd;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Efficiency-loophole-free QKD post-processing: rates, thresholds, simulation";

  py::register_exception<NoSignChange>(m, "NoSignChange", PyExc_ValueError);
  py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);
  py::register_exception<EmptyCurve>(m, "EmptyCurve", PyExc_RuntimeError);

  m.def("binary_entropy", py::overload_cast<double>(&binary_entropy), py::arg("x"));
  m.def(
      "find_root_bisect",
      [](const std::function<double(double)>& f, double lo, double hi, double tol) {
        return find_root_bisect(f, lo, hi, tol);
      },
      py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("tol") = kDefaultBisectionTolerance);

  py::enum_<ModelFamily>(m, "ModelFamily")
      .value("single_photon", ModelFamily::single_photon)
      .value("coherent", ModelFamily::coherent)
      .value("coherent_memory", ModelFamily::coherent_memory);

  py::class_<SinglePhoton>(m, "SinglePhoton")
      .def(py::init<Probability, Probability>(), py::arg("eta"), py::arg("e_d"))
      .def_readwrite("eta", &SinglePhoton::eta)
      .def_readwrite("e_d", &SinglePhoton::e_d);
  py::class_<CoherentDecoy>(m, "CoherentDecoy")
      .def(py::init<double, Probability, Probability>(), py::arg("mu"), py::arg("eta"),
           py::arg("e_d"))
      .def_readwrite("mu", &CoherentDecoy::mu)
      .def_readwrite("eta", &CoherentDecoy::eta)
      .def_readwrite("e_d", &CoherentDecoy::e_d);
  py::class_<CoherentDecoyMemory>(m, "CoherentDecoyMemory")
      .def(py::init<double, Probability, Probability, Probability>(), py::arg("mu"),
           py::arg("eta_c"), py::arg("eta_m"), py::arg("e_d"))
      .def_readwrite("mu", &CoherentDecoyMemory::mu)
      .def_readwrite("eta_c", &CoherentDecoyMemory::eta_c)
      .def_readwrite("eta_m", &CoherentDecoyMemory::eta_m)
      .def_readwrite("e_d", &CoherentDecoyMemory::e_d);

  py::class_<DetectionStats>(m, "DetectionStats")
      .def(py::init<Probability, Probability>(), py::arg("q_s"), py::arg("e_s"))
      .def_readwrite("q_s", &DetectionStats::q_s)
      .def_readwrite("e_s", &DetectionStats::e_s);
  py::class_<CoherentParams>(m, "CoherentParams")
      .def_readwrite("stats", &CoherentParams::stats)
      .def_readwrite("p_1", &CoherentParams::p_1)
      .def_readwrite("y_1", &CoherentParams::y_1)
      .def_readwrite("delta_1", &CoherentParams::delta_1);
  py::class_<KeyRateBreakdown>(m, "KeyRateBreakdown")
      .def_readonly("rate", &KeyRateBreakdown::rate)
      .def_readonly("delta", &KeyRateBreakdown::delta)
      .def_readonly("phase_bound", &KeyRateBreakdown::phase_bound)
      .def_readonly("signal", &KeyRateBreakdown::signal)
      .def_readonly("ec_cost", &KeyRateBreakdown::ec_cost)
      .def_readonly("pa_cost", &KeyRateBreakdown::pa_cost)
      .def_readonly("p_1", &KeyRateBreakdown::p_1)
      .def_readonly("y_1", &KeyRateBreakdown::y_1)
      .def_readonly("delta_1", &KeyRateBreakdown::delta_1)
      .def_readonly("degenerate", &KeyRateBreakdown::degenerate)
      .def_property_readonly("operational_rate", &KeyRateBreakdown::operational_rate);

  m.def("qber", &qber, py::arg("stats"), py::arg("e_0") = kRandomAssignmentError);
  m.def("rate_basis_independent_baseline", &rate_basis_independent_baseline, py::arg("delta"));
  m.def("phase_error_single_bound", &phase_error_single_bound, py::arg("delta"),
        py::arg("q_s"));
  m.def("key_rate_single_click", &key_rate_single_click, py::arg("stats"),
        py::arg("e_0") = kRandomAssignmentError);
  m.def("single_photon_stats", &single_photon_stats, py::arg("model"));
  m.def("coherent_stats", &coherent_stats, py::arg("model"),
        py::arg("e_0") = kRandomAssignmentError);
  m.def("coherent_memory_stats", &coherent_memory_stats, py::arg("model"),
        py::arg("e_0") = kRandomAssignmentError);
  m.def("key_rate_coherent", &key_rate_coherent, py::arg("params"),
        py::arg("e_0") = kRandomAssignmentError);
  m.def("key_rate", &key_rate, py::arg("model"));

  py::enum_<CurveTag>(m, "CurveTag")
      .value("single_photon", CurveTag::single_photon)
      .value("coherent", CurveTag::coherent)
      .value("coherent_memory", CurveTag::coherent_memory)
      .value("memory_single_photon", CurveTag::memory_single_photon);
  py::class_<CurveFamily>(m, "CurveFamily")
      .def(py::init([](CurveTag tag, double mu, Probability eta_c) {
             return CurveFamily{tag, mu, eta_c};
           }),
           py::arg("tag"), py::arg("mu") = 0.5, py::arg("eta_c") = 0.01)
      .def_readwrite("tag", &CurveFamily::tag)
      .def_readwrite("mu", &CurveFamily::mu)
      .def_readwrite("eta_c", &CurveFamily::eta_c);
  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double eta_min, double eta_max, double step) {
             return GridSpec{eta_min, eta_max, step};
           }),
           py::arg("eta_min") = 0.5, py::arg("eta_max") = 1.0, py::arg("step") = 0.005)
      .def_readwrite("eta_min", &GridSpec::eta_min)
      .def_readwrite("eta_max", &GridSpec::eta_max)
      .def_readwrite("step", &GridSpec::step)
      .def("points", &GridSpec::points);
  py::class_<ThresholdPoint>(m, "ThresholdPoint")
      .def_readonly("eta", &ThresholdPoint::eta)
      .def_readonly("e_d_max", &ThresholdPoint::e_d_max)
      .def_readonly("tag", &ThresholdPoint::tag);
  py::class_<ThresholdCurve>(m, "ThresholdCurve")
      .def_readonly("tag", &ThresholdCurve::tag)
      .def_readonly("points", &ThresholdCurve::points)
      .def_readonly("grid", &ThresholdCurve::grid);

  m.def("solve_threshold_ed", &solve_threshold_ed, py::arg("family"), py::arg("eta"),
        py::arg("tol") = kDefaultBisectionTolerance);
  m.def("sweep_curve", &sweep_curve, py::arg("family"), py::arg("grid") = GridSpec{},
        py::arg("tol") = kDefaultBisectionTolerance, py::arg("threads") = 1u,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "curves_to_csv",
      [](const std::vector<ThresholdCurve>& curves) {
        std::ostringstream text;
        write_curves_csv(text, curves);
        return text.str();
      },
      py::arg("curves"));

  py::class_<NoAdversary>(m, "NoAdversary").def(py::init<>());
  py::class_<ExtremeTimeShift>(m, "ExtremeTimeShift").def(py::init<>());
  py::class_<StrongPulse>(m, "StrongPulse")
      .def(py::init<std::uint32_t>(), py::arg("n_photons") = 20)
      .def_readwrite("n_photons", &StrongPulse::n_photons);

  py::enum_<Scenario>(m, "Scenario")
      .value("honest", Scenario::honest)
      .value("time_shift", Scenario::time_shift)
      .value("strong_pulse", Scenario::strong_pulse);
  py::class_<ClickTally>(m, "ClickTally")
      .def_readonly("n_single", &ClickTally::n_single)
      .def_readonly("n_single_errors", &ClickTally::n_single_errors)
      .def_readonly("n_double", &ClickTally::n_double)
      .def_readonly("n_none", &ClickTally::n_none)
      .def_property_readonly("total", &ClickTally::total);
  py::class_<TrialBatch>(m, "TrialBatch")
      .def_readonly("scenario", &TrialBatch::scenario)
      .def_readonly("model", &TrialBatch::model)
      .def_readonly("seed", &TrialBatch::seed)
      .def_readonly("n_sent", &TrialBatch::n_sent)
      .def_readonly("sifted", &TrialBatch::sifted)
      .def_readonly("mismatched", &TrialBatch::mismatched)
      .def_property_readonly("n_pulses", &TrialBatch::n_pulses)
      .def("__eq__", [](const TrialBatch& a, const TrialBatch& b) { return a == b; });
  py::class_<EmpiricalStats>(m, "EmpiricalStats")
      .def_readonly("stats", &EmpiricalStats::stats)
      .def_readonly("degenerate", &EmpiricalStats::degenerate);
  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("analytic", &ComparisonReport::analytic)
      .def_readonly("empirical", &ComparisonReport::empirical)
      .def_readonly("q_s_z_score", &ComparisonReport::q_s_z_score)
      .def_readonly("e_s_z_score", &ComparisonReport::e_s_z_score)
      .def_readonly("q_s_systematic_bound", &ComparisonReport::q_s_systematic_bound)
      .def_readonly("e_s_systematic_bound", &ComparisonReport::e_s_systematic_bound)
      .def_readonly("rate_gap", &ComparisonReport::rate_gap)
      .def_property_readonly("passed", &ComparisonReport::pass);

  m.def(
      "run_trials",
      [](const SourceModel& model, const AdversaryStrategy& adversary, std::uint64_t n_pulses,
         std::uint64_t seed, unsigned threads) {
        return run_trials(model, adversary, n_pulses, seed, RunOptions{threads, 0.0});
      },
      py::arg("model"), py::arg("adversary") = AdversaryStrategy{NoAdversary{}},
      py::arg("n_pulses") = 1'000'000, py::arg("seed") = 1, py::arg("threads") = 0u,
      py::call_guard<py::gil_scoped_release>());
  m.def("empirical_stats", &empirical_stats, py::arg("batch"));
  m.def("compare_to_analytic", &compare_to_analytic, py::arg("model"), py::arg("batch"));
  m.def(
      "batch_to_json", [](const TrialBatch& batch) { return batch_to_json(batch).dump(); },
      py::arg("batch"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
