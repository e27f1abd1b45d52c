#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dls/identify.h"
#include "dls/io.h"
#include "dls/mechanics.h"
#include "dls/planner.h"
#include "dls/simulator.h"

namespace py = pybind11;

namespace {

std::string pose_repr(const dls::Pose2& q) {
  return "Pose2(" + dls::format_number(q.x) + ", " + dls::format_number(q.y) + ", " +
         dls::format_number(q.theta) + ")";
}

dls::KvSurface surface_from(const std::string& s) {
  if (s == "support") return dls::KvSurface::kSupport;
  if (s == "top") return dls::KvSurface::kTop;
  throw dls::DomainError("surface must be 'support' or 'top'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dual limit surface mechanics, planning, simulation and identification.";

  auto domain_error = py::register_exception<dls::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<dls::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<dls::Infeasible>(m, "Infeasible");
  py::register_exception<dls::NonConvergence>(m, "NonConvergence");
  py::register_exception<dls::Degenerate>(m, "Degenerate", domain_error.ptr());
  py::register_exception<dls::NoIntersection>(m, "NoIntersection", domain_error.ptr());
  py::register_exception<dls::InfiniteKv>(m, "InfiniteKv");

  py::class_<dls::Pose2>(m, "Pose2")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("theta"))
      .def_readwrite("x", &dls::Pose2::x)
      .def_readwrite("y", &dls::Pose2::y)
      .def_readwrite("theta", &dls::Pose2::theta)
      .def(py::self == py::self)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def("to_tuple", [](const dls::Pose2& q) { return py::make_tuple(q.x, q.y, q.theta); })
      .def("__repr__", &pose_repr);

  py::class_<dls::Wrench2>(m, "Wrench2")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("fx"), py::arg("fy"), py::arg("tau"))
      .def_readwrite("fx", &dls::Wrench2::fx)
      .def_readwrite("fy", &dls::Wrench2::fy)
      .def_readwrite("tau", &dls::Wrench2::tau);

  py::class_<dls::Twist2>(m, "Twist2")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("vx"), py::arg("vy"), py::arg("omega"))
      .def_readwrite("vx", &dls::Twist2::vx)
      .def_readwrite("vy", &dls::Twist2::vy)
      .def_readwrite("omega", &dls::Twist2::omega);

  py::class_<dls::FrictionParams>(m, "FrictionParams")
      .def(py::init<>())
      .def(py::init([](double mu_e, double mu_p, double r_e, double r_p, double c, double mass,
                       double gravity) {
             return dls::FrictionParams{mu_e, mu_p, r_e, r_p, c, mass, gravity};
           }),
           py::arg("mu_e") = 0.36, py::arg("mu_p") = 0.3, py::arg("r_e") = 0.01,
           py::arg("r_p") = 0.04, py::arg("c") = 0.6, py::arg("mass") = 0.05,
           py::arg("gravity") = 9.81)
      .def_readwrite("mu_e", &dls::FrictionParams::mu_e)
      .def_readwrite("mu_p", &dls::FrictionParams::mu_p)
      .def_readwrite("r_e", &dls::FrictionParams::r_e)
      .def_readwrite("r_p", &dls::FrictionParams::r_p)
      .def_readwrite("c", &dls::FrictionParams::c)
      .def_readwrite("mass", &dls::FrictionParams::mass)
      .def_readwrite("gravity", &dls::FrictionParams::gravity)
      .def("validate", &dls::FrictionParams::validate)
      .def(py::self == py::self);

  py::enum_<dls::CaseId>(m, "CaseId")
      .value("I", dls::CaseId::I)
      .value("II", dls::CaseId::II)
      .value("III", dls::CaseId::III)
      .value("IV", dls::CaseId::IV)
      .value("V", dls::CaseId::V);

  py::class_<dls::ContactCase>(m, "ContactCase")
      .def_readonly("id", &dls::ContactCase::id)
      .def_readonly("p_t", &dls::ContactCase::p_t)
      .def_readonly("p_f", &dls::ContactCase::p_f);

  py::class_<dls::ForceRegime>(m, "ForceRegime")
      .def_readonly("n_slip", &dls::ForceRegime::n_slip)
      .def_readonly("n_stick", &dls::ForceRegime::n_stick)
      .def_property_readonly("valid_range", [](const dls::ForceRegime& r) {
        return py::make_tuple(r.valid_range.lower, r.valid_range.upper);
      });

  py::class_<dls::IntersectionPoint>(m, "IntersectionPoint")
      .def_readonly("force", &dls::IntersectionPoint::force)
      .def_readonly("torque", &dls::IntersectionPoint::torque);

  m.def("classify_case", &dls::classify_case, py::arg("params"));
  m.def("force_regime", &dls::force_regime, py::arg("params"));
  m.def("intersection_wrench",
        [](const dls::FrictionParams& p, double n_e) { return dls::intersection_wrench(p, n_e); },
        py::arg("params"), py::arg("n_e"));
  m.def("kv",
        [](const dls::FrictionParams& p, double n_e, const std::string& surface) {
          return dls::kv(p, n_e, surface_from(surface));
        },
        py::arg("params"), py::arg("n_e"), py::arg("surface") = "support",
        "Critical angular-to-linear speed ratio [rad/m] at the slip boundary.");
  m.def("is_slippage_free", &dls::is_slippage_free, py::arg("twist"), py::arg("k_v"),
        py::arg("case_id"), py::arg("safety"));

  py::enum_<dls::KvConvention>(m, "KvConvention")
      .value("SQUARED", dls::KvConvention::kSquared)
      .value("LITERAL", dls::KvConvention::kLiteral);

  py::class_<dls::PlanProblem>(m, "PlanProblem")
      .def(py::init<>())
      .def_readwrite("start", &dls::PlanProblem::start)
      .def_readwrite("goal", &dls::PlanProblem::goal)
      .def_readwrite("n", &dls::PlanProblem::n)
      .def_readwrite("k_v", &dls::PlanProblem::k_v)
      .def_readwrite("case_id", &dls::PlanProblem::case_id)
      .def_readwrite("c1", &dls::PlanProblem::c1)
      .def_readwrite("c2", &dls::PlanProblem::c2)
      .def_readwrite("safety", &dls::PlanProblem::safety)
      .def_readwrite("convention", &dls::PlanProblem::convention);

  py::class_<dls::Path>(m, "Path")
      .def(py::init<>())
      .def(py::init([](std::vector<dls::Pose2> w) { return dls::Path{std::move(w)}; }))
      .def_readwrite("waypoints", &dls::Path::waypoints)
      .def("__len__", &dls::Path::size)
      .def("to_list", [](const dls::Path& p) {
        py::list out;
        for (const auto& q : p.waypoints) out.append(py::make_tuple(q.x, q.y, q.theta));
        return out;
      });

  py::class_<dls::SolveReport>(m, "SolveReport")
      .def_readonly("objective_value", &dls::SolveReport::objective_value)
      .def_readonly("per_segment_margins", &dls::SolveReport::per_segment_margins)
      .def_readonly("iterations", &dls::SolveReport::iterations)
      .def_readonly("converged", &dls::SolveReport::converged)
      .def_readonly("objective_trace", &dls::SolveReport::objective_trace);

  py::class_<dls::PlanResult>(m, "PlanResult")
      .def_readonly("path", &dls::PlanResult::path)
      .def_readonly("report", &dls::PlanResult::report);

  m.def("linear_interpolation", &dls::linear_interpolation, py::arg("start"), py::arg("goal"),
        py::arg("n"));
  m.def("solve_plan",
        [](const dls::PlanProblem& p) {
          py::gil_scoped_release release;
          return dls::solve_plan(p);
        },
        py::arg("problem"));

  py::class_<dls::SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("params", &dls::SimConfig::params)
      .def_readwrite("n_e", &dls::SimConfig::n_e)
      .def_readwrite("safety", &dls::SimConfig::safety);

  py::class_<dls::Rollout>(m, "Rollout")
      .def_readonly("ee_path", &dls::Rollout::ee_path)
      .def_readonly("object_path", &dls::Rollout::object_path)
      .def_readonly("slip_flags", &dls::Rollout::slip_flags)
      .def_readonly("final_error", &dls::Rollout::final_error);

  m.def("rollout", py::overload_cast<const dls::Path&, const dls::SimConfig&>(&dls::rollout),
        py::arg("path"), py::arg("config"));

  py::class_<dls::SegmentRecord>(m, "SegmentRecord")
      .def(py::init<>())
      .def_readwrite("q_e0", &dls::SegmentRecord::q_e0)
      .def_readwrite("q_eT", &dls::SegmentRecord::q_eT)
      .def_readwrite("q_o0", &dls::SegmentRecord::q_o0)
      .def_readwrite("q_oT", &dls::SegmentRecord::q_oT)
      .def_readwrite("n_e", &dls::SegmentRecord::n_e)
      .def_readwrite("wrench", &dls::SegmentRecord::wrench)
      .def_readwrite("label", &dls::SegmentRecord::label);

  py::class_<dls::FitResult>(m, "FitResult")
      .def_readonly("params", &dls::FitResult::params)
      .def_readonly("loss", &dls::FitResult::loss)
      .def_readonly("classification_accuracy", &dls::FitResult::classification_accuracy)
      .def_readonly("iterations", &dls::FitResult::iterations)
      .def_readonly("converged", &dls::FitResult::converged);

  m.def("synth_dataset", &dls::synth_dataset, py::arg("params"), py::arg("count"),
        py::arg("n_e_levels"), py::arg("noise") = 0.0, py::arg("seed") = 1);
  m.def("fit_params",
        [](const std::vector<dls::SegmentRecord>& data, const dls::FrictionParams& init,
           std::uint64_t seed, int restarts) {
          dls::FitOptions opts;
          opts.seed = seed;
          opts.restarts = restarts;
          py::gil_scoped_release release;
          return dls::fit_params(data, init, {}, opts);
        },
        py::arg("dataset"), py::arg("init"), py::arg("seed") = 1, py::arg("restarts") = 20);
  m.def("classification_accuracy", &dls::classification_accuracy, py::arg("params"),
        py::arg("dataset"));
  m.def("dataset_to_csv", &dls::dataset_to_csv, py::arg("records"));
  m.def("dataset_from_csv", &dls::dataset_from_csv, py::arg("text"));
  m.def("path_to_json", &dls::path_to_json, py::arg("path"));
  m.def("path_from_json", &dls::path_from_json, py::arg("text"));
}
