#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "lendsim/engine.hpp"
#include "lendsim/feasibility.hpp"
#include "lendsim/scenario.hpp"

namespace py = pybind11;
using namespace lendsim;
using nlohmann::json;

namespace {

// the module talks JSON strings; the python package turns them into dicts
json parse_doc(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SimError(ErrorCode::ConfigError, std::string("bad json: ") + e.what());
  }
}

std::string run_json(const std::string& doc_text) {
  const RunResult run = run_scenario(parse_scenario(parse_doc(doc_text)));
  json events = json::array();
  for (const EventRecord& ev : run.events) {
    events.push_back({{"tick", ev.tick}, {"kind", ev.kind}, {"detail", ev.detail}});
  }
  return json{{"metrics_csv", run.metrics_csv},
              {"summary", run.summary},
              {"events", std::move(events)}}
      .dump();
}

std::string validate_json(const std::string& doc_text) {
  const json doc = parse_doc(doc_text);
  const Scenario sc = parse_scenario(doc);
  World world(sc);  // constructs agents, catching config errors parse misses
  return json{{"name", sc.name},
              {"hash", hash_hex(scenario_hash(doc))},
              {"assets", static_cast<int64_t>(sc.assets.size())},
              {"agents", static_cast<int64_t>(sc.agents.size())},
              {"horizon_ticks", sc.horizon_ticks}}
      .dump();
}

std::string replay_check_json(const std::string& doc_text) {
  const ReplayReport report = replay_check(parse_scenario(parse_doc(doc_text)));
  return json{{"deterministic", report.deterministic},
              {"first_divergent_tick", report.first_divergent_tick},
              {"detail", report.detail}}
      .dump();
}

std::string sweep_json(const std::string& doc_text, const std::string& path,
                       const std::string& values_text, bool parallel) {
  const json values = parse_doc(values_text);
  if (!values.is_array()) {
    throw SimError(ErrorCode::ConfigError, "sweep values must be a json array");
  }
  std::vector<json> value_list(values.begin(), values.end());
  json out = json::array();
  for (const SweepEntry& entry : sweep(parse_doc(doc_text), path, value_list, parallel)) {
    out.push_back({{"value", entry.value}, {"summary", entry.summary}});
  }
  return out.dump();
}

std::string override_json(const std::string& doc_text, const std::string& expr) {
  json doc = parse_doc(doc_text);
  apply_override_expr(doc, expr);
  return doc.dump();
}

std::string analyze_json(const std::string& csv_text,
                         const std::string& available_threshold,
                         const std::string& deposit_threshold) {
  std::istringstream in(csv_text);
  FeasibilityThresholds thresholds;
  thresholds.available_ratio = fd(available_threshold);
  thresholds.deposit_ratio = fd(deposit_threshold);
  json out = json::array();
  for (const FeasibilityRow& row : rank(read_snapshot_csv(in), thresholds)) {
    out.push_back({{"asset", row.snapshot.asset},
                   {"deposited_value", row.snapshot.deposited_value.to_string()},
                   {"available_value", row.snapshot.available_value.to_string()},
                   {"market_cap", row.snapshot.market_cap.to_string()},
                   {"status", row.snapshot.status},
                   {"deposit_ratio", row.deposit_ratio.to_string()},
                   {"available_ratio", row.available_ratio.to_string()},
                   {"squeezable", row.squeezable},
                   {"depth_risk", row.depth_risk}});
  }
  return out.dump();
}

std::string borrow_rate_str(const std::string& utilization, const std::string& base_rate,
                            const std::string& optimal_util, const std::string& slope1,
                            const std::string& slope2) {
  RateParams params;
  params.base_rate = fd(base_rate);
  params.optimal_util = fd(optimal_util);
  params.slope1 = fd(slope1);
  params.slope2 = fd(slope2);
  params.validate();
  return borrow_rate(fd(utilization), params).to_string();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "deterministic lending-market simulator core";

  py::register_exception<SimError>(m, "SimError");

  py::class_<FixedDec>(m, "FixedDec")
      .def(py::init([](const std::string& text) { return fd(text); }),
           py::arg("text"))
      .def_static("zero", &FixedDec::zero)
      .def_static("one", &FixedDec::one)
      .def_static("ulp", &FixedDec::ulp)
      .def("__str__", &FixedDec::to_string)
      .def("__repr__",
           [](const FixedDec& v) { return "FixedDec('" + v.to_string() + "')"; })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self / py::self)
      .def(-py::self)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def(py::self < py::self)
      .def(py::self <= py::self)
      .def(py::self > py::self)
      .def(py::self >= py::self)
      .def("min", &FixedDec::min)
      .def("max", &FixedDec::max)
      .def("abs", &FixedDec::abs)
      .def("sqrt", &FixedDec::sqrt);

  m.def("run_json", &run_json, py::arg("doc"),
        "run a scenario document, returning metrics, summary and events as json");
  m.def("validate_json", &validate_json, py::arg("doc"),
        "parse and construct a scenario, returning its name and hash as json");
  m.def("replay_check_json", &replay_check_json, py::arg("doc"),
        "run twice and compare, returning the report as json");
  m.def("sweep_json", &sweep_json, py::arg("doc"), py::arg("path"), py::arg("values"),
        py::arg("parallel") = false,
        "run once per override value, returning value/summary pairs as json");
  m.def("override_json", &override_json, py::arg("doc"), py::arg("expr"),
        "apply a path=value override expression to a document");
  m.def("analyze_json", &analyze_json, py::arg("csv"),
        py::arg("available_threshold") = "0.15", py::arg("deposit_threshold") = "0.30",
        "rank a market snapshot csv, returning assessed rows as json");
  m.def("borrow_rate", &borrow_rate_str, py::arg("utilization"), py::arg("base_rate"),
        py::arg("optimal_util"), py::arg("slope1"), py::arg("slope2"),
        "kinked-curve borrow rate for a utilization, all decimal strings");
}
