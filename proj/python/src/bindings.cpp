#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cloudlb/engine.hpp"
#include "cloudlb/metrics.hpp"
#include "cloudlb/scenario.hpp"

namespace py = pybind11;
using namespace cloudlb;

namespace {

PolicyKind policy_from(const std::string& name) {
    auto p = parse_policy(name);
    if (!p) throw py::value_error("policy must be 'baseline' or 'enhanced', got '" + name + "'");
    return *p;
}

py::dict comparison_dict(const ComparisonOutput& out) {
    const auto& c = out.comparison;
    py::dict d;
    d["mean_baseline_ms"] = c.mean_baseline_ms;
    d["mean_enhanced_ms"] = c.mean_enhanced_ms;
    d["mean_improvement"] = c.mean_improvement;
    d["deadlocks_baseline"] = c.deadlocks_baseline;
    d["deadlocks_enhanced"] = c.deadlocks_enhanced;
    d["migrations_enhanced"] = c.migrations_enhanced;
    d["comparison_csv"] = out.comparison_csv;
    d["timeline_csv"] = out.timeline_csv;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete-event simulator for cloud VM load balancing with migration";

    static py::exception<ScenarioError> scenario_error(m, "ScenarioError", PyExc_ValueError);
    static py::exception<EngineAbort> engine_abort(m, "EngineAbort", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ScenarioError& e) {
            py::set_error(scenario_error, e.what());
        } catch (const EngineAbort& e) {
            py::set_error(engine_abort, e.what());
        } catch (const ComparisonError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<JobSpec>(m, "JobSpec")
        .def_readonly("id", &JobSpec::id)
        .def_readonly("capacity", &JobSpec::capacity)
        .def_readonly("arrival", &JobSpec::arrival)
        .def("__repr__", [](const JobSpec& j) {
            return "JobSpec(" + j.id + ", " + std::to_string(j.capacity) + ", " + std::to_string(j.arrival) + ")";
        });

    py::class_<VmSpec>(m, "VmSpec")
        .def_readonly("id", &VmSpec::id)
        .def_readonly("capacity", &VmSpec::capacity)
        .def("__repr__", [](const VmSpec& v) { return "VmSpec(" + v.id + ", " + std::to_string(v.capacity) + ")"; });

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("jobs", &Scenario::jobs)
        .def_readonly("vms", &Scenario::vms)
        .def("hop", [](const Scenario& s, const std::string& a, const std::string& b) { return s.hops.hop(a, b); })
        .def("serialize", &serialize_scenario)
        .def(
            "with_parameter",
            [](const Scenario& s, const std::string& name, const std::string& value) {
                auto copy = s;
                apply_parameter(copy, name, value);
                return copy;
            },
            py::arg("name"), py::arg("value"), "Copy with one engine parameter (or default_hop) changed.");

    m.def("parse_scenario", &parse_scenario, py::arg("text"), "Parse and validate scenario text.");

    py::class_<Status>(m, "Status")
        .def_property_readonly("tenths", &Status::tenths)
        .def("__str__", &Status::str)
        .def("__float__", [](const Status& s) { return static_cast<double>(s.tenths()) / 10.0; })
        .def("__repr__", [](const Status& s) { return "Status(" + s.str() + ")"; });

    m.def(
        "compute_status",
        [](Work capacity, const std::vector<Work>& active) { return compute_status(capacity, active); },
        py::arg("vm_capacity"), py::arg("active_capacities"));
    m.def("service_duration", &service_duration, py::arg("job_capacity"), py::arg("vm_capacity"), py::arg("mu_ms"));
    m.def("remaining_duration", &remaining_duration, py::arg("original_duration"), py::arg("elapsed"),
          py::arg("source_capacity"), py::arg("target_capacity"));
    m.def("improvement_pct", &improvement_pct, py::arg("baseline_ms"), py::arg("enhanced_ms"));
    m.def(
        "baseline_select",
        [](const std::vector<std::int64_t>& counts) { return baseline_select(counts).vm; }, py::arg("counts"),
        "Index of the least-loaded VM; ties go to the earliest.");

    py::class_<JobRow>(m, "JobRow")
        .def_readonly("job_id", &JobRow::job_id)
        .def_readonly("arrival_ms", &JobRow::arrival)
        .def_readonly("dispatch_ms", &JobRow::dispatch)
        .def_readonly("final_vm", &JobRow::final_vm)
        .def_readonly("migrations", &JobRow::migrations)
        .def_readonly("response_ms", &JobRow::response)
        .def_property_readonly("state", [](const JobRow& r) { return std::string(to_string(r.state)); });

    py::class_<Summary>(m, "Summary")
        .def_readonly("mean_response", &Summary::mean_response)
        .def_readonly("min_response", &Summary::min_response)
        .def_readonly("max_response", &Summary::max_response)
        .def_readonly("total_migrations", &Summary::total_migrations)
        .def_readonly("contention_events", &Summary::contention_events)
        .def_readonly("starvation_events", &Summary::starvation_events)
        .def_readonly("rejected", &Summary::rejected)
        .def_property_readonly("deadlock_events", &Summary::deadlock_events);

    py::class_<DeadlockRecord>(m, "DeadlockRecord")
        .def_readonly("time", &DeadlockRecord::time)
        .def_property_readonly("kind", [](const DeadlockRecord& d) { return std::string(to_string(d.kind)); })
        .def_readonly("vm_id", &DeadlockRecord::vm_id)
        .def_readonly("job_ids", &DeadlockRecord::job_ids);

    py::class_<RunReport>(m, "RunReport")
        .def_property_readonly("policy", [](const RunReport& r) { return std::string(to_string(r.policy)); })
        .def_readonly("per_job", &RunReport::per_job)
        .def_readonly("summary", &RunReport::summary)
        .def_readonly("deadlocks", &RunReport::deadlocks)
        .def_readonly("end_time", &RunReport::end_time)
        .def("response_times",
             [](const RunReport& r) {
                 py::dict d;
                 for (const auto& row : r.per_job) d[py::str(row.job_id)] = row.response;
                 return d;
             })
        .def("csv", &emit_report_csv)
        .def("trace", &emit_trace)
        .def("timeline_csv", &emit_timeline_csv);

    m.def(
        "run",
        [](const Scenario& s, const std::string& policy, bool trace, Millis horizon) {
            RunOptions opts;
            opts.trace = trace;
            opts.horizon = horizon;
            py::gil_scoped_release release;
            return run(s, policy_from(policy), opts);
        },
        py::arg("scenario"), py::arg("policy"), py::arg("trace") = false, py::arg("horizon") = 1'000'000'000LL);

    m.def(
        "compare",
        [](const Scenario& s) {
            RunReport b, e;
            {
                py::gil_scoped_release release;
                b = run(s, PolicyKind::Baseline);
                e = run(s, PolicyKind::Enhanced);
            }
            return comparison_dict(emit_comparison(b, e));
        },
        py::arg("scenario"), "Run both policies and return the comparison summary and CSV text.");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
