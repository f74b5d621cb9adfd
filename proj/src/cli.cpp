#include "cloudlb/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include "cloudlb/engine.hpp"
#include "cloudlb/metrics.hpp"
#include "cloudlb/scenario.hpp"

namespace fs = std::filesystem;

namespace cloudlb::cli {

namespace {

struct InputFailure {
    std::string message;
};

Scenario load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputFailure{"cannot read scenario file '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ScenarioError& e) {
        throw InputFailure{path + ": " + e.what()};
    }
}

struct Pair {
    RunReport baseline;
    RunReport enhanced;
};

Pair run_both(const Scenario& s, const RunOptions& opts) {
    auto b = std::async(std::launch::async, [&] { return run(s, PolicyKind::Baseline, opts); });
    auto e = run(s, PolicyKind::Enhanced, opts);
    return {b.get(), std::move(e)};
}

RunOptions options_for(const CliInvocation& inv) {
    RunOptions o;
    o.trace = inv.trace;
    o.horizon = inv.horizon;
    return o;
}

// Maps the failure modes shared by every subcommand onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const InputFailure& f) {
        err << "error: " << f.message << '\n';
        return kInputError;
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const EngineAbort& e) {
        err << "engine aborted: " << e.what() << '\n';
        return kEngineAbort;
    }
}

int write_or_fail(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files,
                  std::ostream& err) {
    std::string why;
    if (!write_files_atomically(dir, files, &why)) {
        err << "error: " << why << '\n';
        return kIoError;
    }
    return kOk;
}

}  // namespace

std::optional<SweepSpec> parse_sweep_spec(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) return std::nullopt;
    SweepSpec spec{text.substr(0, eq), {}};
    std::stringstream rest(text.substr(eq + 1));
    std::string v;
    while (std::getline(rest, v, ',')) {
        if (v.empty()) return std::nullopt;
        spec.values.push_back(v);
    }
    if (spec.values.empty()) return std::nullopt;
    return spec;
}

bool write_files_atomically(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files,
                            std::string* error) {
    auto fail = [&](const std::string& msg) {
        if (error) *error = msg;
        return false;
    };
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) return fail("cannot create output directory '" + dir + "'");

    std::vector<std::pair<fs::path, fs::path>> staged;
    auto discard = [&] {
        for (const auto& [tmp, _] : staged) fs::remove(tmp, ec);
    };
    const auto tag = ".tmp." + std::to_string(::getpid());
    for (const auto& [name, content] : files) {
        const fs::path final_path = fs::path(dir) / name;
        const fs::path tmp = fs::path(dir) / ("." + name + tag);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (out) staged.emplace_back(tmp, final_path);
        if (!out || !(out << content) || !(out.flush())) {
            discard();
            return fail("cannot write '" + final_path.string() + "'");
        }
    }
    for (const auto& [tmp, final_path] : staged) {
        fs::rename(tmp, final_path, ec);
        if (ec) {
            discard();
            return fail("cannot rename into '" + final_path.string() + "'");
        }
    }
    return true;
}

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!inv.policy) {
            err << "error: run requires --policy\n";
            return int{kUsage};
        }
        const auto scenario = load(inv.scenario_path);
        const auto report = run(scenario, *inv.policy, options_for(inv));
        const std::string name(to_string(*inv.policy));

        std::vector<std::pair<std::string, std::string>> files{
            {"report_" + name + ".csv", emit_report_csv(report)},
            {"timeline_" + name + ".csv", emit_timeline_csv(report)},
        };
        if (inv.trace) files.emplace_back("trace_" + name + ".txt", emit_trace(report));
        if (int rc = write_or_fail(inv.output_dir, files, err); rc != kOk) return rc;

        const auto& s = report.summary;
        out << "policy: " << name << '\n'
            << "mean_response_ms: " << (s.mean_response ? format_fixed2(*s.mean_response) : "-") << '\n'
            << "migrations: " << s.total_migrations << '\n'
            << "deadlocks: " << s.deadlock_events() << " (contention=" << s.contention_events
            << " starvation=" << s.starvation_events << ")\n"
            << "rejected: " << s.rejected << '\n';
        return int{kOk};
    });
}

int cmd_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto scenario = load(inv.scenario_path);
        auto [base, enh] = run_both(scenario, options_for(inv));
        ComparisonOutput cmp;
        try {
            cmp = emit_comparison(base, enh);
        } catch (const ComparisonError& e) {
            err << "error: " << e.what() << '\n';
            return int{kInputError};
        }

        std::vector<std::pair<std::string, std::string>> files{
            {"report_baseline.csv", emit_report_csv(base)},
            {"report_enhanced.csv", emit_report_csv(enh)},
            {"comparison.csv", cmp.comparison_csv},
            {"timeline.csv", cmp.timeline_csv},
        };
        if (inv.trace) {
            files.emplace_back("trace_baseline.txt", emit_trace(base));
            files.emplace_back("trace_enhanced.txt", emit_trace(enh));
        }
        if (int rc = write_or_fail(inv.output_dir, files, err); rc != kOk) return rc;

        const auto& c = cmp.comparison;
        out << "MEAN improvement: " << (c.mean_improvement ? format_fixed2(*c.mean_improvement) : "-") << "%\n"
            << "mean response ms: baseline=" << (c.mean_baseline_ms ? format_fixed2(*c.mean_baseline_ms) : "-")
            << " enhanced=" << (c.mean_enhanced_ms ? format_fixed2(*c.mean_enhanced_ms) : "-") << '\n'
            << "migrations: enhanced=" << c.migrations_enhanced << '\n'
            << "deadlocks: baseline=" << c.deadlocks_baseline << " enhanced=" << c.deadlocks_enhanced << '\n';
        return int{kOk};
    });
}

int cmd_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!inv.sweep) {
            err << "error: sweep requires --sweep <param>=<v1,v2,...>\n";
            return int{kUsage};
        }
        if (!is_tunable_parameter(inv.sweep->parameter)) {
            err << "error: unknown sweep parameter '" << inv.sweep->parameter << "'\n";
            return int{kInputError};
        }
        const auto base_scenario = load(inv.scenario_path);

        std::vector<Scenario> variants;
        for (const auto& v : inv.sweep->values) {
            auto s = base_scenario;
            try {
                apply_parameter(s, inv.sweep->parameter, v);
            } catch (const ScenarioError& e) {
                throw InputFailure{"sweep value '" + v + "': " + e.what()};
            }
            variants.push_back(std::move(s));
        }

        RunOptions opts = options_for(inv);
        opts.trace = false;
        std::vector<std::future<Pair>> futures;
        for (const auto& s : variants)
            futures.push_back(std::async(std::launch::async, [&s, opts] { return run_both(s, opts); }));

        std::vector<SweepRow> rows;
        for (std::size_t i = 0; i < futures.size(); ++i) {
            auto pair = futures[i].get();
            rows.push_back({inv.sweep->values[i], compare_reports(pair.baseline, pair.enhanced)});
        }
        const auto csv = emit_sweep_csv(rows);
        if (int rc = write_or_fail(inv.output_dir, {{"sweep.csv", csv}}, err); rc != kOk) return rc;
        out << csv;
        return int{kOk};
    });
}

int cmd_validate(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        out << serialize_scenario(load(inv.scenario_path));
        return int{kOk};
    });
}

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    switch (inv.subcommand) {
    case Subcommand::Run: return cmd_run(inv, out, err);
    case Subcommand::Compare: return cmd_compare(inv, out, err);
    case Subcommand::Sweep: return cmd_sweep(inv, out, err);
    case Subcommand::Validate: return cmd_validate(inv, out, err);
    }
    return kUsage;
}

}  // namespace cloudlb::cli
