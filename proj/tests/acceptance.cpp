// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "cloudlb/cli.hpp"
#include "cloudlb/engine.hpp"
#include "cloudlb/metrics.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace cloudlb;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& why) {
    if (o.ok) o.detail = why;
    o.ok = false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome ac1_ordering() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run(fixtures::tables23(), PolicyKind::Baseline);
    const double secs = seconds_since(t0);
    std::size_t imin = 0, imax = 0;
    for (std::size_t i = 0; i < r.per_job.size(); ++i) {
        if (!r.per_job[i].response) {
            fail(o, r.per_job[i].job_id + " did not finish");
            return o;
        }
    }
    for (std::size_t i = 1; i < r.per_job.size(); ++i) {
        if (*r.per_job[i].response < *r.per_job[imin].response) imin = i;
        if (*r.per_job[i].response > *r.per_job[imax].response) imax = i;
    }
    int at_min = 0, at_max = 0;
    for (const auto& row : r.per_job) {
        at_min += *row.response == *r.per_job[imin].response;
        at_max += *row.response == *r.per_job[imax].response;
    }
    if (r.per_job[imin].job_id != "J4" || at_min != 1) fail(o, "minimum is not uniquely J4");
    if (r.per_job[imax].job_id != "J6" || at_max != 1) fail(o, "maximum is not uniquely J6");
    if (secs >= 1.0) fail(o, "took " + fmt("%.3f", secs) + " s");
    if (o.ok)
        o.detail = "J4=" + std::to_string(*r.per_job[imin].response) + " ms (min), J6=" +
                   std::to_string(*r.per_job[imax].response) + " ms (max), " + fmt("%.3f", secs) + " s";
    return o;
}

Outcome ac2_improvement() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / ("cloudlb_ac2_" + std::to_string(::getpid()));
    cli::CliInvocation inv;
    inv.subcommand = cli::Subcommand::Compare;
    inv.scenario_path = fixtures::scenario_path("tables23.scn");
    inv.output_dir = dir.string();
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = cli::dispatch(inv, out, err);
    const double secs = seconds_since(t0);
    std::filesystem::remove_all(dir);
    if (rc != 0) {
        fail(o, "compare exited " + std::to_string(rc) + ": " + err.str());
        return o;
    }
    const std::string text = out.str();
    const std::string key = "MEAN improvement: ";
    const auto at = text.find(key);
    if (at == std::string::npos) {
        fail(o, "no MEAN line in output");
        return o;
    }
    const double pct = std::stod(text.substr(at + key.size()));
    if (pct < 30.0) fail(o, "MEAN improvement " + fmt("%.2f", pct) + "% < 30%");
    if (secs >= 1.0) fail(o, "took " + fmt("%.3f", secs) + " s");
    if (o.ok) o.detail = "MEAN improvement " + fmt("%.2f", pct) + "%, " + fmt("%.3f", secs) + " s";
    return o;
}

Outcome ac3_deadlocks() {
    Outcome o;
    const auto s = fixtures::tables23();
    const auto t0 = std::chrono::steady_clock::now();
    const auto b = run(s, PolicyKind::Baseline);
    const auto e = run(s, PolicyKind::Enhanced);
    const double secs = seconds_since(t0);
    const int nb = b.summary.deadlock_events(), ne = e.summary.deadlock_events();
    if (nb < 1) fail(o, "baseline registered no deadlock");
    if (ne != 0) fail(o, "enhanced registered " + std::to_string(ne));
    if (secs >= 1.0) fail(o, "took " + fmt("%.3f", secs) + " s");
    if (o.ok) o.detail = "baseline=" + std::to_string(nb) + " enhanced=0, " + fmt("%.3f", secs) + " s";
    return o;
}

std::map<std::string, long long> responses(const RunReport& r) {
    std::map<std::string, long long> m;
    for (const auto& row : r.per_job)
        if (row.response) m[row.job_id] = *row.response;
    return m;
}

Outcome ac4_oracle() {
    Outcome o;
    int checked = 0;
    for (const auto& f : fixtures::hand_traced()) {
        const auto s = parse_scenario(f.text);
        if (s.vms.size() > 3 || s.jobs.size() > 4) fail(o, f.name + " is outside the oracle's range");
        for (auto [kind, pol, frozen] : {std::tuple{PolicyKind::Baseline, oracle::Policy::Baseline, &f.baseline},
                                         std::tuple{PolicyKind::Enhanced, oracle::Policy::Enhanced, &f.enhanced}}) {
            const auto sim = responses(run(s, kind));
            const auto ref = oracle::simulate(s, pol).response;
            const std::string tag = f.name + "/" + std::string(to_string(kind));
            if (ref != *frozen) fail(o, tag + ": oracle disagrees with the hand trace");
            if (sim != ref) fail(o, tag + ": simulator disagrees with the oracle");
            ++checked;
        }
    }
    // Beyond the fixtures: random small scenarios against the oracle.
    std::mt19937_64 rng(4);
    int random_checked = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto s = fixtures::random_scenario(rng, {.max_vms = 3, .max_jobs = 4, .allow_rejection = false});
        for (auto [kind, pol] : {std::pair{PolicyKind::Baseline, oracle::Policy::Baseline},
                                 std::pair{PolicyKind::Enhanced, oracle::Policy::Enhanced}}) {
            if (responses(run(s, kind)) != oracle::simulate(s, pol).response)
                fail(o, "random case " + std::to_string(i) + " (" + std::string(to_string(kind)) + ") differs");
            ++random_checked;
        }
    }
    if (checked < 10) fail(o, "fewer than 5 fixtures");
    if (o.ok)
        o.detail = std::to_string(checked / 2) + " fixtures x 2 policies, plus " + std::to_string(random_checked) +
                   " random runs, all equal to the oracle";
    return o;
}

Outcome ac5_determinism() {
    Outcome o;
    std::vector<std::pair<std::string, Scenario>> cases{{"tables23", fixtures::tables23()}};
    for (const auto& f : fixtures::hand_traced()) cases.emplace_back(f.name, parse_scenario(f.text));
    int compared = 0;
    RunOptions opts;
    opts.trace = true;
    for (const auto& [name, s] : cases) {
        for (auto kind : {PolicyKind::Baseline, PolicyKind::Enhanced}) {
            const auto a = run(s, kind, opts), b = run(s, kind, opts);
            if (emit_report_csv(a) != emit_report_csv(b)) fail(o, name + ": report CSV differs");
            if (emit_trace(a) != emit_trace(b)) fail(o, name + ": trace differs");
            if (emit_timeline_csv(a) != emit_timeline_csv(b)) fail(o, name + ": timeline differs");
            ++compared;
        }
    }
    // Files written by the CLI, including the parallel compare path.
    const auto root = std::filesystem::temp_directory_path() / ("cloudlb_ac5_" + std::to_string(::getpid()));
    for (const char* sub : {"a", "b"}) {
        cli::CliInvocation inv;
        inv.subcommand = cli::Subcommand::Compare;
        inv.scenario_path = fixtures::scenario_path("tables23.scn");
        inv.output_dir = (root / sub).string();
        inv.trace = true;
        std::ostringstream out, err;
        if (cli::dispatch(inv, out, err) != 0) fail(o, "compare failed: " + err.str());
    }
    for (const char* f : {"report_baseline.csv", "report_enhanced.csv", "comparison.csv", "timeline.csv",
                          "trace_baseline.txt", "trace_enhanced.txt"}) {
        try {
            if (fixtures::read_file((root / "a" / f).string()) != fixtures::read_file((root / "b" / f).string()))
                fail(o, std::string(f) + " differs between CLI runs");
        } catch (const std::exception& e) {
            fail(o, e.what());
        }
    }
    std::filesystem::remove_all(root);
    if (o.ok) o.detail = std::to_string(compared) + " run pairs and 6 CLI files byte-identical";
    return o;
}

Outcome ac6_conservation() {
    Outcome o;
    std::mt19937_64 rng(6);
    int scenarios = 0, done_jobs = 0, migrated = 0;
    RunOptions opts;
    opts.check_invariants = true;
    opts.record_timeline = false;
    for (int i = 0; i < 1000; ++i) {
        const auto s = fixtures::random_scenario(rng, {});
        for (auto kind : {PolicyKind::Baseline, PolicyKind::Enhanced}) {
            RunReport r;
            try {
                r = run(s, kind, opts);
            } catch (const std::exception& e) {
                fail(o, "scenario " + std::to_string(i) + ": " + e.what());
                continue;
            }
            for (const auto& row : r.per_job) {
                if (row.state != JobState::Done) continue;
                ++done_jobs;
                migrated += row.migrations > 0;
                const long long owed = row.capacity * r.mu_ms;
                const long long diff = row.executed_ms_cap - owed;
                if ((diff < 0 ? -diff : diff) > row.rounding_allowance_ms_cap)
                    fail(o, "scenario " + std::to_string(i) + " job " + row.job_id + ": executed " +
                                std::to_string(row.executed_ms_cap) + " vs owed " + std::to_string(owed));
            }
        }
        ++scenarios;
    }
    if (o.ok)
        o.detail = std::to_string(scenarios) + " scenarios, " + std::to_string(done_jobs) + " finished jobs (" +
                   std::to_string(migrated) + " migrated), invariants held";
    return o;
}

Outcome ac7_wait_vs_hop() {
    Outcome o;
    std::mt19937_64 rng(7);
    RunOptions opts;
    opts.trace = true;
    opts.record_timeline = false;
    int qualifying = 0, ticks = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = fixtures::random_scenario(rng, {});
        const auto r = run(s, PolicyKind::Enhanced, opts);
        std::map<Millis, int> departs;
        for (const auto& line : r.trace) {
            std::istringstream in(line);
            Millis t;
            std::uint64_t seq;
            std::string kind;
            if (in >> t >> seq >> kind && kind == "MigrationDepart") ++departs[t];
        }
        for (const auto& tick : r.ticks) {
            ++ticks;
            Millis min_hop = std::numeric_limits<Millis>::max(), max_wait = std::numeric_limits<Millis>::min();
            bool infinite_wait = false;
            for (const auto& p : tick.plans) {
                if (p.hop) min_hop = std::min(min_hop, *p.hop);
                if (!p.alternative_wait) infinite_wait = true;
                else max_wait = std::max(max_wait, *p.alternative_wait);
            }
            const bool any_candidate = min_hop != std::numeric_limits<Millis>::max();
            if (!any_candidate || infinite_wait || !(min_hop > max_wait)) continue;
            ++qualifying;
            if (departs.count(tick.time))
                fail(o, "scenario " + std::to_string(i) + " tick " + std::to_string(tick.time) + " migrated");
        }
    }
    if (qualifying == 0) fail(o, "no tick exercised the rule");

    const auto dir = std::filesystem::temp_directory_path() / ("cloudlb_ac7_" + std::to_string(::getpid()));
    cli::CliInvocation inv;
    inv.subcommand = cli::Subcommand::Sweep;
    inv.scenario_path = fixtures::scenario_path("tables23.scn");
    inv.output_dir = dir.string();
    inv.sweep = cli::parse_sweep_spec("default_hop=10000");
    std::ostringstream out, err;
    if (cli::dispatch(inv, out, err) != 0) {
        fail(o, "sweep failed: " + err.str());
    } else {
        // value,...,migrations_enhanced
        std::istringstream csv(out.str());
        std::string header, row;
        std::getline(csv, header);
        std::getline(csv, row);
        const auto migrations = row.substr(row.rfind(',') + 1);
        if (migrations != "0") fail(o, "default_hop=10000 sweep shows " + migrations + " migrations");
    }
    std::filesystem::remove_all(dir);
    if (o.ok)
        o.detail = std::to_string(qualifying) + " of " + std::to_string(ticks) +
                   " ticks with a candidate had every hop above every wait, none migrated; default_hop=10000 sweep: 0 migrations";
    return o;
}

Outcome ac8_selection() {
    Outcome o;
    std::mt19937_64 rng(8);
    auto pick = [&](long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng); };
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto n = static_cast<std::size_t>(pick(1, 12));
        std::vector<std::int64_t> counts(n);
        for (auto& c : counts) c = pick(0, 4);
        std::size_t best = 0;
        for (std::size_t k = 0; k < n; ++k) {
            bool beaten = false;
            for (std::size_t m = 0; m < n; ++m)
                if (std::pair{counts[m], m} < std::pair{counts[k], k}) beaten = true;
            if (!beaten) best = k;
        }
        if (baseline_select(counts).vm != best) ++mismatches;
    }
    if (mismatches) fail(o, std::to_string(mismatches) + " baseline mismatches");
    int enhanced_mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto n = static_cast<std::size_t>(pick(1, 12));
        std::vector<Work> loads(n), caps(n);
        std::vector<Status> statuses;
        std::vector<Millis> hops(n);
        for (std::size_t k = 0; k < n; ++k) {
            caps[k] = pick(0, 1) ? pick(1, 4) * 100 : pick(1, 1000);
            loads[k] = pick(0, 3) * pick(0, 400);
            statuses.emplace_back(100 * loads[k], caps[k]);
            hops[k] = pick(0, 3) * 5;
        }
        // load_a / cap_a < load_b / cap_b without going through Status
        auto less = [&](std::size_t a, std::size_t b) {
            const auto x = static_cast<long double>(loads[a]) * caps[b], y = static_cast<long double>(loads[b]) * caps[a];
            if (x != y) return x < y;
            if (hops[a] != hops[b]) return hops[a] < hops[b];
            return a < b;
        };
        std::size_t best = 0;
        for (std::size_t k = 0; k < n; ++k) {
            bool beaten = false;
            for (std::size_t m = 0; m < n; ++m)
                if (m != k && less(m, k)) beaten = true;
            if (!beaten) best = k;
        }
        if (enhanced_select(statuses, hops).vm != best) ++enhanced_mismatches;
    }
    if (enhanced_mismatches) fail(o, std::to_string(enhanced_mismatches) + " enhanced mismatches");
    if (o.ok) o.detail = "10000 + 10000 random tables, 0 mismatches";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1 baseline ordering (J4 min, J6 max)", ac1_ordering},
        {"AC2 mean improvement >= 30%", ac2_improvement},
        {"AC3 deadlocks: baseline >= 1, enhanced = 0", ac3_deadlocks},
        {"AC4 hand-trace oracle equivalence", ac4_oracle},
        {"AC5 determinism", ac5_determinism},
        {"AC6 work conservation and invariants", ac6_conservation},
        {"AC7 wait-vs-hop rule", ac7_wait_vs_hop},
        {"AC8 selection-rule conformance", ac8_selection},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.ok;
        std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
