#include "cloudlb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cloudlb {

Millis response_time(const JobRuntime& job) {
    if (job.state != JobState::Done || !job.completion_time)
        throw std::logic_error("response_time: job " + job.spec.id + " is not done");
    return *job.completion_time - job.spec.arrival;
}

Summary summarize(const std::vector<JobRow>& rows, const std::vector<DeadlockRecord>& deadlocks) {
    Summary s;
    std::int64_t sum = 0;
    int done = 0;
    for (const auto& r : rows) {
        s.total_migrations += r.migrations;
        if (r.state == JobState::Rejected) ++s.rejected;
        if (!r.response) continue;
        sum += *r.response;
        ++done;
        s.min_response = s.min_response ? std::min(*s.min_response, *r.response) : *r.response;
        s.max_response = s.max_response ? std::max(*s.max_response, *r.response) : *r.response;
    }
    if (done > 0) s.mean_response = static_cast<double>(sum) / done;
    for (const auto& d : deadlocks) {
        if (d.kind == DeadlockKind::Contention) ++s.contention_events;
        else ++s.starvation_events;
    }
    return s;
}

double improvement_pct(double baseline_ms, double enhanced_ms) {
    if (!(baseline_ms > 0)) throw std::domain_error("improvement_pct: baseline must be positive");
    const double raw = 100.0 * (1.0 - enhanced_ms / baseline_ms);
    const double rounded = std::round(raw * 100.0) / 100.0;
    return rounded == 0.0 ? 0.0 : rounded;
}

std::string format_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

namespace {

template <class T>
std::string opt_str(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_same_v<T, std::string>) return *v;
    else return std::to_string(*v);
}

}  // namespace

std::string emit_report_csv(const RunReport& report) {
    std::string out = "job_id,arrival_ms,dispatch_ms,final_vm,migrations,response_ms,state\n";
    for (const auto& r : report.per_job) {
        out += r.job_id + ',' + std::to_string(r.arrival) + ',' + opt_str(r.dispatch) + ',' + opt_str(r.final_vm) +
               ',' + std::to_string(r.migrations) + ',' + opt_str(r.response) + ',' + std::string(to_string(r.state)) +
               '\n';
    }
    return out;
}

std::string emit_trace(const RunReport& report) {
    std::string out;
    for (const auto& line : report.trace) {
        out += line;
        out += '\n';
    }
    return out;
}

std::string emit_timeline_csv(const RunReport& report) {
    std::string out = "time_ms,vm_id,status\n";
    for (const auto& s : report.utilization_timeline)
        out += std::to_string(s.time) + ',' + s.vm_id + ',' + s.status.str() + '\n';
    return out;
}

Comparison compare_reports(const RunReport& baseline, const RunReport& enhanced) {
    if (baseline.per_job.size() != enhanced.per_job.size())
        throw ComparisonError("reports cover different job sets");
    Comparison c;
    std::int64_t sum_b = 0, sum_e = 0;
    int both = 0;
    for (std::size_t i = 0; i < baseline.per_job.size(); ++i) {
        const auto& b = baseline.per_job[i];
        const auto& e = enhanced.per_job[i];
        if (b.job_id != e.job_id) throw ComparisonError("job " + b.job_id + " missing from enhanced report");
        ComparisonRow row{b.job_id, b.response, e.response, std::nullopt};
        if (b.response && e.response) {
            if (*b.response > 0) row.improvement = improvement_pct(static_cast<double>(*b.response), static_cast<double>(*e.response));
            sum_b += *b.response;
            sum_e += *e.response;
            ++both;
        }
        c.rows.push_back(std::move(row));
    }
    if (both > 0) {
        c.mean_baseline_ms = static_cast<double>(sum_b) / both;
        c.mean_enhanced_ms = static_cast<double>(sum_e) / both;
        if (*c.mean_baseline_ms > 0) c.mean_improvement = improvement_pct(*c.mean_baseline_ms, *c.mean_enhanced_ms);
    }
    c.deadlocks_baseline = baseline.summary.deadlock_events();
    c.deadlocks_enhanced = enhanced.summary.deadlock_events();
    c.migrations_enhanced = enhanced.summary.total_migrations;
    return c;
}

ComparisonOutput emit_comparison(const RunReport& baseline, const RunReport& enhanced) {
    ComparisonOutput out{compare_reports(baseline, enhanced), {}, {}};
    auto fmt = [](const std::optional<double>& v) { return v ? format_fixed2(*v) : std::string(); };

    std::string& csv = out.comparison_csv;
    csv = "job_id,baseline_ms,enhanced_ms,improvement_pct\n";
    for (const auto& r : out.comparison.rows)
        csv += r.job_id + ',' + opt_str(r.baseline_ms) + ',' + opt_str(r.enhanced_ms) + ',' + fmt(r.improvement) + '\n';
    csv += "MEAN," + fmt(out.comparison.mean_baseline_ms) + ',' + fmt(out.comparison.mean_enhanced_ms) + ',' +
           fmt(out.comparison.mean_improvement) + '\n';

    std::string& tl = out.timeline_csv;
    tl = "policy,time_ms,vm_id,status\n";
    for (const auto* rep : {&baseline, &enhanced}) {
        const std::string name(to_string(rep->policy));
        for (const auto& s : rep->utilization_timeline)
            tl += name + ',' + std::to_string(s.time) + ',' + s.vm_id + ',' + s.status.str() + '\n';
    }
    return out;
}

std::string emit_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "value,mean_baseline_ms,mean_enhanced_ms,improvement_pct,deadlocks_baseline,deadlocks_enhanced,"
        "migrations_enhanced\n";
    auto fmt = [](const std::optional<double>& v) { return v ? format_fixed2(*v) : std::string(); };
    for (const auto& r : rows) {
        const auto& c = r.comparison;
        out += r.value + ',' + fmt(c.mean_baseline_ms) + ',' + fmt(c.mean_enhanced_ms) + ',' + fmt(c.mean_improvement) +
               ',' + std::to_string(c.deadlocks_baseline) + ',' + std::to_string(c.deadlocks_enhanced) + ',' +
               std::to_string(c.migrations_enhanced) + '\n';
    }
    return out;
}

}  // namespace cloudlb
