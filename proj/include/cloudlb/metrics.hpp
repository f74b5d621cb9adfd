#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloudlb/deadlock.hpp"
#include "cloudlb/policies.hpp"
#include "cloudlb/world.hpp"

namespace cloudlb {

struct JobRow {
    std::string job_id;
    Work capacity = 0;
    Millis arrival = 0;
    std::optional<Millis> dispatch;
    std::optional<std::string> final_vm;
    int migrations = 0;
    std::optional<Millis> response;  // iff Done
    JobState state = JobState::Pending;

    // Work accounting, see JobRuntime.
    std::int64_t executed_ms_cap = 0;
    std::int64_t rounding_allowance_ms_cap = 0;
};

struct Summary {
    std::optional<double> mean_response;
    std::optional<Millis> min_response;
    std::optional<Millis> max_response;
    int total_migrations = 0;
    int contention_events = 0;
    int starvation_events = 0;
    int rejected = 0;

    int deadlock_events() const { return contention_events + starvation_events; }
};

struct TimelineSample {
    Millis time = 0;
    std::string vm_id;
    Status status;
};

struct DeadlockRecord {
    Millis time = 0;
    DeadlockKind kind = DeadlockKind::Contention;
    std::string vm_id;
    std::vector<std::string> job_ids;
};

struct TickRecord {
    Millis time = 0;
    std::vector<MigrationPlan> plans;
};

struct RunReport {
    PolicyKind policy = PolicyKind::Baseline;
    Millis mu_ms = 0;
    std::vector<JobRow> per_job;  // scenario job order
    Summary summary;
    std::vector<TimelineSample> utilization_timeline;
    std::vector<DeadlockRecord> deadlocks;
    std::vector<TickRecord> ticks;
    std::vector<std::string> trace;  // populated only when tracing
    Millis end_time = 0;
    std::uint64_t events = 0;
};

/// completion - arrival. Throws std::logic_error unless the job is Done.
Millis response_time(const JobRuntime& job);

/// Fills `summary` from `per_job` and `deadlocks`.
Summary summarize(const std::vector<JobRow>& rows, const std::vector<DeadlockRecord>& deadlocks);

/// 100 * (1 - enhanced / baseline), rounded to 0.01.
/// Throws std::domain_error when baseline_ms is not positive.
double improvement_pct(double baseline_ms, double enhanced_ms);

std::string emit_report_csv(const RunReport& report);
std::string emit_trace(const RunReport& report);
/// `time_ms,vm_id,status` for one run.
std::string emit_timeline_csv(const RunReport& report);

class ComparisonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ComparisonRow {
    std::string job_id;
    std::optional<Millis> baseline_ms;
    std::optional<Millis> enhanced_ms;
    std::optional<double> improvement;  // only when Done under both
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::optional<double> mean_baseline_ms;  // over jobs Done under both
    std::optional<double> mean_enhanced_ms;
    std::optional<double> mean_improvement;
    int deadlocks_baseline = 0;
    int deadlocks_enhanced = 0;
    int migrations_enhanced = 0;
};

/// Throws ComparisonError when the two reports cover different job lists.
Comparison compare_reports(const RunReport& baseline, const RunReport& enhanced);

struct ComparisonOutput {
    Comparison comparison;
    std::string comparison_csv;  // job_id,baseline_ms,enhanced_ms,improvement_pct + MEAN row
    std::string timeline_csv;    // policy,time_ms,vm_id,status for both runs
};

ComparisonOutput emit_comparison(const RunReport& baseline, const RunReport& enhanced);

struct SweepRow {
    std::string value;
    Comparison comparison;
};

std::string emit_sweep_csv(const std::vector<SweepRow>& rows);

/// Fixed two-decimal rendering used by every CSV.
std::string format_fixed2(double v);

}  // namespace cloudlb
