#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "cloudlb/scenario.hpp"

namespace cloudlb {

enum class JobState { Pending, Queued, Running, Migrating, Done, Rejected };

std::string_view to_string(JobState s);

/// Work a job still owes after being paused mid-run: `original - elapsed`
/// milliseconds at `source_capacity`.
struct CarriedWork {
    Millis original = 0;
    Millis elapsed = 0;
    Work source_capacity = 0;
};

struct JobRuntime {
    JobSpec spec;
    JobState state = JobState::Pending;
    /// Host while Queued/Running, destination while Migrating, last host
    /// once terminal.
    std::optional<std::size_t> vm;

    std::optional<Millis> dispatch_time;    // first admission anywhere
    std::optional<Millis> completion_time;  // set iff Done
    Millis scheduled_duration = 0;          // of the current run segment
    Millis resumed_at = 0;                  // admission time of the current segment
    Millis elapsed_at_pause = 0;
    std::optional<CarriedWork> carried;
    int migrations = 0;

    // Queue episode bookkeeping.
    Millis queued_since = 0;
    std::uint64_t episode = 0;
    bool starvation_reported = false;

    // Completion event handle while Running.
    Millis completion_at = 0;
    std::uint64_t completion_seq = 0;

    // Work accounting in (ms x vm capacity) units; a job's capacity
    // corresponds to capacity * mu_ms of these.
    std::int64_t executed_ms_cap = 0;
    std::int64_t rounding_allowance_ms_cap = 0;
};

struct VmRuntime {
    VmSpec spec;
    std::vector<std::size_t> running;  // admission order
    std::deque<std::size_t> queue;     // FIFO
    std::vector<std::size_t> inbound;  // migrants in transit to this VM
    Work load = 0;                     // sum of running capacities
    std::optional<Millis> last_migration_time;

    Status status() const { return Status(100 * load, spec.capacity); }
    bool idle() const { return running.empty(); }
};

/// Mutable simulation state. Owned by the engine; policies and detectors
/// only see it through const references.
struct World {
    explicit World(const Scenario& scenario);

    const Scenario* scenario;
    std::vector<JobRuntime> jobs;
    std::vector<VmRuntime> vms;

    const EngineParams& params() const { return scenario->params; }
    Millis hop(std::size_t from_vm, std::size_t to_vm) const;
    Millis ingress_hop(std::size_t vm) const;
    bool all_terminal() const;
};

/// Admission test for a job joining `vm` right now: strict FIFO (a
/// non-empty queue blocks newcomers), an idle VM always admits, otherwise
/// the post-admission status must stay within the threshold.
bool admits(const VmRuntime& vm, Work job_capacity, std::int64_t threshold);

/// Service time of `job` when admitted on `vm`: the full service duration
/// for fresh work, the rescaled remainder for a job paused by migration.
Millis duration_on(const JobRuntime& job, const VmSpec& vm, Millis mu_ms);

/// Delay until `job` would be admitted on `vm`, assuming nothing arrives
/// or leaves other than the completions already scheduled there and the
/// queue entries ahead of it. A job not already on `vm` is treated as
/// joining the back of its queue. nullopt means never.
std::optional<Millis> wait_time(const World& world, std::size_t vm, std::size_t job, Millis now);

/// One row of the Cloud Manager's table: which jobs are assigned to a VM
/// and how busy it is.
struct ManagerRow {
    std::size_t vm = 0;
    std::vector<std::size_t> jobs;
    Status status;
};

struct ManagerTable {
    std::vector<ManagerRow> rows;
    std::uint64_t generation = 0;
};

/// Current table: assigned jobs are running, queued and inbound jobs;
/// status counts running and inbound load.
ManagerTable current_table(const World& world, std::uint64_t generation = 0);

}  // namespace cloudlb
