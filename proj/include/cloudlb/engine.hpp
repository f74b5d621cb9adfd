#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cloudlb/deadlock.hpp"
#include "cloudlb/metrics.hpp"
#include "cloudlb/policies.hpp"
#include "cloudlb/world.hpp"

namespace cloudlb {

enum class EventKind { Arrival, Completion, MonitorTick, MigrationDepart, MigrationArrive, SyncDone, Watchdog };

std::string_view to_string(EventKind k);

enum class WatchdogPurpose { Starvation, Rejection };

struct Event {
    Millis time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Arrival;
    std::optional<std::size_t> job;
    std::optional<std::size_t> vm;
    Notice notice = Notice::Allocation;                      // SyncDone
    WatchdogPurpose purpose = WatchdogPurpose::Starvation;  // Watchdog

    friend bool operator<(const Event& a, const Event& b) {
        return a.time != b.time ? a.time < b.time : a.seq < b.seq;
    }
};

struct RunOptions {
    bool trace = false;
    Millis horizon = 1'000'000'000;
    /// Verify exclusivity and status coherence after every event.
    bool check_invariants = false;
    bool record_timeline = true;
};

/// The simulated clock passed the configured horizon.
class EngineAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal state went inconsistent; always a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Single-threaded discrete-event run of one policy over one scenario.
/// Events are consumed in (time, seq) order; seq is assigned at creation,
/// so among same-time events the one scheduled first runs first.
class Simulator {
public:
    Simulator(Scenario scenario, PolicyKind policy, RunOptions options = {});
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Consumes one event. Returns false once the run is over.
    bool step();
    /// Steps to the end and assembles the report.
    RunReport run();
    RunReport report() const;

    const World& world() const { return world_; }
    const Policy& policy() const { return *policy_; }
    const Scenario& scenario() const { return scenario_; }
    Millis now() const { return now_; }
    bool finished() const { return finished_; }
    const std::set<Event>& pending() const { return events_; }
    const std::vector<DeadlockRecord>& deadlocks() const { return deadlocks_; }

    enum class Admission { Admitted, Queued };

    /// Places `job` on `vm` now: runs it if admissible, else queues it.
    Admission admit_or_queue(std::size_t vm, std::size_t job);
    /// Finishes a running job and admits from the queue head while possible.
    void on_completion(std::size_t vm, std::size_t job);
    /// Pulls a queued or running job off `source` and sends it to `target`.
    void start_migration(std::size_t job, std::size_t source, std::size_t target);

    /// Throws InvariantViolation on the first broken invariant.
    void check_invariants() const;

private:
    std::uint64_t push(Event e);
    void cancel(Millis time, std::uint64_t seq);
    void trace_event(const Event& e);
    void notify(Notice kind, std::size_t job, std::size_t vm);

    void admit(std::size_t vm, std::size_t job);
    void enqueue(std::size_t vm, std::size_t job);
    void end_queue_episode(std::size_t job);
    void drain_queue(std::size_t vm);

    void handle(const Event& e);
    void handle_tick();
    void handle_watchdog(const Event& e);
    void record_deadlock(const DeadlockEvent& e);
    void sample_timeline(bool all);

    Scenario scenario_;
    World world_;
    RunOptions options_;
    std::unique_ptr<Policy> policy_;

    std::set<Event> events_;
    std::uint64_t next_seq_ = 0;
    Millis now_ = 0;
    bool finished_ = false;
    std::uint64_t consumed_ = 0;

    std::vector<std::vector<std::pair<Millis, std::uint64_t>>> watchdogs_;
    ContentionDetector contention_;
    std::vector<DeadlockRecord> deadlocks_;
    std::vector<TickRecord> ticks_;
    std::vector<std::string> trace_;
    std::vector<TimelineSample> timeline_;
    std::vector<std::optional<Status>> last_sampled_;
};

/// Runs one policy to completion. Throws EngineAbort past the horizon.
RunReport run(const Scenario& scenario, PolicyKind policy, const RunOptions& options = {});

}  // namespace cloudlb
