#include "cloudlb/engine.hpp"

#include <algorithm>

namespace cloudlb {

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::Arrival: return "Arrival";
    case EventKind::Completion: return "Completion";
    case EventKind::MonitorTick: return "MonitorTick";
    case EventKind::MigrationDepart: return "MigrationDepart";
    case EventKind::MigrationArrive: return "MigrationArrive";
    case EventKind::SyncDone: return "SyncDone";
    case EventKind::Watchdog: return "Watchdog";
    }
    return "?";
}

Simulator::Simulator(Scenario scenario, PolicyKind policy, RunOptions options)
    : scenario_(std::move(scenario)), world_(scenario_), options_(options), watchdogs_(scenario_.jobs.size()),
      last_sampled_(scenario_.vms.size()) {
    validate_scenario(scenario_);
    policy_ = make_policy(policy, world_);

    for (std::size_t j = 0; j < world_.jobs.size(); ++j)
        push({.time = world_.jobs[j].spec.arrival, .kind = EventKind::Arrival, .job = j});
    if (policy_->monitors()) push({.time = scenario_.params.monitor_interval, .kind = EventKind::MonitorTick});
    sample_timeline(true);
}

std::uint64_t Simulator::push(Event e) {
    e.seq = next_seq_++;
    events_.insert(e);
    return e.seq;
}

void Simulator::cancel(Millis time, std::uint64_t seq) {
    Event key;
    key.time = time;
    key.seq = seq;
    events_.erase(key);
}

void Simulator::trace_event(const Event& e) {
    if (!options_.trace) return;
    std::string line = std::to_string(e.time) + ' ' + std::to_string(e.seq) + ' ' + std::string(to_string(e.kind)) + ' ';
    line += e.job ? world_.jobs[*e.job].spec.id : "-";
    line += ' ';
    line += e.vm ? world_.vms[*e.vm].spec.id : "-";
    trace_.push_back(std::move(line));
}

void Simulator::notify(Notice kind, std::size_t job, std::size_t vm) {
    if (auto delay = policy_->notify_delay()) {
        push({.time = now_ + *delay, .kind = EventKind::SyncDone, .job = job, .vm = vm, .notice = kind});
    } else {
        policy_->on_notice(world_, {kind, job, vm});
    }
}

// ---------------------------------------------------------------------------

Simulator::Admission Simulator::admit_or_queue(std::size_t vm, std::size_t job) {
    if (admits(world_.vms[vm], world_.jobs[job].spec.capacity, scenario_.params.overload_threshold)) {
        admit(vm, job);
        return Admission::Admitted;
    }
    enqueue(vm, job);
    return Admission::Queued;
}

void Simulator::admit(std::size_t v, std::size_t j) {
    auto& vm = world_.vms[v];
    auto& job = world_.jobs[j];
    const Millis duration = duration_on(job, vm.spec, scenario_.params.mu_ms);
    job.state = JobState::Running;
    job.vm = v;
    job.carried.reset();
    job.scheduled_duration = duration;
    job.resumed_at = now_;
    if (!job.dispatch_time) job.dispatch_time = now_;
    job.rounding_allowance_ms_cap += vm.spec.capacity;
    job.completion_at = now_ + duration;
    job.completion_seq = push({.time = job.completion_at, .kind = EventKind::Completion, .job = j, .vm = v});
    vm.running.push_back(j);
    vm.load += job.spec.capacity;
}

void Simulator::enqueue(std::size_t v, std::size_t j) {
    auto& job = world_.jobs[j];
    job.state = JobState::Queued;
    job.vm = v;
    job.queued_since = now_;
    ++job.episode;
    job.starvation_reported = false;
    world_.vms[v].queue.push_back(j);

    const auto& p = scenario_.params;
    auto& handles = watchdogs_[j];
    const Millis starve_at = now_ + p.deadlock_horizon + 1;
    handles.emplace_back(starve_at, push({.time = starve_at, .kind = EventKind::Watchdog, .job = j, .vm = v,
                                          .purpose = WatchdogPurpose::Starvation}));
    if (p.rejection_timeout) {
        const Millis reject_at = now_ + *p.rejection_timeout;
        handles.emplace_back(reject_at, push({.time = reject_at, .kind = EventKind::Watchdog, .job = j, .vm = v,
                                              .purpose = WatchdogPurpose::Rejection}));
    }
}

void Simulator::end_queue_episode(std::size_t j) {
    for (auto [t, s] : watchdogs_[j]) cancel(t, s);
    watchdogs_[j].clear();
}

void Simulator::drain_queue(std::size_t v) {
    auto& vm = world_.vms[v];
    while (!vm.queue.empty()) {
        const auto head = vm.queue.front();
        const auto c = world_.jobs[head].spec.capacity;
        const bool fits =
            vm.idle() || Status(100 * (vm.load + c), vm.spec.capacity).at_most(scenario_.params.overload_threshold);
        if (!fits) break;
        vm.queue.pop_front();
        end_queue_episode(head);
        admit(v, head);
    }
}

void Simulator::on_completion(std::size_t v, std::size_t j) {
    auto& vm = world_.vms[v];
    auto& job = world_.jobs[j];
    auto it = std::find(vm.running.begin(), vm.running.end(), j);
    if (job.state != JobState::Running || job.vm != v || it == vm.running.end())
        throw InvariantViolation("completion of " + job.spec.id + " which is not running on " + vm.spec.id);
    vm.running.erase(it);
    vm.load -= job.spec.capacity;
    job.executed_ms_cap += (now_ - job.resumed_at) * vm.spec.capacity;
    job.state = JobState::Done;
    job.completion_time = now_;
    notify(Notice::Deallocation, j, v);
    drain_queue(v);
}

void Simulator::start_migration(std::size_t j, std::size_t s, std::size_t t) {
    auto& job = world_.jobs[j];
    auto& src = world_.vms[s];
    if (s == t) throw InvariantViolation("migration of " + job.spec.id + " onto its own VM");
    if (job.vm != s || (job.state != JobState::Queued && job.state != JobState::Running))
        throw InvariantViolation("migration of " + job.spec.id + " which is not queued or running on " + src.spec.id);

    if (job.state == JobState::Running) {
        cancel(job.completion_at, job.completion_seq);
        const Millis elapsed = now_ - job.resumed_at;
        job.executed_ms_cap += elapsed * src.spec.capacity;
        job.elapsed_at_pause = elapsed;
        job.carried = CarriedWork{job.scheduled_duration, elapsed, src.spec.capacity};
        src.running.erase(std::find(src.running.begin(), src.running.end(), j));
        src.load -= job.spec.capacity;
    } else {
        src.queue.erase(std::find(src.queue.begin(), src.queue.end(), j));
        end_queue_episode(j);
    }

    job.state = JobState::Migrating;
    job.vm = t;
    ++job.migrations;
    world_.vms[t].inbound.push_back(j);
    src.last_migration_time = now_;

    Event depart{.time = now_, .seq = next_seq_++, .kind = EventKind::MigrationDepart, .job = j, .vm = s};
    trace_event(depart);
    push({.time = now_ + world_.hop(s, t), .kind = EventKind::MigrationArrive, .job = j, .vm = t});

    notify(Notice::Deallocation, j, s);
    notify(Notice::Allocation, j, t);
    drain_queue(s);
}

// ---------------------------------------------------------------------------

bool Simulator::step() {
    if (finished_) return false;
    if (events_.empty()) {
        if (!world_.all_terminal()) throw EngineAbort("event queue drained with unfinished jobs");
        finished_ = true;
        return false;
    }
    const Event e = *events_.begin();
    events_.erase(events_.begin());
    if (e.time > options_.horizon)
        throw EngineAbort("simulated clock passed horizon " + std::to_string(options_.horizon) + " ms at " +
                          std::string(to_string(e.kind)) + " t=" + std::to_string(e.time));
    if (e.time < now_) throw InvariantViolation("clock moved backwards");
    now_ = e.time;
    ++consumed_;
    trace_event(e);
    handle(e);

    for (const auto& d : contention_.detect(world_, now_)) record_deadlock(d);
    if (options_.record_timeline) sample_timeline(e.kind == EventKind::MonitorTick);
    if (options_.check_invariants) check_invariants();

    if (world_.all_terminal()) {
        finished_ = true;
        events_.clear();
    }
    return true;
}

void Simulator::handle(const Event& e) {
    switch (e.kind) {
    case EventKind::Arrival: {
        const auto j = *e.job;
        if (world_.jobs[j].state != JobState::Pending) throw InvariantViolation("duplicate arrival");
        const auto decision = policy_->place(world_, j);
        notify(Notice::Allocation, j, decision.vm);
        admit_or_queue(decision.vm, j);
        break;
    }
    case EventKind::Completion: on_completion(*e.vm, *e.job); break;
    case EventKind::MonitorTick: handle_tick(); break;
    case EventKind::MigrationArrive: {
        auto& in = world_.vms[*e.vm].inbound;
        in.erase(std::find(in.begin(), in.end(), *e.job));
        admit_or_queue(*e.vm, *e.job);
        break;
    }
    case EventKind::SyncDone: policy_->on_notice(world_, {e.notice, *e.job, *e.vm}); break;
    case EventKind::Watchdog: handle_watchdog(e); break;
    case EventKind::MigrationDepart: break;  // executed inline by start_migration
    }
}

void Simulator::handle_tick() {
    TickRecord rec{now_, policy_->on_tick(world_, now_)};
    for (const auto& plan : rec.plans)
        if (plan.action == MigrationAction::Migrate) start_migration(plan.victim, plan.source, *plan.target);
    ticks_.push_back(std::move(rec));
    push({.time = now_ + scenario_.params.monitor_interval, .kind = EventKind::MonitorTick});
}

void Simulator::handle_watchdog(const Event& e) {
    const auto j = *e.job;
    auto& job = world_.jobs[j];
    auto& handles = watchdogs_[j];
    handles.erase(std::remove_if(handles.begin(), handles.end(),
                                 [&](const auto& h) { return h.first == e.time && h.second == e.seq; }),
                  handles.end());
    if (job.state != JobState::Queued) throw InvariantViolation("watchdog fired for a job that is not queued");

    if (e.purpose == WatchdogPurpose::Starvation) {
        if (auto d = detect_starvation(job, j, now_, scenario_.params.deadlock_horizon)) {
            job.starvation_reported = true;
            record_deadlock(*d);
        }
        return;
    }
    const auto v = *job.vm;
    auto& q = world_.vms[v].queue;
    q.erase(std::find(q.begin(), q.end(), j));
    end_queue_episode(j);
    job.state = JobState::Rejected;
    notify(Notice::Deallocation, j, v);
    drain_queue(v);
}

void Simulator::record_deadlock(const DeadlockEvent& d) {
    DeadlockRecord rec{d.time, d.kind, world_.vms[d.vm].spec.id, {}};
    for (auto j : d.jobs) rec.job_ids.push_back(world_.jobs[j].spec.id);
    if (options_.trace) {
        std::string line = "DEADLOCK " + std::to_string(rec.time) + ' ' + std::string(to_string(rec.kind)) + ' ' + rec.vm_id;
        for (const auto& id : rec.job_ids) line += ' ' + id;
        trace_.push_back(std::move(line));
    }
    deadlocks_.push_back(std::move(rec));
}

void Simulator::sample_timeline(bool all) {
    for (std::size_t v = 0; v < world_.vms.size(); ++v) {
        const auto st = world_.vms[v].status();
        if (!all && last_sampled_[v] && *last_sampled_[v] == st) continue;
        last_sampled_[v] = st;
        timeline_.push_back({now_, world_.vms[v].spec.id, st});
    }
}

void Simulator::check_invariants() const {
    std::vector<int> seen(world_.jobs.size(), 0);
    for (std::size_t v = 0; v < world_.vms.size(); ++v) {
        const auto& vm = world_.vms[v];
        Work load = 0;
        for (auto j : vm.running) {
            ++seen[j];
            load += world_.jobs[j].spec.capacity;
            if (world_.jobs[j].state != JobState::Running || world_.jobs[j].vm != v)
                throw InvariantViolation("job " + world_.jobs[j].spec.id + " in running set of " + vm.spec.id +
                                         " but not running there");
        }
        for (auto j : vm.queue) {
            ++seen[j];
            if (world_.jobs[j].state != JobState::Queued || world_.jobs[j].vm != v)
                throw InvariantViolation("job " + world_.jobs[j].spec.id + " in queue of " + vm.spec.id +
                                         " but not queued there");
        }
        for (auto j : vm.inbound) {
            ++seen[j];
            if (world_.jobs[j].state != JobState::Migrating || world_.jobs[j].vm != v)
                throw InvariantViolation("job " + world_.jobs[j].spec.id + " inbound to " + vm.spec.id +
                                         " but not migrating there");
        }
        if (load != vm.load || !(vm.status() == compute_status(vm.spec.capacity, std::vector<Work>{load})))
            throw InvariantViolation("status of " + vm.spec.id + " disagrees with its running set");
    }
    for (std::size_t j = 0; j < world_.jobs.size(); ++j) {
        const auto& job = world_.jobs[j];
        const bool placed = job.state == JobState::Running || job.state == JobState::Queued ||
                            job.state == JobState::Migrating;
        if (seen[j] != (placed ? 1 : 0))
            throw InvariantViolation("job " + job.spec.id + " appears " + std::to_string(seen[j]) + " times");
        if (job.completion_time.has_value() != (job.state == JobState::Done))
            throw InvariantViolation("completion time of " + job.spec.id + " out of sync with state");
    }
}

RunReport Simulator::report() const {
    RunReport r;
    r.policy = policy_->kind();
    r.mu_ms = scenario_.params.mu_ms;
    for (const auto& job : world_.jobs) {
        JobRow row{.job_id = job.spec.id,
                   .capacity = job.spec.capacity,
                   .arrival = job.spec.arrival,
                   .dispatch = job.dispatch_time,
                   .final_vm = std::nullopt,
                   .migrations = job.migrations,
                   .response = std::nullopt,
                   .state = job.state,
                   .executed_ms_cap = job.executed_ms_cap,
                   .rounding_allowance_ms_cap = job.rounding_allowance_ms_cap};
        if (job.vm) row.final_vm = world_.vms[*job.vm].spec.id;
        if (job.state == JobState::Done) row.response = response_time(job);
        r.per_job.push_back(std::move(row));
    }
    r.deadlocks = deadlocks_;
    r.summary = summarize(r.per_job, r.deadlocks);
    r.utilization_timeline = timeline_;
    r.ticks = ticks_;
    r.trace = trace_;
    r.end_time = now_;
    r.events = consumed_;
    return r;
}

RunReport Simulator::run() {
    while (step()) {
    }
    return report();
}

RunReport run(const Scenario& scenario, PolicyKind policy, const RunOptions& options) {
    Simulator sim(scenario, policy, options);
    return sim.run();
}

}  // namespace cloudlb
