#include "cloudlb/world.hpp"

#include <algorithm>
#include <tuple>

namespace cloudlb {

std::string_view to_string(JobState s) {
    switch (s) {
    case JobState::Pending: return "Pending";
    case JobState::Queued: return "Queued";
    case JobState::Running: return "Running";
    case JobState::Migrating: return "Migrating";
    case JobState::Done: return "Done";
    case JobState::Rejected: return "Rejected";
    }
    return "?";
}

World::World(const Scenario& s) : scenario(&s) {
    jobs.reserve(s.jobs.size());
    for (const auto& j : s.jobs) jobs.push_back(JobRuntime{.spec = j});
    vms.reserve(s.vms.size());
    for (const auto& v : s.vms) vms.push_back(VmRuntime{.spec = v});
}

Millis World::hop(std::size_t from_vm, std::size_t to_vm) const {
    return scenario->hops.hop(vms[from_vm].spec.id, vms[to_vm].spec.id);
}

Millis World::ingress_hop(std::size_t vm) const { return scenario->hops.hop(kIngress, vms[vm].spec.id); }

bool World::all_terminal() const {
    return std::all_of(jobs.begin(), jobs.end(),
                       [](const JobRuntime& j) { return j.state == JobState::Done || j.state == JobState::Rejected; });
}

bool admits(const VmRuntime& vm, Work job_capacity, std::int64_t threshold) {
    if (!vm.queue.empty()) return false;
    if (vm.idle()) return true;
    return Status(100 * (vm.load + job_capacity), vm.spec.capacity).at_most(threshold);
}

Millis duration_on(const JobRuntime& job, const VmSpec& vm, Millis mu_ms) {
    if (job.carried)
        return remaining_duration(job.carried->original, job.carried->elapsed, job.carried->source_capacity,
                                  vm.capacity);
    return service_duration(job.spec.capacity, vm.capacity, mu_ms);
}

std::optional<Millis> wait_time(const World& world, std::size_t vm_idx, std::size_t job_idx, Millis now) {
    const auto& vm = world.vms[vm_idx];
    const auto& params = world.params();
    if (std::find(vm.running.begin(), vm.running.end(), job_idx) != vm.running.end()) return 0;

    // Replay this VM alone: completions in (time, seq) order, queue head
    // re-evaluated after each one, exactly as the engine does.
    struct Pending {
        Millis at;
        std::uint64_t seq;
        Work capacity;
    };
    std::vector<Pending> running;
    std::uint64_t next_seq = 0;
    for (auto j : vm.running) {
        const auto& jr = world.jobs[j];
        running.push_back({jr.completion_at, jr.completion_seq, jr.spec.capacity});
        next_seq = std::max(next_seq, jr.completion_seq + 1);
    }

    std::deque<std::size_t> queue;
    bool found = false;
    for (auto q : vm.queue) {
        queue.push_back(q);
        if (q == job_idx) {
            found = true;
            break;
        }
    }
    if (!found) queue.push_back(job_idx);

    Work load = vm.load;
    Millis t = now;
    auto by_time = [](const Pending& a, const Pending& b) { return std::tie(a.at, a.seq) > std::tie(b.at, b.seq); };
    std::make_heap(running.begin(), running.end(), by_time);

    for (;;) {
        while (!queue.empty()) {
            const auto head = queue.front();
            const auto& hj = world.jobs[head];
            const bool fits =
                running.empty() || Status(100 * (load + hj.spec.capacity), vm.spec.capacity).at_most(params.overload_threshold);
            if (!fits) break;
            if (head == job_idx) return t - now;
            queue.pop_front();
            running.push_back({t + duration_on(hj, vm.spec, params.mu_ms), next_seq++, hj.spec.capacity});
            std::push_heap(running.begin(), running.end(), by_time);
            load += hj.spec.capacity;
        }
        if (running.empty()) return std::nullopt;
        std::pop_heap(running.begin(), running.end(), by_time);
        const auto done = running.back();
        running.pop_back();
        t = std::max(t, done.at);
        load -= done.capacity;
    }
}

ManagerTable current_table(const World& world, std::uint64_t generation) {
    ManagerTable table;
    table.generation = generation;
    table.rows.reserve(world.vms.size());
    for (std::size_t v = 0; v < world.vms.size(); ++v) {
        const auto& vm = world.vms[v];
        ManagerRow row{.vm = v};
        Work load = vm.load;
        row.jobs.insert(row.jobs.end(), vm.running.begin(), vm.running.end());
        row.jobs.insert(row.jobs.end(), vm.queue.begin(), vm.queue.end());
        for (auto j : vm.inbound) {
            row.jobs.push_back(j);
            load += world.jobs[j].spec.capacity;
        }
        row.status = Status(100 * load, vm.spec.capacity);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace cloudlb
