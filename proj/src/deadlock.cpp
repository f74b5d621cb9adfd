#include "cloudlb/deadlock.hpp"

#include <algorithm>

namespace cloudlb {

std::size_t AssignmentGraph::degree_of_vm(std::size_t vm) const {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [vm](const auto& e) { return e.second == vm; }));
}

AssignmentGraph snapshot_graph(const World& world) {
    AssignmentGraph g;
    for (std::size_t j = 0; j < world.jobs.size(); ++j) g.job_vertices.insert(j);
    for (std::size_t v = 0; v < world.vms.size(); ++v) {
        g.vm_vertices.insert(v);
        for (auto j : world.vms[v].running) g.edges.insert({j, v});
        for (auto j : world.vms[v].queue) g.edges.insert({j, v});
    }
    return g;
}

std::string_view to_string(DeadlockKind k) { return k == DeadlockKind::Contention ? "contention" : "starvation"; }

std::vector<DeadlockEvent> contention_candidates(const World& world, Millis now) {
    std::vector<DeadlockEvent> out;
    const bool all_full = std::all_of(world.vms.begin(), world.vms.end(),
                                      [](const VmRuntime& vm) { return vm.status().at_least(100); });
    if (!all_full) return out;
    for (std::size_t v = 0; v < world.vms.size(); ++v) {
        const auto& vm = world.vms[v];
        if (vm.queue.size() < 2) continue;
        out.push_back({now, DeadlockKind::Contention, {vm.queue.begin(), vm.queue.end()}, v});
    }
    return out;
}

std::vector<DeadlockEvent> ContentionDetector::detect(const World& world, Millis now) {
    auto found = contention_candidates(world, now);
    std::vector<DeadlockEvent> fresh;
    std::map<std::size_t, std::vector<std::size_t>> still;
    for (auto& e : found) {
        auto sorted = e.jobs;
        std::sort(sorted.begin(), sorted.end());
        auto it = reported_.find(e.vm);
        if (it == reported_.end() || it->second != sorted) fresh.push_back(e);
        still[e.vm] = std::move(sorted);
    }
    reported_ = std::move(still);
    return fresh;
}

std::optional<DeadlockEvent> detect_starvation(const JobRuntime& job, std::size_t job_index, Millis now,
                                               Millis horizon) {
    if (job.state != JobState::Queued || job.starvation_reported || !job.vm) return std::nullopt;
    if (now - job.queued_since <= horizon) return std::nullopt;
    return DeadlockEvent{now, DeadlockKind::Starvation, {job_index}, *job.vm};
}

}  // namespace cloudlb
