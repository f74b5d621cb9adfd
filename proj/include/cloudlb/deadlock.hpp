#pragma once

#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "cloudlb/world.hpp"

namespace cloudlb {

/// Bipartite view of the current assignment: one vertex per job and per
/// VM, one edge per running or queued job. Jobs in transit have no edge.
struct AssignmentGraph {
    std::set<std::size_t> job_vertices;
    std::set<std::size_t> vm_vertices;
    std::set<std::pair<std::size_t, std::size_t>> edges;  // (job, vm)

    std::size_t degree_of_vm(std::size_t vm) const;
};

AssignmentGraph snapshot_graph(const World& world);

enum class DeadlockKind { Contention, Starvation };

std::string_view to_string(DeadlockKind k);

struct DeadlockEvent {
    Millis time = 0;
    DeadlockKind kind = DeadlockKind::Contention;
    std::vector<std::size_t> jobs;  // queue order
    std::size_t vm = 0;
};

/// Two or more jobs queued on a VM that is fully utilized while every
/// other VM is fully utilized too, i.e. nowhere to escape to.
std::vector<DeadlockEvent> contention_candidates(const World& world, Millis now);

/// Remembers what has already been reported so each (VM, job set)
/// contention is emitted once while it persists.
class ContentionDetector {
public:
    std::vector<DeadlockEvent> detect(const World& world, Millis now);

private:
    std::map<std::size_t, std::vector<std::size_t>> reported_;
};

/// A job continuously queued for longer than `horizon`, not yet reported
/// in this queue episode.
std::optional<DeadlockEvent> detect_starvation(const JobRuntime& job, std::size_t job_index, Millis now,
                                               Millis horizon);

}  // namespace cloudlb
