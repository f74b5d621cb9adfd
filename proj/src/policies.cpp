#include "cloudlb/policies.hpp"

#include <algorithm>
#include <stdexcept>

namespace cloudlb {

std::string_view to_string(PolicyKind k) { return k == PolicyKind::Baseline ? "baseline" : "enhanced"; }

std::optional<PolicyKind> parse_policy(std::string_view name) {
    if (name == "baseline") return PolicyKind::Baseline;
    if (name == "enhanced") return PolicyKind::Enhanced;
    return std::nullopt;
}

std::string_view to_string(Rationale r) {
    switch (r) {
    case Rationale::LeastCountFirst: return "least-count-first";
    case Rationale::LeastStatus: return "least-status";
    case Rationale::HopTiebreak: return "hop-tiebreak";
    case Rationale::ListOrderTiebreak: return "list-order-tiebreak";
    }
    return "?";
}

PolicyDecision baseline_select(std::span<const std::int64_t> counts) {
    if (counts.empty()) throw std::invalid_argument("baseline_select: no VMs");
    std::size_t best = 0;
    int ties = 1;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] < counts[best]) {
            best = i;
            ties = 1;
        } else if (counts[i] == counts[best]) {
            ++ties;
        }
    }
    return {best, ties > 1 ? Rationale::ListOrderTiebreak : Rationale::LeastCountFirst};
}

PolicyDecision enhanced_select(std::span<const Status> statuses, std::span<const Millis> ingress_hops) {
    if (statuses.empty() || statuses.size() != ingress_hops.size())
        throw std::invalid_argument("enhanced_select: bad table");
    std::size_t best = 0;
    for (std::size_t i = 1; i < statuses.size(); ++i) {
        if (statuses[i] < statuses[best] || (statuses[i] == statuses[best] && ingress_hops[i] < ingress_hops[best]))
            best = i;
    }
    int same_status = 0, same_both = 0;
    for (std::size_t i = 0; i < statuses.size(); ++i) {
        if (statuses[i] == statuses[best]) {
            ++same_status;
            if (ingress_hops[i] == ingress_hops[best]) ++same_both;
        }
    }
    Rationale why = Rationale::LeastStatus;
    if (same_both > 1) why = Rationale::ListOrderTiebreak;
    else if (same_status > 1) why = Rationale::HopTiebreak;
    return {best, why};
}

PolicyDecision enhanced_select(const ManagerTable& table, const World& world) {
    std::vector<Status> statuses;
    std::vector<Millis> hops;
    statuses.reserve(table.rows.size());
    hops.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        statuses.push_back(row.status);
        hops.push_back(world.ingress_hop(row.vm));
    }
    auto d = enhanced_select(statuses, hops);
    d.vm = table.rows[d.vm].vm;
    return d;
}

// ---------------------------------------------------------------------------

IndexTable::IndexTable(std::size_t vm_count) : confirmed(vm_count, 0), reserved(vm_count, 0), jobs(vm_count) {}

std::vector<std::int64_t> IndexTable::effective_counts() const {
    std::vector<std::int64_t> out(confirmed.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = confirmed[i] + reserved[i];
    return out;
}

void baseline_on_notify(IndexTable& table, const SyncNotice& notice) {
    const auto v = notice.vm;
    if (notice.kind == Notice::Allocation) {
        if (table.reserved[v] > 0) --table.reserved[v];
        ++table.confirmed[v];
        table.jobs[v].push_back(notice.job);
    } else {
        if (table.confirmed[v] == 0) throw std::logic_error("index table: de-allocation below zero");
        --table.confirmed[v];
        auto& js = table.jobs[v];
        if (auto it = std::find(js.begin(), js.end(), notice.job); it != js.end()) js.erase(it);
    }
    ++table.generation;
}

// ---------------------------------------------------------------------------

bool overloaded(const VmRuntime& vm, std::int64_t threshold) {
    return vm.status().at_least(threshold) || !vm.queue.empty();
}

MigrationPlan plan_one_migration(const World& world, std::size_t victim, std::size_t source,
                                 const PlanningOverlay& overlay, Millis now) {
    const auto& params = world.params();
    const auto& job = world.jobs[victim];
    const auto& src = world.vms[source];

    MigrationPlan plan{.source = source, .victim = victim, .victim_running = job.state == JobState::Running};

    for (std::size_t t = 0; t < world.vms.size(); ++t) {
        if (t == source) continue;
        const auto& vm = world.vms[t];
        Work load = vm.load + overlay.load_delta[t];
        for (auto j : vm.inbound) load += world.jobs[j].spec.capacity;
        const bool busy = static_cast<int>(vm.running.size() + vm.inbound.size()) + overlay.busy_delta[t] > 0;
        const bool queue_empty = vm.queue.empty();

        if (!Status(100 * load, vm.spec.capacity).below(params.overload_threshold)) continue;
        if (!queue_empty) continue;
        if (busy && !Status(100 * (load + job.spec.capacity), vm.spec.capacity).at_most(params.overload_threshold))
            continue;

        const Millis h = world.hop(source, t);
        if (!plan.hop || h < *plan.hop) {
            plan.target = t;
            plan.hop = h;
        }
    }

    if (plan.victim_running) {
        if (!plan.target) {
            plan.alternative_wait = 0;
            return plan;
        }
        const Millis stay = job.completion_at - now;
        const Millis move = remaining_duration(job.scheduled_duration, now - job.resumed_at, src.spec.capacity,
                                               world.vms[*plan.target].spec.capacity);
        plan.alternative_wait = stay - move;
        if (*plan.hop < *plan.alternative_wait) plan.action = MigrationAction::Migrate;
    } else {
        plan.alternative_wait = wait_time(world, source, victim, now);
        if (plan.target && (!plan.alternative_wait || *plan.hop <= *plan.alternative_wait))
            plan.action = MigrationAction::Migrate;
    }
    return plan;
}

std::vector<MigrationPlan> monitor_tick(const World& world, Millis now) {
    const auto& params = world.params();
    std::vector<MigrationPlan> plans;
    PlanningOverlay overlay(world.vms.size());

    for (std::size_t s = 0; s < world.vms.size(); ++s) {
        const auto& vm = world.vms[s];
        if (!overloaded(vm, params.overload_threshold)) continue;
        if (vm.last_migration_time && now - *vm.last_migration_time < params.migration_cooldown) continue;

        std::vector<std::size_t> victims(vm.queue.begin(), vm.queue.end());
        victims.insert(victims.end(), vm.running.rbegin(), vm.running.rend());

        for (auto v : victims) {
            auto plan = plan_one_migration(world, v, s, overlay, now);
            plans.push_back(plan);
            if (plan.action != MigrationAction::Migrate) continue;
            const auto c = world.jobs[v].spec.capacity;
            overlay.load_delta[*plan.target] += c;
            overlay.busy_delta[*plan.target] += 1;
            // The source keeps its planning-time status for the rest of the tick.
            break;
        }
    }
    return plans;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(PolicyKind kind, const World& world) {
    if (kind == PolicyKind::Baseline) return std::make_unique<BaselinePolicy>(world);
    return std::make_unique<EnhancedPolicy>();
}

BaselinePolicy::BaselinePolicy(const World& world)
    : index_(world.vms.size()), delay_(world.params().baseline_sync_delay) {}

PolicyDecision BaselinePolicy::place(const World&, std::size_t) {
    const auto counts = index_.effective_counts();
    auto d = baseline_select(counts);
    index_.reserve(d.vm);
    return d;
}

void BaselinePolicy::on_notice(const World&, const SyncNotice& notice) { baseline_on_notify(index_, notice); }

ManagerTable BaselinePolicy::table(const World& world) const {
    ManagerTable t;
    t.generation = index_.generation;
    for (std::size_t v = 0; v < index_.jobs.size(); ++v) {
        Work load = 0;
        for (auto j : index_.jobs[v]) load += world.jobs[j].spec.capacity;
        t.rows.push_back({v, index_.jobs[v], Status(100 * load, world.vms[v].spec.capacity)});
    }
    return t;
}

PolicyDecision EnhancedPolicy::place(const World& world, std::size_t) {
    return enhanced_select(current_table(world, generation_), world);
}

std::vector<MigrationPlan> EnhancedPolicy::on_tick(const World& world, Millis now) { return monitor_tick(world, now); }

}  // namespace cloudlb
