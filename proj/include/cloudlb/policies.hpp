#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cloudlb/world.hpp"

namespace cloudlb {

enum class PolicyKind { Baseline, Enhanced };

std::string_view to_string(PolicyKind k);
/// Accepts "baseline" / "enhanced".
std::optional<PolicyKind> parse_policy(std::string_view name);

enum class Rationale { LeastCountFirst, LeastStatus, HopTiebreak, ListOrderTiebreak };

std::string_view to_string(Rationale r);

struct PolicyDecision {
    std::size_t vm = 0;
    Rationale rationale = Rationale::ListOrderTiebreak;
};

/// Least allocation count; ties go to the earliest VM in list order.
PolicyDecision baseline_select(std::span<const std::int64_t> counts);

/// Least status, then least ingress hop, then list order.
PolicyDecision enhanced_select(std::span<const Status> statuses, std::span<const Millis> ingress_hops);

PolicyDecision enhanced_select(const ManagerTable& table, const World& world);

// ---------------------------------------------------------------------------
// Baseline index table.

enum class Notice { Allocation, Deallocation };

struct SyncNotice {
    Notice kind;
    std::size_t job;
    std::size_t vm;
};

/// The load balancer's per-VM allocation counts. Confirmed counts move
/// only when a DataCenterController notification lands; allocations the
/// balancer has handed out but not yet seen confirmed are held as
/// reservations so that back-to-back requests still spread out.
struct IndexTable {
    explicit IndexTable(std::size_t vm_count);

    std::vector<std::int64_t> confirmed;
    std::vector<std::int64_t> reserved;
    std::vector<std::vector<std::size_t>> jobs;  // confirmed assignments
    std::uint64_t generation = 0;

    std::vector<std::int64_t> effective_counts() const;
    void reserve(std::size_t vm) { ++reserved[vm]; }
};

/// Applies one notification. Throws std::logic_error when a count would
/// go negative.
void baseline_on_notify(IndexTable& table, const SyncNotice& notice);

// ---------------------------------------------------------------------------
// Migration planning.

enum class MigrationAction { Migrate, Wait };

struct MigrationPlan {
    std::size_t source = 0;
    std::size_t victim = 0;
    bool victim_running = false;
    std::optional<std::size_t> target;  // best candidate, if any
    std::optional<Millis> hop;          // hop(source, target)
    /// Queued victim: how long it would wait to be admitted on its source
    /// (nullopt = never). Running victim: how much later it finishes by
    /// staying than by running on the target, hop excluded.
    std::optional<Millis> alternative_wait;
    MigrationAction action = MigrationAction::Wait;
};

/// Load already promised to VMs earlier in the same monitor pass.
struct PlanningOverlay {
    explicit PlanningOverlay(std::size_t vm_count) : load_delta(vm_count, 0), busy_delta(vm_count, 0) {}
    std::vector<Work> load_delta;
    std::vector<int> busy_delta;
};

/// Decides whether one victim leaves `source`. Candidates are other VMs
/// whose projected status is under the overload threshold and that would
/// admit the victim on arrival, ranked by hop from the source then list
/// order. A queued victim migrates when the hop is no longer than its
/// wait on the source; a running victim only when the hop is strictly
/// shorter than the time it saves.
MigrationPlan plan_one_migration(const World& world, std::size_t victim, std::size_t source,
                                 const PlanningOverlay& overlay, Millis now);

bool overloaded(const VmRuntime& vm, std::int64_t threshold);

/// One periodic pass of the Cloud Manager. Every plan considered is
/// returned, in order; at most one per source VM has action Migrate.
std::vector<MigrationPlan> monitor_tick(const World& world, Millis now);

// ---------------------------------------------------------------------------
// Policy contract used by the engine.

class Policy {
public:
    virtual ~Policy() = default;

    virtual PolicyKind kind() const = 0;
    virtual bool monitors() const = 0;
    /// Delay before notifications reach the policy; nullopt = immediate.
    virtual std::optional<Millis> notify_delay() const = 0;

    virtual PolicyDecision place(const World& world, std::size_t job) = 0;
    virtual void on_notice(const World& world, const SyncNotice& notice) = 0;
    virtual std::vector<MigrationPlan> on_tick(const World& world, Millis now) = 0;
    /// The policy's own view of assignments and status.
    virtual ManagerTable table(const World& world) const = 0;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, const World& world);

class BaselinePolicy final : public Policy {
public:
    explicit BaselinePolicy(const World& world);

    PolicyKind kind() const override { return PolicyKind::Baseline; }
    bool monitors() const override { return false; }
    std::optional<Millis> notify_delay() const override { return delay_; }
    PolicyDecision place(const World& world, std::size_t job) override;
    void on_notice(const World& world, const SyncNotice& notice) override;
    std::vector<MigrationPlan> on_tick(const World&, Millis) override { return {}; }
    ManagerTable table(const World& world) const override;

    const IndexTable& index() const { return index_; }

private:
    IndexTable index_;
    Millis delay_;
};

class EnhancedPolicy final : public Policy {
public:
    PolicyKind kind() const override { return PolicyKind::Enhanced; }
    bool monitors() const override { return true; }
    std::optional<Millis> notify_delay() const override { return std::nullopt; }
    PolicyDecision place(const World& world, std::size_t job) override;
    void on_notice(const World&, const SyncNotice&) override { ++generation_; }
    std::vector<MigrationPlan> on_tick(const World& world, Millis now) override;
    ManagerTable table(const World& world) const override { return current_table(world, generation_); }

private:
    std::uint64_t generation_ = 0;
};

}  // namespace cloudlb
