#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cloudlb {

using Millis = std::int64_t;
using Work = std::int64_t;

/// Reserved hop-matrix node that initial allocations are measured from.
inline constexpr std::string_view kIngress = "@ingress";

/// Thrown for malformed or inconsistent scenario input. `line()` is 0 when
/// the problem is not tied to a single line (e.g. a missing section).
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int line, const std::string& what);
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct JobSpec {
    std::string id;
    Work capacity = 0;
    Millis arrival = 0;
};

struct VmSpec {
    std::string id;
    Work capacity = 0;
};

/// Directed hop delays between VMs and the ingress node. Lookups of a node
/// against itself are always 0; pairs that were never given fall back to
/// `default_hop`.
class HopMatrix {
public:
    explicit HopMatrix(Millis default_hop = 10) : default_hop_(default_hop) {}

    Millis hop(std::string_view from, std::string_view to) const;
    Millis default_hop() const noexcept { return default_hop_; }
    void set_default(Millis ms) { default_hop_ = ms; }

    /// Sets one direction. `explicit_entry` marks the value as written by
    /// the user, so a later implicit mirror never overrides it.
    void set(const std::string& from, const std::string& to, Millis ms, bool explicit_entry = true);
    bool has_explicit(const std::string& from, const std::string& to) const;

    /// All stored directed entries, sorted by (from, to).
    const std::map<std::pair<std::string, std::string>, Millis>& entries() const noexcept { return entries_; }

private:
    Millis default_hop_;
    std::map<std::pair<std::string, std::string>, Millis> entries_;
    std::map<std::pair<std::string, std::string>, bool> explicit_;
};

struct EngineParams {
    Millis mu_ms = 500;
    Millis monitor_interval = 50;
    std::int64_t overload_threshold = 100;  // percent
    Millis baseline_sync_delay = 25;
    Millis deadlock_horizon = 2500;
    std::optional<Millis> rejection_timeout;  // nullopt = never reject
    Millis migration_cooldown = 100;
};

struct Scenario {
    std::vector<JobSpec> jobs;
    std::vector<VmSpec> vms;
    HopMatrix hops;
    EngineParams params;

    std::optional<std::size_t> job_index(std::string_view id) const;
    std::optional<std::size_t> vm_index(std::string_view id) const;
};

/// Parses the sectioned scenario format and validates it.
Scenario parse_scenario(std::string_view text);

/// Checks every invariant of an in-memory scenario (ids, capacities,
/// parameter ranges). parse_scenario calls this; programmatic builders
/// should too.
void validate_scenario(const Scenario& s);

/// Normalized text form: comments dropped, sections in canonical order,
/// every engine key spelled out, hop entries sorted.
std::string serialize_scenario(const Scenario& s);

/// Names accepted in the [engine] section, plus `default_hop`.
bool is_tunable_parameter(std::string_view name);

/// Applies `name=value` to a scenario, using the same rules as the
/// scenario file. Throws ScenarioError on an unknown name or bad value.
void apply_parameter(Scenario& s, std::string_view name, std::string_view value);

// ---------------------------------------------------------------------------
// Cost model. Exact integer arithmetic throughout.

/// Exact VM status as the rational `percent_num / capacity` percent.
class Status {
public:
    constexpr Status() = default;
    constexpr Status(Work percent_num, Work capacity) : num_(percent_num), den_(capacity) {}

    /// Status rounded half-up to 0.1 %, expressed in tenths of a percent.
    std::int64_t tenths() const;
    /// "20.0", "1000.0", "0.1".
    std::string str() const;

    bool at_least(std::int64_t percent) const { return num_ >= static_cast<__int128>(percent) * den_; }
    bool below(std::int64_t percent) const { return !at_least(percent); }
    bool at_most(std::int64_t percent) const { return num_ <= static_cast<__int128>(percent) * den_; }

    friend bool operator==(const Status& a, const Status& b) {
        return static_cast<__int128>(a.num_) * b.den_ == static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator<(const Status& a, const Status& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Status& a, const Status& b) { return b < a; }
    friend bool operator<=(const Status& a, const Status& b) { return !(b < a); }

    Work numerator() const noexcept { return num_; }
    Work denominator() const noexcept { return den_; }

private:
    Work num_ = 0;
    Work den_ = 1;
};

Status compute_status(Work vm_capacity, std::span<const Work> active_capacities);

/// round_half_up(num / den) for num >= 0, den > 0.
std::int64_t round_half_up(std::int64_t num, std::int64_t den);

Millis service_duration(Work job_capacity, Work vm_capacity, Millis mu_ms);

Millis remaining_duration(Millis original_duration, Millis elapsed, Work source_capacity, Work target_capacity);

}  // namespace cloudlb
