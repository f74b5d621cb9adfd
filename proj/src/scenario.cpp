#include "cloudlb/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <sstream>

namespace cloudlb {

ScenarioError::ScenarioError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

Millis HopMatrix::hop(std::string_view from, std::string_view to) const {
    if (from == to) return 0;
    auto it = entries_.find({std::string(from), std::string(to)});
    return it == entries_.end() ? default_hop_ : it->second;
}

void HopMatrix::set(const std::string& from, const std::string& to, Millis ms, bool explicit_entry) {
    entries_[{from, to}] = ms;
    if (explicit_entry) explicit_[{from, to}] = true;
}

bool HopMatrix::has_explicit(const std::string& from, const std::string& to) const {
    return explicit_.count({from, to}) != 0;
}

std::optional<std::size_t> Scenario::job_index(std::string_view id) const {
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].id == id) return i;
    return std::nullopt;
}

std::optional<std::size_t> Scenario::vm_index(std::string_view id) const {
    for (std::size_t i = 0; i < vms.size(); ++i)
        if (vms[i].id == id) return i;
    return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 7> kEngineKeys = {
    "mu_ms",           "monitor_interval",  "overload_threshold", "baseline_sync_delay",
    "deadlock_horizon", "rejection_timeout", "migration_cooldown",
};

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\v\f";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::int64_t parse_int(std::string_view tok, int line, std::string_view what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ScenarioError(line, "expected integer " + std::string(what) + ", got '" + std::string(tok) + "'");
    if (v < 0) throw ScenarioError(line, std::string(what) + " must be non-negative");
    return v;
}

bool valid_identifier(std::string_view id) {
    if (id.empty() || id.front() == '@') return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '-' || c == '.';
    });
}

void check_identifier(std::string_view id, int line) {
    if (!valid_identifier(id)) throw ScenarioError(line, "invalid identifier '" + std::string(id) + "'");
}

bool is_engine_key(std::string_view key) {
    return std::find(kEngineKeys.begin(), kEngineKeys.end(), key) != kEngineKeys.end();
}

void set_engine_value(EngineParams& p, std::string_view key, std::string_view value, int line) {
    if (key == "rejection_timeout") {
        if (value == "inf" || value == "infinite") {
            p.rejection_timeout.reset();
        } else {
            p.rejection_timeout = parse_int(value, line, key);
        }
        return;
    }
    const auto v = parse_int(value, line, key);
    if (key == "mu_ms") p.mu_ms = v;
    else if (key == "monitor_interval") p.monitor_interval = v;
    else if (key == "overload_threshold") p.overload_threshold = v;
    else if (key == "baseline_sync_delay") p.baseline_sync_delay = v;
    else if (key == "deadlock_horizon") p.deadlock_horizon = v;
    else if (key == "migration_cooldown") p.migration_cooldown = v;
    else throw ScenarioError(line, "unknown engine key '" + std::string(key) + "'");
}

struct PendingHop {
    std::string from, to;
    Millis ms;
    int line;
};

}  // namespace

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::set<std::string> seen_sections;
    std::set<std::string> seen_engine_keys;
    std::set<std::string> job_ids, vm_ids;
    std::vector<PendingHop> hop_lines;
    std::string section;
    int line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ScenarioError(line_no, "malformed section header");
            std::string name(trim(line.substr(1, line.size() - 2)));
            if (name != "jobs" && name != "vms" && name != "hops" && name != "engine")
                throw ScenarioError(line_no, "unknown section [" + name + "]");
            if (!seen_sections.insert(name).second)
                throw ScenarioError(line_no, "duplicate section [" + name + "]");
            section = std::move(name);
            continue;
        }

        auto tok = split_ws(line);
        if (section.empty()) throw ScenarioError(line_no, "content before first section header");

        if (section == "jobs") {
            if (tok.size() != 2 && tok.size() != 3)
                throw ScenarioError(line_no, "expected '<job_id> <capacity> <arrival_ms>'");
            check_identifier(tok[0], line_no);
            JobSpec j{std::string(tok[0]), parse_int(tok[1], line_no, "capacity"),
                      tok.size() == 3 ? parse_int(tok[2], line_no, "arrival_ms") : 0};
            if (j.capacity <= 0) throw ScenarioError(line_no, "capacity of job " + j.id + " must be positive");
            if (!job_ids.insert(j.id).second) throw ScenarioError(line_no, "duplicate job id " + j.id);
            s.jobs.push_back(std::move(j));
        } else if (section == "vms") {
            if (tok.size() != 2) throw ScenarioError(line_no, "expected '<vm_id> <capacity>'");
            check_identifier(tok[0], line_no);
            VmSpec v{std::string(tok[0]), parse_int(tok[1], line_no, "capacity")};
            if (v.capacity <= 0) throw ScenarioError(line_no, "capacity of vm " + v.id + " must be positive");
            if (!vm_ids.insert(v.id).second) throw ScenarioError(line_no, "duplicate vm id " + v.id);
            s.vms.push_back(std::move(v));
        } else if (section == "hops") {
            if (tok.size() == 2 && tok[0] == "default") {
                s.hops.set_default(parse_int(tok[1], line_no, "default hop"));
            } else if (tok.size() == 3) {
                hop_lines.push_back({std::string(tok[0]), std::string(tok[1]), parse_int(tok[2], line_no, "hop"),
                                     line_no});
            } else {
                throw ScenarioError(line_no, "expected 'default <ms>' or '<node> <node> <ms>'");
            }
        } else {  // engine
            if (tok.size() != 2) throw ScenarioError(line_no, "expected '<key> <value>'");
            std::string key(tok[0]);
            if (!is_engine_key(key)) throw ScenarioError(line_no, "unknown engine key '" + key + "'");
            if (!seen_engine_keys.insert(key).second) throw ScenarioError(line_no, "duplicate engine key " + key);
            set_engine_value(s.params, key, tok[1], line_no);
        }
    }

    if (!seen_sections.count("jobs")) throw ScenarioError(0, "missing [jobs] section");
    if (!seen_sections.count("vms")) throw ScenarioError(0, "missing [vms] section");

    auto known_node = [&](const std::string& n) { return n == kIngress || vm_ids.count(n) != 0; };
    for (const auto& h : hop_lines) {
        if (!known_node(h.from)) throw ScenarioError(h.line, "unknown hop node " + h.from);
        if (!known_node(h.to)) throw ScenarioError(h.line, "unknown hop node " + h.to);
        if (h.from == h.to) throw ScenarioError(h.line, "hop from a node to itself is always 0");
        if (s.hops.has_explicit(h.from, h.to))
            throw ScenarioError(h.line, "duplicate hop " + h.from + " -> " + h.to);
        s.hops.set(h.from, h.to, h.ms, true);
        if (!s.hops.has_explicit(h.to, h.from)) s.hops.set(h.to, h.from, h.ms, false);
    }

    validate_scenario(s);
    return s;
}

void validate_scenario(const Scenario& s) {
    if (s.jobs.empty()) throw ScenarioError(0, "scenario has no jobs");
    if (s.vms.empty()) throw ScenarioError(0, "scenario has no VMs");
    std::set<std::string_view> ids;
    for (const auto& j : s.jobs) {
        if (!valid_identifier(j.id)) throw ScenarioError(0, "invalid job id '" + j.id + "'");
        if (j.capacity <= 0) throw ScenarioError(0, "capacity of job " + j.id + " must be positive");
        if (j.arrival < 0) throw ScenarioError(0, "arrival of job " + j.id + " must be non-negative");
        if (!ids.insert(j.id).second) throw ScenarioError(0, "duplicate job id " + j.id);
    }
    ids.clear();
    for (const auto& v : s.vms) {
        if (!valid_identifier(v.id)) throw ScenarioError(0, "invalid vm id '" + v.id + "'");
        if (v.capacity <= 0) throw ScenarioError(0, "capacity of vm " + v.id + " must be positive");
        if (!ids.insert(v.id).second) throw ScenarioError(0, "duplicate vm id " + v.id);
    }
    const auto& p = s.params;
    if (p.mu_ms <= 0) throw ScenarioError(0, "mu_ms must be positive");
    if (p.monitor_interval <= 0) throw ScenarioError(0, "monitor_interval must be positive");
    if (p.overload_threshold <= 0) throw ScenarioError(0, "overload_threshold must be positive");
    if (p.deadlock_horizon <= 0) throw ScenarioError(0, "deadlock_horizon must be positive");
    if (p.baseline_sync_delay < 0) throw ScenarioError(0, "baseline_sync_delay must be non-negative");
    if (p.migration_cooldown < 0) throw ScenarioError(0, "migration_cooldown must be non-negative");
    if (p.rejection_timeout && *p.rejection_timeout <= 0)
        throw ScenarioError(0, "rejection_timeout must be positive or inf");
    if (s.hops.default_hop() < 0) throw ScenarioError(0, "default hop must be non-negative");
    for (const auto& [key, ms] : s.hops.entries())
        if (ms < 0) throw ScenarioError(0, "hop " + key.first + " -> " + key.second + " must be non-negative");
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[jobs]\n";
    for (const auto& j : s.jobs) out << j.id << ' ' << j.capacity << ' ' << j.arrival << '\n';
    out << "\n[vms]\n";
    for (const auto& v : s.vms) out << v.id << ' ' << v.capacity << '\n';
    out << "\n[hops]\ndefault " << s.hops.default_hop() << '\n';
    // A line mirrors on read unless the reverse is also written, so one-way
    // entries get their reverse spelled out.
    std::map<std::pair<std::string, std::string>, Millis> lines = s.hops.entries();
    for (const auto& [key, ms] : s.hops.entries())
        lines.emplace(std::pair{key.second, key.first}, s.hops.hop(key.second, key.first));
    for (const auto& [key, ms] : lines) out << key.first << ' ' << key.second << ' ' << ms << '\n';
    const auto& p = s.params;
    out << "\n[engine]\n"
        << "mu_ms " << p.mu_ms << '\n'
        << "monitor_interval " << p.monitor_interval << '\n'
        << "overload_threshold " << p.overload_threshold << '\n'
        << "baseline_sync_delay " << p.baseline_sync_delay << '\n'
        << "deadlock_horizon " << p.deadlock_horizon << '\n'
        << "rejection_timeout ";
    if (p.rejection_timeout) out << *p.rejection_timeout;
    else out << "inf";
    out << '\n' << "migration_cooldown " << p.migration_cooldown << '\n';
    return out.str();
}

bool is_tunable_parameter(std::string_view name) { return name == "default_hop" || is_engine_key(name); }

void apply_parameter(Scenario& s, std::string_view name, std::string_view value) {
    if (name == "default_hop") {
        s.hops.set_default(parse_int(value, 0, name));
    } else if (is_engine_key(name)) {
        set_engine_value(s.params, name, value, 0);
    } else {
        throw ScenarioError(0, "unknown parameter '" + std::string(name) + "'");
    }
    validate_scenario(s);
}

// ---------------------------------------------------------------------------

std::int64_t Status::tenths() const { return round_half_up(10 * num_, den_); }

std::string Status::str() const {
    const auto t = tenths();
    return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

Status compute_status(Work vm_capacity, std::span<const Work> active_capacities) {
    Work sum = 0;
    for (auto c : active_capacities) sum += c;
    return Status(100 * sum, vm_capacity);
}

std::int64_t round_half_up(std::int64_t num, std::int64_t den) {
    const __int128 n = num, d = den;
    return static_cast<std::int64_t>((2 * n + d) / (2 * d));
}

Millis service_duration(Work job_capacity, Work vm_capacity, Millis mu_ms) {
    return std::max<Millis>(1, round_half_up(mu_ms * job_capacity, vm_capacity));
}

Millis remaining_duration(Millis original_duration, Millis elapsed, Work source_capacity, Work target_capacity) {
    const Millis left = original_duration - elapsed;
    if (left <= 0) return 0;
    return std::max<Millis>(1, round_half_up(left * source_capacity, target_capacity));
}

}  // namespace cloudlb
