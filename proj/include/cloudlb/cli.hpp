#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cloudlb/policies.hpp"

namespace cloudlb::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInputError = 2, kEngineAbort = 3, kIoError = 4 };

enum class Subcommand { Run, Compare, Sweep, Validate };

struct SweepSpec {
    std::string parameter;
    std::vector<std::string> values;
};

struct CliInvocation {
    Subcommand subcommand = Subcommand::Run;
    std::string scenario_path;
    std::optional<PolicyKind> policy;  // run only
    std::string output_dir = ".";
    bool trace = false;
    std::optional<SweepSpec> sweep;  // sweep only
    long long horizon = 1'000'000'000;
};

/// Parses "name=v1,v2,...". Returns nullopt on a malformed spec.
std::optional<SweepSpec> parse_sweep_spec(const std::string& text);

/// Writes every (file name, content) pair into `dir`, or none of them.
/// Creates `dir` if needed. Returns false on any I/O failure.
bool write_files_atomically(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files,
                            std::string* error = nullptr);

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_validate(const CliInvocation& inv, std::ostream& out, std::ostream& err);

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err);

}  // namespace cloudlb::cli
