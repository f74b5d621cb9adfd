#include <iostream>

#include <CLI11.hpp>

#include "cloudlb/cli.hpp"

using namespace cloudlb;

int main(int argc, char** argv) {
    CLI::App app{"Cloud datacenter load-balancing simulator"};
    app.require_subcommand(1);

    cli::CliInvocation inv;
    std::string policy_name;
    std::string sweep_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", inv.scenario_path, "Scenario file")->required();
        sub->add_option("--out", inv.output_dir, "Output directory")->capture_default_str();
        sub->add_flag("--trace", inv.trace, "Write event traces");
        sub->add_option("--horizon", inv.horizon, "Abort once simulated time passes this many ms")
            ->capture_default_str();
    };

    auto* run = app.add_subcommand("run", "Run one policy");
    add_common(run);
    run->add_option("--policy", policy_name, "baseline | enhanced")
        ->required()
        ->check(CLI::IsMember({"baseline", "enhanced"}));

    auto* compare = app.add_subcommand("compare", "Run both policies and compare them");
    add_common(compare);

    auto* sweep = app.add_subcommand("sweep", "Compare both policies across parameter values");
    add_common(sweep);
    sweep->add_option("--sweep", sweep_text, "<param>=<v1,v2,...>")->required();

    auto* validate = app.add_subcommand("validate", "Check a scenario file and print its normalized form");
    validate->add_option("--scenario", inv.scenario_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : cli::kUsage;
    }

    if (run->parsed()) {
        inv.subcommand = cli::Subcommand::Run;
        inv.policy = parse_policy(policy_name);
    } else if (compare->parsed()) {
        inv.subcommand = cli::Subcommand::Compare;
    } else if (sweep->parsed()) {
        inv.subcommand = cli::Subcommand::Sweep;
        inv.sweep = cli::parse_sweep_spec(sweep_text);
        if (!inv.sweep) {
            std::cerr << "error: malformed --sweep '" << sweep_text << "', expected <param>=<v1,v2,...>\n";
            return cli::kUsage;
        }
    } else {
        inv.subcommand = cli::Subcommand::Validate;
    }
    return cli::dispatch(inv, std::cout, std::cerr);
}
