#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "cloudlb/scenario.hpp"

namespace fixtures {

// Small scenarios whose schedules were traced by hand.
struct Fixture {
    std::string name;
    std::string text;
    std::map<std::string, long long> baseline;
    std::map<std::string, long long> enhanced;
};

const std::vector<Fixture>& hand_traced();

std::string scenario_path(const std::string& file);
std::string read_file(const std::string& path);
cloudlb::Scenario tables23();

struct RandomLimits {
    int max_vms = 10;
    int max_jobs = 30;
    bool allow_rejection = true;
    bool simultaneous = false;  // all arrivals at t=0
};

cloudlb::Scenario random_scenario(std::mt19937_64& rng, const RandomLimits& lim);

}  // namespace fixtures
