#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef CLOUDLB_SCENARIO_DIR
#define CLOUDLB_SCENARIO_DIR "scenarios"
#endif

namespace fixtures {

const std::vector<Fixture>& hand_traced() {
    static const std::vector<Fixture> all = {
        {"single_job",
         "[jobs]\nJ 1000 0\n[vms]\nV 1000\n",
         {{"J", 500}},
         {{"J", 500}}},

        // A lands on the slow VM under both policies. The enhanced manager
        // cannot move it at t=50 (B still holds V2, C holds V3); at t=100
        // V2 is idle, A has 4900 ms left, 490 ms on V2, hop 10.
        {"running_victim_moves",
         "[jobs]\nA 1000 0\nB 100 0\nC 1000 0\n[vms]\nV1 100\nV2 1000\nV3 1000\n",
         {{"A", 5000}, {"B", 50}, {"C", 500}},
         {{"A", 600}, {"B", 50}, {"C", 500}}},

        // Ingress hop steers P to V2. Q queues behind R on V1 and leaves
        // at the first tick: wait 100 on V1 against hop 10, 40 ms on V2.
        // Baseline: Q waits exactly the horizon behind P.
        {"queued_victim_moves",
         "[jobs]\nP 5000 0\nR 300 0\nQ 800 0\n[vms]\nV1 1000\nV2 10000\n[hops]\n@ingress V1 20\n",
         {{"P", 2500}, {"R", 15}, {"Q", 2900}},
         {{"P", 250}, {"Q", 100}, {"R", 150}}},

        // The baseline index still counts A on V1 when B arrives at 110
        // (de-allocation lands at 125), so B goes to the slow VM.
        {"stale_index",
         "[jobs]\nA 200 0\nB 1000 110\n[vms]\nV1 1000\nV2 100\n",
         {{"A", 100}, {"B", 5000}},
         {{"A", 100}, {"B", 500}}},

        // One VM, FIFO queue: C waits for an idle VM, D may not overtake C.
        {"fifo_single_vm",
         "[jobs]\nA 600 0\nB 400 0\nC 700 0\nD 300 0\n[vms]\nV 1000\n",
         {{"A", 300}, {"B", 200}, {"C", 650}, {"D", 450}},
         {{"A", 300}, {"B", 200}, {"C", 650}, {"D", 450}}},
    };
    return all;
}

std::string scenario_path(const std::string& file) { return std::string(CLOUDLB_SCENARIO_DIR) + "/" + file; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

cloudlb::Scenario tables23() { return cloudlb::parse_scenario(read_file(scenario_path("tables23.scn"))); }

cloudlb::Scenario random_scenario(std::mt19937_64& rng, const RandomLimits& lim) {
    auto pick = [&](long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng); };
    auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    static const long long kCaps[] = {100, 500, 1000, 2000, 10000, 100000};
    auto capacity = [&] { return chance(0.5) ? kCaps[pick(0, 5)] : pick(1, 20000); };

    cloudlb::Scenario s;
    const int nv = static_cast<int>(pick(1, lim.max_vms));
    const int nj = static_cast<int>(pick(1, lim.max_jobs));
    for (int v = 0; v < nv; ++v) s.vms.push_back({"V" + std::to_string(v + 1), capacity()});
    for (int j = 0; j < nj; ++j)
        s.jobs.push_back({"J" + std::to_string(j + 1), capacity(), lim.simultaneous ? 0 : pick(0, 2000)});

    const long long far = chance(0.15) ? 10000 : 0;
    s.hops = cloudlb::HopMatrix(far ? far : pick(0, 100));
    for (int v = 0; v < nv; ++v) {
        if (chance(0.3)) s.hops.set(std::string(cloudlb::kIngress), s.vms[v].id, pick(0, 60));
        for (int w = 0; w < nv; ++w)
            if (v != w && chance(0.2)) s.hops.set(s.vms[v].id, s.vms[w].id, far ? far + pick(0, 100) : pick(0, 300));
    }

    auto& p = s.params;
    p.mu_ms = chance(0.5) ? 500 : pick(1, 1000);
    p.monitor_interval = pick(1, 200);
    p.overload_threshold = chance(0.6) ? 100 : pick(30, 200);
    p.baseline_sync_delay = pick(0, 100);
    p.deadlock_horizon = pick(50, 5000);
    p.migration_cooldown = pick(0, 300);
    if (lim.allow_rejection && chance(0.2)) p.rejection_timeout = pick(1, 3000);
    cloudlb::validate_scenario(s);
    return s;
}

}  // namespace fixtures
