#include <cmath>

#include <gtest/gtest.h>

#include "flowstat/trafficgen.hpp"

using namespace flowstat;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig c;
    c.duration_s = 12.0;
    c.t_a = 4.0;
    c.t_b = 8.0;
    c.n_clients = 5;
    c.client_request_rate = 20.0;
    c.client_request_bytes = 2500;
    c.n_zombies = 3;
    c.attack_rate_mbps = 0.5;
    c.seed = 17;
    return c;
}

}  // namespace

TEST(GenLegitimate, PoissonRequestCountConcentrates) {
    ScenarioConfig c;
    c.n_clients = 1;
    c.client_request_rate = 10.0;
    c.duration_s = 100.0;
    c.t_a = c.t_b = 0.0;
    c.client_request_bytes = 125'000;
    c.packet_bytes = 1000;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        c.seed = seed;
        const Trace t = gen_legitimate(c);
        ASSERT_EQ(t.size() % 125, 0u);
        const double requests = static_cast<double>(t.size() / 125);
        EXPECT_NEAR(requests, 1000.0, 4.0 * std::sqrt(1000.0));
    }
}

TEST(GenLegitimate, RequestBurstSplitsIntoPackets) {
    ScenarioConfig c = small_config();
    const Trace t = gen_legitimate(c);
    ASSERT_FALSE(t.empty());
    // 2500 B -> 1000 + 1000 + 500 at one epoch
    EXPECT_EQ(t.size() % 3, 0u);
    Bytes total = 0;
    for (const auto& r : t) {
        total += r.bytes;
        EXPECT_EQ(r.flow.proto, Protocol::TCP);
        EXPECT_LT(r.ts, c.duration_us());
    }
    EXPECT_EQ(total % 2500, 0u);
    EXPECT_TRUE(std::is_sorted(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.ts < b.ts; }));
}

TEST(GenLegitimate, ZeroDurationIsEmpty) {
    ScenarioConfig c;
    c.duration_s = 0.0;
    c.t_a = c.t_b = 0.0;
    EXPECT_TRUE(gen_legitimate(c).empty());
}

TEST(GenLegitimate, DeterministicInSeed) {
    const ScenarioConfig c = small_config();
    EXPECT_EQ(gen_legitimate(c), gen_legitimate(c));
    ScenarioConfig d = c;
    d.seed = c.seed + 1;
    EXPECT_NE(gen_legitimate(c), gen_legitimate(d));
}

TEST(GenLegitimate, OneFlowPerClient) {
    const Trace t = gen_legitimate(small_config());
    FlowSet flows;
    for (const auto& r : t) flows.insert(r.flow);
    EXPECT_EQ(flows.size(), 5u);
}

TEST(GenAttack, FirstWindowAtPointOneMbpsCarriesTwoPackets) {
    ScenarioConfig c = small_config();
    c.n_zombies = 1;
    c.attack_rate_mbps = 0.1;
    const Scenario s = gen_attack(c);
    const TimeWindow first{c.t_a_us(), 200'000};
    int in_first = 0;
    for (const auto& r : s.trace) in_first += first.contains(r.ts) ? 1 : 0;
    EXPECT_EQ(in_first, 2);
    // 12 500 B/s over 4 s
    EXPECT_EQ(s.trace.size(), 49u);
    EXPECT_EQ(s.trace.front().flow.proto, Protocol::UDP);
}

TEST(GenAttack, EmptyInterval) {
    ScenarioConfig c = small_config();
    c.t_b = c.t_a;
    const Scenario s = gen_attack(c);
    EXPECT_TRUE(s.trace.empty());
    EXPECT_EQ(s.truth.attack_flow_keys.size(), 3u);
}

TEST(GenAttack, ByteBudgetWithinOnePacketPerZombie) {
    for (double mbps : {0.1, 0.37, 1.0, 3.5}) {
        ScenarioConfig c = small_config();
        c.attack_rate_mbps = mbps;
        c.n_zombies = 7;
        const Scenario s = gen_attack(c);
        const double budget = c.n_zombies * mbps * 1e6 / 8.0 * (c.t_b - c.t_a);
        const double got = static_cast<double>(total_bytes(s.trace));
        EXPECT_LE(std::abs(got - budget), static_cast<double>(c.n_zombies * c.packet_bytes) + 1e-6) << mbps;
    }
}

TEST(GenAttack, RateFidelityOverTenSeconds) {
    ScenarioConfig c = small_config();
    c.duration_s = 20;
    c.t_a = 5;
    c.t_b = 15;
    c.n_zombies = 4;
    for (double mbps : {0.1, 0.8, 3.0}) {
        c.attack_rate_mbps = mbps;
        const Scenario s = gen_attack(c);
        std::map<FlowKey, Bytes> per_zombie;
        for (const auto& r : s.trace) per_zombie[r.flow] += r.bytes;
        ASSERT_EQ(per_zombie.size(), 4u);
        for (const auto& [_, b] : per_zombie) {
            const double rate_mbps = static_cast<double>(b) * 8.0 / (c.t_b - c.t_a) / 1e6;
            EXPECT_NEAR(rate_mbps, mbps, 0.01 * mbps);
        }
    }
}

TEST(GenAttack, NeedsZombies) {
    ScenarioConfig c = small_config();
    c.n_zombies = 0;
    EXPECT_THROW(gen_attack(c), ValidationError);
}

TEST(BuildScenario, TimelineAttackWindowsMatchInterval) {
    const Scenario s = build_scenario(preset_config(Preset::Timeline, 3));
    for (const auto& [start, attack] : s.truth.labels) {
        const bool inside = start + 200'000 > 25'000'000 && start < 50'000'000;
        EXPECT_EQ(attack, inside) << start;
    }
    EXPECT_EQ(s.truth.labels.size(), 375u);
}

TEST(BuildScenario, NoZombiesMeansNoAttackLabels) {
    ScenarioConfig c = small_config();
    c.n_zombies = 0;
    const Scenario s = build_scenario(c);
    EXPECT_FALSE(s.truth.labels.empty());
    for (const auto& [_, attack] : s.truth.labels) EXPECT_FALSE(attack);
    EXPECT_TRUE(s.truth.attack_flow_keys.empty());
}

TEST(BuildScenario, ConservesRecordsAndLabelsSoundly) {
    const ScenarioConfig c = small_config();
    const Scenario s = build_scenario(c);
    EXPECT_EQ(s.trace.size(), gen_legitimate(c).size() + gen_attack(c).trace.size());
    EXPECT_TRUE(std::is_sorted(s.trace.begin(), s.trace.end(), [](const auto& a, const auto& b) { return a.ts < b.ts; }));
    std::map<Micros, bool> seen;
    for (const auto& r : s.trace) seen[(r.ts / 200'000) * 200'000] |= s.truth.attack_flow_keys.contains(r.flow);
    for (const auto& [start, attack] : s.truth.labels) EXPECT_EQ(attack, seen[start]) << start;
    EXPECT_EQ(build_scenario(c).trace, s.trace);
}

TEST(ScenarioConfig, ValidationListsEveryViolatedField) {
    ScenarioConfig c;
    c.delta_ms = 0;
    c.n_zombies = 2;
    c.attack_rate_mbps = -1;
    c.t_b = 99;
    try {
        validate(c);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.fields(), (std::vector<std::string>{"delta_ms", "attack_rate_mbps", "t_b"}));
    }
}

TEST(Presets, AreValidAndNamed) {
    for (Preset p : {Preset::HighRate, Preset::LowRate, Preset::VaryingRate, Preset::MixedLoad, Preset::Timeline}) {
        EXPECT_TRUE(config_violations(preset_config(p)).empty());
        Preset back{};
        ASSERT_TRUE(parse_preset(to_string(p), back));
        EXPECT_EQ(back, p);
    }
    const auto nc = null_config(preset_config(Preset::LowRate, 5));
    EXPECT_EQ(nc.n_zombies, 0);
    EXPECT_NE(nc.seed, 5u);
    EXPECT_EQ(varying_rate_series().size(), 7u);
}
