#include <random>

#include <gtest/gtest.h>

#include "flowstat/characterizer.hpp"

using namespace flowstat;

namespace {

NormalProfile flow_profile(double mu, double sigma) {
    NormalProfile p;
    p.flow_mu = mu;
    p.flow_sigma = sigma;
    p.n_windows = 10;
    return p;
}

FlowKey key(const std::string& name) { return FlowKey{name, "v", Protocol::UDP, 9, 80}; }

WindowStats window(std::initializer_list<std::pair<const char*, Bytes>> flows) {
    WindowStats w;
    w.window = TimeWindow{400'000, 200'000};
    for (const auto& [n, b] : flows) w.per_flow_bytes[key(n)] = b;
    w.normalize();
    return w;
}

const ControlLimits kLimits = control_limits(flow_profile(1000, 100));

}  // namespace

TEST(ControlLimits, SixSigmaArithmetic) {
    EXPECT_EQ(kLimits, (ControlLimits{1300, 700, 1600, 400}));
}

TEST(ControlLimits, ZeroSigmaCollapses) {
    const auto l = control_limits(flow_profile(750, 0));
    EXPECT_EQ(l.ucl_ss, 750);
    EXPECT_EQ(l.lcl_ss, 750);
    EXPECT_EQ(l.ucl_as, 750);
    EXPECT_EQ(l.lcl_as, 750);
}

TEST(ControlLimits, LowerLimitsClampAtZero) {
    const auto l = control_limits(flow_profile(100, 50));
    EXPECT_EQ(l.lcl_as, 0.0);
    EXPECT_EQ(l.lcl_ss, 0.0);
    EXPECT_EQ(l.ucl_as, 400.0);
    EXPECT_LE(l.lcl_as, l.lcl_ss);
}

TEST(ClassifyFlow, Bands) {
    EXPECT_EQ(classify_flow(1250, kLimits), FlowState::NORMAL);
    EXPECT_EQ(classify_flow(1450, kLimits), FlowState::SUSPICIOUS);
    EXPECT_EQ(classify_flow(1700, kLimits), FlowState::ATTACK);
    EXPECT_EQ(classify_flow(500, kLimits), FlowState::SUSPICIOUS);
    EXPECT_EQ(classify_flow(399, kLimits), FlowState::ATTACK);
    // limits themselves belong to the inner band
    EXPECT_EQ(classify_flow(1300, kLimits), FlowState::NORMAL);
    EXPECT_EQ(classify_flow(700, kLimits), FlowState::NORMAL);
    EXPECT_EQ(classify_flow(1600, kLimits), FlowState::SUSPICIOUS);
    EXPECT_EQ(classify_flow(400, kLimits), FlowState::SUSPICIOUS);
}

TEST(ClassifyFlow, ZeroSigmaOnlyExactMeanIsNormal) {
    const auto l = control_limits(flow_profile(750, 0));
    EXPECT_EQ(classify_flow(750, l), FlowState::NORMAL);
    EXPECT_EQ(classify_flow(751, l), FlowState::ATTACK);
    EXPECT_EQ(classify_flow(749, l), FlowState::ATTACK);
}

TEST(ClassifyFlow, MonotoneOnUpperSide) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> mu(0, 10'000), sg(0, 3'000);
    for (int i = 0; i < 200; ++i) {
        const auto l = control_limits(flow_profile(mu(rng), sg(rng)));
        FlowState prev = FlowState::NORMAL;
        for (Bytes v = static_cast<Bytes>(mu(rng)); v < 40'000; v += 37) {
            if (v < l.ucl_ss) continue;  // upper side only
            const FlowState s = classify_flow(v, l);
            EXPECT_GE(static_cast<int>(s), static_cast<int>(prev));
            prev = s;
        }
    }
}

TEST(Characterize, ClassifiesEachFlow) {
    const auto ch = characterize(window({{"A", 1700}, {"B", 1000}, {"C", 1450}}), {}, kLimits);
    EXPECT_EQ(ch.attack_flows, FlowSet{key("A")});
    EXPECT_EQ(ch.suspicious_flows, FlowSet{key("C")});
    EXPECT_EQ(ch.normal_flows, FlowSet{key("B")});
    EXPECT_EQ(ch.window.start, 400'000);
}

TEST(Characterize, PreviouslyActiveAttackFlowIsDemoted) {
    const auto ch = characterize(window({{"A", 1700}, {"B", 1000}, {"C", 1450}}), {key("A")}, kLimits);
    EXPECT_TRUE(ch.attack_flows.empty());
    EXPECT_EQ(ch.suspicious_flows, (FlowSet{key("A"), key("C")}));
    EXPECT_EQ(ch.normal_flows, FlowSet{key("B")});
}

TEST(Characterize, PartitionAndExclusionOnRandomWindows) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<Bytes> bytes(1, 3000);
    std::bernoulli_distribution was_active(0.3);
    for (int round = 0; round < 500; ++round) {
        WindowStats w;
        FlowSet prev;
        for (int i = 0; i < 40; ++i) {
            const auto k = key("f" + std::to_string(i));
            w.per_flow_bytes[k] = bytes(rng);
            if (was_active(rng)) prev.insert(k);
        }
        w.normalize();
        const auto ch = characterize(w, prev, kLimits);
        std::size_t total = ch.attack_flows.size() + ch.suspicious_flows.size() + ch.normal_flows.size();
        EXPECT_EQ(total, w.flow_count);
        for (const auto& [k, _] : w.per_flow_bytes) {
            const int memberships = ch.attack_flows.contains(k) + ch.suspicious_flows.contains(k) +
                                    ch.normal_flows.contains(k);
            EXPECT_EQ(memberships, 1);
        }
        for (const auto& k : prev) EXPECT_FALSE(ch.attack_flows.contains(k));
    }
}

TEST(Characterize, GaussianNullCalibration) {
    const double mu = 1e6, sigma = 1e4;
    const auto lim = control_limits(flow_profile(mu, sigma));
    std::mt19937_64 rng(31337);
    std::normal_distribution<double> g(mu, sigma);
    const int n = 100'000;
    int outside_ss = 0, outside_as = 0;
    for (int i = 0; i < n; ++i) {
        const auto v = static_cast<Bytes>(std::llround(g(rng)));
        const FlowState s = classify_flow(v, lim);
        if (s != FlowState::NORMAL) ++outside_ss;
        if (s == FlowState::ATTACK) ++outside_as;
    }
    EXPECT_LE(outside_ss, n / 100);
    EXPECT_GE(outside_ss, n / 1000);
    EXPECT_LE(outside_as, n / 10'000);
}

TEST(CharacterizeAlerts, UsesImmediatelyPrecedingWindowAndSkipsQuietOnes) {
    std::vector<WindowStats> ws(3);
    for (int i = 0; i < 3; ++i) ws[i].window = TimeWindow{i * 200'000, 200'000};
    ws[0].per_flow_bytes[key("A")] = 1000;
    ws[1].per_flow_bytes[key("A")] = 5000;
    ws[1].per_flow_bytes[key("B")] = 5000;
    ws[2].per_flow_bytes[key("C")] = 5000;
    for (auto& w : ws) w.normalize();
    std::vector<DetectionOutcome> out(3);
    for (int i = 0; i < 3; ++i) out[i].window = ws[i].window;
    out[1].alert = out[2].alert = true;
    out[1].trigger = out[2].trigger = Trigger::FLOW;

    const auto chars = characterize_alerts(ws, out, kLimits);
    ASSERT_EQ(chars.size(), 2u);
    EXPECT_EQ(chars[0].window_index, 1u);
    EXPECT_EQ(chars[0].ch.attack_flows, FlowSet{key("B")});
    EXPECT_EQ(chars[0].ch.suspicious_flows, FlowSet{key("A")});
    EXPECT_EQ(chars[1].ch.attack_flows, FlowSet{key("C")});

    out[2].window.start += 1;
    EXPECT_THROW(characterize_alerts(ws, out, kLimits), ContractError);
}
