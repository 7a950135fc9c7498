#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "flowstat/baseline.hpp"
#include "flowstat/detector.hpp"
#include "flowstat/flow_model.hpp"

namespace flowstat {

/// Six-sigma bands on per-flow window byte counts: the 3-sigma band bounds
/// the normal state, the 6-sigma band the suspicious state. Lower limits are
/// clamped at zero since byte counts cannot go negative.
struct ControlLimits {
    double ucl_ss = 0.0;
    double lcl_ss = 0.0;
    double ucl_as = 0.0;
    double lcl_as = 0.0;

    friend bool operator==(const ControlLimits&, const ControlLimits&) = default;
};

inline ControlLimits control_limits(const NormalProfile& p) {
    const double mu = p.flow_mu;
    const double s = p.flow_sigma;
    return ControlLimits{
        .ucl_ss = mu + 3.0 * s,
        .lcl_ss = std::max(0.0, mu - 3.0 * s),
        .ucl_as = mu + 6.0 * s,
        .lcl_as = std::max(0.0, mu - 6.0 * s),
    };
}

// Ordered by severity.
enum class FlowState : std::uint8_t { NORMAL = 0, SUSPICIOUS = 1, ATTACK = 2 };

inline std::string_view to_string(FlowState s) {
    switch (s) {
        case FlowState::SUSPICIOUS: return "SUSPICIOUS";
        case FlowState::ATTACK: return "ATTACK";
        case FlowState::NORMAL: break;
    }
    return "NORMAL";
}

inline bool parse_flow_state(std::string_view s, FlowState& out) {
    if (s == "NORMAL") { out = FlowState::NORMAL; return true; }
    if (s == "SUSPICIOUS") { out = FlowState::SUSPICIOUS; return true; }
    if (s == "ATTACK") { out = FlowState::ATTACK; return true; }
    return false;
}

inline FlowState classify_flow(Bytes bytes_in_window, const ControlLimits& lim) {
    const double v = static_cast<double>(bytes_in_window);
    if (v > lim.ucl_as || v < lim.lcl_as) return FlowState::ATTACK;
    if (v >= lim.lcl_ss && v <= lim.ucl_ss) return FlowState::NORMAL;
    return FlowState::SUSPICIOUS;
}

struct Characterization {
    TimeWindow window;
    FlowSet attack_flows;
    FlowSet suspicious_flows;
    FlowSet normal_flows;

    std::optional<FlowState> state_of(const FlowKey& k) const {
        if (attack_flows.contains(k)) return FlowState::ATTACK;
        if (suspicious_flows.contains(k)) return FlowState::SUSPICIOUS;
        if (normal_flows.contains(k)) return FlowState::NORMAL;
        return std::nullopt;
    }

    friend bool operator==(const Characterization&, const Characterization&) = default;
};

/// Classifies every active flow of `w`. A flow that would be an attack flow
/// but was already active in the preceding window is demoted to suspicious:
/// attack flows are assumed to start together.
inline Characterization characterize(const WindowStats& w, const FlowSet& prev_active,
                                     const ControlLimits& lim) {
    Characterization ch;
    ch.window = w.window;
    for (const auto& [key, bytes] : w.per_flow_bytes) {
        FlowState s = classify_flow(bytes, lim);
        if (s == FlowState::ATTACK && prev_active.contains(key)) s = FlowState::SUSPICIOUS;
        switch (s) {
            case FlowState::ATTACK: ch.attack_flows.insert(ch.attack_flows.end(), key); break;
            case FlowState::SUSPICIOUS: ch.suspicious_flows.insert(ch.suspicious_flows.end(), key); break;
            case FlowState::NORMAL: ch.normal_flows.insert(ch.normal_flows.end(), key); break;
        }
    }
    return ch;
}

struct WindowCharacterization {
    std::size_t window_index = 0;
    Characterization ch;
};

/// Characterizes the alerting windows of a run. outcomes[i] must describe windows[i].
inline std::vector<WindowCharacterization> characterize_alerts(
    const std::vector<WindowStats>& windows, const std::vector<DetectionOutcome>& outcomes,
    const ControlLimits& lim) {
    if (windows.size() != outcomes.size())
        throw ContractError("window and outcome sequences differ in length");
    std::vector<WindowCharacterization> out;
    const FlowSet none;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (outcomes[i].window != windows[i].window)
            throw ContractError("outcome " + std::to_string(i) + " does not match its window");
        if (!outcomes[i].alert) continue;
        const FlowSet prev = i > 0 ? windows[i - 1].active_flows() : none;
        out.push_back({i, characterize(windows[i], prev, lim)});
    }
    return out;
}

}  // namespace flowstat
