#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "flowstat/baseline.hpp"
#include "flowstat/detector.hpp"
#include "flowstat/error.hpp"
#include "flowstat/trafficgen.hpp"

namespace flowstat {

/// Window mode scores every window; campaign mode counts the attack interval
/// as one event, detected iff any of its windows alerts. False alarms are
/// counted per normal window in both modes.
enum class ScoreMode : std::uint8_t { Window, Campaign };

inline std::string_view to_string(ScoreMode m) {
    return m == ScoreMode::Campaign ? "campaign" : "window";
}

inline bool parse_score_mode(std::string_view s, ScoreMode& out) {
    if (s == "window") { out = ScoreMode::Window; return true; }
    if (s == "campaign") { out = ScoreMode::Campaign; return true; }
    return false;
}

struct Metrics {
    std::uint64_t d = 0;
    std::uint64_t n = 0;
    std::uint64_t f = 0;
    std::uint64_t m = 0;
    std::optional<double> r_d;   // nullopt when n == 0
    std::optional<double> r_fp;  // nullopt when m == 0
    /// Windows from the attack-start window to the first alert inside the
    /// attack interval; nullopt when the attack went undetected.
    std::optional<std::int64_t> latency_windows;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct RocPoint {
    int r = 1;
    std::optional<double> r_d;
    std::optional<double> r_fp;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

namespace detail {

inline std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

inline Metrics evaluate_run(const std::vector<DetectionOutcome>& outcomes, const GroundTruth& truth,
                            ScoreMode mode = ScoreMode::Window) {
    if (outcomes.size() != truth.labels.size())
        throw ContractError("outcomes cover " + std::to_string(outcomes.size()) +
                            " windows but ground truth labels " +
                            std::to_string(truth.labels.size()));
    Metrics mt;
    bool any_attack = false;
    bool campaign_hit = false;
    std::size_t i = 0;
    for (const auto& [start, is_attack] : truth.labels) {
        const DetectionOutcome& o = outcomes[i];
        if (o.window.start != start)
            throw ContractError("outcome " + std::to_string(i) + " starts at " +
                                std::to_string(o.window.start) + ", truth window at " +
                                std::to_string(start));
        if (is_attack) {
            any_attack = true;
            ++mt.n;
            if (o.alert) {
                ++mt.d;
                campaign_hit = true;
            }
        } else {
            ++mt.m;
            if (o.alert) ++mt.f;
        }
        ++i;
    }
    if (mode == ScoreMode::Campaign) {
        mt.n = any_attack ? 1 : 0;
        mt.d = campaign_hit ? 1 : 0;
    }
    mt.r_d = detail::ratio(mt.d, mt.n);
    mt.r_fp = detail::ratio(mt.f, mt.m);

    if (any_attack && truth.delta_us > 0 && !outcomes.empty()) {
        const Micros origin = outcomes.front().window.start;
        const auto ta_index = (truth.t_a_us - origin) / truth.delta_us;
        for (std::size_t k = static_cast<std::size_t>(std::max<Micros>(0, ta_index)); k < outcomes.size(); ++k) {
            if (outcomes[k].window.start >= truth.t_b_us) break;
            if (outcomes[k].alert) {
                mt.latency_windows = static_cast<std::int64_t>(k) - ta_index;
                break;
            }
        }
    }
    return mt;
}

inline std::vector<RocPoint> roc_sweep(const std::vector<WindowStats>& windows, const GroundTruth& truth,
                                       const NormalProfile& profile, std::vector<int> r_values,
                                       DetectorKind kind = DetectorKind::Combined) {
    if (r_values.empty()) throw InvalidParameter("r sweep needs at least one value");
    std::sort(r_values.begin(), r_values.end());
    if (std::adjacent_find(r_values.begin(), r_values.end()) != r_values.end())
        throw InvalidParameter("r sweep values must be distinct");
    std::vector<RocPoint> out;
    for (int r : r_values) {
        const Thresholds th = make_thresholds(profile, r);
        const Metrics mt = evaluate_run(detect_all(windows, profile, th, kind), truth);
        out.push_back({r, mt.r_d, mt.r_fp});
    }
    return out;
}

inline void check_delta(const NormalProfile& profile, Micros delta) {
    if (profile.delta_us != delta)
        throw ContractError("profile was trained with " + std::to_string(profile.delta_us) +
                            " us windows but the trace is windowed at " + std::to_string(delta) + " us");
}

inline std::vector<WindowStats> scenario_windows(const Scenario& s) {
    return window_stream(s.trace, s.truth.delta_us, 0);
}

inline std::vector<RocPoint> roc_sweep(const Scenario& s, const NormalProfile& profile,
                                       std::vector<int> r_values) {
    check_delta(profile, s.truth.delta_us);
    return roc_sweep(scenario_windows(s), s.truth, profile, std::move(r_values));
}

struct Comparison {
    Metrics combined;
    Metrics vba;
};

inline Comparison compare_vba(const std::vector<WindowStats>& windows, const GroundTruth& truth,
                              const NormalProfile& profile, int r, ScoreMode mode = ScoreMode::Window) {
    const Thresholds th = make_thresholds(profile, r);
    return {evaluate_run(detect_all(windows, profile, th, DetectorKind::Combined), truth, mode),
            evaluate_run(detect_all(windows, profile, th, DetectorKind::VolumeOnly), truth, mode)};
}

inline Comparison compare_vba(const Scenario& s, const NormalProfile& profile, int r,
                              ScoreMode mode = ScoreMode::Window) {
    check_delta(profile, s.truth.delta_us);
    return compare_vba(scenario_windows(s), s.truth, profile, r, mode);
}

/// Profile trained on the attack-free companion of `cfg`.
inline NormalProfile train_on_null(const ScenarioConfig& cfg) {
    const Scenario null = build_scenario(null_config(cfg));
    return train_profile(scenario_windows(null));
}

}  // namespace flowstat
