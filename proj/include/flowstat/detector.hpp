#pragma once

#include <cstdint>
#include <string_view>

#include "flowstat/baseline.hpp"
#include "flowstat/error.hpp"
#include "flowstat/flow_model.hpp"

namespace flowstat {

inline constexpr int kDefaultTolerance = 6;

/// Detection thresholds: volume threshold r * sigma_v and flow threshold
/// r * sigma_f. Only make_thresholds() can build one.
class Thresholds {
public:
    double xi_th() const noexcept { return xi_th_; }
    double zeta_th() const noexcept { return zeta_th_; }
    int r() const noexcept { return r_; }

    bool built_from(const NormalProfile& p) const noexcept {
        return sigma_v_ == p.sigma_v && sigma_f_ == p.sigma_f;
    }

    friend Thresholds make_thresholds(const NormalProfile& profile, int r);

private:
    Thresholds() = default;

    double xi_th_ = 0.0;
    double zeta_th_ = 0.0;
    int r_ = 1;
    double sigma_v_ = 0.0;
    double sigma_f_ = 0.0;
};

inline Thresholds make_thresholds(const NormalProfile& profile, int r) {
    if (r < 1) throw InvalidParameter("tolerance factor r must be >= 1, got " + std::to_string(r));
    Thresholds th;
    th.r_ = r;
    th.sigma_v_ = profile.sigma_v;
    th.sigma_f_ = profile.sigma_f;
    th.xi_th_ = static_cast<double>(r) * profile.sigma_v;
    th.zeta_th_ = static_cast<double>(r) * profile.sigma_f;
    return th;
}

enum class Trigger : std::uint8_t { NONE, VOLUME, FLOW, BOTH };

inline std::string_view to_string(Trigger t) {
    switch (t) {
        case Trigger::VOLUME: return "VOLUME";
        case Trigger::FLOW: return "FLOW";
        case Trigger::BOTH: return "BOTH";
        case Trigger::NONE: break;
    }
    return "NONE";
}

inline bool parse_trigger(std::string_view s, Trigger& out) {
    if (s == "NONE") { out = Trigger::NONE; return true; }
    if (s == "VOLUME") { out = Trigger::VOLUME; return true; }
    if (s == "FLOW") { out = Trigger::FLOW; return true; }
    if (s == "BOTH") { out = Trigger::BOTH; return true; }
    return false;
}

struct DetectionOutcome {
    TimeWindow window;
    Bytes x_in = 0;
    std::uint64_t f_in = 0;
    double dx = 0.0;  // x_in - x_star
    double df = 0.0;  // f_in - f_star
    bool alert = false;
    Trigger trigger = Trigger::NONE;

    friend bool operator==(const DetectionOutcome&, const DetectionOutcome&) = default;
};

namespace detail {

inline DetectionOutcome deviations(const WindowStats& w, const NormalProfile& p,
                                   const Thresholds& th) {
    if (!th.built_from(p)) throw ContractError("thresholds were built from a different profile");
    DetectionOutcome o;
    o.window = w.window;
    o.x_in = w.volume_bytes;
    o.f_in = w.flow_count;
    o.dx = static_cast<double>(w.volume_bytes) - p.x_star;
    o.df = static_cast<double>(w.flow_count) - p.f_star;
    return o;
}

}  // namespace detail

/// Dual-metric test: alert on a strict upward exceedance of either the volume
/// or the flow-count threshold. Equality does not alert.
inline DetectionOutcome detect(const WindowStats& w, const NormalProfile& p, const Thresholds& th) {
    DetectionOutcome o = detail::deviations(w, p, th);
    const bool vol = o.dx > th.xi_th();
    const bool flow = o.df > th.zeta_th();
    o.alert = vol || flow;
    o.trigger = vol && flow ? Trigger::BOTH : vol ? Trigger::VOLUME : flow ? Trigger::FLOW : Trigger::NONE;
    return o;
}

/// Volume-only baseline detector.
inline DetectionOutcome vba_detect(const WindowStats& w, const NormalProfile& p, const Thresholds& th) {
    DetectionOutcome o = detail::deviations(w, p, th);
    o.alert = o.dx > th.xi_th();
    o.trigger = o.alert ? Trigger::VOLUME : Trigger::NONE;
    return o;
}

enum class DetectorKind : std::uint8_t { Combined, VolumeOnly };

inline std::vector<DetectionOutcome> detect_all(const std::vector<WindowStats>& windows,
                                                const NormalProfile& p, const Thresholds& th,
                                                DetectorKind kind = DetectorKind::Combined) {
    std::vector<DetectionOutcome> out;
    out.reserve(windows.size());
    for (const auto& w : windows)
        out.push_back(kind == DetectorKind::Combined ? detect(w, p, th) : vba_detect(w, p, th));
    return out;
}

}  // namespace flowstat
