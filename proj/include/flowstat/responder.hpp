#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "flowstat/characterizer.hpp"
#include "flowstat/detector.hpp"
#include "flowstat/flow_model.hpp"

namespace flowstat {

inline constexpr double kDefaultStrengthCap = 10.0;

/// Relative volume excess over the volume threshold, (dx - xi_th) / xi_th.
/// Flow-only alerts have strength 0. With a zero threshold any positive
/// excess maps to `cap`.
inline double attack_strength(const DetectionOutcome& o, const Thresholds& th,
                              double cap = kDefaultStrengthCap) {
    if (!o.alert) throw ContractError("attack strength requested for a non-alerting window");
    if (o.dx <= th.xi_th()) return 0.0;
    if (th.xi_th() == 0.0) return cap;
    return (o.dx - th.xi_th()) / th.xi_th();
}

/// Suspicious flows pass 1 / (1 + strength) of their bytes; attack flows are dropped.
class ResponsePolicy {
public:
    explicit ResponsePolicy(double strength = 0.0) : strength_(std::max(0.0, strength)) {}

    double strength() const noexcept { return strength_; }
    double throttle_factor() const noexcept { return 1.0 / (1.0 + strength_); }

private:
    double strength_;
};

inline Bytes throttled_bytes(Bytes bytes, double factor) {
    return static_cast<Bytes>(std::floor(static_cast<double>(bytes) * factor));
}

inline WindowStats apply_response(const WindowStats& w, const Characterization& ch,
                                  const ResponsePolicy& policy) {
    if (ch.window != w.window) throw ContractError("characterization belongs to a different window");
    WindowStats out;
    out.window = w.window;
    const double factor = policy.throttle_factor();
    for (const auto& [key, bytes] : w.per_flow_bytes) {
        if (ch.attack_flows.contains(key)) continue;
        const Bytes kept = ch.suspicious_flows.contains(key) ? throttled_bytes(bytes, factor) : bytes;
        if (kept > 0) out.per_flow_bytes.emplace_hint(out.per_flow_bytes.end(), key, kept);
    }
    out.normalize();
    return out;
}

/// The characterization of a window after its response has been applied:
/// attack flows are gone and the throttled flows are not re-classified
/// within the same window, so nothing is left to act on.
inline Characterization residual(const Characterization& ch, const WindowStats& responded) {
    Characterization r;
    r.window = ch.window;
    r.normal_flows = responded.active_flows();
    return r;
}

struct WindowResponse {
    Characterization ch;
    ResponsePolicy policy;
};

/// Record-level counterpart of apply_response: drops attack-flow records and
/// truncates each suspicious flow's records in a window to its throttled byte
/// budget. Re-aggregating the result reproduces apply_response per window.
/// `responses` maps window start to the response of that window; windows
/// without an entry pass untouched.
inline Trace respond_trace(const Trace& trace, const std::map<Micros, WindowResponse>& responses,
                           Micros delta, Micros t0 = 0) {
    if (delta <= 0) throw InvalidParameter("window delta must be positive");
    // Per-window byte totals are needed up front to size each suspicious budget.
    std::map<std::pair<Micros, FlowKey>, Bytes> budget;
    for (const auto& rec : trace) {
        const Micros start = t0 + ((rec.ts - t0) / delta) * delta;
        auto it = responses.find(start);
        if (it == responses.end() || !it->second.ch.suspicious_flows.contains(rec.flow)) continue;
        budget[{start, rec.flow}] += rec.bytes;
    }
    for (auto& [key, total] : budget)
        total = throttled_bytes(total, responses.at(key.first).policy.throttle_factor());

    Trace out;
    out.reserve(trace.size());
    for (const auto& rec : trace) {
        const Micros start = t0 + ((rec.ts - t0) / delta) * delta;
        auto it = responses.find(start);
        if (it == responses.end()) {
            out.push_back(rec);
            continue;
        }
        const Characterization& ch = it->second.ch;
        if (ch.attack_flows.contains(rec.flow)) continue;
        if (!ch.suspicious_flows.contains(rec.flow)) {
            out.push_back(rec);
            continue;
        }
        Bytes& left = budget[{start, rec.flow}];
        if (left == 0) continue;
        PacketRecord kept = rec;
        kept.bytes = std::min(rec.bytes, left);
        left -= kept.bytes;
        out.push_back(std::move(kept));
    }
    return out;
}

}  // namespace flowstat
