#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowstat/error.hpp"
#include "flowstat/flow_model.hpp"

namespace flowstat {

/// Synthetic scenario: Poisson legitimate clients (one TCP flow each) plus
/// constant-bit-rate UDP attack daemons active in [t_a, t_b).
struct ScenarioConfig {
    double duration_s = 75.0;
    int delta_ms = 200;
    int n_clients = 40;
    double client_request_rate = 500.0;  // requests/s per client
    std::uint64_t client_request_bytes = 400;
    int n_zombies = 0;
    double attack_rate_mbps = 0.1;  // per daemon
    double t_a = 25.0;
    double t_b = 50.0;
    std::uint64_t seed = 1;
    std::uint64_t packet_bytes = 1000;

    Micros duration_us() const { return std::llround(duration_s * 1e6); }
    Micros delta_us() const { return static_cast<Micros>(delta_ms) * 1000; }
    Micros t_a_us() const { return std::llround(t_a * 1e6); }
    Micros t_b_us() const { return std::llround(t_b * 1e6); }

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Names of violated fields; empty when the config is valid.
inline std::vector<std::string> config_violations(const ScenarioConfig& c) {
    std::vector<std::string> bad;
    if (!(c.duration_s >= 0.0) || !std::isfinite(c.duration_s)) bad.emplace_back("duration_s");
    if (c.delta_ms <= 0) bad.emplace_back("delta_ms");
    if (c.n_clients < 0) bad.emplace_back("n_clients");
    if (c.n_clients > 0 && !(c.client_request_rate > 0.0)) bad.emplace_back("client_request_rate");
    if (c.n_clients > 0 && c.client_request_bytes == 0) bad.emplace_back("client_request_bytes");
    if (c.n_zombies < 0) bad.emplace_back("n_zombies");
    if (c.n_zombies > 0 && !(c.attack_rate_mbps > 0.0)) bad.emplace_back("attack_rate_mbps");
    if (!(c.t_a >= 0.0)) bad.emplace_back("t_a");
    // t_a == t_b is tolerated as an empty attack interval.
    if (!(c.t_b >= c.t_a) || !(c.t_b <= c.duration_s)) bad.emplace_back("t_b");
    if (c.packet_bytes == 0) bad.emplace_back("packet_bytes");
    return bad;
}

inline void validate(const ScenarioConfig& c) {
    if (auto bad = config_violations(c); !bad.empty()) throw ValidationError(std::move(bad));
}

struct GroundTruth {
    Micros t_a_us = 0;
    Micros t_b_us = 0;
    Micros delta_us = kDefaultWindowUs;
    FlowSet attack_flow_keys;
    /// window start -> attack traffic present
    std::map<Micros, bool> labels;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Scenario {
    Trace trace;
    GroundTruth truth;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::string dotted(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return std::to_string(a) + "." + std::to_string(b) + "." + std::to_string(c) + "." +
           std::to_string(d);
}

// Hosts numbered from .0.1 inside a /16.
inline std::string host_address(std::uint32_t a, std::uint32_t b, int index) {
    const auto i = static_cast<std::uint32_t>(index) + 1;
    return dotted(a, b + ((i >> 16) & 0xff), (i >> 8) & 0xff, i & 0xff);
}

inline const std::string kVictim = "192.0.2.1";

}  // namespace detail

inline FlowKey client_flow(int index) {
    return FlowKey{detail::host_address(10, 1, index), detail::kVictim, Protocol::TCP,
                   static_cast<std::uint16_t>(1024 + index % 60000), 80};
}

inline FlowKey zombie_flow(int index) {
    return FlowKey{detail::host_address(172, 16, index), detail::kVictim, Protocol::UDP,
                   static_cast<std::uint16_t>(4000 + index % 60000), 80};
}

/// Per-window attack labels for `trace`, one entry per window from 0 to the
/// window of the last record.
inline std::map<Micros, bool> label_windows(const Trace& trace, const FlowSet& attack_keys,
                                            Micros delta) {
    std::map<Micros, bool> labels;
    if (trace.empty()) return labels;
    const Micros last = (trace.back().ts / delta) * delta;
    for (Micros s = 0; s <= last; s += delta) labels.emplace_hint(labels.end(), s, false);
    for (const auto& rec : trace)
        if (attack_keys.contains(rec.flow)) labels[(rec.ts / delta) * delta] = true;
    return labels;
}

/// Poisson request epochs per client; each request is a burst of
/// ceil(client_request_bytes / packet_bytes) records at the epoch.
inline Trace gen_legitimate(const ScenarioConfig& cfg) {
    validate(cfg);
    if (cfg.n_clients < 1) throw ValidationError({"n_clients"});
    const Micros horizon = cfg.duration_us();
    const std::uint64_t full = cfg.client_request_bytes / cfg.packet_bytes;
    const std::uint64_t tail = cfg.client_request_bytes % cfg.packet_bytes;

    std::vector<Trace> per_client(static_cast<std::size_t>(cfg.n_clients));
    for (int c = 0; c < cfg.n_clients; ++c) {
        std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(static_cast<std::uint64_t>(c))));
        std::exponential_distribution<double> gap(cfg.client_request_rate);
        const FlowKey key = client_flow(c);
        Trace& out = per_client[static_cast<std::size_t>(c)];
        double t = 0.0;
        while (true) {
            t += gap(rng);
            const auto ts = static_cast<Micros>(std::floor(t * 1e6));
            if (ts >= horizon) break;
            for (std::uint64_t p = 0; p < full; ++p) out.push_back({ts, key, cfg.packet_bytes});
            if (tail > 0) out.push_back({ts, key, tail});
        }
    }

    std::size_t total = 0;
    for (const auto& t : per_client) total += t.size();
    Trace merged;
    merged.reserve(total);
    for (auto& t : per_client) std::move(t.begin(), t.end(), std::back_inserter(merged));
    std::stable_sort(merged.begin(), merged.end(),
                     [](const PacketRecord& a, const PacketRecord& b) { return a.ts < b.ts; });
    return merged;
}

/// Constant-rate daemons. A daemon emits a packet each time its byte budget
/// since t_a reaches another full packet, so the first 200 ms window at
/// 0.1 Mbps / 1000 B carries two packets and the remainder carries over.
inline Scenario gen_attack(const ScenarioConfig& cfg) {
    validate(cfg);
    if (cfg.n_zombies < 1) throw ValidationError({"n_zombies"});
    Scenario s;
    s.truth.t_a_us = cfg.t_a_us();
    s.truth.t_b_us = cfg.t_b_us();
    s.truth.delta_us = cfg.delta_us();

    // 1 Mbps is one bit per microsecond.
    const double interval_us = static_cast<double>(cfg.packet_bytes) * 8.0 / cfg.attack_rate_mbps;
    std::vector<FlowKey> keys;
    for (int z = 0; z < cfg.n_zombies; ++z) {
        keys.push_back(zombie_flow(z));
        s.truth.attack_flow_keys.insert(keys.back());
    }
    for (std::uint64_t k = 1;; ++k) {
        const Micros ts = s.truth.t_a_us + static_cast<Micros>(std::floor(static_cast<double>(k) * interval_us));
        if (ts >= s.truth.t_b_us) break;
        for (const auto& key : keys) s.trace.push_back({ts, key, cfg.packet_bytes});
    }
    s.truth.labels = label_windows(s.trace, s.truth.attack_flow_keys, s.truth.delta_us);
    return s;
}

inline Scenario build_scenario(const ScenarioConfig& cfg) {
    validate(cfg);
    Scenario s;
    Trace legit = cfg.n_clients > 0 ? gen_legitimate(cfg) : Trace{};
    if (cfg.n_zombies > 0) {
        Scenario attack = gen_attack(cfg);
        s.truth = std::move(attack.truth);
        s.trace.reserve(legit.size() + attack.trace.size());
        std::merge(std::make_move_iterator(legit.begin()), std::make_move_iterator(legit.end()),
                   std::make_move_iterator(attack.trace.begin()),
                   std::make_move_iterator(attack.trace.end()), std::back_inserter(s.trace),
                   [](const PacketRecord& a, const PacketRecord& b) { return a.ts < b.ts; });
    } else {
        s.truth.t_a_us = cfg.t_a_us();
        s.truth.t_b_us = cfg.t_b_us();
        s.truth.delta_us = cfg.delta_us();
        s.trace = std::move(legit);
    }
    s.truth.labels = label_windows(s.trace, s.truth.attack_flow_keys, s.truth.delta_us);
    return s;
}

// Desk-scale presets. Client population is 40 instead of 400; each client is a
// persistent session of ~1.6 Mbps (500 small requests/s), which keeps every
// client active in every window and makes the pooled per-flow byte count
// tight enough for the six-sigma bands to separate daemons on both sides.
enum class Preset { HighRate, LowRate, VaryingRate, MixedLoad, Timeline };

inline std::string_view to_string(Preset p) {
    switch (p) {
        case Preset::HighRate: return "HIGH_RATE";
        case Preset::LowRate: return "LOW_RATE";
        case Preset::VaryingRate: return "VARYING_RATE";
        case Preset::MixedLoad: return "MIXED_LOAD";
        case Preset::Timeline: break;
    }
    return "TIMELINE";
}

inline bool parse_preset(std::string_view s, Preset& out) {
    for (Preset p : {Preset::HighRate, Preset::LowRate, Preset::VaryingRate, Preset::MixedLoad,
                     Preset::Timeline}) {
        if (s == to_string(p)) {
            out = p;
            return true;
        }
    }
    return false;
}

inline ScenarioConfig preset_config(Preset p, std::uint64_t seed = 1) {
    ScenarioConfig c;
    c.seed = seed;
    c.duration_s = 40.0;
    c.t_a = 15.0;
    c.t_b = 30.0;
    switch (p) {
        case Preset::HighRate:  // 3 Mbps per daemon
            c.n_zombies = 40;
            c.attack_rate_mbps = 3.0;
            break;
        case Preset::LowRate:  // 0.1 Mbps per daemon; aggregate below normal volume fluctuation
            c.n_zombies = 40;
            c.attack_rate_mbps = 0.1;
            break;
        case Preset::VaryingRate:
            c.n_zombies = 40;
            c.attack_rate_mbps = 0.2;
            break;
        case Preset::MixedLoad:  // heavier client load, fewer but stronger daemons
            c.n_clients = 60;
            c.n_zombies = 20;
            c.attack_rate_mbps = 3.5;
            break;
        case Preset::Timeline:
            c.duration_s = 75.0;
            c.t_a = 25.0;
            c.t_b = 50.0;
            c.n_zombies = 10;
            c.attack_rate_mbps = 3.0;
            break;
    }
    return c;
}

/// The same scenario without daemons and with an independent seed, for training.
inline ScenarioConfig null_config(ScenarioConfig c) {
    c.n_zombies = 0;
    c.seed = detail::splitmix64(c.seed ^ 0x5eed'0f'7a11ULL);
    return c;
}

/// Fixed daemon count at increasing per-daemon rates.
inline std::vector<ScenarioConfig> varying_rate_series(std::uint64_t seed = 1) {
    std::vector<ScenarioConfig> out;
    for (double mbps : {0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 3.5}) {
        ScenarioConfig c = preset_config(Preset::VaryingRate, seed);
        c.attack_rate_mbps = mbps;
        out.push_back(c);
    }
    return out;
}

}  // namespace flowstat
