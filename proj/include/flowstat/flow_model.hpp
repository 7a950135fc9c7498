#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <ranges>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowstat/error.hpp"

namespace flowstat {

/// Microseconds since the trace epoch.
using Micros = std::int64_t;
using Bytes = std::uint64_t;

inline constexpr Micros kDefaultWindowUs = 200'000;

enum class Protocol : std::uint8_t { TCP, UDP, OTHER };

inline std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::TCP: return "TCP";
        case Protocol::UDP: return "UDP";
        case Protocol::OTHER: break;
    }
    return "OTHER";
}

inline bool parse_protocol(std::string_view s, Protocol& out) {
    if (s == "TCP") { out = Protocol::TCP; return true; }
    if (s == "UDP") { out = Protocol::UDP; return true; }
    if (s == "OTHER") { out = Protocol::OTHER; return true; }
    return false;
}

/// 5-tuple flow identity. Addresses are opaque tokens (dotted quads in
/// generated traces, but any non-empty string without commas is accepted).
struct FlowKey {
    std::string src;
    std::string dst;
    Protocol proto = Protocol::OTHER;
    std::uint16_t sport = 0;
    std::uint16_t dport = 0;

    friend bool operator==(const FlowKey&, const FlowKey&) = default;
    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct FlowKeyHash {
    std::size_t operator()(const FlowKey& k) const noexcept {
        std::size_t h = std::hash<std::string>{}(k.src);
        auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        mix(std::hash<std::string>{}(k.dst));
        mix(static_cast<std::size_t>(k.proto));
        mix((static_cast<std::size_t>(k.sport) << 16) | k.dport);
        return h;
    }
};

using FlowSet = std::set<FlowKey>;

struct PacketRecord {
    Micros ts = 0;
    FlowKey flow;
    Bytes bytes = 1;

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

using Trace = std::vector<PacketRecord>;

/// Half-open interval [start, start + delta).
struct TimeWindow {
    Micros start = 0;
    Micros delta = kDefaultWindowUs;

    Micros end() const noexcept { return start + delta; }
    bool contains(Micros ts) const noexcept { return ts >= start && ts < end(); }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Aggregate of one window: volume X(t), active-flow count F(t) and the
/// per-flow byte counts they are built from.
struct WindowStats {
    TimeWindow window;
    Bytes volume_bytes = 0;
    std::uint64_t flow_count = 0;
    std::map<FlowKey, Bytes> per_flow_bytes;

    FlowSet active_flows() const {
        FlowSet out;
        for (const auto& [k, _] : per_flow_bytes) out.insert(out.end(), k);
        return out;
    }

    /// Recomputes volume and flow count from per_flow_bytes, dropping zero entries.
    void normalize() {
        volume_bytes = 0;
        for (auto it = per_flow_bytes.begin(); it != per_flow_bytes.end();) {
            if (it->second == 0) {
                it = per_flow_bytes.erase(it);
            } else {
                volume_bytes += it->second;
                ++it;
            }
        }
        flow_count = per_flow_bytes.size();
    }

    bool consistent() const {
        Bytes sum = 0;
        for (const auto& [_, b] : per_flow_bytes) {
            if (b == 0) return false;
            sum += b;
        }
        return sum == volume_bytes && flow_count == per_flow_bytes.size();
    }

    friend bool operator==(const WindowStats&, const WindowStats&) = default;
};

template <class R>
concept PacketRange = std::ranges::input_range<R> &&
                      std::same_as<std::ranges::range_value_t<R>, PacketRecord>;

template <PacketRange R>
WindowStats aggregate_window(const R& slice, TimeWindow window) {
    if (window.delta <= 0) throw InvalidParameter("window delta must be positive");
    WindowStats out;
    out.window = window;
    std::size_t i = 0;
    for (const PacketRecord& rec : slice) {
        if (!window.contains(rec.ts))
            throw RecordContractError(i, "timestamp " + std::to_string(rec.ts) +
                                             " outside window [" + std::to_string(window.start) +
                                             ", " + std::to_string(window.end()) + ")");
        if (rec.bytes == 0) throw RecordContractError(i, "byte count must be >= 1");
        out.per_flow_bytes[rec.flow] += rec.bytes;
        out.volume_bytes += rec.bytes;
        ++i;
    }
    out.flow_count = out.per_flow_bytes.size();
    return out;
}

/// Tiles a time-sorted trace into tumbling windows starting at t0. Every
/// window up to and including the one holding the last record is emitted,
/// empty ones included.
template <PacketRange R>
    requires std::ranges::forward_range<R>
std::vector<WindowStats> window_stream(const R& trace, Micros delta, Micros t0 = 0) {
    if (delta <= 0) throw InvalidParameter("window delta must be positive");
    std::vector<WindowStats> out;
    auto it = std::ranges::begin(trace);
    const auto last = std::ranges::end(trace);
    std::size_t index = 0;
    Micros prev_ts = t0;
    while (it != last) {
        const Micros ts = it->ts;
        if (ts < t0) throw RecordContractError(index, "timestamp precedes stream origin");
        if (ts < prev_ts) throw RecordContractError(index, "trace not sorted by timestamp");
        prev_ts = ts;

        // Emit empty windows until the one containing ts.
        const Micros slot = t0 + ((ts - t0) / delta) * delta;
        while (out.empty() || out.back().window.start < slot) {
            const Micros next = out.empty() ? t0 : out.back().window.end();
            out.push_back(WindowStats{TimeWindow{next, delta}, 0, 0, {}});
        }
        WindowStats& w = out.back();
        if (it->bytes == 0) throw RecordContractError(index, "byte count must be >= 1");
        w.per_flow_bytes[it->flow] += it->bytes;
        w.volume_bytes += it->bytes;
        ++it;
        ++index;
    }
    for (auto& w : out) w.flow_count = w.per_flow_bytes.size();
    return out;
}

inline Bytes total_bytes(const Trace& trace) {
    Bytes sum = 0;
    for (const auto& r : trace) sum += r.bytes;
    return sum;
}

}  // namespace flowstat
