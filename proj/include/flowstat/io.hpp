#pragma once

// CSV and key=value file formats for traces, profiles, logs and metrics.
// Readers report malformed input as ParseError(file, line, field).

#include <charconv>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "flowstat/baseline.hpp"
#include "flowstat/characterizer.hpp"
#include "flowstat/detector.hpp"
#include "flowstat/error.hpp"
#include "flowstat/evaluation.hpp"
#include "flowstat/flow_model.hpp"
#include "flowstat/trafficgen.hpp"

namespace flowstat::io {

inline constexpr std::string_view kTraceHeader = "ts_us,src,dst,proto,sport,dport,bytes";
inline constexpr std::string_view kProfileHeader =
    "x_star,f_star,sigma_v,sigma_f,flow_mu,flow_sigma,n_windows,delta_us";
inline constexpr std::string_view kAlertHeader = "window_start_us,x_in,f_in,dx,df,alert,trigger";
inline constexpr std::string_view kCharacterizationHeader =
    "window_start_us,flow_src,flow_dst,proto,sport,dport,bytes,state";
inline constexpr std::string_view kTruthHeader = "window_start_us,is_attack";
inline constexpr std::string_view kFlowListHeader = "src,dst,proto,sport,dport";
inline constexpr std::string_view kMetricsHeader =
    "scenario,r,mode,d,n,f,m,r_d,r_fp,latency_windows";
inline constexpr std::string_view kRocHeader = "r,r_d,r_fp";
inline constexpr std::string_view kNA = "NA";

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string(kNA);
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

class LineReader {
public:
    LineReader(std::istream& in, std::string file) : in_(in), file_(std::move(file)) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    void expect_header(std::string_view header) {
        std::string line;
        if (!next(line)) throw ParseError(file_, 1, "", "missing header, expected '" + std::string(header) + "'");
        if (line != header)
            throw ParseError(file_, line_no_, "", "bad header '" + line + "', expected '" + std::string(header) + "'");
    }

    std::vector<std::string_view> fields(std::string_view line, std::string_view header) const {
        auto f = split(line);
        const auto want = split(header).size();
        if (f.size() != want)
            throw fail("", "expected " + std::to_string(want) + " fields, got " + std::to_string(f.size()));
        return f;
    }

    template <class Int>
    Int integer(std::string_view s, std::string_view field, Int lo = std::numeric_limits<Int>::min(),
                Int hi = std::numeric_limits<Int>::max()) const {
        Int v{};
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw fail(field, "not an integer: '" + std::string(s) + "'");
        if (v < lo || v > hi)
            throw fail(field, "value " + std::string(s) + " out of range");
        return v;
    }

    double real(std::string_view s, std::string_view field) const {
        double v{};
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw fail(field, "not a number: '" + std::string(s) + "'");
        return v;
    }

    std::optional<double> optional_real(std::string_view s, std::string_view field) const {
        if (s == kNA) return std::nullopt;
        return real(s, field);
    }

    bool flag(std::string_view s, std::string_view field) const {
        if (s == "1") return true;
        if (s == "0") return false;
        throw fail(field, "expected 0 or 1, got '" + std::string(s) + "'");
    }

    std::string token(std::string_view s, std::string_view field) const {
        if (s.empty()) throw fail(field, "empty value");
        return std::string(s);
    }

    Protocol protocol(std::string_view s, std::string_view field) const {
        Protocol p{};
        if (!parse_protocol(s, p)) throw fail(field, "unknown protocol '" + std::string(s) + "'");
        return p;
    }

    ParseError fail(std::string_view field, const std::string& what) const {
        return ParseError(file_, line_no_, std::string(field), what);
    }

    std::size_t line_no() const { return line_no_; }
    const std::string& file() const { return file_; }

private:
    std::istream& in_;
    std::string file_;
    std::size_t line_no_ = 0;
};

inline void write_flow(std::ostream& os, const FlowKey& k) {
    os << k.src << ',' << k.dst << ',' << to_string(k.proto) << ',' << k.sport << ',' << k.dport;
}

inline FlowKey read_flow(const LineReader& r, const std::vector<std::string_view>& f, std::size_t at,
                         std::string_view src_name, std::string_view dst_name) {
    return FlowKey{r.token(f[at], src_name), r.token(f[at + 1], dst_name), r.protocol(f[at + 2], "proto"),
                   r.integer<std::uint16_t>(f[at + 3], "sport"), r.integer<std::uint16_t>(f[at + 4], "dport")};
}

}  // namespace detail

// ---- packet traces ----

inline void write_trace(std::ostream& os, const Trace& trace) {
    os << kTraceHeader << '\n';
    for (const auto& r : trace) {
        os << r.ts << ',';
        detail::write_flow(os, r.flow);
        os << ',' << r.bytes << '\n';
    }
}

inline Trace read_trace(std::istream& in, const std::string& file) {
    detail::LineReader r(in, file);
    r.expect_header(kTraceHeader);
    Trace out;
    std::string line;
    Micros prev = 0;
    while (r.next(line)) {
        const auto f = r.fields(line, kTraceHeader);
        PacketRecord rec;
        rec.ts = r.integer<Micros>(f[0], "ts_us", 0);
        if (rec.ts < prev) throw r.fail("ts_us", "rows not sorted by timestamp");
        prev = rec.ts;
        rec.flow = detail::read_flow(r, f, 1, "src", "dst");
        rec.bytes = r.integer<Bytes>(f[6], "bytes", 1);
        out.push_back(std::move(rec));
    }
    return out;
}

// ---- normal profile ----

inline void write_profile(std::ostream& os, const NormalProfile& p) {
    os << kProfileHeader << '\n'
       << format_double(p.x_star) << ',' << format_double(p.f_star) << ',' << format_double(p.sigma_v) << ','
       << format_double(p.sigma_f) << ',' << format_double(p.flow_mu) << ',' << format_double(p.flow_sigma)
       << ',' << p.n_windows << ',' << p.delta_us << '\n';
}

inline NormalProfile read_profile(std::istream& in, const std::string& file) {
    detail::LineReader r(in, file);
    r.expect_header(kProfileHeader);
    std::string line;
    if (!r.next(line)) throw ParseError(file, 2, "", "missing profile row");
    const auto f = r.fields(line, kProfileHeader);
    NormalProfile p;
    p.x_star = r.real(f[0], "x_star");
    p.f_star = r.real(f[1], "f_star");
    p.sigma_v = r.real(f[2], "sigma_v");
    p.sigma_f = r.real(f[3], "sigma_f");
    p.flow_mu = r.real(f[4], "flow_mu");
    p.flow_sigma = r.real(f[5], "flow_sigma");
    p.n_windows = r.integer<std::uint64_t>(f[6], "n_windows", 2);
    p.delta_us = r.integer<Micros>(f[7], "delta_us", 1);
    const std::pair<double, const char*> non_negative[] = {
        {p.x_star, "x_star"}, {p.f_star, "f_star"}, {p.sigma_v, "sigma_v"},
        {p.sigma_f, "sigma_f"}, {p.flow_mu, "flow_mu"}, {p.flow_sigma, "flow_sigma"}};
    for (const auto& [v, name] : non_negative)
        if (!(v >= 0.0)) throw r.fail(name, "must be non-negative");
    if (r.next(line) && !line.empty()) throw r.fail("", "profile file has more than one row");
    return p;
}

// ---- alert log ----

inline void write_alerts(std::ostream& os, const std::vector<DetectionOutcome>& outcomes) {
    os << kAlertHeader << '\n';
    for (const auto& o : outcomes)
        os << o.window.start << ',' << o.x_in << ',' << o.f_in << ',' << format_double(o.dx) << ','
           << format_double(o.df) << ',' << (o.alert ? 1 : 0) << ',' << to_string(o.trigger) << '\n';
}

/// Rows must be consecutive windows of length `delta`.
inline std::vector<DetectionOutcome> read_alerts(std::istream& in, const std::string& file, Micros delta) {
    detail::LineReader r(in, file);
    r.expect_header(kAlertHeader);
    std::vector<DetectionOutcome> out;
    std::string line;
    while (r.next(line)) {
        const auto f = r.fields(line, kAlertHeader);
        DetectionOutcome o;
        o.window = TimeWindow{r.integer<Micros>(f[0], "window_start_us", 0), delta};
        if (!out.empty() && o.window.start != out.back().window.end())
            throw r.fail("window_start_us", "windows are not consecutive " + std::to_string(delta) + " us slots");
        o.x_in = r.integer<Bytes>(f[1], "x_in");
        o.f_in = r.integer<std::uint64_t>(f[2], "f_in");
        o.dx = r.real(f[3], "dx");
        o.df = r.real(f[4], "df");
        o.alert = r.flag(f[5], "alert");
        if (!parse_trigger(f[6], o.trigger)) throw r.fail("trigger", "unknown trigger '" + std::string(f[6]) + "'");
        if ((o.trigger == Trigger::NONE) == o.alert) throw r.fail("trigger", "inconsistent with alert flag");
        out.push_back(o);
    }
    return out;
}

// ---- characterization log ----

inline void write_characterization(std::ostream& os, const std::vector<WindowStats>& windows,
                                   const std::vector<WindowCharacterization>& chars) {
    os << kCharacterizationHeader << '\n';
    for (const auto& wc : chars) {
        const WindowStats& w = windows.at(wc.window_index);
        for (const auto& [key, bytes] : w.per_flow_bytes) {
            const auto state = wc.ch.state_of(key);
            if (!state) continue;
            os << w.window.start << ',';
            detail::write_flow(os, key);
            os << ',' << bytes << ',' << to_string(*state) << '\n';
        }
    }
}

struct CharacterizationRow {
    Micros window_start = 0;
    FlowKey flow;
    Bytes bytes = 0;
    FlowState state = FlowState::NORMAL;

    friend bool operator==(const CharacterizationRow&, const CharacterizationRow&) = default;
};

inline std::vector<CharacterizationRow> read_characterization(std::istream& in, const std::string& file) {
    detail::LineReader r(in, file);
    r.expect_header(kCharacterizationHeader);
    std::vector<CharacterizationRow> out;
    std::string line;
    while (r.next(line)) {
        const auto f = r.fields(line, kCharacterizationHeader);
        CharacterizationRow row;
        row.window_start = r.integer<Micros>(f[0], "window_start_us", 0);
        row.flow = detail::read_flow(r, f, 1, "flow_src", "flow_dst");
        row.bytes = r.integer<Bytes>(f[6], "bytes", 1);
        if (!parse_flow_state(f[7], row.state)) throw r.fail("state", "unknown state '" + std::string(f[7]) + "'");
        out.push_back(std::move(row));
    }
    return out;
}

// ---- ground truth ----

inline void write_truth(std::ostream& os, const GroundTruth& t) {
    os << kTruthHeader << '\n';
    for (const auto& [start, attack] : t.labels) os << start << ',' << (attack ? 1 : 0) << '\n';
}

inline void write_flow_list(std::ostream& os, const FlowSet& flows) {
    os << kFlowListHeader << '\n';
    for (const auto& k : flows) {
        detail::write_flow(os, k);
        os << '\n';
    }
}

inline FlowSet read_flow_list(std::istream& in, const std::string& file) {
    detail::LineReader r(in, file);
    r.expect_header(kFlowListHeader);
    FlowSet out;
    std::string line;
    while (r.next(line)) {
        const auto f = r.fields(line, kFlowListHeader);
        out.insert(detail::read_flow(r, f, 0, "src", "dst"));
    }
    return out;
}

/// The attack interval is recovered as the span of attack-labelled windows.
inline GroundTruth read_truth(std::istream& in, const std::string& file, Micros delta) {
    detail::LineReader r(in, file);
    r.expect_header(kTruthHeader);
    GroundTruth t;
    t.delta_us = delta;
    std::string line;
    std::optional<Micros> first_attack, last_attack, prev;
    while (r.next(line)) {
        const auto f = r.fields(line, kTruthHeader);
        const auto start = r.integer<Micros>(f[0], "window_start_us", 0);
        if (prev && start != *prev + delta)
            throw r.fail("window_start_us", "windows are not consecutive " + std::to_string(delta) + " us slots");
        prev = start;
        const bool attack = r.flag(f[1], "is_attack");
        if (attack) {
            if (!first_attack) first_attack = start;
            last_attack = start;
        }
        t.labels.emplace_hint(t.labels.end(), start, attack);
    }
    if (first_attack) {
        t.t_a_us = *first_attack;
        t.t_b_us = *last_attack + delta;
    }
    return t;
}

// ---- metrics and ROC ----

struct MetricsRow {
    std::string scenario;
    int r = kDefaultTolerance;
    ScoreMode mode = ScoreMode::Window;
    Metrics metrics;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline void write_metrics(std::ostream& os, const std::vector<MetricsRow>& rows) {
    os << kMetricsHeader << '\n';
    for (const auto& row : rows) {
        const Metrics& m = row.metrics;
        os << row.scenario << ',' << row.r << ',' << to_string(row.mode) << ',' << m.d << ',' << m.n << ','
           << m.f << ',' << m.m << ',' << format_optional(m.r_d) << ',' << format_optional(m.r_fp) << ',';
        if (m.latency_windows)
            os << *m.latency_windows;
        else
            os << kNA;
        os << '\n';
    }
}

inline std::vector<MetricsRow> read_metrics(std::istream& in, const std::string& file) {
    detail::LineReader r(in, file);
    r.expect_header(kMetricsHeader);
    std::vector<MetricsRow> out;
    std::string line;
    while (r.next(line)) {
        const auto f = r.fields(line, kMetricsHeader);
        MetricsRow row;
        row.scenario = r.token(f[0], "scenario");
        row.r = r.integer<int>(f[1], "r", 1);
        if (!parse_score_mode(f[2], row.mode)) throw r.fail("mode", "expected window or campaign");
        row.metrics.d = r.integer<std::uint64_t>(f[3], "d");
        row.metrics.n = r.integer<std::uint64_t>(f[4], "n");
        row.metrics.f = r.integer<std::uint64_t>(f[5], "f");
        row.metrics.m = r.integer<std::uint64_t>(f[6], "m");
        row.metrics.r_d = r.optional_real(f[7], "r_d");
        row.metrics.r_fp = r.optional_real(f[8], "r_fp");
        if (f[9] != kNA) row.metrics.latency_windows = r.integer<std::int64_t>(f[9], "latency_windows");
        out.push_back(std::move(row));
    }
    return out;
}

inline void write_roc(std::ostream& os, const std::vector<RocPoint>& points) {
    os << kRocHeader << '\n';
    for (const auto& p : points) os << p.r << ',' << format_optional(p.r_d) << ',' << format_optional(p.r_fp) << '\n';
}

inline std::vector<RocPoint> read_roc(std::istream& in, const std::string& file) {
    detail::LineReader r(in, file);
    r.expect_header(kRocHeader);
    std::vector<RocPoint> out;
    std::string line;
    while (r.next(line)) {
        const auto f = r.fields(line, kRocHeader);
        out.push_back({r.integer<int>(f[0], "r", 1), r.optional_real(f[1], "r_d"), r.optional_real(f[2], "r_fp")});
    }
    return out;
}

// ---- scenario config (key=value) ----

inline void write_config(std::ostream& os, const ScenarioConfig& c) {
    os << "duration_s=" << format_double(c.duration_s) << '\n'
       << "delta_ms=" << c.delta_ms << '\n'
       << "n_clients=" << c.n_clients << '\n'
       << "client_request_rate=" << format_double(c.client_request_rate) << '\n'
       << "client_request_bytes=" << c.client_request_bytes << '\n'
       << "n_zombies=" << c.n_zombies << '\n'
       << "attack_rate_mbps=" << format_double(c.attack_rate_mbps) << '\n'
       << "t_a=" << format_double(c.t_a) << '\n'
       << "t_b=" << format_double(c.t_b) << '\n'
       << "seed=" << c.seed << '\n'
       << "packet_bytes=" << c.packet_bytes << '\n';
}

/// Keys not present keep their defaults (or `base`). Blank lines and lines
/// starting with '#' are skipped; unknown or repeated keys are errors.
inline ScenarioConfig read_config(std::istream& in, const std::string& file, ScenarioConfig base = {}) {
    detail::LineReader r(in, file);
    ScenarioConfig c = base;
    std::set<std::string, std::less<>> seen;
    std::string line;
    while (r.next(line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw r.fail("", "expected key=value");
        auto trim = [](std::string_view s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string_view::npos) return std::string_view{};
            return s.substr(b, s.find_last_not_of(" \t") - b + 1);
        };
        const std::string key(trim(std::string_view(line).substr(0, eq)));
        const std::string_view val = trim(std::string_view(line).substr(eq + 1));
        if (!seen.insert(key).second) throw r.fail(key, "duplicate key");
        if (key == "duration_s") c.duration_s = r.real(val, key);
        else if (key == "delta_ms") c.delta_ms = r.integer<int>(val, key);
        else if (key == "n_clients") c.n_clients = r.integer<int>(val, key);
        else if (key == "client_request_rate") c.client_request_rate = r.real(val, key);
        else if (key == "client_request_bytes") c.client_request_bytes = r.integer<std::uint64_t>(val, key);
        else if (key == "n_zombies") c.n_zombies = r.integer<int>(val, key);
        else if (key == "attack_rate_mbps") c.attack_rate_mbps = r.real(val, key);
        else if (key == "t_a") c.t_a = r.real(val, key);
        else if (key == "t_b") c.t_b = r.real(val, key);
        else if (key == "seed") c.seed = r.integer<std::uint64_t>(val, key);
        else if (key == "packet_bytes") c.packet_bytes = r.integer<std::uint64_t>(val, key);
        else throw r.fail(key, "unknown key");
    }
    return c;
}

}  // namespace flowstat::io
