// flowstat: file-based front end for the detection pipeline.
//
//   generate     -> trace CSV + ground truth CSV (+ attack flow list)
//   train        -> profile CSV
//   detect       -> alert log CSV
//   characterize -> characterization log CSV (+ post-response trace)
//   evaluate     -> metrics CSV
//   sweep        -> ROC CSV

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowstat/flowstat.hpp"

namespace fs = std::filesystem;
using namespace flowstat;

namespace {

constexpr const char* kSeedEnv = "FLOWSTAT_SEED";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    bool force = false;

    // generate
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::string out_trace;
    std::string out_truth;
    std::string out_flows;

    // shared inputs
    std::string trace;
    std::string profile;
    std::string alerts;
    std::string truth;
    std::string out;
    std::optional<int> delta_ms;
    int r = kDefaultTolerance;

    bool vba = false;
    bool respond = false;
    std::string mode = "window";
    std::string scenario;
    int r_min = 1;
    int r_max = 10;
};

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    return in;
}

template <class Writer>
void write_file(const std::string& path, bool force, Writer&& writer) {
    if (!force && fs::exists(path))
        throw UsageError(path + " already exists (use --force to overwrite)");
    std::ostringstream buf;
    writer(buf);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << buf.str();
    if (!os) throw std::runtime_error("write to " + path + " failed");
}

Trace load_trace(const std::string& path) {
    auto in = open_in(path);
    return io::read_trace(in, path);
}

NormalProfile load_profile(const std::string& path) {
    auto in = open_in(path);
    return io::read_profile(in, path);
}

/// Window length for a run against `profile`; an explicit --delta-ms must agree with it.
Micros run_delta(const Options& o, const NormalProfile& profile) {
    if (o.delta_ms) {
        const Micros d = static_cast<Micros>(*o.delta_ms) * 1000;
        if (d != profile.delta_us)
            throw UsageError("window mismatch: profile trained with " + std::to_string(profile.delta_us / 1000) +
                             " ms windows, run requested " + std::to_string(*o.delta_ms) + " ms");
    }
    return profile.delta_us;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnv)) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: " + env);
        }
    }
    return 1;
}

int cmd_generate(const Options& o) {
    if (o.config_path.empty() && o.preset_name.empty())
        throw UsageError("generate needs --config or --preset");
    ScenarioConfig base;
    if (!o.preset_name.empty()) {
        Preset p{};
        if (!parse_preset(o.preset_name, p)) throw UsageError("unknown preset " + o.preset_name);
        base = preset_config(p);
    }
    base.seed = default_seed();
    ScenarioConfig cfg = base;
    if (!o.config_path.empty()) {
        auto in = open_in(o.config_path);
        cfg = io::read_config(in, o.config_path, base);
    }
    if (o.seed) cfg.seed = *o.seed;

    const Scenario s = build_scenario(cfg);
    const std::string flows = o.out_flows.empty() ? o.out_truth + ".flows" : o.out_flows;
    for (const auto* p : {&o.out_trace, &o.out_truth, &flows})
        if (!o.force && fs::exists(*p)) throw UsageError(*p + " already exists (use --force to overwrite)");
    write_file(o.out_trace, o.force, [&](std::ostream& os) { io::write_trace(os, s.trace); });
    write_file(o.out_truth, o.force, [&](std::ostream& os) { io::write_truth(os, s.truth); });
    write_file(flows, o.force, [&](std::ostream& os) { io::write_flow_list(os, s.truth.attack_flow_keys); });
    std::cerr << "generated " << s.trace.size() << " records, " << s.truth.labels.size() << " windows, "
              << s.truth.attack_flow_keys.size() << " attack flows\n";
    return 0;
}

int cmd_train(const Options& o) {
    if (!o.delta_ms || *o.delta_ms <= 0) throw UsageError("--delta-ms must be a positive integer");
    const Trace trace = load_trace(o.trace);
    const NormalProfile p = train_profile(window_stream(trace, static_cast<Micros>(*o.delta_ms) * 1000, 0));
    write_file(o.out, o.force, [&](std::ostream& os) { io::write_profile(os, p); });
    return 0;
}

int cmd_detect(const Options& o) {
    const NormalProfile p = load_profile(o.profile);
    const Micros delta = run_delta(o, p);
    const Trace trace = load_trace(o.trace);
    const Thresholds th = make_thresholds(p, o.r);
    const auto outcomes =
        detect_all(window_stream(trace, delta, 0), p, th, o.vba ? DetectorKind::VolumeOnly : DetectorKind::Combined);
    write_file(o.out, o.force, [&](std::ostream& os) { io::write_alerts(os, outcomes); });
    std::size_t alerts = 0;
    for (const auto& oc : outcomes) alerts += oc.alert ? 1 : 0;
    std::cerr << alerts << " of " << outcomes.size() << " windows alerted\n";
    return 0;
}

int cmd_characterize(const Options& o) {
    if (o.respond && o.out_trace.empty()) throw UsageError("--respond requires --out-trace");
    if (!o.respond && !o.out_trace.empty()) throw UsageError("--out-trace is only valid with --respond");
    const NormalProfile p = load_profile(o.profile);
    const Micros delta = run_delta(o, p);
    const Trace trace = load_trace(o.trace);
    const auto windows = window_stream(trace, delta, 0);
    auto in = open_in(o.alerts);
    const auto outcomes = io::read_alerts(in, o.alerts, delta);
    if (outcomes.size() != windows.size())
        throw UsageError(o.alerts + " covers " + std::to_string(outcomes.size()) + " windows, trace has " +
                         std::to_string(windows.size()));

    const auto chars = characterize_alerts(windows, outcomes, control_limits(p));
    if (!o.out_trace.empty() && !o.force && fs::exists(o.out_trace))
        throw UsageError(o.out_trace + " already exists (use --force to overwrite)");
    write_file(o.out, o.force, [&](std::ostream& os) { io::write_characterization(os, windows, chars); });

    if (o.respond) {
        const Thresholds th = make_thresholds(p, o.r);
        std::map<Micros, WindowResponse> responses;
        for (const auto& wc : chars)
            responses.emplace(wc.ch.window.start,
                              WindowResponse{wc.ch, ResponsePolicy(attack_strength(outcomes[wc.window_index], th))});
        const Trace after = respond_trace(trace, responses, delta, 0);
        write_file(o.out_trace, o.force, [&](std::ostream& os) { io::write_trace(os, after); });
        std::cerr << "response kept " << total_bytes(after) << " of " << total_bytes(trace) << " bytes\n";
    }
    return 0;
}

int cmd_evaluate(const Options& o) {
    ScoreMode mode{};
    if (!parse_score_mode(o.mode, mode)) throw UsageError("--mode must be window or campaign");
    const Micros delta = static_cast<Micros>(o.delta_ms.value_or(200)) * 1000;
    if (delta <= 0) throw UsageError("--delta-ms must be positive");
    auto ain = open_in(o.alerts);
    const auto outcomes = io::read_alerts(ain, o.alerts, delta);
    auto tin = open_in(o.truth);
    const GroundTruth truth = io::read_truth(tin, o.truth, delta);
    io::MetricsRow row;
    row.scenario = o.scenario.empty() ? fs::path(o.alerts).stem().string() : o.scenario;
    row.r = o.r;
    row.mode = mode;
    row.metrics = evaluate_run(outcomes, truth, mode);
    write_file(o.out, o.force, [&](std::ostream& os) { io::write_metrics(os, {row}); });
    return 0;
}

int cmd_sweep(const Options& o) {
    if (o.r_min < 1 || o.r_max < o.r_min) throw UsageError("need 1 <= --r-min <= --r-max");
    const NormalProfile p = load_profile(o.profile);
    const Micros delta = run_delta(o, p);
    const Trace trace = load_trace(o.trace);
    auto tin = open_in(o.truth);
    const GroundTruth truth = io::read_truth(tin, o.truth, delta);
    std::vector<int> rs;
    for (int r = o.r_min; r <= o.r_max; ++r) rs.push_back(r);
    const auto points = roc_sweep(window_stream(trace, delta, 0), truth, p, rs,
                                  o.vba ? DetectorKind::VolumeOnly : DetectorKind::Combined);
    write_file(o.out, o.force, [&](std::ostream& os) { io::write_roc(os, points); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flow-statistical DDoS detection: generate, train, detect, characterize, evaluate, sweep"};
    app.require_subcommand(1, 1);
    Options o;

    auto* gen = app.add_subcommand("generate", "Generate a labelled synthetic scenario");
    gen->add_option("--config", o.config_path, "Scenario key=value file")->check(CLI::ExistingFile);
    gen->add_option("--preset", o.preset_name, "HIGH_RATE, LOW_RATE, VARYING_RATE, MIXED_LOAD or TIMELINE");
    gen->add_option("--seed", o.seed, std::string("Seed (default: $") + kSeedEnv + " or 1; overrides config)");
    gen->add_option("--out-trace", o.out_trace)->required();
    gen->add_option("--out-truth", o.out_truth)->required();
    gen->add_option("--out-flows", o.out_flows, "Attack flow list (default: <out-truth>.flows)");

    auto* train = app.add_subcommand("train", "Train a normal profile from an attack-free trace");
    train->add_option("--trace", o.trace)->required()->check(CLI::ExistingFile);
    train->add_option("--delta-ms", o.delta_ms)->required();
    train->add_option("--out", o.out)->required();

    auto* det = app.add_subcommand("detect", "Run the detector over every window of a trace");
    det->add_option("--trace", o.trace)->required()->check(CLI::ExistingFile);
    det->add_option("--profile", o.profile)->required()->check(CLI::ExistingFile);
    det->add_option("--r", o.r, "Tolerance factor")->capture_default_str();
    det->add_flag("--vba", o.vba, "Volume-only detector");
    det->add_option("--delta-ms", o.delta_ms, "Must match the profile");
    det->add_option("--out", o.out)->required();

    auto* chr = app.add_subcommand("characterize", "Classify flows of alerting windows");
    chr->add_option("--trace", o.trace)->required()->check(CLI::ExistingFile);
    chr->add_option("--profile", o.profile)->required()->check(CLI::ExistingFile);
    chr->add_option("--alerts", o.alerts)->required()->check(CLI::ExistingFile);
    chr->add_option("--out", o.out)->required();
    chr->add_flag("--respond", o.respond, "Filter attack flows and throttle suspicious ones");
    chr->add_option("--out-trace", o.out_trace, "Post-response trace");
    chr->add_option("--r", o.r, "Tolerance factor used for attack strength")->capture_default_str();
    chr->add_option("--delta-ms", o.delta_ms, "Must match the profile");

    auto* ev = app.add_subcommand("evaluate", "Score an alert log against ground truth");
    ev->add_option("--alerts", o.alerts)->required()->check(CLI::ExistingFile);
    ev->add_option("--truth", o.truth)->required()->check(CLI::ExistingFile);
    ev->add_option("--mode", o.mode)->check(CLI::IsMember({"window", "campaign"}))->capture_default_str();
    ev->add_option("--scenario", o.scenario, "Scenario label (default: alert file stem)");
    ev->add_option("--r", o.r, "Tolerance factor recorded in the row")->capture_default_str();
    ev->add_option("--delta-ms", o.delta_ms, "Window length of the logs (default 200)");
    ev->add_option("--out", o.out)->required();

    auto* sw = app.add_subcommand("sweep", "Detection/false-positive rates over a range of r");
    sw->add_option("--trace", o.trace)->required()->check(CLI::ExistingFile);
    sw->add_option("--truth", o.truth)->required()->check(CLI::ExistingFile);
    sw->add_option("--profile", o.profile)->required()->check(CLI::ExistingFile);
    sw->add_option("--r-min", o.r_min)->capture_default_str();
    sw->add_option("--r-max", o.r_max)->capture_default_str();
    sw->add_flag("--vba", o.vba, "Volume-only detector");
    sw->add_option("--delta-ms", o.delta_ms, "Must match the profile");
    sw->add_option("--out", o.out)->required();

    for (auto* sub : {gen, train, det, chr, ev, sw}) sub->add_flag("--force", o.force, "Overwrite existing outputs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(o);
        if (train->parsed()) return cmd_train(o);
        if (det->parsed()) return cmd_detect(o);
        if (chr->parsed()) return cmd_characterize(o);
        if (ev->parsed()) return cmd_evaluate(o);
        if (sw->parsed()) return cmd_sweep(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
