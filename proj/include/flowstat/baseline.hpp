#pragma once

#include <cmath>
#include <cstdint>
#include <ranges>

#include "flowstat/error.hpp"
#include "flowstat/flow_model.hpp"

namespace flowstat {

/// Attack-free traffic baseline. Window statistics use population standard
/// deviations; the per-flow pair is pooled over every observed (flow, window)
/// byte count, so one pair of control limits serves all flows.
struct NormalProfile {
    double x_star = 0.0;
    double f_star = 0.0;
    double sigma_v = 0.0;
    double sigma_f = 0.0;
    double flow_mu = 0.0;
    double flow_sigma = 0.0;
    std::uint64_t n_windows = 0;
    /// Window length the profile was trained with.
    Micros delta_us = kDefaultWindowUs;

    friend bool operator==(const NormalProfile&, const NormalProfile&) = default;
};

namespace detail {

// Welford accumulator; population variance on finish.
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double pstddev() const {
        if (n_ == 0) return 0.0;
        const double var = m2_ / static_cast<double>(n_);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace detail

template <std::ranges::input_range R>
    requires std::same_as<std::ranges::range_value_t<R>, WindowStats>
NormalProfile train_profile(const R& windows) {
    detail::RunningMoments vol, flows, per_flow;
    Micros delta = 0;
    for (const WindowStats& w : windows) {
        if (delta == 0) {
            delta = w.window.delta;
        } else if (w.window.delta != delta) {
            throw ContractError("training windows have mixed lengths");
        }
        vol.add(static_cast<double>(w.volume_bytes));
        flows.add(static_cast<double>(w.flow_count));
        for (const auto& [_, b] : w.per_flow_bytes) per_flow.add(static_cast<double>(b));
    }
    if (vol.count() < 2)
        throw InsufficientData("training needs at least 2 windows, got " +
                               std::to_string(vol.count()));

    NormalProfile p;
    p.x_star = vol.mean();
    p.f_star = flows.mean();
    p.sigma_v = vol.pstddev();
    p.sigma_f = flows.pstddev();
    p.flow_mu = per_flow.mean();
    p.flow_sigma = per_flow.pstddev();
    p.n_windows = vol.count();
    p.delta_us = delta;
    return p;
}

}  // namespace flowstat
