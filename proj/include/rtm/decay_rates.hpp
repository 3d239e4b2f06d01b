#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rtm/entropy_bounds.hpp"
#include "rtm/gates.hpp"

namespace rtm {

// -ln(1-p)/ln d; +inf at p = 1.
double r_mag_avg(double p, int d);

// Single-gate light-cone channels: the folded gate with |○>/d on one output and |○> on the
// opposite input. `left` keeps (out-left, in-right), `right` keeps (out-right, in-left).
struct ChannelRate {
    double lambda_sub = 0.0;  // largest modulus below the unit eigenvalue
    double rate = 0.0;        // -2 ln|lambda_sub| / ln d
    bool degenerate = false;  // unit eigenvalue repeated, no decay
};

struct GateRates {
    ChannelRate left, right;
    double min() const { return std::min(left.rate, right.rate); }
    double max() const { return std::max(left.rate, right.rate); }
};

Mat light_cone_channel(const Gate& g, Side side);
GateRates r_mag_gate(const Gate& g);

struct RateReport {
    double r_fit = 0.0;  // -slope / ln d
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double rms = 0.0;
    int window_lo = 0, window_hi = 0;  // inclusive t0 range
    int points = 0;
};

using Series = std::vector<std::pair<int, double>>;

// Least squares of ln p against t0. Default window: the largest-t0 half of the points.
RateReport fit_pk_decay(const Series& series, int d, std::optional<std::pair<int, int>> window = std::nullopt);

// p_{t1}(t0) for t0 with at least one open leg, from dual-unitary bound reports.
Series top_sector_series(const std::vector<BoundReport>& reports);

}  // namespace rtm
