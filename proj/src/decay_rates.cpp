#include "rtm/decay_rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rtm {

double r_mag_avg(double p, int d) {
    if (d < 2) throw DomainError("r_mag_avg: d must be at least 2");
    if (p < 0.0 || p > 1.0) throw DomainError("r_mag_avg: p must lie in [0, 1]");
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-p) / std::log(double(d));
}

Mat light_cone_channel(const Gate& g, Side side) {
    const int d = g.d, q = d * d;
    const Mat f = fold1_matrix(g);  // rows (oL, oR), columns (iL, iR)
    const Vec c = circle_state(d);
    Mat m = Mat::Zero(q, q);
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
            for (int x = 0; x < q; ++x)
                for (int y = 0; y < q; ++y) {
                    const cplx v = f(a * q + b, x * q + y);
                    if (v == cplx(0.0)) continue;
                    if (side == Side::left)
                        m(a, y) += v * c(b) / double(d) * c(x);
                    else
                        m(b, x) += v * c(a) / double(d) * c(y);
                }
    return m;
}

namespace {

ChannelRate channel_rate(const Mat& m, int d) {
    Eigen::ComplexEigenSolver<Mat> es(m);
    if (es.info() != Eigen::Success) throw NumericalError("channel eigensolver failed");
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.rbegin(), mods.rend());
    ChannelRate r;
    if (std::abs(mods.at(0) - 1.0) > 1e-8) throw NumericalError("channel has no unit eigenvalue");
    r.lambda_sub = mods.size() > 1 ? mods[1] : 0.0;
    if (r.lambda_sub >= 1.0 - 1e-10) {
        r.degenerate = true;
        r.rate = 0.0;
    } else if (r.lambda_sub <= 0.0) {
        r.rate = std::numeric_limits<double>::infinity();
    } else {
        r.rate = -2.0 * std::log(r.lambda_sub) / std::log(double(d));
    }
    return r;
}

}  // namespace

GateRates r_mag_gate(const Gate& g) {
    if (!is_dual_unitary(g)) throw PreconditionError("r_mag_gate: gate is not dual unitary");
    return GateRates{channel_rate(light_cone_channel(g, Side::left), g.d),
                     channel_rate(light_cone_channel(g, Side::right), g.d)};
}

RateReport fit_pk_decay(const Series& series, int d, std::optional<std::pair<int, int>> window) {
    if (d < 2) throw DomainError("fit_pk_decay: d must be at least 2");
    Series s = series;
    std::sort(s.begin(), s.end());
    if (s.empty()) throw DomainError("fit_pk_decay: empty series");
    RateReport r;
    if (window) {
        r.window_lo = window->first;
        r.window_hi = window->second;
    } else {
        const std::size_t n = s.size(), first = n / 2;
        r.window_lo = s[first].first;
        r.window_hi = s.back().first;
    }
    std::vector<double> x, y;
    for (const auto& [t0, p] : s) {
        if (t0 < r.window_lo || t0 > r.window_hi) continue;
        if (!(p > 0.0)) throw DomainError("fit_pk_decay: nonpositive value at t0 = " + std::to_string(t0));
        x.push_back(t0);
        y.push_back(std::log(p));
    }
    r.points = int(x.size());
    if (r.points < 3) throw DomainError("fit_pk_decay: need at least 3 points in the window");
    const double n = r.points;
    double mx = 0, my = 0;
    for (int i = 0; i < r.points; ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < r.points; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss = 0;
    for (int i = 0; i < r.points; ++i) {
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        ss += e * e;
    }
    r.rms = std::sqrt(ss / n);
    r.r2 = syy > 0 ? 1.0 - ss / syy : 1.0;
    r.r_fit = -r.slope / std::log(double(d));
    return r;
}

Series top_sector_series(const std::vector<BoundReport>& reports) {
    Series s;
    for (const auto& r : reports)
        if (r.t0 <= r.t && r.p.size() > 1) s.push_back({r.t0, r.p.back()});
    return s;
}

}  // namespace rtm
