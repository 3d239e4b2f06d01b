#include "rtm/rtm_compress.hpp"

#include <json.hpp>

#include <cmath>
#include <numeric>

namespace rtm {

namespace {

Mat truncated(const Mat& m, int chi, double& tail) {
    Eigen::BDCSVD<Mat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) throw NumericalError("truncate_mirsky: svd did not converge");
    const Eigen::VectorXd& s = dec.singularValues();
    const Eigen::Index k = std::min<Eigen::Index>(chi, s.size());
    tail = s.tail(s.size() - k).sum();
    return dec.matrixU().leftCols(k) * s.head(k).asDiagonal() * dec.matrixV().leftCols(k).adjoint();
}

}  // namespace

Truncation truncate_mirsky(const RTM& T, int chi) {
    if (chi < 1) throw DomainError("truncate_mirsky: chi must be at least 1");
    Truncation out{T, 0.0};
    if (T.dense) {
        out.rtm.dense = truncated(*T.dense, chi, out.tail);
        out.rtm.core = *out.rtm.dense;
    } else {
        out.rtm.core = truncated(T.core, chi, out.tail);
    }
    return out;
}

std::vector<double> normalized_weights(const Spectrum& s) {
    const double n2 = s.sum_sq();
    if (!(n2 > 0.0)) throw PreconditionError("entropy of a zero matrix is undefined");
    std::vector<double> w;
    for (double x : s.values)
        if (x > 0.0) w.push_back(x * x / n2);
    return w;
}

DensityOp density_op(const RTM& T) {
    DensityOp out;
    out.lambda = normalized_weights(T.spectrum());
    if (T.dense) {
        Mat r = T.dense->adjoint() * *T.dense;
        out.rho = r / r.trace().real();
    }
    return out;
}

double entropy(const Spectrum& s, double alpha) {
    if (alpha < 0.0) throw DomainError("entropy: alpha must be nonnegative");
    const std::vector<double> w = normalized_weights(s);
    if (alpha == 0.0) return std::log(double(w.size()));
    if (alpha == 1.0) {
        double acc = 0.0;
        for (double x : w) acc -= x * std::log(x);
        return acc;
    }
    double acc = 0.0;
    for (double x : w) acc += std::pow(x, alpha);
    return std::log(acc) / (1.0 - alpha);
}

double entropy(const RTM& T, double alpha) { return entropy(T.spectrum(), alpha); }

double shannon(const std::vector<double>& p) {
    double acc = 0.0;
    for (double x : p)
        if (x > 0.0) acc -= x * std::log(x);
    return acc;
}

double operator_norm(const Mat& o) {
    Eigen::JacobiSVD<Mat> dec(o);
    return dec.singularValues().size() ? dec.singularValues()(0) : 0.0;
}

std::string SweepReport::to_json() const {
    nlohmann::json j;
    j["steps"] = nlohmann::json::array();
    for (const auto& s : steps) j["steps"].push_back({{"bond", s.bond}, {"chi", s.chi}, {"epsilon", s.epsilon}});
    j["total_bound"] = total_bound;
    j["probes"] = nlohmann::json::array();
    for (const auto& p : probes)
        j["probes"].push_back({{"name", p.name}, {"measured_error", p.measured_error}, {"bound", p.bound}});
    return j.dump(2);
}

const ProbeResult& SweepResult::probe(const InfluenceMatrix& L0, const InfluenceMatrix& R0, const std::string& name,
                                      const Mat& o) {
    ProbeResult p;
    p.name = name;
    p.measured_error = std::abs(expectation(L0, R0, o) - expectation(L, R, o));
    p.bound = operator_norm(o) * report.total_bound;
    report.probes.push_back(p);
    return report.probes.back();
}

SweepResult joint_sweep(const InfluenceMatrix& L, const InfluenceMatrix& R, const Schedule& schedule) {
    if (L.t != R.t || L.d != R.d || L.side != Side::left || R.side != Side::right)
        throw ContractError("joint_sweep: incompatible influence matrices");
    if (!schedule.chi.empty() && !schedule.eps.empty())
        throw ConfigError("joint_sweep: give either ranks or tolerances, not both");
    const int t = L.t;
    if (int(schedule.size()) < t)
        throw ConfigError("joint_sweep: schedule has " + std::to_string(schedule.size()) + " entries for " +
                          std::to_string(t) + " bonds");
    SweepResult out{L, R, {}};
    chain::right_canonicalize(out.L);
    chain::right_canonicalize(out.R);
    const int q = L.q();
    Mat e = Mat::Ones(1, 1);
    for (int j = 1; j <= t; ++j) {
        SiteTensor& la = out.L.sites[j - 1];
        SiteTensor& ra = out.R.sites[j - 1];
        Mat nxt = Mat::Zero(la.dr, ra.dr);
        for (int s = 0; s < q; ++s) nxt.noalias() += la.slice(s).transpose() * (e * ra.slice(s));
        Eigen::BDCSVD<Mat> dec(nxt, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (dec.info() != Eigen::Success) throw NumericalError("joint_sweep: svd did not converge");
        const Eigen::VectorXd& sv = dec.singularValues();
        const Eigen::Index n = sv.size();
        Eigen::Index nz = 0;
        while (nz < n && sv(nz) > Spectrum::clip_rel * sv(0)) ++nz;
        nz = std::max<Eigen::Index>(nz, 1);
        Eigen::Index k;
        if (!schedule.chi.empty()) {
            const int c = schedule.chi[j - 1];
            if (c < 1) throw ConfigError("joint_sweep: ranks must be positive");
            k = std::min<Eigen::Index>(c, nz);
        } else {
            const double eps = schedule.eps[j - 1];
            if (eps < 0.0) throw ConfigError("joint_sweep: tolerances must be nonnegative");
            k = nz;
            double tail = sv.tail(n - nz).sum();
            while (k > 1 && tail + sv(k - 1) <= eps) tail += sv(--k);
        }
        const double eps_j = sv.tail(n - k).sum();
        const Mat u = dec.matrixU().leftCols(k), v = dec.matrixV().leftCols(k);
        SiteTensor& lb = out.L.sites[j];
        SiteTensor& rb = out.R.sites[j];
        SiteTensor nla(la.dl, q, int(k)), nra(ra.dl, q, int(k)), nlb(int(k), q, lb.dr), nrb(int(k), q, rb.dr);
        nla.grouped_left() = Mat(la.grouped_left()) * u.conjugate();
        nra.grouped_left() = Mat(ra.grouped_left()) * v;
        nlb.grouped_right() = u.transpose() * Mat(lb.grouped_right());
        nrb.grouped_right() = v.adjoint() * Mat(rb.grouped_right());
        la = std::move(nla);
        ra = std::move(nra);
        lb = std::move(nlb);
        rb = std::move(nrb);
        e = sv.head(k).cast<cplx>().asDiagonal();
        out.report.steps.push_back({j, int(k), eps_j});
        out.report.total_bound += eps_j;
    }
    return out;
}

}  // namespace rtm
