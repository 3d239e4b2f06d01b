#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtm/influence.hpp"

namespace rtm {

struct Truncation {
    RTM rtm;
    double tail = 0.0;  // sum of the discarded singular values
};

// Keep the leading chi singular triples.
Truncation truncate_mirsky(const RTM& T, int chi);

// rho = T^dag T / tr(T^dag T); `rho` is filled only when T carries an explicit matrix.
struct DensityOp {
    std::vector<double> lambda;
    std::optional<Mat> rho;
};

DensityOp density_op(const RTM& T);
std::vector<double> normalized_weights(const Spectrum& s);
// alpha = 1 von Neumann, alpha = 0 log rank, otherwise Renyi.
double entropy(const Spectrum& s, double alpha = 1.0);
double entropy(const RTM& T, double alpha = 1.0);
double shannon(const std::vector<double>& p);

// Per-bond ranks or per-bond trace-norm tolerances, bonds counted from the bottom.
struct Schedule {
    std::vector<int> chi;
    std::vector<double> eps;

    static Schedule ranks(std::vector<int> c) { return Schedule{std::move(c), {}}; }
    static Schedule tolerances(std::vector<double> e) { return Schedule{{}, std::move(e)}; }
    std::size_t size() const { return chi.empty() ? eps.size() : chi.size(); }
};

struct SweepStep {
    int bond = 0;
    int chi = 0;
    double epsilon = 0.0;
};

struct ProbeResult {
    std::string name;
    double measured_error = 0.0;
    double bound = 0.0;  // ||O||_inf * sum of epsilon
};

struct SweepReport {
    std::vector<SweepStep> steps;
    double total_bound = 0.0;
    std::vector<ProbeResult> probes;

    std::string to_json() const;
};

struct SweepResult {
    InfluenceMatrix L, R;
    SweepReport report;

    // Records |<L|O|R> - <L'|O|R'>| against the certificate.
    const ProbeResult& probe(const InfluenceMatrix& L0, const InfluenceMatrix& R0, const std::string& name,
                             const Mat& o);
};

SweepResult joint_sweep(const InfluenceMatrix& L, const InfluenceMatrix& R, const Schedule& schedule);

double operator_norm(const Mat& o);

}  // namespace rtm
