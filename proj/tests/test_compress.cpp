#include <doctest.h>

#include <cmath>

#include "rtm/rtm_compress.hpp"

using namespace rtm;

namespace {

double trace_norm(const Mat& m) { return singular_values(m).sum(); }

RTM dense_rtm(const Mat& m) {
    RTM r;
    r.core = m;
    r.dense = m;
    return r;
}

struct Pair {
    InfluenceMatrix L, R;
};

Pair fixed_pair(int t) {
    CircuitSpec c = uniform_circuit(du_gate_w_fixed(0.625), t, random_dimer(2, 1));
    return {build_influence(c, Side::left), build_influence(c, Side::right)};
}

}  // namespace

TEST_CASE("truncation keeps everything at or above the rank") {
    Mat m = Mat::Random(4, 3) * Mat::Random(3, 5);
    Truncation tr = truncate_mirsky(dense_rtm(m), 3);
    CHECK(tr.tail < 1e-10);
    CHECK((*tr.rtm.dense - m).norm() < 1e-10);
    Mat r1 = Vec::Random(4) * Vec::Random(6).transpose();
    Truncation one = truncate_mirsky(dense_rtm(r1), 1);
    CHECK((*one.rtm.dense - r1).norm() < 1e-12);
    CHECK_THROWS_AS(truncate_mirsky(dense_rtm(r1), 0), DomainError);
}

TEST_CASE("truncation beats random rank-3 candidates in trace norm") {
    Rng rng(17);
    std::normal_distribution<double> n;
    auto rnd = [&](int r, int c) {
        Mat m(r, c);
        for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = {n(rng), n(rng)};
        return m;
    };
    Mat t = rnd(6, 6);
    Truncation tr = truncate_mirsky(dense_rtm(t), 3);
    const double best = trace_norm(t - *tr.rtm.dense);
    CHECK(std::abs(best - tr.tail) < 1e-10);
    Svd f = svd(t);
    Mat a = f.left.leftCols(3) * Eigen::Map<const Eigen::VectorXd>(f.s.values.data(), 3).cast<cplx>().asDiagonal();
    Mat b = f.right_h.topRows(3);
    double cand_min = 1e300;
    for (int k = 0; k < 200; ++k) {
        // half perturb the optimal factors, half are unstructured
        Mat c = k % 2 == 0 ? Mat((a + 0.05 * rnd(6, 3)) * (b + 0.05 * rnd(3, 6))) : Mat(rnd(6, 3) * rnd(3, 6) / 3.0);
        REQUIRE(singular_values(c).rank() <= 3);
        cand_min = std::min(cand_min, trace_norm(t - c));
    }
    CHECK(best <= cand_min);
}

TEST_CASE("entropy of simple spectra") {
    Spectrum one = Spectrum::make({2.0}, Spectrum::Kind::singular);
    for (double a : {0.0, 0.5, 1.0, 2.0}) CHECK(std::abs(entropy(one, a)) < 1e-15);
    Spectrum flat = Spectrum::make({0.3, 0.3, 0.3, 0.3, 0.3}, Spectrum::Kind::singular);
    for (double a : {0.0, 0.5, 1.0, 2.0}) CHECK(entropy(flat, a) == doctest::Approx(std::log(5.0)));
    Spectrum s = Spectrum::make({3.0, 2.0, 1.0, 0.5}, Spectrum::Kind::singular);
    // Renyi entropies do not increase with alpha
    CHECK(entropy(s, 0.0) >= entropy(s, 0.5));
    CHECK(entropy(s, 0.5) >= entropy(s, 1.0));
    CHECK(entropy(s, 1.0) >= entropy(s, 2.0));
    CHECK(entropy(s, 1.0 + 1e-7) == doctest::Approx(entropy(s, 1.0)).epsilon(1e-5));
    CHECK_THROWS_AS(entropy(Spectrum::make({0.0, 0.0}, Spectrum::Kind::singular)), PreconditionError);
    CHECK_THROWS_AS(entropy(s, -1.0), DomainError);
    CHECK(shannon({0.5, 0.5, 0.0}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("density operator eigenvalues are normalized squared singular values") {
    Mat m = Mat::Random(9, 7);
    DensityOp rho = density_op(dense_rtm(m));
    REQUIRE(rho.rho);
    Eigh e = eigh(*rho.rho);
    Spectrum s = singular_values(m);
    for (std::size_t n = 0; n < rho.lambda.size(); ++n) {
        CHECK(std::abs(rho.lambda[n] - s.values[n] * s.values[n] / s.sum_sq()) < 1e-12);
        CHECK(std::abs(e.values(Eigen::Index(n)) - rho.lambda[n]) < 1e-10);
    }
}

TEST_CASE("entropies respect the dimensional bounds") {
    const int t = 8;
    Pair p = fixed_pair(t);
    auto all = build_rtm_all(p.L, p.R);
    for (const RTM& T : all) {
        const double s0 = entropy(T, 0.0);
        CHECK(s0 <= 2 * T.t0 * std::log(2.0) + 1e-12);
        CHECK(s0 <= (t + 1 - T.t0) * std::log(4.0) + 1e-12);
        CHECK(entropy(T, 1.0) <= s0 + 1e-12);
    }
}

TEST_CASE("sweep with zero tolerance changes nothing observable") {
    // bond components of one side that never pair with the other are projected out, so
    // the chains and the partially contracted matrices differ; the fully contracted
    // environment below the top leg, and hence every observable, is unchanged
    Pair p = fixed_pair(4);
    SweepResult r = joint_sweep(p.L, p.R, Schedule::tolerances(std::vector<double>(4, 0.0)));
    CHECK(r.report.total_bound < 1e-12);
    for (int t0 : {4, 5}) {
        Spectrum a = build_rtm(p.L, p.R, t0).spectrum(), b = build_rtm(r.L, r.R, t0).spectrum();
        REQUIRE(a.rank() == b.rank());
        for (std::size_t n = 0; n < a.rank(); ++n) CHECK(std::abs(a.values[n] - b.values[n]) < 1e-10);
    }
    for (char c : {'I', 'X', 'Y', 'Z'}) CHECK(r.probe(p.L, p.R, std::string(1, c), pauli(c)).measured_error < 1e-12);
}

TEST_CASE("sweep certificate holds for random schedules") {
    Pair p = fixed_pair(4);
    Rng rng(99);
    std::uniform_int_distribution<int> chi(1, 4);
    std::uniform_real_distribution<double> eps(0.0, 0.2);
    for (int n = 0; n < 20; ++n) {
        Schedule s;
        if (n % 2 == 0)
            for (int j = 0; j < 4; ++j) s.chi.push_back(chi(rng));
        else
            for (int j = 0; j < 4; ++j) s.eps.push_back(eps(rng));
        SweepResult r = joint_sweep(p.L, p.R, s);
        double sum = 0;
        for (const auto& st : r.report.steps) sum += st.epsilon;
        CHECK(sum == doctest::Approx(r.report.total_bound));
        for (char c : {'I', 'X', 'Y', 'Z'}) {
            const ProbeResult& pr = r.probe(p.L, p.R, std::string(1, c), pauli(c));
            CHECK(pr.measured_error <= pr.bound + 1e-12);
        }
        // normalization probe: |<L'|R'> - 1|
        CHECK(std::abs(overlap(r.L, r.R) - 1.0) <= r.report.total_bound + 1e-12);
    }
}

TEST_CASE("fixed-rank sweep at t = 4") {
    Pair p = fixed_pair(4);
    SweepResult r = joint_sweep(p.L, p.R, Schedule::ranks({2, 2, 2, 2}));
    for (const auto& st : r.report.steps) CHECK(st.chi <= 2);
    for (char c : {'X', 'Y', 'Z'}) {
        const ProbeResult& pr = r.probe(p.L, p.R, std::string(1, c), pauli(c));
        CHECK(pr.measured_error <= pr.bound);
    }
    CHECK(r.report.to_json().find("total_bound") != std::string::npos);
}

TEST_CASE("sweep schedule validation") {
    Pair p = fixed_pair(3);
    CHECK_THROWS_AS(joint_sweep(p.L, p.R, Schedule::ranks({2, 2})), ConfigError);
    Schedule both{{1, 1, 1}, {0.1, 0.1, 0.1}};
    CHECK_THROWS_AS(joint_sweep(p.L, p.R, both), ConfigError);
    CHECK_THROWS_AS(joint_sweep(p.L, p.R, Schedule::ranks({2, 0, 2})), ConfigError);
    CHECK(operator_norm(pauli('X')) == doctest::Approx(1.0));
}
