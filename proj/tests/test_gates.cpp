#include <doctest.h>

#include <cmath>

#include "rtm/gates.hpp"

using namespace rtm;

namespace {

// ○ contracted on (in-left, out-left) of the folded gate, as a q x q matrix (out-right, in-right).
Mat contract_left_circles(const Gate& g) {
    const int q = g.d * g.d;
    const Mat f = fold1_matrix(g);
    const Vec c = circle_state(g.d);
    Mat out = Mat::Zero(q, q);
    for (int oL = 0; oL < q; ++oL)
        for (int iL = 0; iL < q; ++iL)
            if (c(oL) != cplx(0.0) && c(iL) != cplx(0.0))
                for (int oR = 0; oR < q; ++oR)
                    for (int iR = 0; iR < q; ++iR) out(oR, iR) += f(oL * q + oR, iL * q + iR);
    return out;
}

Mat contract_right_circles(const Gate& g) {
    const int q = g.d * g.d;
    const Mat f = fold1_matrix(g);
    const Vec c = circle_state(g.d);
    Mat out = Mat::Zero(q, q);
    for (int oR = 0; oR < q; ++oR)
        for (int iR = 0; iR < q; ++iR)
            if (c(oR) != cplx(0.0) && c(iR) != cplx(0.0))
                for (int oL = 0; oL < q; ++oL)
                    for (int iL = 0; iL < q; ++iL) out(oL, iL) += f(oL * q + oR, iL * q + iR);
    return out;
}

double linear_entropy_mean(const Gate& g, int samples, Rng& rng, double* se) {
    double s = 0, s2 = 0;
    for (int n = 0; n < samples; ++n) {
        Vec a = haar_unitary(2, rng).col(0), b = haar_unitary(2, rng).col(0);
        Vec psi = g.m * kron(a, b);
        Mat m = Eigen::Map<const Eigen::Matrix<cplx, 2, 2, Eigen::RowMajor>>(psi.data());
        Mat rho = m * m.adjoint();
        const double x = 1.0 - (rho * rho).trace().real();
        s += x;
        s2 += x * x;
    }
    const double mean = s / samples;
    *se = std::sqrt((s2 / samples - mean * mean) / samples);
    return mean;
}

}  // namespace

TEST_CASE("du_gate_u endpoints") {
    Gate g = du_gate_u(2.0 / 3.0);
    const cplx i(0, 1);
    Mat want = Mat::Zero(4, 4);
    want(0, 0) = 1;
    want(1, 2) = -i;
    want(2, 1) = -i;
    want(3, 3) = 1;
    CHECK((g.m - want).norm() < 1e-14);
    CHECK(coupling_j(2.0 / 3.0) == doctest::Approx(0.0));
    CHECK(coupling_j(0.0) == doctest::Approx(M_PI / 4));
    CHECK_THROWS_AS(du_gate_u(0.7), DomainError);
    CHECK_THROWS_AS(du_gate_u(-0.1), DomainError);
}

TEST_CASE("dual unitarity checks") {
    for (double p : {0.0, 0.1, 0.4, 0.5, 2.0 / 3.0}) CHECK(is_dual_unitary(du_gate_u(p)));
    CHECK(is_dual_unitary(du_gate_w_fixed(0.625)));
    CHECK(is_dual_unitary(du_gate_w_symmetric(0.3, 4)));
    CHECK(is_dual_unitary(du_gate_w_random(0.3, 5)));
    CHECK(is_dual_unitary(phase_swap_gate(3, 0.7)));
    CHECK_FALSE(is_dual_unitary(identity_gate(2)));
    int hits = 0;
    for (std::uint64_t s = 1; s <= 100; ++s) hits += is_dual_unitary(haar_gate(2, s)) ? 1 : 0;
    CHECK(hits == 0);
}

TEST_CASE("raw fixture dressing passes only at the fixture tolerance") {
    Gate raw = du_gate_w(0.625, FixedDressing::raw());
    CHECK(is_dual_unitary(raw, kFixtureTol));
    CHECK_FALSE(is_dual_unitary(raw, kDuTol));
    CHECK(entangling_power(raw, kFixtureTol) == doctest::Approx(0.625).epsilon(1e-4));
}

TEST_CASE("identity dressing leaves U(p) unchanged") {
    Mat id = Mat::Identity(2, 2);
    Gate a = du_gate_w_symmetric(0.4, id, id);
    CHECK((a.m - du_gate_u(0.4).m).norm() < 1e-15);
    CHECK_THROWS_AS(du_gate_w_symmetric(0.4, 2.0 * id, id), PreconditionError);
}

TEST_CASE("fold entries are U times conj(U)") {
    Gate g = haar_gate(2, 3);
    FoldedGate f = fold(g, 1);
    const int d = 2, q = 4;
    double worst = 0;
    for (int oL = 0; oL < q; ++oL)
        for (int oR = 0; oR < q; ++oR)
            for (int iL = 0; iL < q; ++iL)
                for (int iR = 0; iR < q; ++iR) {
                    const cplx want = g.m((oL / d) * d + oR / d, (iL / d) * d + iR / d) *
                                      std::conj(g.m((oL % d) * d + oR % d, (iL % d) * d + iR % d));
                    const cplx got = f.t({std::size_t(oL), std::size_t(oR), std::size_t(iL), std::size_t(iR)});
                    worst = std::max(worst, std::abs(want - got));
                }
    CHECK(worst < 1e-15);
}

TEST_CASE("folded identity is the identity") {
    FoldedGate f = fold(identity_gate(2), 2);
    const std::size_t n = f.leg_dim() * f.leg_dim();
    CHECK((f.t.as_matrix(2) - Mat::Identity(Eigen::Index(n), Eigen::Index(n))).norm() < 1e-15);
}

TEST_CASE("unitarity and dual-unitarity contraction identities") {
    const Vec c = circle_state(2);
    const Vec cc = kron(c, c);
    const Mat cm = c * c.transpose();
    for (const Gate& g : {du_gate_w_fixed(0.625), du_gate_u(0.2), du_gate_w_random(0.5, 9)}) {
        const Mat f = fold1_matrix(g);
        CHECK((f * cc - cc).norm() < 1e-10);
        CHECK((cc.transpose() * f - cc.transpose()).norm() < 1e-10);
        CHECK((contract_left_circles(g) - cm).norm() < 1e-10);
        CHECK((contract_right_circles(g) - cm).norm() < 1e-10);
    }
    Gate h = haar_gate(2, 1);
    CHECK((fold1_matrix(h) * cc - cc).norm() < 1e-10);
    CHECK((contract_left_circles(h) - cm).norm() > 1e-3);
}

TEST_CASE("replica states") {
    for (int d : {2, 3}) {
        ReplicaStates r = ReplicaStates::make(d);
        CHECK(r.circle.squaredNorm() == doctest::Approx(d * d));
        CHECK(r.square.squaredNorm() == doctest::Approx(d * d));
        CHECK(r.bullet.squaredNorm() == doctest::Approx(d * d));
        CHECK(std::abs(r.circle.dot(r.square) - cplx(d)) < 1e-12);
        CHECK(std::abs(r.circle.dot(r.bullet)) < 1e-12);
    }
}

TEST_CASE("entangling power of known gates") {
    CHECK(entangling_power(du_gate_u(0.5)) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(entangling_power(du_gate_u(0.0))) < 1e-9);
    CHECK(entangling_power(du_gate_w_fixed(0.625)) == doctest::Approx(0.625).epsilon(1e-9));
    CHECK_THROWS_AS(entangling_power(haar_gate(2, 2)), PreconditionError);
}

TEST_CASE("entangling power is invariant under single-site dressings") {
    Rng rng(77);
    const Gate core = du_gate_u(0.35);
    for (int n = 0; n < 50; ++n) {
        Mat a = haar_unitary(2, rng), b = haar_unitary(2, rng), c = haar_unitary(2, rng), e = haar_unitary(2, rng);
        CHECK(std::abs(entangling_power(dress(core, a, b, c, e)) - 0.35) < 1e-9);
    }
}

TEST_CASE("entangling power is proportional to the mean linear entropy") {
    Rng rng(13);
    double se1 = 0, se2 = 0;
    const double a = linear_entropy_mean(du_gate_u(0.5), 100000, rng, &se1);
    const double b = linear_entropy_mean(du_gate_u(2.0 / 3.0), 100000, rng, &se2);
    // ratio 0.5 / (2/3)
    const double ratio = a / b;
    const double se = ratio * std::sqrt(se1 * se1 / (a * a) + se2 * se2 / (b * b));
    CHECK(std::abs(ratio - 0.75) < 4 * se);
}

TEST_CASE("averaged gate structure") {
    Eigen::Vector4d oo(1, 0, 0, 0);
    for (int d : {2, 3, 5})
        for (double p : {0.0, 0.3, 0.75}) {
            Eigen::Matrix4d m = averaged_gate(d, p);
            CHECK((m * oo - oo).norm() < 1e-15);
            CHECK((m.transpose() * oo - oo).norm() < 1e-15);
        }
    Eigen::Matrix4d z = averaged_gate(2, 0.0);
    CHECK(z(1, 2) == 1.0);
    CHECK(z(2, 1) == 1.0);
    CHECK(z(3, 3) == 1.0);
    CHECK(averaged_gate(2, 0.75)(3, 3) == doctest::Approx(0.5));
    for (double p : {0.1, 0.5, 2.0 / 3.0}) CHECK((projected_fold2(du_gate_u(p)) - averaged_gate(2, p)).norm() < 1e-12);
}

TEST_CASE("gate json round trip") {
    Gate g = du_gate_w_fixed(0.625);
    Gate back = gate_from_json(gate_to_json(g));
    CHECK(back.d == 2);
    CHECK((back.m - g.m).norm() == 0.0);
    CHECK_THROWS_AS(gate_from_json("{\"d\": 2}"), ConfigError);
    CHECK_THROWS_AS(gate_from_json("not json"), ConfigError);
}
