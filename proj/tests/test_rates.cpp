#include <doctest.h>

#include <cmath>

#include "rtm/decay_rates.hpp"
#include "rtm/replica_average.hpp"

using namespace rtm;

TEST_CASE("averaged magnon rate") {
    CHECK(r_mag_avg(0.5, 2) == doctest::Approx(1.0));
    CHECK(r_mag_avg(0.0, 3) == 0.0);
    for (int d = 2; d <= 5; ++d) CHECK(std::abs(r_mag_avg(critical_p(d), d) - 2.0) < 1e-14);
    CHECK(std::isinf(r_mag_avg(1.0, 2)));
    CHECK_THROWS_AS(r_mag_avg(1.5, 2), DomainError);
}

TEST_CASE("gate magnon rates") {
    // undressed U(p) is diagonal up to SWAP, so its channels never mix
    for (double p : {0.0, 0.3}) {
        GateRates r = r_mag_gate(du_gate_u(p));
        CHECK(r.left.degenerate);
        CHECK(r.min() == 0.0);
    }
    // goldens for the fixed dressing at p = 0.625
    GateRates w = r_mag_gate(du_gate_w_fixed(0.625));
    CHECK(w.left.rate == doctest::Approx(0.182325530821948).epsilon(1e-9));
    CHECK(w.right.rate == doctest::Approx(1.42210702861295).epsilon(1e-9));
    CHECK(w.min() == w.left.rate);
    // symmetric dressings have equal channels and follow the averaged trend at small p
    for (double p : {0.05, 0.1}) {
        GateRates s = r_mag_gate(du_gate_w_symmetric(p, 1));
        CHECK(std::abs(s.left.rate - s.right.rate) < 1e-9);
        CHECK(std::abs(s.min() - r_mag_avg(p, 2)) < 0.2 * r_mag_avg(p, 2));
    }
    CHECK_THROWS_AS(r_mag_gate(haar_gate(2, 1)), PreconditionError);
}

TEST_CASE("light-cone channels are unital in the folded sense") {
    const Vec c = circle_state(2);
    for (Side s : {Side::left, Side::right}) {
        Mat m = light_cone_channel(du_gate_w_fixed(0.625), s);
        CHECK((m * c - c).norm() < 1e-10);
    }
}

TEST_CASE("fit recovers a synthetic exponential") {
    Series s;
    for (int t0 = 0; t0 <= 10; ++t0) s.push_back({t0, 0.3 * std::exp(-2.0 * t0 * std::log(2.0))});
    RateReport r = fit_pk_decay(s, 2);
    CHECK(std::abs(r.r_fit - 2.0) < 1e-10);
    CHECK(r.r2 == doctest::Approx(1.0));
    CHECK(r.window_lo == 5);
    CHECK(r.window_hi == 10);
    CHECK(r.points == 6);
    RateReport full = fit_pk_decay(s, 2, std::pair{0, 10});
    CHECK(full.points == 11);
    CHECK(std::abs(full.intercept - std::log(0.3)) < 1e-10);
}

TEST_CASE("fit domain errors") {
    Series bad{{0, 1.0}, {1, 0.5}, {2, 0.0}, {3, 0.1}};
    CHECK_THROWS_AS(fit_pk_decay(bad, 2, std::pair{0, 3}), DomainError);
    CHECK_THROWS_AS(fit_pk_decay({{0, 1.0}, {1, 0.5}}, 2), DomainError);
}

TEST_CASE("top sector series from bounds") {
    CircuitSpec c = uniform_circuit(du_gate_w_fixed(0.625), 6, random_dimer(2, 1));
    auto reps = bounds_from_influence(build_influence(c, Side::left), build_influence(c, Side::right),
                                      BoundMode::dual_unitary);
    Series s = top_sector_series(reps);
    CHECK(s.size() == 7);
    for (const auto& [t0, p] : s) {
        CHECK(p == reps[std::size_t(t0)].p.back());
        CHECK(p >= 0.0);
    }
}
