#include <doctest.h>

#include "rtm/circuit.hpp"

using namespace rtm;

namespace {

BrickworkSpec make_spec(int L, int t, const GateField& g, const Vec& psi) {
    BrickworkSpec s;
    s.d = 2;
    s.L = L;
    s.t = t;
    s.origin = (L % 2 == 1) ? L : L - 1;
    s.psi0 = psi;
    s.gate_at = g;
    return s;
}

Vec product_state(const Vec& psi, int L) {
    Vec acc = Vec::Ones(1);
    for (int i = 0; i < L; ++i) acc = kron(acc, psi);
    return acc;
}

}  // namespace

TEST_CASE("t = 0 gives the product dimer state") {
    const Vec psi = random_dimer(2, 4);
    BrickworkSpec s = make_spec(3, 0, uniform_gates(du_gate_w_fixed(0.625)), psi);
    CHECK((evolve_dense(s) - product_state(psi, 3)).norm() < 1e-15);
}

TEST_CASE("identity gates leave the state unchanged") {
    const Vec psi = random_dimer(2, 5);
    for (int t : {1, 2, 5}) {
        BrickworkSpec s = make_spec(3, t, uniform_gates(identity_gate(2)), psi);
        CHECK((evolve_dense(s) - product_state(psi, 3)).norm() < 1e-14);
    }
}

TEST_CASE("evolution preserves the norm") {
    BrickworkSpec s = make_spec(3, 3, uniform_gates(du_gate_w_fixed(0.625)), random_dimer(2, 1));
    CHECK(std::abs(evolve_dense(s).norm() - 1.0) < 1e-10);
    BrickworkSpec h = make_spec(4, 4, dressed_gates(du_gate_u(0.3), 8), random_dimer(2, 2));
    CHECK(std::abs(evolve_dense(h).norm() - 1.0) < 1e-10);
}

TEST_CASE("one-point function basics") {
    BrickworkSpec s = make_spec(3, 2, uniform_gates(haar_gate(2, 3)), random_dimer(2, 6));
    CHECK(std::abs(one_point_dense(s, {s.origin, pauli('I')}) - 1.0) < 1e-12);
    for (char p : {'X', 'Y', 'Z'}) CHECK(std::abs(one_point_dense(s, {2, pauli(p)}).imag()) < 1e-10);
    BrickworkSpec z = make_spec(2, 0, uniform_gates(identity_gate(2)), product_dimer(2, 0, 0));
    CHECK(std::abs(one_point_dense(z, {1, pauli('Z')}) - 1.0) < 1e-15);
    CHECK_THROWS_AS(one_point_dense(s, {6, pauli('Z')}), DomainError);
}

TEST_CASE("gates outside the past light cone do not matter") {
    const Vec psi = random_dimer(2, 9);
    BrickworkSpec s = make_spec(4, 3, dressed_gates(haar_gate(2, 1), 3), psi);
    for (int site : {s.origin, s.origin + 1})
        for (char p : {'X', 'Y', 'Z'}) {
            const cplx full = one_point_dense(s, {site, pauli(p)});
            const cplx cone = one_point_dense(restrict_to_cone(s, site), {site, pauli(p)});
            CHECK(std::abs(full - cone) < 1e-12);
        }
    // the cone restriction is not vacuous
    BrickworkSpec r = restrict_to_cone(s, s.origin);
    CHECK((evolve_dense(r) - evolve_dense(s)).norm() > 1e-3);
}

TEST_CASE("spec validation and budget") {
    BrickworkSpec s = make_spec(2, 1, uniform_gates(identity_gate(2)), 2.0 * bell_dimer(2));
    CHECK_THROWS_AS(evolve_dense(s), PreconditionError);
    BrickworkSpec big = make_spec(15, 0, uniform_gates(identity_gate(2)), bell_dimer(2));
    CHECK_THROWS_AS(evolve_dense(big), ResourceError);
    CHECK_THROWS_AS(pauli('Q'), DomainError);
}
