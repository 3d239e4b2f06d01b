#pragma once

#include <functional>
#include <string>

#include "rtm/gates.hpp"

namespace rtm {

// Gate at (bond, row). Bond b couples sites b and b+1; rows are numbered from 1.
using GateField = std::function<Gate(int bond, int row)>;

GateField uniform_gates(const Gate& g);
// Independent dressing of a fixed core gate at every space-time position.
GateField dressed_gates(const Gate& core, std::uint64_t seed);

// Brickwork circuit on 2L qudits. Dimers occupy (s, s+1) with s - origin odd, and row r
// acts on bonds s with s - origin ≡ r - 1 (mod 2), so the first row straddles dimers.
struct BrickworkSpec {
    int d = 2;
    int L = 1;
    int t = 0;  // number of gate rows
    int origin = 1;
    Vec psi0;
    GateField gate_at;

    int sites() const { return 2 * L; }
    void validate() const;
};

struct LocalObservable {
    int site = 0;
    Mat o;
};

Mat pauli(char which);
Vec product_dimer(int d, int a, int b);
Vec bell_dimer(int d);
Vec random_dimer(int d, std::uint64_t seed);

Vec evolve_dense(const BrickworkSpec& spec);
cplx one_point_dense(const BrickworkSpec& spec, const LocalObservable& obs);

// Same circuit with every gate outside the past light cone of `site` replaced by the identity.
BrickworkSpec restrict_to_cone(const BrickworkSpec& spec, int site);

}  // namespace rtm
