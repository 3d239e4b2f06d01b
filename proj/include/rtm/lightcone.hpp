#pragma once

#include <array>
#include <compare>
#include <functional>
#include <map>
#include <vector>

#include "rtm/numkernel.hpp"

namespace rtm {

// Folded worldline segment of site x between rows j and j+1 (j = 0 is the dimer output).
struct Leg {
    int x = 0;
    int j = 0;
    auto operator<=>(const Leg&) const = default;
};

enum class Side { left = 0, right = 1 };

// A gate (row >= 1) or a dimer (row == 0) on bond (bond, bond+1).
struct ConeObject {
    int row = 0;
    int bond = 0;
    bool is_gate() const { return row > 0; }
    // gates: (out-left, out-right, in-left, in-right); dimers: (left, right)
    std::vector<Leg> legs() const;
    Side side() const { return bond + 1 <= 0 ? Side::left : Side::right; }
};

bool gate_in_cone(int t, int row, int bond);
int mod2(int x);

// Past light cone of the observable at site 0 after t rows.
struct LightCone {
    int t = 0;
    std::vector<ConeObject> objects;
    std::map<Leg, int> occurrences;

    explicit LightCone(int t);
    // side that produces the top leg (0, t)
    Side top_owner() const { return t % 2 == 1 ? Side::right : Side::left; }
};

// The network left after removing, on each side, every gate that dual unitarity
// turns into identities once legs (0, j >= t0) are left open.
struct PeeledSide {
    std::vector<ConeObject> objects;
    std::vector<Leg> free_legs;  // ordered from the contracted region outwards
    std::vector<Leg> caps;       // dangling legs that receive a ○
    bool owns_top = false;
};

struct Peeled {
    int t = 0;
    int t0 = 0;
    std::array<PeeledSide, 2> sides;
    int ncaps = 0;  // legs traced out by the peeling, singular values scale by d^{ncaps/2}
    Side top_side() const { return sides[1].owns_top ? Side::right : Side::left; }
    const PeeledSide& side(Side s) const { return sides[int(s)]; }
};

Peeled peel(int t, int t0);

struct LabeledTensor {
    DenseTensor t;
    std::vector<Leg> labels;
};

// Grow one tensor from the first entry, each time absorbing the connected entry with the
// smallest result and summing every shared label.
// The result's free labels are permuted into `order` (must match the leftover set).
LabeledTensor contract_sequence(const std::vector<LabeledTensor>& list, const std::vector<Leg>& order);

}  // namespace rtm
