#pragma once

#include <optional>
#include <vector>

#include "rtm/influence.hpp"

namespace rtm {

// P_0 = [(1/d)|○><○|]^ell; P_k = 1^(k-1) ⊗ (1 - (1/d)|○><○|) ⊗ [(1/d)|○><○|]^(ell-k).
// Leg 0 (most significant) is the one next to A'.
struct ProjectorFamily {
    int d = 2;
    int ell = 1;
    std::vector<Mat> P;

    static ProjectorFamily make(int d, int ell);
    double orthogonality_residual() const;
    double completeness_residual() const;
};

struct BoundReport {
    int t = 0;
    int t0 = 0;
    std::vector<double> p;
    std::vector<double> s_sigma;
    double shannon = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::optional<double> exact;
};

// state: rows index A', columns index Ā' (leg 0 most significant).
BoundReport decompose(const Mat& state, const ProjectorFamily& fam);

// Rows A' (the non-owning side), columns Ā' (the top-owning side) of a reduced network.
Mat reduced_state(const RTM& reduced);

enum class BoundMode { dual_unitary, generic };

// Bounds for every t0 = 0..t+1 from the chain influence matrices.
// dual_unitary: the reduced-network family pulled back to the top-owning side.
// generic: the family over all open legs of the top-owning side.
std::vector<BoundReport> bounds_from_influence(const InfluenceMatrix& L, const InfluenceMatrix& R, BoundMode mode);

int free_legs_top(int t, int t0);  // t1 = ceil((t+1-t0)/2)

// 𝒜_k of the peeled network (raw, caps included): two-replica contraction with legs of dimension d^4.
double amplitude_Ak(const CircuitSpec& spec, int t0, int k);
// The same quantity as ||Ψ Q_k||^2 on the one-replica network.
double amplitude_Ak_direct(const CircuitSpec& spec, int t0, int k);

}  // namespace rtm
