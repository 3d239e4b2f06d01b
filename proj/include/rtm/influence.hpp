#pragma once

#include <optional>
#include <vector>

#include "rtm/circuit.hpp"
#include "rtm/lightcone.hpp"

namespace rtm {

// Circuit seen from the observable: site 0 carries the observable, bonds are relative to it.
struct CircuitSpec {
    int d = 2;
    int t = 0;  // gate rows
    Vec psi0;
    GateField gate_at;

    void validate() const;
};

CircuitSpec uniform_circuit(const Gate& g, int t, const Vec& psi0);
CircuitSpec relative_to(const BrickworkSpec& spec, int site);

// Site tensor (dl, q, dr) in row-major order.
struct SiteTensor {
    int dl = 1, q = 4, dr = 1;
    std::vector<cplx> data;

    SiteTensor() = default;
    SiteTensor(int dl_, int q_, int dr_) : dl(dl_), q(q_), dr(dr_), data(std::size_t(dl_) * q_ * dr_) {}
    Eigen::Map<RowMat> grouped_left() { return {data.data(), dl * q, dr}; }
    Eigen::Map<const RowMat> grouped_left() const { return {data.data(), dl * q, dr}; }
    Eigen::Map<RowMat> grouped_right() { return {data.data(), dl, q * dr}; }
    Eigen::Map<const RowMat> grouped_right() const { return {data.data(), dl, q * dr}; }
    // dl x dr slice at physical index s
    Mat slice(int s) const;
};

// Folded influence matrix over legs j = 0..t, stored as an open chain bottom to top.
struct InfluenceMatrix {
    Side side = Side::left;
    int t = 0;
    int d = 2;
    std::vector<SiteTensor> sites;

    int legs() const { return t + 1; }
    int q() const { return d * d; }
    bool owns_top() const { return (t % 2 == 1) == (side == Side::right); }
    std::vector<int> bonds() const;
    int max_bond() const;
    Vec to_dense() const;
};

struct InfluenceOptions {
    double cutoff = 1e-14;  // relative singular-value cutoff of the exact chain
    int dense_max_t = -1;   // build densely up to this depth, then split into a chain
};

// Dense vector over the t+1 legs, leg 0 most significant.
Vec build_influence_dense(const CircuitSpec& spec, Side side);
InfluenceMatrix build_influence(const CircuitSpec& spec, Side side, const InfluenceOptions& opt = {});
InfluenceMatrix chain_from_dense(const Vec& v, Side side, int t, int d, double cutoff = 1e-14);

cplx overlap(const InfluenceMatrix& L, const InfluenceMatrix& R);
// Folded matrix of a local observable on the top leg for the given top owner.
Mat folded_observable(const Mat& o, bool right_owns_top);
cplx expectation(const InfluenceMatrix& L, const InfluenceMatrix& R, const Mat& o);

// Reduced transition matrix after contracting the bottom t0 legs.
// Rows index the open left legs and columns the open right legs. `core` shares the
// nonzero singular values of the full matrix; `dense` holds the explicit matrix on request.
struct RTM {
    int t = 0;
    int t0 = 0;
    int d = 2;
    bool reduced = false;
    int row_legs = 0;
    int col_legs = 0;
    Mat core;
    std::optional<Mat> dense;
    // reduced networks only
    std::vector<Leg> row_leg_list, col_leg_list;
    Side top_side = Side::left;
    double scale = 1.0;  // reduced dense = raw trapezoid contraction * scale

    Spectrum spectrum() const;
};

RTM build_rtm(const InfluenceMatrix& L, const InfluenceMatrix& R, int t0, bool explicit_matrix = false);
// Cores for every t0 = 0..t+1 from one pair of sweeps.
std::vector<RTM> build_rtm_all(const InfluenceMatrix& L, const InfluenceMatrix& R);
RTM build_rtm_dense(const Vec& L, const Vec& R, int t, int d, int t0);
// tr over all legs of T with the folded observable on the top leg.
cplx rtm_expectation(const RTM& T, const Mat& o);

// Peeled dual-unitary network: folded tensors with their ○ caps, free legs ordered valley to apex.
struct ReducedNetwork {
    std::vector<LabeledTensor> tensors;
    std::vector<Leg> row_legs, col_legs;
    Side top_side = Side::left;
    int ncaps = 0;
};

ReducedNetwork reduced_network(const CircuitSpec& spec, int t0);
// Dense matrix of the peeled network rescaled by d^{ncaps/2}; rows are left legs.
RTM reduce_rtm_dual_unitary(const CircuitSpec& spec, int t0);

// Chain utilities shared with the bound computations.
namespace chain {
// E_j: legs 0..j-1 contracted, dimension (bond_L(j), bond_R(j)).
std::vector<Mat> bottom_envs(const InfluenceMatrix& L, const InfluenceMatrix& R);
// M[a,(s,c)] = sum_b (op A)[a,s,b] G[b,c]
Mat expand(const SiteTensor& a, const Mat& g, const Mat* op = nullptr);
// X with M = X Q and Q having orthonormal rows (M itself when it is not wide).
Mat lq_left(const Mat& m);
// One step of the top-down factor sweep: returns X with M = X Q, Q orthonormal rows,
// where M[a,(s,c)] = sum_b (op A)[a,s,b] G[b,c].
Mat top_step(const SiteTensor& a, const Mat& g, const Mat* op = nullptr);
// Gauge the chain so that every site above leg 0 has orthonormal rows (dl x q*dr).
void right_canonicalize(InfluenceMatrix& X);
// G_j for j = 0..t+1 (legs j..t open), unprojected.
std::vector<Mat> top_factors(const InfluenceMatrix& X);
// v_j: legs j..t contracted with ○/sqrt(d).
std::vector<Mat> top_circle_vectors(const InfluenceMatrix& X);
}  // namespace chain

}  // namespace rtm
