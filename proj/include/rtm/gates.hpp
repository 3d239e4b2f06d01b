#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "rtm/numkernel.hpp"

namespace rtm {

// Two-site gate. Row/column index = left-site * d + right-site.
struct Gate {
    int d = 2;
    Mat m;
};

// (U ⊗ U*)^{⊗n} with legs (out-left, out-right, in-left, in-right), each of
// dimension d^{2n}. Inside a leg the copies are ordered ket1, bra1, ..., ketn, bran.
struct FoldedGate {
    int d = 2;
    int n = 1;
    DenseTensor t;
    std::size_t leg_dim() const { return t.dim(0); }
};

// Pairing states on a two-replica leg (dimension d^4), all normalised to <x|x> = d^2.
struct ReplicaStates {
    int d = 2;
    Vec circle;  // ket1-bra1, ket2-bra2
    Vec square;  // ket1-bra2, bra1-ket2
    Vec bullet;  // (d square - circle)/sqrt(d^2-1)

    static ReplicaStates make(int d);
};

// δ_ab on a single folded leg (dimension d^2).
Vec circle_state(int d);

constexpr double kDuTol = 1e-9;
constexpr double kFixtureTol = 1e-4;

double coupling_j(double p);
Gate du_gate_u(double p);

// The four single-qubit dressings as printed (5 significant digits).
struct FixedDressing {
    Mat v_plus, v_minus, u_plus, u_minus;
    static FixedDressing raw();
    static FixedDressing projected();  // each matrix replaced by its nearest unitary
};

// W(p) = (v+ ⊗ v-) U(p) (u+ ⊗ u-)
Gate du_gate_w(double p, const FixedDressing& dr);
Gate du_gate_w_fixed(double p);
// W_sym(p) = (u ⊗ u) U(p) (v ⊗ v)
Gate du_gate_w_symmetric(double p, const Mat& u, const Mat& v);
Gate du_gate_w_symmetric(double p, std::uint64_t seed);
// Independent Haar dressing on all four legs.
Gate du_gate_w_random(double p, std::uint64_t seed);
// (a ⊗ b) g (c ⊗ e)
Gate dress(const Gate& g, const Mat& a, const Mat& b, const Mat& c, const Mat& e);

Gate identity_gate(int d);
Gate swap_gate(int d);
Gate haar_gate(int d, std::uint64_t seed);
// SWAP · exp(i J a b) on |a b>, dual unitary for every J and every d.
Gate phase_swap_gate(int d, double jcoupling);

// Space-time reshuffle: rows (in-right, out-right), columns (in-left, out-left).
Mat reshuffle(const Gate& g);
double dual_unitarity_residual(const Gate& g);
bool is_dual_unitary(const Gate& g, double tol = kDuTol);
void require_unitary(const Gate& g, double tol = kDuTol);

FoldedGate fold(const Gate& g, int n);
// Folded one-replica gate as a d^4 x d^4 matrix, rows (oL, oR), columns (iL, iR).
Mat fold1_matrix(const Gate& g);
// Folded dimer |ψ><ψ| as a d^2 x d^2 matrix over (left leg, right leg).
Mat fold_dimer(const Vec& psi, int d);

// fold(g,2) projected on span{○/d, ●/d} for every leg, basis (○○, ○●, ●○, ●●).
Eigen::Matrix4d projected_fold2(const Gate& g);
double entangling_power(const Gate& g, double tol = kDuTol);
Eigen::Matrix4d averaged_gate(int d, double p);

// JSON fixture {d, matrix: [[re, im], ...]} row-major.
Gate gate_from_json(const std::string& text);
std::string gate_to_json(const Gate& g);
Gate load_gate_file(const std::string& path);

}  // namespace rtm
