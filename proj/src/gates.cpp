#include "rtm/gates.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace rtm {

using json = nlohmann::json;

namespace {

// Pairing state on one site of four copies (k1, b1, k2, b2), dimension d^4.
Vec pairing(int d, bool square) {
    Vec v = Vec::Zero(d * d * d * d);
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) {
            if (square)
                v(((a * d + c) * d + c) * d + a) = 1.0;  // k1=b2, b1=k2
            else
                v(((a * d + a) * d + c) * d + c) = 1.0;  // k1=b1, k2=b2
        }
    return v;
}

// Apply U to ket copies and U* to bra copies of a four-copy two-site vector laid out
// copy-major: index = ((c0 * d^2 + c1) * d^2 + c2) * d^2 + c3, each c = left*d + right.
Vec apply_replicated(const Mat& u, const Vec& in) {
    const Eigen::Index q = u.rows();
    Vec cur = in;
    for (int c = 0; c < 4; ++c) {
        const Mat op = (c % 2 == 0) ? u : Mat(u.conjugate());
        Eigen::Index inner = 1;
        for (int k = c + 1; k < 4; ++k) inner *= q;
        const Eigen::Index outer = cur.size() / (q * inner);
        Vec nxt(cur.size());
        for (Eigen::Index o = 0; o < outer; ++o) {
            Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                blk(cur.data() + o * q * inner, q, inner);
            Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dst(
                nxt.data() + o * q * inner, q, inner);
            dst.noalias() = op * blk;
        }
        cur.swap(nxt);
    }
    return cur;
}

// Combine a left-site pairing vector and a right-site pairing vector (each over copies
// (k1,b1,k2,b2)) into the copy-major two-site layout used by apply_replicated.
Vec two_site(int d, const Vec& left, const Vec& right) {
    const int q = d * d;
    Vec out = Vec::Zero(Eigen::Index(q) * q * q * q);
    for (int l = 0; l < d * d * d * d; ++l) {
        if (left(l) == cplx(0.0)) continue;
        const int l0 = l / (d * d * d), l1 = (l / (d * d)) % d, l2 = (l / d) % d, l3 = l % d;
        for (int r = 0; r < d * d * d * d; ++r) {
            if (right(r) == cplx(0.0)) continue;
            const int r0 = r / (d * d * d), r1 = (r / (d * d)) % d, r2 = (r / d) % d, r3 = r % d;
            const int idx = (((l0 * d + r0) * q + (l1 * d + r1)) * q + (l2 * d + r2)) * q + (l3 * d + r3);
            out(idx) += left(l) * right(r);
        }
    }
    return out;
}

Mat mat2(cplx a, cplx b, cplx c, cplx e) {
    Mat m(2, 2);
    m << a, b, c, e;
    return m;
}

}  // namespace

ReplicaStates ReplicaStates::make(int d) {
    ReplicaStates s;
    s.d = d;
    s.circle = pairing(d, false);
    s.square = pairing(d, true);
    const double n = std::sqrt(double(d) * d - 1.0);
    s.bullet = (double(d) * s.square - s.circle) / n;
    return s;
}

Vec circle_state(int d) {
    Vec v = Vec::Zero(d * d);
    for (int a = 0; a < d; ++a) v(a * d + a) = 1.0;
    return v;
}

double coupling_j(double p) { return 0.5 * std::asin(std::sqrt(1.0 - 1.5 * p)); }

Gate du_gate_u(double p) {
    if (!(p >= 0.0 && p <= 2.0 / 3.0 + 1e-15))
        throw DomainError("du_gate_u: p must lie in [0, 2/3], got " + std::to_string(p));
    const double j = coupling_j(std::min(p, 2.0 / 3.0));
    const cplx i(0.0, 1.0);
    const cplx e1 = std::exp(-i * j), e2 = -i * std::exp(i * j);
    Gate g{2, Mat::Zero(4, 4)};
    g.m(0, 0) = e1;
    g.m(1, 2) = e2;
    g.m(2, 1) = e2;
    g.m(3, 3) = e1;
    return g;
}

FixedDressing FixedDressing::raw() {
    using c = cplx;
    FixedDressing f;
    f.v_plus = mat2(c(-0.025047, -0.36705), c(-0.92114, -0.12704), c(0.90768, -0.20191),
                    c(0.0050415, 0.36787));
    f.v_minus = mat2(c(0.38001, -0.32098), c(0.43600, 0.74998), c(0.80711, 0.31803),
                     c(0.26005, -0.42404));
    f.u_plus = mat2(c(0.20391, -0.97064), c(-0.10791, -0.068044), c(0.12500, 0.025487),
                    c(-0.52404, 0.84209));
    f.u_minus = mat2(c(-0.27904, -0.92084), c(0.23803, 0.13237), c(-0.27185, 0.016684),
                     c(-0.64912, 0.71026));
    return f;
}

FixedDressing FixedDressing::projected() {
    FixedDressing f = raw();
    f.v_plus = polar_unitary(f.v_plus);
    f.v_minus = polar_unitary(f.v_minus);
    f.u_plus = polar_unitary(f.u_plus);
    f.u_minus = polar_unitary(f.u_minus);
    return f;
}

Gate dress(const Gate& g, const Mat& a, const Mat& b, const Mat& c, const Mat& e) {
    return Gate{g.d, kron(a, b) * g.m * kron(c, e)};
}

Gate du_gate_w(double p, const FixedDressing& dr) {
    return dress(du_gate_u(p), dr.v_plus, dr.v_minus, dr.u_plus, dr.u_minus);
}

Gate du_gate_w_fixed(double p) { return du_gate_w(p, FixedDressing::projected()); }

Gate du_gate_w_symmetric(double p, const Mat& u, const Mat& v) {
    if (unitarity_residual(u) > kDuTol || unitarity_residual(v) > kDuTol)
        throw PreconditionError("du_gate_w_symmetric: dressing matrices are not unitary");
    return dress(du_gate_u(p), u, u, v, v);
}

Gate du_gate_w_symmetric(double p, std::uint64_t seed) {
    Rng rng(seed);
    Mat u = haar_unitary(2, rng);
    Mat v = haar_unitary(2, rng);
    return du_gate_w_symmetric(p, u, v);
}

Gate du_gate_w_random(double p, std::uint64_t seed) {
    Rng rng(seed);
    Mat a = haar_unitary(2, rng), b = haar_unitary(2, rng);
    Mat c = haar_unitary(2, rng), e = haar_unitary(2, rng);
    return dress(du_gate_u(p), a, b, c, e);
}

Gate identity_gate(int d) { return Gate{d, Mat::Identity(d * d, d * d)}; }

Gate swap_gate(int d) {
    Gate g{d, Mat::Zero(d * d, d * d)};
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) g.m(b * d + a, a * d + b) = 1.0;
    return g;
}

Gate haar_gate(int d, std::uint64_t seed) {
    Rng rng(seed);
    return Gate{d, haar_unitary(d * d, rng)};
}

Gate phase_swap_gate(int d, double jcoupling) {
    Gate g{d, Mat::Zero(d * d, d * d)};
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            g.m(b * d + a, a * d + b) = std::exp(cplx(0.0, jcoupling * a * b));
    return g;
}

Mat reshuffle(const Gate& g) {
    const int d = g.d;
    Mat r(d * d, d * d);
    for (int oL = 0; oL < d; ++oL)
        for (int oR = 0; oR < d; ++oR)
            for (int iL = 0; iL < d; ++iL)
                for (int iR = 0; iR < d; ++iR)
                    r(iR * d + oR, iL * d + oL) = g.m(oL * d + oR, iL * d + iR);
    return r;
}

double dual_unitarity_residual(const Gate& g) { return unitarity_residual(reshuffle(g)); }

bool is_dual_unitary(const Gate& g, double tol) {
    return unitarity_residual(g.m) <= tol && dual_unitarity_residual(g) <= tol;
}

void require_unitary(const Gate& g, double tol) {
    if (g.m.rows() != g.d * g.d || g.m.cols() != g.d * g.d)
        throw PreconditionError("gate matrix must be d^2 x d^2");
    if (unitarity_residual(g.m) > tol) throw PreconditionError("gate is not unitary");
}

FoldedGate fold(const Gate& g, int n) {
    if (n < 1) throw DomainError("fold: n must be positive");
    const int d = g.d;
    const std::size_t q = std::size_t(d) * d;
    std::size_t leg = 1;
    for (int c = 0; c < n; ++c) leg *= q;
    check_budget(leg * leg * leg * leg, "fold");
    Mat f1 = fold1_matrix(g);  // rows (oL,oR), cols (iL,iR), each leg (ket,bra)
    DenseTensor t({leg, leg, leg, leg});
    auto& data = t.data();
    std::vector<std::size_t> digit(4 * n);
    for (std::size_t oL = 0; oL < leg; ++oL)
        for (std::size_t oR = 0; oR < leg; ++oR)
            for (std::size_t iL = 0; iL < leg; ++iL)
                for (std::size_t iR = 0; iR < leg; ++iR) {
                    cplx v = 1.0;
                    std::size_t a = oL, b = oR, c = iL, e = iR;
                    for (int k = 0; k < n && v != cplx(0.0); ++k) {
                        // last replica sits in the lowest digits
                        v *= f1(Eigen::Index((a % q) * q + b % q), Eigen::Index((c % q) * q + e % q));
                        a /= q;
                        b /= q;
                        c /= q;
                        e /= q;
                    }
                    data[((oL * leg + oR) * leg + iL) * leg + iR] = v;
                }
    return FoldedGate{d, n, std::move(t)};
}

Mat fold1_matrix(const Gate& g) {
    const int d = g.d, q = d * d;
    Mat f(q * q, q * q);
    for (int oL = 0; oL < q; ++oL)
        for (int oR = 0; oR < q; ++oR)
            for (int iL = 0; iL < q; ++iL)
                for (int iR = 0; iR < q; ++iR) {
                    const int ko = (oL / d) * d + oR / d, bo = (oL % d) * d + oR % d;
                    const int ki = (iL / d) * d + iR / d, bi = (iL % d) * d + iR % d;
                    f(oL * q + oR, iL * q + iR) = g.m(ko, ki) * std::conj(g.m(bo, bi));
                }
    return f;
}

Mat fold_dimer(const Vec& psi, int d) {
    const int q = d * d;
    if (psi.size() != q) throw PreconditionError("dimer state must have d^2 entries");
    Mat m(q, q);
    for (int l = 0; l < q; ++l)
        for (int r = 0; r < q; ++r) {
            const int kl = l / d, bl = l % d, kr = r / d, br = r % d;
            m(l, r) = psi(kl * d + kr) * std::conj(psi(bl * d + br));
        }
    return m;
}

Eigen::Matrix4d projected_fold2(const Gate& g) {
    const int d = g.d;
    ReplicaStates rs = ReplicaStates::make(d);
    const Vec e[2] = {rs.circle / double(d), rs.bullet / double(d)};
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i) {
        Vec in = two_site(d, e[i / 2], e[i % 2]);
        Vec out = apply_replicated(g.m, in);
        for (int o = 0; o < 4; ++o) {
            const cplx v = two_site(d, e[o / 2], e[o % 2]).dot(out);
            if (std::abs(v.imag()) > 1e-8) throw NumericalError("projected gate has imaginary entries");
            m(o, i) = v.real();
        }
    }
    return m;
}

Eigen::Matrix4d averaged_gate(int d, double p) {
    const double s = p / std::sqrt(double(d) * d - 1.0);
    Eigen::Matrix4d m;
    m << 1, 0, 0, 0,
         0, 0, 1 - p, s,
         0, 1 - p, 0, s,
         0, s, s, 1 - 2 * p / (double(d) * d - 1.0);
    return m;
}

double entangling_power(const Gate& g, double tol) {
    require_unitary(g, std::max(tol, kDuTol));
    Eigen::Matrix4d m = projected_fold2(g);
    const double p = m(1, 3) * std::sqrt(double(g.d) * g.d - 1.0);
    const double p_swap = 1.0 - m(2, 1);
    const double resid = (m - averaged_gate(g.d, p)).cwiseAbs().maxCoeff();
    if (resid > tol)
        throw PreconditionError("entangling_power: gate is not dual unitary or does not match the "
                                "averaged template (residual " + std::to_string(resid) + ")");
    if (std::abs(p - p_swap) > tol)
        throw NumericalError("entangling_power: inconsistent readouts " + std::to_string(p) + " vs " +
                             std::to_string(p_swap));
    return p;
}

Gate gate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("gate fixture: ") + e.what());
    }
    if (!j.contains("d") || !j.contains("matrix")) throw ConfigError("gate fixture needs d and matrix");
    const int d = j["d"].get<int>();
    const auto& m = j["matrix"];
    const int q = d * d;
    if (!m.is_array() || int(m.size()) != q * q) throw ConfigError("gate fixture matrix must have d^4 entries");
    Gate g{d, Mat(q, q)};
    for (int k = 0; k < q * q; ++k) g.m(k / q, k % q) = cplx(m[k].at(0).get<double>(), m[k].at(1).get<double>());
    return g;
}

std::string gate_to_json(const Gate& g) {
    json j;
    j["d"] = g.d;
    json m = json::array();
    for (Eigen::Index r = 0; r < g.m.rows(); ++r)
        for (Eigen::Index c = 0; c < g.m.cols(); ++c) m.push_back({g.m(r, c).real(), g.m(r, c).imag()});
    j["matrix"] = m;
    return j.dump();
}

Gate load_gate_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open gate fixture " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return gate_from_json(ss.str());
}

}  // namespace rtm
