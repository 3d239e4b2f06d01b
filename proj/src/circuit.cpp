#include "rtm/circuit.hpp"

#include <cmath>

namespace rtm {

namespace {

int mod2(int x) { return ((x % 2) + 2) % 2; }

// Apply an m x m operator to the middle factor of a vector viewed as (outer, m, inner).
void apply_block(Vec& v, const Mat& op, Eigen::Index outer, Eigen::Index inner) {
    const Eigen::Index m = op.rows();
    using RM = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RM tmp(m, inner);
    for (Eigen::Index o = 0; o < outer; ++o) {
        Eigen::Map<RM> blk(v.data() + o * m * inner, m, inner);
        tmp.noalias() = op * blk;
        blk = tmp;
    }
}

}  // namespace

GateField uniform_gates(const Gate& g) {
    return [g](int, int) { return g; };
}

GateField dressed_gates(const Gate& core, std::uint64_t seed) {
    return [core, seed](int bond, int row) {
        // one independent stream per position
        std::uint64_t key = seed * 0x9E3779B97F4A7C15ULL ^ (std::uint64_t(std::uint32_t(bond)) << 32) ^
                            std::uint64_t(std::uint32_t(row));
        Rng rng(key);
        const int d = core.d;
        Mat a = haar_unitary(d, rng), b = haar_unitary(d, rng);
        Mat c = haar_unitary(d, rng), e = haar_unitary(d, rng);
        return dress(core, a, b, c, e);
    };
}

void BrickworkSpec::validate() const {
    if (d < 2 || L < 1 || t < 0) throw ConfigError("brickwork spec: need d >= 2, L >= 1, t >= 0");
    if (psi0.size() != d * d) throw ConfigError("brickwork spec: dimer state must have d^2 entries");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw PreconditionError("dimer state is not normalised");
    if (t > 0 && !gate_at) throw ConfigError("brickwork spec: missing gates");
}

Mat pauli(char which) {
    Mat m(2, 2);
    const cplx i(0.0, 1.0);
    switch (which) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw DomainError(std::string("unknown Pauli ") + which);
    }
    return m;
}

Vec product_dimer(int d, int a, int b) {
    Vec v = Vec::Zero(d * d);
    v(a * d + b) = 1.0;
    return v;
}

Vec bell_dimer(int d) {
    Vec v = Vec::Zero(d * d);
    for (int a = 0; a < d; ++a) v(a * d + a) = 1.0 / std::sqrt(double(d));
    return v;
}

Vec random_dimer(int d, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(d * d);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

Vec evolve_dense(const BrickworkSpec& spec) {
    spec.validate();
    const int n = spec.sites(), d = spec.d;
    const Eigen::Index dim = ipow(d, n);
    check_budget(std::size_t(dim), "evolve_dense");
    if (mod2(spec.origin + 1) != 0) throw ConfigError("brickwork spec: origin must be an odd site");
    Vec v;
    {
        Vec acc = Vec::Ones(1);
        for (int s = 0; s < n; s += 2) {
            Vec nxt(acc.size() * spec.psi0.size());
            for (Eigen::Index i = 0; i < acc.size(); ++i)
                nxt.segment(i * spec.psi0.size(), spec.psi0.size()) = acc(i) * spec.psi0;
            acc.swap(nxt);
        }
        v = acc;
    }
    for (int r = 1; r <= spec.t; ++r)
        for (int s = 0; s + 1 < n; ++s) {
            if (mod2(s - spec.origin) != mod2(r - 1)) continue;
            Gate g = spec.gate_at(s, r);
            apply_block(v, g.m, ipow(d, s), ipow(d, n - s - 2));
        }
    return v;
}

cplx one_point_dense(const BrickworkSpec& spec, const LocalObservable& obs) {
    if (obs.site < 0 || obs.site >= spec.sites())
        throw DomainError("observable site " + std::to_string(obs.site) + " outside the chain");
    if (obs.o.rows() != spec.d || obs.o.cols() != spec.d)
        throw PreconditionError("observable must be d x d");
    Vec v = evolve_dense(spec);
    Vec w = v;
    apply_block(w, obs.o, ipow(spec.d, obs.site), ipow(spec.d, spec.sites() - obs.site - 1));
    return v.dot(w);
}

BrickworkSpec restrict_to_cone(const BrickworkSpec& spec, int site) {
    BrickworkSpec out = spec;
    const int t = spec.t;
    GateField inner = spec.gate_at;
    const int d = spec.d;
    out.gate_at = [inner, site, t, d](int bond, int row) {
        const int b = bond - site;
        if (b - (t - row) <= 0 && 0 <= b + 1 + (t - row)) return inner(bond, row);
        return identity_gate(d);
    };
    return out;
}

}  // namespace rtm
