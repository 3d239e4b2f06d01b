#include "rtm/entropy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rtm/rtm_compress.hpp"

namespace rtm {

namespace {

Mat circle_projector(int d) {
    const Vec c = circle_state(d) / std::sqrt(double(d));
    return c * c.adjoint();
}

Mat kron_all(const std::vector<Mat>& f) {
    Mat acc = Mat::Ones(1, 1);
    for (const auto& m : f) acc = kron(acc, m);
    return acc;
}

// Identity on the first k legs, (1/d)|○><○| on the rest.
Mat cumulative_projector(int d, int ell, int k) {
    const Mat pi = circle_projector(d), id = Mat::Identity(d * d, d * d);
    std::vector<Mat> f;
    for (int i = 0; i < ell; ++i) f.push_back(i < k ? id : pi);
    return kron_all(f);
}

void finish(BoundReport& r) {
    double total = 0.0;
    for (double& x : r.p) {
        if (x < -1e-10) throw NumericalError("negative sector weight " + std::to_string(x));
        if (x < 0.0) x = 0.0;
        total += x;
    }
    if (!(total > 0.0)) throw PreconditionError("state is not normalisable");
    for (double& x : r.p) x /= total;
    r.shannon = shannon(r.p);
    r.lower = 0.0;
    for (std::size_t k = 0; k < r.p.size(); ++k) r.lower += r.p[k] * r.s_sigma[k];
    r.upper = r.lower + r.shannon;
}

double sector_entropy(const Mat& x, double weight) {
    if (weight <= 1e-13) return 0.0;
    return entropy(singular_values(x));
}

}  // namespace

ProjectorFamily ProjectorFamily::make(int d, int ell) {
    if (d < 2) throw DomainError("projector family: d must be at least 2");
    if (ell < 1) throw DomainError("projector family: ell must be at least 1");
    const std::size_t dim = std::size_t(ipow(d * d, ell));
    check_budget(dim * dim, "projector family");
    ProjectorFamily fam;
    fam.d = d;
    fam.ell = ell;
    const Mat pi = circle_projector(d), id = Mat::Identity(d * d, d * d);
    for (int k = 0; k <= ell; ++k) {
        std::vector<Mat> f;
        for (int i = 0; i < ell; ++i) {
            if (k == 0 || i > k - 1)
                f.push_back(pi);
            else if (i == k - 1)
                f.push_back(id - pi);
            else
                f.push_back(id);
        }
        fam.P.push_back(kron_all(f));
    }
    return fam;
}

double ProjectorFamily::orthogonality_residual() const {
    double r = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j) {
            Mat m = P[i] * P[j];
            if (i == j) m -= P[i];
            r = std::max(r, m.cwiseAbs().maxCoeff());
        }
    return r;
}

double ProjectorFamily::completeness_residual() const {
    Mat s = Mat::Zero(P[0].rows(), P[0].cols());
    for (const auto& p : P) s += p;
    s -= Mat::Identity(s.rows(), s.cols());
    return s.cwiseAbs().maxCoeff();
}

BoundReport decompose(const Mat& state, const ProjectorFamily& fam) {
    if (state.cols() != fam.P.at(0).rows()) throw ContractError("decompose: state and family sizes differ");
    const double n2 = state.squaredNorm();
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw PreconditionError("decompose: state is not normalisable");
    BoundReport r;
    for (const auto& p : fam.P) {
        Mat x = state * p;
        const double w = x.squaredNorm() / n2;
        r.p.push_back(w);
        r.s_sigma.push_back(sector_entropy(x, w));
    }
    r.exact = entropy(singular_values(state));
    finish(r);
    return r;
}

Mat reduced_state(const RTM& reduced) {
    if (!reduced.reduced || !reduced.dense) throw PreconditionError("reduced_state needs a reduced network");
    return reduced.top_side == Side::right ? *reduced.dense : Mat(reduced.dense->transpose());
}

int free_legs_top(int t, int t0) { return (t + 2 - t0) / 2; }

std::vector<BoundReport> bounds_from_influence(const InfluenceMatrix& L, const InfluenceMatrix& R, BoundMode mode) {
    if (L.t != R.t || L.d != R.d || L.side != Side::left || R.side != Side::right)
        throw ContractError("bounds: incompatible influence matrices");
    const int t = L.t, d = L.d, q = d * d;
    const bool x_left = L.owns_top();
    const InfluenceMatrix& X = x_left ? L : R;
    const auto env = chain::bottom_envs(L, R);
    const auto gl = chain::top_factors(L), gr = chain::top_factors(R);
    const auto& gx = x_left ? gl : gr;
    const auto& gy = x_left ? gr : gl;
    const auto v = chain::top_circle_vectors(X);
    auto kmat = [&](int t0, const Mat& g) -> Mat {
        return x_left ? Mat(g.transpose() * env[t0] * gy[t0]) : Mat(gy[t0].transpose() * env[t0] * g);
    };

    std::vector<BoundReport> out(t + 2);
    std::vector<double> norm2(t + 2);
    // blocks (lo, hi) -> (t0, k) sectors using the complement on legs lo..hi
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> blocks;
    for (int t0 = 0; t0 <= t + 1; ++t0) {
        BoundReport& r = out[t0];
        r.t = t;
        r.t0 = t0;
        const int m = t + 1 - t0;
        const Spectrum s = singular_values(kmat(t0, gx[t0]));
        norm2[t0] = s.sum_sq();
        if (!(norm2[t0] > 0.0)) throw PreconditionError("bounds: transition matrix vanishes");
        r.exact = entropy(s);
        const int nsec = m == 0 ? 1 : (mode == BoundMode::dual_unitary ? free_legs_top(t, t0) : m) + 1;
        r.p.assign(nsec, 0.0);
        r.s_sigma.assign(nsec, 0.0);
        if (m == 0) {
            r.p[0] = 1.0;
            continue;
        }
        Mat k0 = kmat(t0, v[t0]);
        r.p[0] = k0.squaredNorm() / norm2[t0];
        r.s_sigma[0] = sector_entropy(k0, r.p[0]);
        for (int k = 1; k < nsec; ++k) {
            if (mode == BoundMode::dual_unitary) {
                const int t1 = nsec - 1;
                auto n = [&](int kk) { return std::min(m, 2 * (t1 - kk)); };
                blocks[{t + 1 - n(k - 1), t - n(k)}].push_back({t0, k});
            } else {
                blocks[{t0 + k - 1, t0 + k - 1}].push_back({t0, k});
            }
        }
    }
    for (const auto& [range, sectors] : blocks) {
        const auto [lo, hi] = range;
        const int w = hi - lo + 1;
        Mat g = v[hi + 1];
        for (int j = hi; j >= lo; --j) g = chain::expand(X.sites[j], g);
        const Mat pw = kron_all(std::vector<Mat>(std::size_t(w), circle_projector(d)));
        const Mat comp = Mat::Identity(pw.rows(), pw.cols()) - pw;
        g = chain::lq_left(g * comp.transpose());
        int lowest = lo;
        for (const auto& sk : sectors) lowest = std::min(lowest, sk.first);
        for (int j = lo;; --j) {
            for (const auto& [t0, k] : sectors) {
                if (t0 != j) continue;
                Mat kp = kmat(t0, g);
                const double pk = kp.squaredNorm() / norm2[t0];
                out[t0].p[k] = pk;
                out[t0].s_sigma[k] = sector_entropy(kp, pk);
            }
            if (j == lowest) break;
            g = chain::top_step(X.sites[j - 1], g);
        }
    }
    (void)q;
    for (auto& r : out) finish(r);
    return out;
}

namespace {

Mat raw_state(const ReducedNetwork& net) {
    std::vector<Leg> order = net.row_legs;
    order.insert(order.end(), net.col_legs.begin(), net.col_legs.end());
    LabeledTensor res = contract_sequence(net.tensors, order);
    Mat m = res.t.as_matrix(net.row_legs.size());
    return net.top_side == Side::right ? m : Mat(m.transpose());
}

DenseTensor doubled(const DenseTensor& a) {
    const std::size_t n = a.rank();
    Vec f = Eigen::Map<const Vec>(a.data().data(), Eigen::Index(a.size()));
    Mat outer = f * f.conjugate().transpose();  // (I, I') column major
    std::vector<cplx> data(a.size() * a.size());
    // row-major over (I, I')
    for (Eigen::Index i = 0; i < outer.rows(); ++i)
        for (Eigen::Index j = 0; j < outer.cols(); ++j) data[std::size_t(i) * a.size() + std::size_t(j)] = outer(i, j);
    std::vector<std::size_t> shape = a.shape();
    shape.insert(shape.end(), a.shape().begin(), a.shape().end());
    std::vector<std::size_t> perm;
    for (std::size_t i = 0; i < n; ++i) {
        perm.push_back(i);
        perm.push_back(n + i);
    }
    std::vector<std::size_t> merged;
    for (std::size_t i = 0; i < n; ++i) merged.push_back(a.dim(i) * a.dim(i));
    return DenseTensor(shape, std::move(data)).permute(perm).reshape(merged);
}

}  // namespace

double amplitude_Ak_direct(const CircuitSpec& spec, int t0, int k) {
    if (k == -1) return 0.0;
    const ReducedNetwork net = reduced_network(spec, t0);
    const int t1 = int((net.top_side == Side::right ? net.col_legs : net.row_legs).size());
    if (k < 0 || k > t1) throw DomainError("amplitude: k must lie in [0, t1]");
    const Mat psi = raw_state(net);
    if (t1 == 0) return psi.squaredNorm();
    return (psi * cumulative_projector(spec.d, t1, k)).squaredNorm();
}

double amplitude_Ak(const CircuitSpec& spec, int t0, int k) {
    if (k == -1) return 0.0;
    const ReducedNetwork net = reduced_network(spec, t0);
    const auto& bar = net.top_side == Side::right ? net.col_legs : net.row_legs;
    const int t1 = int(bar.size());
    if (k < 0 || k > t1) throw DomainError("amplitude: k must lie in [0, t1]");
    const int q = spec.d * spec.d;
    const std::size_t qq = std::size_t(q) * q;
    Vec pair_id = Vec::Zero(Eigen::Index(qq));
    Vec pair_circ = Vec::Zero(Eigen::Index(qq));
    const Vec c = circle_state(spec.d);
    for (int i = 0; i < q; ++i) pair_id(i * q + i) = 1.0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) pair_circ(i * q + j) = c(i) * std::conj(c(j)) / double(spec.d);
    std::map<Leg, Vec> boundary;
    for (const auto& l : net.row_legs) boundary[l] = pair_id;
    for (const auto& l : net.col_legs) boundary[l] = pair_id;
    for (int i = k; i < t1; ++i) boundary[bar[std::size_t(i)]] = pair_circ;
    std::vector<LabeledTensor> list;
    for (const auto& lt : net.tensors) {
        check_budget(lt.t.size() * lt.t.size(), "two-replica tensor");
        list.push_back({doubled(lt.t), lt.labels});
        for (const auto& l : lt.labels) {
            auto it = boundary.find(l);
            if (it == boundary.end()) continue;
            list.push_back({DenseTensor::from_matrix(it->second, {qq}), {l}});
            boundary.erase(it);
        }
    }
    LabeledTensor res = contract_sequence(list, {});
    const cplx a = res.t.data().at(0);
    if (std::abs(a.imag()) > 1e-10 * std::max(1.0, std::abs(a.real())))
        throw NumericalError("amplitude has an imaginary part " + std::to_string(a.imag()));
    return a.real();
}

}  // namespace rtm
