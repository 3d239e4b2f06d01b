#include "rtm/influence.hpp"

#include <algorithm>
#include <cmath>

namespace rtm {

namespace {

struct TransferOp {
    int leg = 0;
    bool two = true;
    Mat m;  // two-site: (lo,hi) x (lo,hi); one-site: q x q
};

// Space-direction transfer: every column maps the legs of one site onto the next site
// towards the observable.
std::vector<std::vector<TransferOp>> transfer_columns(const CircuitSpec& spec, Side side) {
    const int t = spec.t, d = spec.d, q = d * d;
    std::vector<std::vector<TransferOp>> cols;
    const Mat dimer = fold_dimer(spec.psi0, d);
    auto gate_op = [&](int bond, int row) {
        const Mat f = fold1_matrix(spec.gate_at(bond, row));
        Mat g(q * q, q * q);
        for (int nl = 0; nl < q; ++nl)
            for (int nh = 0; nh < q; ++nh)
                for (int ol = 0; ol < q; ++ol)
                    for (int oh = 0; oh < q; ++oh)
                        g(nl * q + nh, ol * q + oh) = side == Side::right ? f(nh * q + oh, nl * q + ol)
                                                                          : f(oh * q + nh, ol * q + nl);
        return g;
    };
    if (side == Side::right) {
        for (int x = t; x >= 0; --x) {
            std::vector<TransferOp> ops;
            if (mod2(x) == 1 && x <= t) ops.push_back({0, false, dimer});
            for (int r = 1; r <= t; ++r)
                if (gate_in_cone(t, r, x)) ops.push_back({r - 1, true, gate_op(x, r)});
            cols.push_back(std::move(ops));
        }
    } else {
        for (int b = -t - 1; b <= -1; ++b) {
            std::vector<TransferOp> ops;
            if (mod2(b) == 1) ops.push_back({0, false, Mat(dimer.transpose())});
            for (int r = 1; r <= t; ++r)
                if (gate_in_cone(t, r, b)) ops.push_back({r - 1, true, gate_op(b, r)});
            cols.push_back(std::move(ops));
        }
    }
    return cols;
}

void apply_block(Vec& v, const Mat& op, Eigen::Index outer, Eigen::Index inner) {
    const Eigen::Index m = op.rows();
    RowMat tmp(m, inner);
    for (Eigen::Index o = 0; o < outer; ++o) {
        Eigen::Map<RowMat> blk(v.data() + o * m * inner, m, inner);
        tmp.noalias() = op * blk;
        blk = tmp;
    }
}

Vec circle_product(int d, int legs) {
    const Vec c = circle_state(d);
    Vec acc = Vec::Ones(1);
    for (int j = 0; j < legs; ++j) {
        Vec nxt(acc.size() * c.size());
        for (Eigen::Index i = 0; i < acc.size(); ++i) nxt.segment(i * c.size(), c.size()) = acc(i) * c;
        acc.swap(nxt);
    }
    return acc;
}

// Thin factorisation theta = U diag(s) Vh with singular values below cutoff*s_max dropped.
struct Factor {
    Mat u;
    std::vector<double> s;
    Mat vh;
};

Factor factor(const Mat& theta, double cutoff, Eigen::Index hint) {
    const Eigen::Index m = theta.rows(), n = theta.cols();
    const Eigen::Index mn = std::min(m, n);
    Mat u, vh;
    Eigen::VectorXd sv;
    if (mn <= 1536) {
        Eigen::BDCSVD<Mat> dec(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (dec.info() != Eigen::Success) throw NumericalError("chain svd did not converge");
        u = dec.matrixU();
        vh = dec.matrixV().adjoint();
        sv = dec.singularValues();
    } else {
        // randomized range finder, enlarged until the sampled range shows a numerical null space
        Eigen::Index l = std::min(mn, std::max<Eigen::Index>(hint + 32, 64));
        Rng rng(0x5eedULL + std::uint64_t(m) * 131 + std::uint64_t(n));
        std::normal_distribution<double> g(0.0, 1.0);
        for (;;) {
            Mat omega(n, l);
            for (Eigen::Index j = 0; j < l; ++j)
                for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = cplx(g(rng), g(rng));
            Mat y = theta * omega;
            Eigen::HouseholderQR<Mat> qr(y);
            Mat qm = qr.householderQ() * Mat::Identity(m, l);
            Mat b = qm.adjoint() * theta;
            Eigen::BDCSVD<Mat> dec(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
            if (dec.info() != Eigen::Success) throw NumericalError("chain svd did not converge");
            sv = dec.singularValues();
            const bool rank_revealed = sv.size() > 0 && sv(sv.size() - 1) <= 1e-13 * sv(0);
            if (rank_revealed || l == mn) {
                u = qm * dec.matrixU();
                vh = dec.matrixV().adjoint();
                break;
            }
            l = std::min(mn, 2 * l);
        }
    }
    Factor f;
    const double top = sv.size() ? sv(0) : 0.0;
    Eigen::Index k = 0;
    while (k < sv.size() && sv(k) > cutoff * top) ++k;
    if (k == 0) k = 1;
    f.u = u.leftCols(k);
    f.vh = vh.topRows(k);
    for (Eigen::Index i = 0; i < k; ++i) f.s.push_back(sv(i));
    return f;
}

// Open chain with a tracked orthogonality centre.
struct Chain {
    int q = 4;
    double cutoff = 1e-14;
    std::vector<SiteTensor> a;
    int center = 0;

    void move_right() {
        SiteTensor& x = a[center];
        SiteTensor& y = a[center + 1];
        Mat m = x.grouped_left();
        const Eigen::Index k = std::min<Eigen::Index>(m.rows(), m.cols());
        Eigen::HouseholderQR<Mat> qr(m);
        Mat qm = qr.householderQ() * Mat::Identity(m.rows(), k);
        Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Mat ny = r * Mat(y.grouped_right());
        SiteTensor nx(x.dl, q, int(k)), nyt(int(k), q, y.dr);
        nx.grouped_left() = qm;
        nyt.grouped_right() = ny;
        x = std::move(nx);
        y = std::move(nyt);
        ++center;
    }

    void move_left() {
        SiteTensor& x = a[center];
        SiteTensor& w = a[center - 1];
        Mat m = x.grouped_right();
        Mat mh = m.adjoint();
        const Eigen::Index k = std::min<Eigen::Index>(mh.rows(), mh.cols());
        Eigen::HouseholderQR<Mat> qr(mh);
        Mat qm = qr.householderQ() * Mat::Identity(mh.rows(), k);
        Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Mat nw = Mat(w.grouped_left()) * r.adjoint();
        SiteTensor nx(int(k), q, x.dr), nwt(w.dl, q, int(k));
        nx.grouped_right() = qm.adjoint();
        nwt.grouped_left() = nw;
        x = std::move(nx);
        w = std::move(nwt);
        --center;
    }

    void move_to(int j) {
        while (center < j) move_right();
        while (center > j) move_left();
    }

    void apply_one(int j, const Mat& op) {
        move_to(j);
        SiteTensor& x = a[j];
        for (int l = 0; l < x.dl; ++l) {
            Eigen::Map<RowMat> blk(x.data.data() + std::size_t(l) * q * x.dr, q, x.dr);
            RowMat tmp = op * blk;
            blk = tmp;
        }
    }

    // two-site operator on (j, j+1); the centre ends on j+1 if `to_right`
    void apply_two(int j, const Mat& op, bool to_right) {
        move_to(to_right ? j : j + 1);
        SiteTensor& x = a[j];
        SiteTensor& y = a[j + 1];
        RowMat theta = Mat(x.grouped_left()) * Mat(y.grouped_right());
        const int qq = q * q;
        for (int l = 0; l < x.dl; ++l) {
            Eigen::Map<RowMat> blk(theta.data() + std::size_t(l) * qq * y.dr, qq, y.dr);
            RowMat tmp = op * blk;
            blk = tmp;
        }
        const Eigen::Index hint = std::max<Eigen::Index>(x.dr, 1);
        Factor f = factor(Mat(theta), cutoff, hint);
        const int k = int(f.s.size());
        Eigen::VectorXd s = Eigen::Map<Eigen::VectorXd>(f.s.data(), k);
        SiteTensor nx(x.dl, q, k), ny(k, q, y.dr);
        if (to_right) {
            nx.grouped_left() = f.u;
            ny.grouped_right() = s.asDiagonal() * f.vh;
            center = j + 1;
        } else {
            nx.grouped_left() = f.u * s.asDiagonal();
            ny.grouped_right() = f.vh;
            center = j;
        }
        x = std::move(nx);
        y = std::move(ny);
    }
};

}  // namespace

void CircuitSpec::validate() const {
    if (d < 2 || t < 0) throw ConfigError("circuit: need d >= 2 and t >= 0");
    if (psi0.size() != d * d) throw ConfigError("circuit: dimer state must have d^2 entries");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw PreconditionError("dimer state is not normalised");
    if (t > 0 && !gate_at) throw ConfigError("circuit: missing gates");
}

CircuitSpec uniform_circuit(const Gate& g, int t, const Vec& psi0) {
    return CircuitSpec{g.d, t, psi0, uniform_gates(g)};
}

CircuitSpec relative_to(const BrickworkSpec& spec, int site) {
    if (mod2(site - spec.origin) != 0) throw DomainError("observable must sit on a site of the origin's parity");
    GateField inner = spec.gate_at;
    return CircuitSpec{spec.d, spec.t, spec.psi0, [inner, site](int b, int r) { return inner(b + site, r); }};
}

Mat SiteTensor::slice(int s) const {
    Eigen::Map<const RowMat, 0, Eigen::OuterStride<>> m(data.data() + std::size_t(s) * dr, dl, dr,
                                                         Eigen::OuterStride<>(std::size_t(q) * dr));
    return m;
}

std::vector<int> InfluenceMatrix::bonds() const {
    std::vector<int> b;
    for (std::size_t j = 0; j + 1 < sites.size(); ++j) b.push_back(sites[j].dr);
    return b;
}

int InfluenceMatrix::max_bond() const {
    int m = 1;
    for (int b : bonds()) m = std::max(m, b);
    return m;
}

Vec InfluenceMatrix::to_dense() const {
    const int qq = q();
    check_budget(std::size_t(ipow(qq, legs())), "influence matrix to_dense");
    RowMat acc = RowMat::Ones(1, 1);  // (prefix, bond)
    for (const auto& s : sites) {
        RowMat nxt = acc * Mat(s.grouped_right());  // (prefix, q*dr)
        acc = Eigen::Map<RowMat>(nxt.data(), nxt.rows() * qq, s.dr);
    }
    return Eigen::Map<Vec>(acc.data(), acc.size());
}

Vec build_influence_dense(const CircuitSpec& spec, Side side) {
    spec.validate();
    const int t = spec.t, q = spec.d * spec.d;
    check_budget(std::size_t(ipow(q, t + 1)), "dense influence matrix");
    Vec v = circle_product(spec.d, t + 1);
    for (const auto& col : transfer_columns(spec, side))
        for (const auto& op : col) {
            if (op.two)
                apply_block(v, op.m, ipow(q, op.leg), ipow(q, t - op.leg - 1));
            else
                apply_block(v, op.m, 1, ipow(q, t));
        }
    return v;
}

InfluenceMatrix chain_from_dense(const Vec& v, Side side, int t, int d, double cutoff) {
    const int q = d * d;
    InfluenceMatrix im{side, t, d, {}};
    RowMat r = Eigen::Map<const RowMat>(v.data(), 1, v.size());
    int bond = 1;
    for (int j = 0; j < t; ++j) {
        const Eigen::Index rest = r.cols() / q;
        Eigen::Map<RowMat> m(r.data(), bond * q, rest);
        Mat mm = m;
        Factor f;
        if (mm.rows() * 4 < mm.cols()) {
            // QR of the wide matrix first keeps the SVD square
            Mat mh = mm.adjoint();
            Eigen::HouseholderQR<Mat> qr(mh);
            const Eigen::Index k = std::min(mh.rows(), mh.cols());
            Mat qm = qr.householderQ() * Mat::Identity(mh.rows(), k);
            Mat rr = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
            Factor g = factor(Mat(rr.adjoint()), cutoff, 0);
            f.u = g.u;
            f.s = g.s;
            f.vh = g.vh * qm.adjoint();
        } else {
            f = factor(mm, cutoff, 0);
        }
        const int k = int(f.s.size());
        SiteTensor st(bond, q, k);
        st.grouped_left() = f.u;
        im.sites.push_back(std::move(st));
        Eigen::VectorXd s = Eigen::Map<Eigen::VectorXd>(f.s.data(), k);
        r = s.asDiagonal() * f.vh;
        bond = k;
    }
    SiteTensor last(bond, q, 1);
    last.grouped_right() = Eigen::Map<RowMat>(r.data(), bond, q);
    im.sites.push_back(std::move(last));
    return im;
}

InfluenceMatrix build_influence(const CircuitSpec& spec, Side side, const InfluenceOptions& opt) {
    spec.validate();
    const int t = spec.t, q = spec.d * spec.d;
    if (t <= opt.dense_max_t && std::size_t(ipow(q, t + 1)) <= memory_budget_amplitudes())
        return chain_from_dense(build_influence_dense(spec, side), side, t, spec.d, opt.cutoff);
    Chain c;
    c.q = q;
    c.cutoff = opt.cutoff;
    const Vec circ = circle_state(spec.d);
    for (int j = 0; j <= t; ++j) {
        SiteTensor s(1, q, 1);
        for (int k = 0; k < q; ++k) s.data[k] = circ(k);
        c.a.push_back(std::move(s));
    }
    c.center = 0;
    for (const auto& col : transfer_columns(spec, side)) {
        if (col.empty()) continue;
        std::vector<const TransferOp*> twos;
        const TransferOp* one = nullptr;
        for (const auto& op : col) {
            if (op.two)
                twos.push_back(&op);
            else
                one = &op;
        }
        bool ascending = true;
        if (one) {
            c.apply_one(0, one->m);
        } else if (!twos.empty()) {
            const int lo = twos.front()->leg, hi = twos.back()->leg + 1;
            ascending = std::abs(c.center - lo) <= std::abs(c.center - hi);
        }
        if (ascending) {
            for (const auto* op : twos) c.apply_two(op->leg, op->m, true);
        } else {
            for (auto it = twos.rbegin(); it != twos.rend(); ++it) c.apply_two((*it)->leg, (*it)->m, false);
        }
    }
    return InfluenceMatrix{side, t, spec.d, std::move(c.a)};
}

cplx overlap(const InfluenceMatrix& L, const InfluenceMatrix& R) {
    auto env = chain::bottom_envs(L, R);
    return env.back()(0, 0);
}

Mat folded_observable(const Mat& o, bool right_owns_top) {
    const Eigen::Index d = o.rows();
    Mat id = Mat::Identity(d, d);
    return right_owns_top ? kron(o, id) : kron(id, o);
}

cplx expectation(const InfluenceMatrix& L, const InfluenceMatrix& R, const Mat& o) {
    if (L.t != R.t || L.d != R.d) throw ContractError("influence matrices are incompatible");
    const int t = L.t;
    Mat e = Mat::Ones(1, 1);
    for (int j = 0; j < t; ++j) {
        Mat nxt = Mat::Zero(L.sites[j].dr, R.sites[j].dr);
        for (int s = 0; s < L.q(); ++s) nxt.noalias() += L.sites[j].slice(s).transpose() * e * R.sites[j].slice(s);
        e = nxt;
    }
    const Mat of = folded_observable(o, R.owns_top());
    cplx acc = 0.0;
    for (int sl = 0; sl < L.q(); ++sl)
        for (int sr = 0; sr < L.q(); ++sr) {
            if (of(sl, sr) == cplx(0.0)) continue;
            acc += of(sl, sr) * (L.sites[t].slice(sl).transpose() * e * R.sites[t].slice(sr))(0, 0);
        }
    return acc;
}

namespace chain {

std::vector<Mat> bottom_envs(const InfluenceMatrix& L, const InfluenceMatrix& R) {
    if (L.t != R.t || L.d != R.d) throw ContractError("influence matrices are incompatible");
    std::vector<Mat> env{Mat::Ones(1, 1)};
    for (int j = 0; j <= L.t; ++j) {
        const Mat& e = env.back();
        Mat nxt = Mat::Zero(L.sites[j].dr, R.sites[j].dr);
        for (int s = 0; s < L.q(); ++s) nxt.noalias() += L.sites[j].slice(s).transpose() * (e * R.sites[j].slice(s));
        env.push_back(std::move(nxt));
    }
    return env;
}

Mat expand(const SiteTensor& a, const Mat& g, const Mat* op) {
    const int q = a.q;
    const Eigen::Index k = g.cols();
    Mat m(a.dl, q * k);
    for (int s = 0; s < q; ++s) {
        Mat sl = Mat::Zero(a.dl, a.dr);
        if (op) {
            for (int s2 = 0; s2 < q; ++s2)
                if ((*op)(s, s2) != cplx(0.0)) sl += (*op)(s, s2) * a.slice(s2);
        } else {
            sl = a.slice(s);
        }
        m.middleCols(s * k, k) = sl * g;
    }
    return m;
}

Mat lq_left(const Mat& m) {
    if (m.cols() <= m.rows()) return m;
    Mat mh = m.adjoint();
    Eigen::HouseholderQR<Mat> qr(mh);
    Mat r = qr.matrixQR().topRows(m.rows()).triangularView<Eigen::Upper>();
    return r.adjoint();
}

Mat top_step(const SiteTensor& a, const Mat& g, const Mat* op) { return lq_left(expand(a, g, op)); }

void right_canonicalize(InfluenceMatrix& x) {
    const int q = x.q();
    for (int j = x.t; j >= 1; --j) {
        SiteTensor& a = x.sites[j];
        SiteTensor& w = x.sites[j - 1];
        Mat mh = Mat(a.grouped_right()).adjoint();
        const Eigen::Index k = std::min<Eigen::Index>(mh.rows(), mh.cols());
        Eigen::HouseholderQR<Mat> qr(mh);
        Mat qm = qr.householderQ() * Mat::Identity(mh.rows(), k);
        Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Mat nw = Mat(w.grouped_left()) * r.adjoint();
        SiteTensor na(int(k), q, a.dr), nwt(w.dl, q, int(k));
        na.grouped_right() = qm.adjoint();
        nwt.grouped_left() = nw;
        a = std::move(na);
        w = std::move(nwt);
    }
}

std::vector<Mat> top_factors(const InfluenceMatrix& x) {
    std::vector<Mat> g(x.t + 2);
    g[x.t + 1] = Mat::Ones(1, 1);
    for (int j = x.t; j >= 0; --j) g[j] = top_step(x.sites[j], g[j + 1]);
    return g;
}

std::vector<Mat> top_circle_vectors(const InfluenceMatrix& x) {
    const Vec c = circle_state(x.d) / std::sqrt(double(x.d));
    std::vector<Mat> v(x.t + 2);
    v[x.t + 1] = Mat::Ones(1, 1);
    for (int j = x.t; j >= 0; --j) {
        const auto& a = x.sites[j];
        Mat acc = Mat::Zero(a.dl, 1);
        for (int s = 0; s < a.q; ++s)
            if (c(s) != cplx(0.0)) acc += c(s) * (a.slice(s) * v[j + 1]);
        v[j] = acc;
    }
    return v;
}

}  // namespace chain

Spectrum RTM::spectrum() const { return singular_values(core); }

namespace {

void check_pair(const InfluenceMatrix& L, const InfluenceMatrix& R) {
    if (L.t != R.t || L.d != R.d || L.side != Side::left || R.side != Side::right)
        throw ContractError("build_rtm: incompatible influence matrices");
}

RTM rtm_from_factors(const InfluenceMatrix& L, int t0, const Mat& e, const Mat& gl, const Mat& gr) {
    RTM out;
    out.t = L.t;
    out.t0 = t0;
    out.d = L.d;
    out.row_legs = out.col_legs = L.t + 1 - t0;
    out.core = gl.transpose() * e * gr;
    return out;
}

}  // namespace

RTM build_rtm(const InfluenceMatrix& L, const InfluenceMatrix& R, int t0, bool explicit_matrix) {
    check_pair(L, R);
    const int t = L.t;
    if (t0 < 0 || t0 > t + 1) throw DomainError("build_rtm: t0 must lie in [0, t+1]");
    Mat e = Mat::Ones(1, 1);
    for (int j = 0; j < t0; ++j) {
        Mat nxt = Mat::Zero(L.sites[j].dr, R.sites[j].dr);
        for (int s = 0; s < L.q(); ++s) nxt.noalias() += L.sites[j].slice(s).transpose() * (e * R.sites[j].slice(s));
        e = nxt;
    }
    Mat gl = Mat::Ones(1, 1), gr = Mat::Ones(1, 1);
    for (int j = t; j >= t0; --j) {
        gl = chain::top_step(L.sites[j], gl);
        gr = chain::top_step(R.sites[j], gr);
    }
    RTM out = rtm_from_factors(L, t0, e, gl, gr);
    if (explicit_matrix) {
        const std::size_t side = std::size_t(ipow(L.q(), t + 1 - t0));
        check_budget(std::size_t(ipow(L.q(), t + 1)), "explicit transition matrix");
        check_budget(side * side, "explicit transition matrix");
        out.dense = build_rtm_dense(L.to_dense(), R.to_dense(), t, L.d, t0).dense;
    }
    return out;
}

std::vector<RTM> build_rtm_all(const InfluenceMatrix& L, const InfluenceMatrix& R) {
    check_pair(L, R);
    const auto env = chain::bottom_envs(L, R);
    const auto gl = chain::top_factors(L), gr = chain::top_factors(R);
    std::vector<RTM> out;
    for (int t0 = 0; t0 <= L.t + 1; ++t0) out.push_back(rtm_from_factors(L, t0, env[t0], gl[t0], gr[t0]));
    return out;
}

RTM build_rtm_dense(const Vec& L, const Vec& R, int t, int d, int t0) {
    const int q = d * d;
    const Eigen::Index rows = ipow(q, t0), cols = ipow(q, t + 1 - t0);
    if (L.size() != rows * cols || R.size() != rows * cols) throw ContractError("build_rtm_dense: size mismatch");
    Eigen::Map<const RowMat> lm(L.data(), rows, cols), rm(R.data(), rows, cols);
    RTM out;
    out.t = t;
    out.t0 = t0;
    out.d = d;
    out.row_legs = out.col_legs = t + 1 - t0;
    Mat tm = lm.transpose() * rm;
    out.core = tm;
    out.dense = tm;
    return out;
}

cplx rtm_expectation(const RTM& T, const Mat& o) {
    if (!T.dense) throw ResourceError("rtm_expectation needs an explicit matrix");
    if (T.reduced) throw PreconditionError("rtm_expectation needs an unreduced RTM");
    const Mat& m = *T.dense;
    const int q = T.d * T.d;
    const bool right_top = T.t % 2 == 1;
    if (T.row_legs == 0) return m(0, 0);
    const Mat of = folded_observable(o, right_top);
    // top leg is the least significant digit of both indices
    const Eigen::Index rest = m.rows() / q;
    cplx acc = 0.0;
    for (Eigen::Index a = 0; a < rest; ++a)
        for (int sl = 0; sl < q; ++sl)
            for (int sr = 0; sr < q; ++sr) acc += m(a * q + sl, a * q + sr) * of(sl, sr);
    return acc;
}

ReducedNetwork reduced_network(const CircuitSpec& spec, int t0) {
    spec.validate();
    const int t = spec.t, d = spec.d, q = d * d;
    if (t0 < 0 || t0 > t + 1) throw DomainError("reduced network: t0 must lie in [0, t+1]");
    Peeled pd = peel(t, t0);
    LightCone cone(t);
    for (const auto& o : cone.objects)
        if (o.is_gate() && !is_dual_unitary(spec.gate_at(o.bond, o.row)))
            throw PreconditionError("reduce_rtm_dual_unitary: gate at row " + std::to_string(o.row) + ", bond " +
                                    std::to_string(o.bond) + " is not dual unitary");
    const Mat dimer = fold_dimer(spec.psi0, d);
    const Vec circ = circle_state(d);
    const std::size_t uq = std::size_t(q);
    ReducedNetwork net;
    for (Side side : {Side::left, Side::right}) {
        const PeeledSide& ps = pd.side(side);
        for (const auto& o : ps.objects) {
            if (o.is_gate())
                net.tensors.push_back(
                    {DenseTensor::from_matrix(fold1_matrix(spec.gate_at(o.bond, o.row)), {uq, uq, uq, uq}), o.legs()});
            else
                net.tensors.push_back({DenseTensor::from_matrix(dimer, {uq, uq}), o.legs()});
            for (const auto& l : o.legs())
                if (std::find(ps.caps.begin(), ps.caps.end(), l) != ps.caps.end())
                    net.tensors.push_back({DenseTensor::from_matrix(circ, {uq}), {l}});
        }
        if (!ps.owns_top && t0 == t + 1) net.tensors.push_back({DenseTensor::from_matrix(circ, {uq}), {Leg{0, t}}});
    }
    net.row_legs = pd.side(Side::left).free_legs;
    net.col_legs = pd.side(Side::right).free_legs;
    net.top_side = pd.top_side();
    net.ncaps = pd.ncaps;
    return net;
}

RTM reduce_rtm_dual_unitary(const CircuitSpec& spec, int t0) {
    const ReducedNetwork net = reduced_network(spec, t0);
    std::vector<Leg> order = net.row_legs;
    order.insert(order.end(), net.col_legs.begin(), net.col_legs.end());
    LabeledTensor res = contract_sequence(net.tensors, order);
    RTM out;
    out.t = spec.t;
    out.t0 = t0;
    out.d = spec.d;
    out.reduced = true;
    out.row_legs = int(net.row_legs.size());
    out.col_legs = int(net.col_legs.size());
    out.row_leg_list = net.row_legs;
    out.col_leg_list = net.col_legs;
    out.top_side = net.top_side;
    out.scale = std::pow(std::sqrt(double(spec.d)), net.ncaps);
    Mat m = res.t.as_matrix(std::size_t(out.row_legs)) * out.scale;
    out.core = m;
    out.dense = m;
    return out;
}

}  // namespace rtm
