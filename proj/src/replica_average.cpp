#include "rtm/replica_average.hpp"

#include <cmath>
#include <map>

#include "rtm/lightcone.hpp"

namespace rtm {

double critical_p(int d) { return 1.0 - 1.0 / (double(d) * d); }

double c_constant(const Vec& psi0, int d) {
    if (psi0.size() != d * d) throw ConfigError("c_constant: dimer state must have d^2 entries");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw PreconditionError("c_constant: dimer state is not normalised");
    auto psi = [&](int l, int r) { return psi0(l * d + r); };
    // left leg (k1, b1, k2, b2) paired by ○: k1 = b1, k2 = b2; right leg by □: k1 = b2, b1 = k2
    cplx acc = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y)
                    acc += psi(a, x) * std::conj(psi(a, y)) * psi(b, y) * std::conj(psi(b, x));
    if (std::abs(acc.imag()) > 1e-12) throw NumericalError("c_constant has an imaginary part");
    return d * acc.real();
}

Eigen::Matrix2d averaged_dimer(int d, double c) {
    const double dd = double(d) * d, r = std::sqrt(dd - 1.0);
    Eigen::Matrix2d m;
    m << 1.0 / dd, (c - 1.0) / (dd * r),
         (c - 1.0) / (dd * r), (dd - 2.0 * c + 1.0) / (dd * (dd - 1.0));
    return m;
}

void AveragedNetworkParams::validate() const {
    if (d < 2) throw DomainError("averaged network: d must be at least 2");
    if (t0 < 0 || t1 < 0 || k < 0 || k > t1) throw DomainError("averaged network: need t0, t1 >= 0 and 0 <= k <= t1");
    if (p < 0.0 || p > 1.0) throw DomainError("averaged network: p must lie in [0, 1]");
}

double averaged_Ak_contract(const AveragedNetworkParams& prm) {
    prm.validate();
    const int t = prm.rows();
    if (t < 0) return 1.0;
    const int d = prm.d;
    const Peeled pd = peel(t, prm.t0);
    const Eigen::Matrix4d g = averaged_gate(d, prm.p);
    const Eigen::Matrix2d dm = averaged_dimer(d, prm.c);
    Mat gm = g.cast<cplx>(), dmc = dm.cast<cplx>();
    Vec cap(2), square(2), circle(2);
    cap << double(d), 0.0;
    square << 1.0, std::sqrt(double(d) * d - 1.0);
    circle << 1.0, 0.0;

    std::map<Leg, Vec> boundary;
    const Side top = pd.top_side();
    for (Side side : {Side::left, Side::right}) {
        const auto& free = pd.side(side).free_legs;
        for (std::size_t i = 0; i < free.size(); ++i)
            boundary[free[i]] = (side == top && int(i) >= prm.k) ? circle : square;
    }
    std::vector<LabeledTensor> list;
    for (Side side : {Side::left, Side::right}) {
        const PeeledSide& ps = pd.side(side);
        for (const auto& o : ps.objects) {
            if (o.is_gate())
                list.push_back({DenseTensor::from_matrix(gm, {2, 2, 2, 2}), o.legs()});
            else
                list.push_back({DenseTensor::from_matrix(dmc, {2, 2}), o.legs()});
            for (const auto& l : o.legs()) {
                if (std::find(ps.caps.begin(), ps.caps.end(), l) != ps.caps.end())
                    list.push_back({DenseTensor::from_matrix(cap, {2}), {l}});
                auto it = boundary.find(l);
                if (it != boundary.end()) {
                    list.push_back({DenseTensor::from_matrix(it->second, {2}), {l}});
                    boundary.erase(it);
                }
            }
        }
        if (!ps.owns_top && prm.t0 == t + 1) list.push_back({DenseTensor::from_matrix(cap, {2}), {Leg{0, t}}});
    }
    if (!boundary.empty()) throw ContractError("averaged network: free leg without a tensor");
    LabeledTensor res = contract_sequence(list, {});
    return res.t.data().at(0).real();
}

double recursion_B(int d, double c, int x) {
    if (x < 0) throw DomainError("recursion_B: x must be nonnegative");
    return std::pow(double(d), -x) * (1.0 + (c - 1.0) * x);
}

double recursion_C(int d, double c, int t0, int y) {
    if (y < t0) throw DomainError("recursion_C: y must be at least t0");
    return std::pow(double(d), t0 - y) + (c - 1.0) * (y - t0) * recursion_B(d, c, t0) * std::pow(double(d), -y);
}

namespace {

void require_critical(const AveragedNetworkParams& prm) {
    if (std::abs(prm.p - critical_p(prm.d)) > 1e-12)
        throw DomainError("closed form holds only at p = 1 - 1/d^2");
}

}  // namespace

double closed_form_EAk(const AveragedNetworkParams& prm) {
    prm.validate();
    require_critical(prm);
    if (prm.rows() < 0) return 1.0;
    const double d = prm.d, c = prm.c, t0 = prm.t0, t1 = prm.t1, k = prm.k;
    const int a = prm.legs_A();
    return std::pow(d, -a) +
           (c - 1.0) * (t1 + k + (c - 1.0) * (t1 * t0 + k * t0 + k * t1)) * std::pow(d, -(a + 2.0 * t0));
}

PkPrediction predicted_pk_critical(const AveragedNetworkParams& prm) {
    prm.validate();
    require_critical(prm);
    AveragedNetworkParams q = prm;
    q.k = prm.t1;
    const double norm = closed_form_EAk(q);
    q.k = 0;
    PkPrediction out;
    out.p0 = closed_form_EAk(q) / norm;
    if (prm.t1 > 0) {
        q.k = 1;
        out.pk = (closed_form_EAk(q) - closed_form_EAk(AveragedNetworkParams{prm.d, prm.p, prm.t0, prm.t1, 0, prm.c})) /
                 norm;
    }
    const double d = prm.d, c = prm.c;
    out.rate = 2.0 * std::log(d);
    out.prefactor = (c - 1.0) * (1.0 + (c - 1.0) * (prm.t0 + prm.t1)) / (std::pow(d, prm.legs_A()) * norm);
    return out;
}

}  // namespace rtm
