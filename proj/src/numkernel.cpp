#include "rtm/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

namespace rtm {

const char* Error::kind_name() const noexcept {
    switch (kind_) {
    case ErrorKind::config: return "config";
    case ErrorKind::domain: return "domain";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::resource: return "resource";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::contract: return "contract";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::domain:
    case ErrorKind::precondition:
    case ErrorKind::contract: return 2;
    case ErrorKind::resource: return 3;
    case ErrorKind::numerical: return 4;
    }
    return 4;
}

namespace {

std::size_t product(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& s) {
    std::vector<std::size_t> st(s.size(), 1);
    for (std::size_t i = s.size(); i-- > 1;) st[i - 1] = st[i] * s[i];
    return st;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(product(shape_), cplx(0.0)) {}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (product(shape_) != data_.size())
        throw ContractError("tensor data length does not match shape");
}

std::size_t DenseTensor::offset(const std::vector<std::size_t>& idx) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < shape_.size(); ++i) off = off * shape_[i] + idx[i];
    return off;
}

DenseTensor DenseTensor::reshape(std::vector<std::size_t> shape) const {
    if (product(shape) != data_.size()) throw ContractError("reshape changes element count");
    return DenseTensor(std::move(shape), data_);
}

DenseTensor DenseTensor::permute(const std::vector<std::size_t>& perm) const {
    const std::size_t n = shape_.size();
    if (perm.size() != n) throw ContractError("permutation length mismatch");
    std::vector<std::size_t> ns(n);
    for (std::size_t i = 0; i < n; ++i) ns[i] = shape_.at(perm[i]);
    DenseTensor out(ns);
    if (n == 0) {
        out.data_ = data_;
        return out;
    }
    auto old_st = strides_of(shape_);
    std::vector<std::size_t> src_st(n);
    for (std::size_t i = 0; i < n; ++i) src_st[i] = old_st[perm[i]];
    std::vector<std::size_t> idx(n, 0);
    std::size_t src = 0;
    for (std::size_t k = 0; k < out.data_.size(); ++k) {
        out.data_[k] = data_[src];
        for (std::size_t ax = n; ax-- > 0;) {
            if (++idx[ax] < ns[ax]) {
                src += src_st[ax];
                break;
            }
            src -= src_st[ax] * (ns[ax] - 1);
            idx[ax] = 0;
        }
    }
    return out;
}

DenseTensor DenseTensor::conj() const {
    DenseTensor out(shape_, data_);
    for (auto& z : out.data_) z = std::conj(z);
    return out;
}

DenseTensor DenseTensor::scaled(cplx a) const {
    DenseTensor out(shape_, data_);
    for (auto& z : out.data_) z *= a;
    return out;
}

Mat DenseTensor::as_matrix(std::size_t row_axes) const {
    std::size_t rows = 1;
    for (std::size_t i = 0; i < row_axes; ++i) rows *= shape_.at(i);
    const std::size_t cols = rows == 0 ? 0 : data_.size() / rows;
    return Eigen::Map<const RowMat>(data_.data(), Eigen::Index(rows), Eigen::Index(cols));
}

DenseTensor DenseTensor::from_matrix(const Mat& m, std::vector<std::size_t> shape) {
    RowMat r = m;
    return DenseTensor(std::move(shape), std::vector<cplx>(r.data(), r.data() + r.size()));
}

double DenseTensor::norm() const {
    double s = 0.0;
    for (auto z : data_) s += std::norm(z);
    return std::sqrt(s);
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<bool> ua(a.rank(), false), ub(b.rank(), false);
    for (auto [ia, ib] : pairs) {
        if (ia >= a.rank() || ib >= b.rank() || ua[ia] || ub[ib])
            throw ContractError("invalid contraction axes (" + std::to_string(ia) + ", " +
                                std::to_string(ib) + ")");
        if (a.dim(ia) != b.dim(ib))
            throw ContractError("dimension mismatch on axes (" + std::to_string(ia) + ", " +
                                std::to_string(ib) + "): " + std::to_string(a.dim(ia)) +
                                " vs " + std::to_string(b.dim(ib)));
        ua[ia] = ub[ib] = true;
    }
    std::vector<std::size_t> pa, pb, out_shape;
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (!ua[i]) {
            pa.push_back(i);
            out_shape.push_back(a.dim(i));
        }
    const std::size_t free_a = pa.size();
    for (auto [ia, ib] : pairs) {
        pa.push_back(ia);
        pb.push_back(ib);
    }
    for (std::size_t i = 0; i < b.rank(); ++i)
        if (!ub[i]) {
            pb.push_back(i);
            out_shape.push_back(b.dim(i));
        }
    Mat ma = a.permute(pa).as_matrix(free_a);
    Mat mb = b.permute(pb).as_matrix(pairs.size());
    Mat mc = ma * mb;
    return DenseTensor::from_matrix(mc, out_shape);
}

Spectrum Spectrum::make(std::vector<double> v, Kind kind, double rel) {
    std::sort(v.begin(), v.end(), std::greater<>());
    const double top = v.empty() ? 0.0 : std::max(v.front(), 0.0);
    for (auto& x : v)
        if (x < rel * top || x < 0.0) x = 0.0;
    return Spectrum{std::move(v), kind};
}

std::size_t Spectrum::rank() const {
    return std::size_t(std::count_if(values.begin(), values.end(), [](double x) { return x > 0.0; }));
}

double Spectrum::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

double Spectrum::sum_sq() const {
    double s = 0.0;
    for (double x : values) s += x * x;
    return s;
}

Svd svd(const Mat& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag()))
            throw NumericalError("svd input has non-finite entries");
    Eigen::BDCSVD<Mat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) throw NumericalError("svd did not converge");
    const auto& sv = dec.singularValues();
    Svd out;
    out.left = dec.matrixU();
    out.right_h = dec.matrixV().adjoint();
    out.s = Spectrum::make(std::vector<double>(sv.data(), sv.data() + sv.size()),
                           Spectrum::Kind::singular);
    return out;
}

Spectrum singular_values(const Mat& m) {
    if (m.size() == 0) return Spectrum{{}, Spectrum::Kind::singular};
    Eigen::BDCSVD<Mat> dec(m);
    if (dec.info() != Eigen::Success) throw NumericalError("svd did not converge");
    const auto& sv = dec.singularValues();
    return Spectrum::make(std::vector<double>(sv.data(), sv.data() + sv.size()),
                          Spectrum::Kind::singular);
}

Eigh eigh(const Mat& h) {
    Mat sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError("hermitian eigensolver did not converge");
    const Eigen::Index n = sym.rows();
    Eigh out{Eigen::VectorXd(n), Mat(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = es.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return out;
}

Mat haar_unitary(int d, Rng& rng) {
    if (d < 1) throw DomainError("haar_unitary needs d >= 1");
    std::normal_distribution<double> g(0.0, 1.0);
    Mat z(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) z(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ() * Mat::Identity(d, d);
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        const cplx rii = r(i, i);
        const double a = std::abs(rii);
        q.col(i) *= a > 0 ? rii / a : cplx(1.0);
    }
    return q;
}

Mat polar_unitary(const Mat& m) {
    Eigen::JacobiSVD<Mat> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return dec.matrixU() * dec.matrixV().adjoint();
}

double unitarity_residual(const Mat& m) {
    return (m.adjoint() * m - Mat::Identity(m.cols(), m.cols())).norm();
}

std::size_t memory_budget_amplitudes() {
    if (const char* env = std::getenv("RTM_MEMORY_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return std::size_t(v);
    }
    return std::size_t{1} << 26;
}

void check_budget(std::size_t amplitudes, const char* what) {
    const std::size_t cap = memory_budget_amplitudes();
    if (amplitudes > cap)
        throw ResourceError(std::string(what) + " needs " +
                            std::to_string(amplitudes * sizeof(cplx)) + " bytes (" +
                            std::to_string(amplitudes) + " amplitudes), budget is " +
                            std::to_string(cap) + " amplitudes");
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace rtm
