#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "rtm/error.hpp"

namespace rtm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

// Row-major dense complex tensor.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(std::vector<std::size_t> shape);
    DenseTensor(std::vector<std::size_t> shape, std::vector<cplx> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }

    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    cplx& operator()(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }
    cplx operator()(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }

    std::size_t offset(const std::vector<std::size_t>& idx) const;

    DenseTensor reshape(std::vector<std::size_t> shape) const;
    DenseTensor permute(const std::vector<std::size_t>& perm) const;
    DenseTensor conj() const;
    DenseTensor scaled(cplx a) const;

    // Matrix view grouping the first `row_axes` axes as rows.
    Mat as_matrix(std::size_t row_axes) const;
    static DenseTensor from_matrix(const Mat& m, std::vector<std::size_t> shape);

    double norm() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

// Remaining axes are ordered (free axes of a..., free axes of b...).
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// Nonincreasing list of nonnegative reals; entries below 1e-13 times the largest are set to 0.
struct Spectrum {
    enum class Kind { singular, eigen };

    std::vector<double> values;
    Kind kind = Kind::singular;

    static constexpr double clip_rel = 1e-13;

    static Spectrum make(std::vector<double> v, Kind kind, double rel = clip_rel);
    std::size_t rank() const;
    double max() const { return values.empty() ? 0.0 : values.front(); }
    double sum() const;
    double sum_sq() const;
};

struct Svd {
    Mat left;
    Spectrum s;
    Mat right_h;
};

Svd svd(const Mat& m);
Spectrum singular_values(const Mat& m);

// Hermitian eigendecomposition, eigenvalues in nonincreasing order.
struct Eigh {
    Eigen::VectorXd values;
    Mat vectors;
};
Eigh eigh(const Mat& h);

Mat haar_unitary(int d, Rng& rng);
Mat polar_unitary(const Mat& m);
double unitarity_residual(const Mat& m);

// Maximum number of complex amplitudes a dense object may hold (env RTM_MEMORY_BUDGET).
std::size_t memory_budget_amplitudes();
void check_budget(std::size_t amplitudes, const char* what);

Mat kron(const Mat& a, const Mat& b);

inline Eigen::Index ipow(Eigen::Index b, int e) {
    Eigen::Index r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace rtm
