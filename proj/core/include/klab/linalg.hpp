#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "klab/errors.hpp"

namespace klab {

using Vec = std::vector<double>;

/// Dense row-major matrix, sized for desk-scale problems (N <= a few hundred).
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vec matvec(const Mat& m, const Vec& x);
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& m);

/// Inverse by Gauss-Jordan with partial pivoting. Throws IllConditionedError on
/// a vanishing pivot.
Mat invert(const Mat& m);

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Throws IllConditionedError if a pivot is not strictly positive.
Mat cholesky(const Mat& m);

/// Solve L y = b and L^T x = y for lower-triangular L.
Vec solve_lower(const Mat& l, const Vec& b);
Vec solve_lower_transposed(const Mat& l, const Vec& b);

struct EigenDecomposition {
    Vec values;   // eigenvalues, unordered as produced by the sweeps
    Mat vectors;  // column j is the eigenvector for values[j]
    int sweeps = 0;
};

/// Symmetric eigendecomposition by cyclic Jacobi sweeps with a deterministic
/// (row-major) rotation order. Iterates until the off-diagonal Frobenius mass
/// falls below `tol` times the total Frobenius norm.
EigenDecomposition jacobi_eigen(Mat sym, double tol = 1e-14);

double dot(const Vec& a, const Vec& b);
Vec axpy(double alpha, const Vec& x, const Vec& y); // alpha*x + y

/// Deterministic uniform generator: identical streams on every platform for a
/// given seed (splitmix64 state advance, 53-bit mantissa doubles).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

    Vec uniform_vec(std::size_t n) {
        Vec v(n);
        for (auto& e : v) e = uniform();
        return v;
    }

    Vec symmetric_vec(std::size_t n) {
        Vec v(n);
        for (auto& e : v) e = symmetric();
        return v;
    }

private:
    std::uint64_t state_;
};

} // namespace klab
