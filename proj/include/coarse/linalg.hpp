// linalg.hpp - dense symmetric matrices and the cyclic Jacobi eigensolver.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace coarse {

class EigenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Row-major square matrix. Symmetry is the caller's responsibility except
// through set_sym.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

    void set_sym(std::size_t r, std::size_t c, double v) {
        (*this)(r, c) = v;
        (*this)(c, r) = v;
    }

    double frobenius() const {
        double s = 0.0;
        for (double x : data_) s += x * x;
        return std::sqrt(s);
    }

    const std::vector<double>& raw() const noexcept { return data_; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct Eigensystem {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // column j is the eigenvector of values[j]
};

inline constexpr double kJacobiThreshold = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

// Cyclic Jacobi. Converged when the off-diagonal Frobenius norm is at most
// kJacobiThreshold * max(1, ||A||_F). Without `want_vectors` the returned
// vector matrix is empty.
inline Eigensystem jacobi_eigen(DenseMatrix a, bool want_vectors = true) {
    const std::size_t n = a.size();
    DenseMatrix v(want_vectors ? n : 0);
    for (std::size_t i = 0; i < v.size(); ++i) v(i, i) = 1.0;
    const double target = kJacobiThreshold * std::max(1.0, a.frobenius());

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > target) {
        if (++sweep > kJacobiMaxSweeps) throw EigenError("Jacobi did not converge within 100 sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < v.size(); ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    Eigensystem out{std::vector<double>(n), DenseMatrix(v.size())};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < v.size(); ++k) out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

// P M P with P = I - J/m, the compression of M to zero-sum vectors.
inline DenseMatrix center(const DenseMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> row_mean(n, 0.0), col_mean(n, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            row_mean[r] += m(r, c);
            col_mean[c] += m(r, c);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        total += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
        col_mean[i] /= static_cast<double>(n);
    }
    total /= static_cast<double>(n * n);
    DenseMatrix out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out(r, c) = m(r, c) - row_mean[r] - col_mean[c] + total;
    // exact symmetry
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) {
            const double avg = 0.5 * (out(r, c) + out(c, r));
            out(r, c) = avg;
            out(c, r) = avg;
        }
    return out;
}

}  // namespace coarse
