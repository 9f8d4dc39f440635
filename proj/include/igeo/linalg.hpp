#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "igeo/errors.hpp"

// Small dense linear algebra, sized for desk-scale problems (a handful
// of atoms and parameters).  No external dependencies.

namespace igeo {

struct matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data; // row-major

    matrix() = default;
    matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static matrix identity(std::size_t n) {
        matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    matrix transposed() const {
        matrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

inline matrix operator*(const matrix& a, const matrix& b) {
    if (a.cols != b.rows) throw error("matrix product: shape mismatch");
    matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<double> mat_vec(const matrix& a, const std::vector<double>& x) {
    if (a.cols != x.size()) throw error("mat_vec: shape mismatch");
    std::vector<double> y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) y[i] += a(i, j) * x[j];
    return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const matrix& m) {
    double v = 0.0;
    for (double x : m.data) v = std::max(v, std::abs(x));
    return v;
}

inline bool is_symmetric(const matrix& m, double tol) {
    if (m.rows != m.cols) return false;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = i + 1; j < m.cols; ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    return true;
}

// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations,
// returned in ascending order.  Plenty accurate at these sizes.
inline std::vector<double> sym_eigenvalues(matrix a) {
    if (a.rows != a.cols) throw error("sym_eigenvalues: matrix not square");
    const std::size_t n = a.rows;
    if (n == 0) return {};
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline double min_eigenvalue(const matrix& a) {
    auto ev = sym_eigenvalues(a);
    return ev.empty() ? 0.0 : ev.front();
}

// Solve A x = b for symmetric positive definite A (Cholesky).
inline std::vector<double> solve_spd(const matrix& a, const std::vector<double>& b) {
    if (a.rows != a.cols || a.rows != b.size()) throw error("solve_spd: shape mismatch");
    const std::size_t n = a.rows;
    matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw degenerate_basis_error("solve_spd: matrix not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

// Singular values by one-sided Jacobi (column orthogonalization);
// keeps full accuracy for tiny singular values, which the Gram-matrix
// route would square away.
inline std::vector<double> singular_values(const matrix& a) {
    matrix w = (a.rows >= a.cols) ? a : a.transposed();
    const std::size_t m = w.rows, n = w.cols;
    if (n == 0) return {};
    auto col_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w(i, p) * w(i, q);
        return s;
    };
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = col_dot(p, p), aqq = col_dot(q, q), apq = col_dot(p, q);
                if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    double wip = w(i, p), wiq = w(i, q);
                    w(i, p) = c * wip - s * wiq;
                    w(i, q) = s * wip + c * wiq;
                }
            }
        if (!rotated) break;
    }
    std::vector<double> sv(n);
    for (std::size_t p = 0; p < n; ++p) sv[p] = std::sqrt(col_dot(p, p));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv; // descending
}

inline int numerical_rank(const matrix& a, double sv_tol = 1e-9) {
    if (a.rows == 0 || a.cols == 0) return 0;
    int r = 0;
    for (double s : singular_values(a))
        if (s > sv_tol) ++r;
    return r;
}

// Nonnegative least squares: minimize |A x - b| subject to x >= 0
// (Lawson-Hanson active set).  Returns the residual norm; x is written
// to *coeffs if given.
inline double nnls_residual(const matrix& a, const std::vector<double>& b,
                            std::vector<double>* coeffs = nullptr) {
    const std::size_t m = a.rows, n = a.cols;
    std::vector<double> x(n, 0.0);
    std::vector<bool> passive(n, false);

    auto residual_vec = [&]() {
        std::vector<double> r = b;
        for (std::size_t j = 0; j < n; ++j) {
            if (x[j] == 0.0) continue;
            for (std::size_t i = 0; i < m; ++i) r[i] -= a(i, j) * x[j];
        }
        return r;
    };

    auto solve_passive = [&](std::vector<double>& z) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < n; ++j)
            if (passive[j]) idx.push_back(j);
        const std::size_t k = idx.size();
        matrix g(k, k);
        std::vector<double> rhs(k, 0.0);
        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t q = 0; q <= p; ++q) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i) s += a(i, idx[p]) * a(i, idx[q]);
                g(p, q) = g(q, p) = s;
            }
            g(p, p) += 1e-14; // ridge for numerically repeated columns
            for (std::size_t i = 0; i < m; ++i) rhs[p] += a(i, idx[p]) * b[i];
        }
        auto zp = solve_spd(g, rhs);
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t p = 0; p < k; ++p) z[idx[p]] = zp[p];
        return idx;
    };

    const double wtol = 1e-12 * std::max(1.0, norm2(b));
    for (int outer = 0; outer < 3 * static_cast<int>(n) + 10; ++outer) {
        auto r = residual_vec();
        // gradient of 1/2 |Ax-b|^2 restricted to the active set
        double wmax = 0.0;
        int jmax = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (passive[j]) continue;
            double w = 0.0;
            for (std::size_t i = 0; i < m; ++i) w += a(i, j) * r[i];
            if (w > wmax) {
                wmax = w;
                jmax = static_cast<int>(j);
            }
        }
        if (jmax < 0 || wmax <= wtol) break;
        passive[jmax] = true;

        for (int inner = 0; inner < 3 * static_cast<int>(n) + 10; ++inner) {
            std::vector<double> z(n, 0.0);
            auto idx = solve_passive(z);
            bool all_pos = true;
            for (std::size_t j : idx)
                if (z[j] <= 0.0) all_pos = false;
            if (all_pos) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (std::size_t j : idx)
                if (z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
            for (std::size_t j : idx) x[j] += alpha * (z[j] - x[j]);
            for (std::size_t j : idx)
                if (x[j] <= 1e-14) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
        }
    }
    if (coeffs) *coeffs = x;
    return norm2(residual_vec());
}

} // namespace igeo
