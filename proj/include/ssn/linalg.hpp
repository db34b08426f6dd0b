#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace ssn {

using Vec = std::vector<double>;

/// Dense row-major matrix. Small and dumb on purpose: every consumer in this
/// project streams over rows or columns with plain loops.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
};

inline double dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline double norm1(const Vec& a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

inline double max_abs(const Mat& m) {
    double r = 0.0;
    for (double v : m.data) r = std::max(r, std::abs(v));
    return r;
}

/// y = M x
inline Vec matvec(const Mat& m, const Vec& x) {
    assert(static_cast<int>(x.size()) == m.cols);
    Vec y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// y = M^T x
inline Vec matvec_t(const Mat& m, const Vec& x) {
    assert(static_cast<int>(x.size()) == m.rows);
    Vec y(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        for (int j = 0; j < m.cols; ++j) y[j] += r[j] * x[i];
    }
    return y;
}

/// Row echelon reduction with partial pivoting. Returns the rank; on return
/// `a` holds the reduced matrix and `pivot_cols` the pivot column of each of
/// the first `rank` rows. Entries below `tol` never qualify as pivots.
inline int row_reduce(Mat& a, std::vector<int>& pivot_cols, double tol) {
    pivot_cols.clear();
    int r = 0;
    for (int c = 0; c < a.cols && r < a.rows; ++c) {
        int best = -1;
        double best_abs = tol;
        for (int i = r; i < a.rows; ++i) {
            double v = std::abs(a(i, c));
            if (v > best_abs) {
                best_abs = v;
                best = i;
            }
        }
        if (best < 0) continue;
        if (best != r)
            for (int j = 0; j < a.cols; ++j) std::swap(a(r, j), a(best, j));
        const double piv = a(r, c);
        for (int j = c; j < a.cols; ++j) a(r, j) /= piv;
        for (int i = 0; i < a.rows; ++i) {
            if (i == r) continue;
            const double f = a(i, c);
            if (f == 0.0) continue;
            for (int j = c; j < a.cols; ++j) a(i, j) -= f * a(r, j);
        }
        pivot_cols.push_back(c);
        ++r;
    }
    return r;
}

/// Basis of the (numerical) null space of `b`: one vector per free column,
/// each with that free coordinate set to 1. Empty when b has full column rank.
inline std::vector<Vec> null_space_basis(const Mat& b, double tol) {
    Mat a = b;
    std::vector<int> pivot_cols;
    const int rank = row_reduce(a, pivot_cols, tol);
    std::vector<char> is_pivot(b.cols, 0);
    for (int c : pivot_cols) is_pivot[c] = 1;

    std::vector<Vec> basis;
    for (int f = 0; f < b.cols; ++f) {
        if (is_pivot[f]) continue;
        Vec v(b.cols, 0.0);
        v[f] = 1.0;
        for (int r = 0; r < rank; ++r) v[pivot_cols[r]] = -a(r, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solve the square system M x = rhs by Gaussian elimination with partial
/// pivoting. Returns nullopt for (numerically) singular M.
inline std::optional<Vec> solve_square(Mat m, Vec rhs, double tol = 1e-12) {
    assert(m.rows == m.cols && m.rows == static_cast<int>(rhs.size()));
    const int n = m.rows;
    for (int c = 0; c < n; ++c) {
        int best = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(m(i, c)) > std::abs(m(best, c))) best = i;
        if (std::abs(m(best, c)) <= tol) return std::nullopt;
        if (best != c) {
            for (int j = 0; j < n; ++j) std::swap(m(c, j), m(best, j));
            std::swap(rhs[c], rhs[best]);
        }
        for (int i = c + 1; i < n; ++i) {
            const double f = m(i, c) / m(c, c);
            if (f == 0.0) continue;
            for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
            rhs[i] -= f * rhs[c];
        }
    }
    Vec x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

}  // namespace ssn
