#include "ssn/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ssn::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kProgressTol = 1e-12;
constexpr int kRefreshInterval = 50;

struct Standardized {
    // Column-major storage: columns are structural vars, then slacks, then
    // one artificial per row.
    std::vector<Vec> cols;
    Vec b;                   // nonnegative
    std::vector<bool> flipped;
    int m = 0;
    int n_struct = 0;
    int n_slack = 0;
    int first_artificial = 0;
};

Standardized standardize(const LpProblem& p) {
    Standardized s;
    s.m = p.num_rows();
    s.n_struct = p.vars();
    for (const Vec& r : p.rows)
        if (static_cast<int>(r.size()) != s.n_struct)
            throw std::invalid_argument("lp: row width mismatch");
    for (double v : p.c)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite objective");

    int n_slack = 0;
    for (RowSense sn : p.sense)
        if (sn != RowSense::eq) ++n_slack;
    s.n_slack = n_slack;
    s.first_artificial = s.n_struct + n_slack;
    const int total = s.first_artificial + s.m;

    s.cols.assign(total, Vec(s.m, 0.0));
    s.b.assign(s.m, 0.0);
    s.flipped.assign(s.m, false);

    int slack_at = s.n_struct;
    for (int i = 0; i < s.m; ++i) {
        const double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
        s.flipped[i] = sign < 0.0;
        s.b[i] = sign * p.rhs[i];
        for (int j = 0; j < s.n_struct; ++j) {
            const double v = p.rows[i][j];
            if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite coefficient");
            if (v != 0.0) s.cols[j][i] = sign * v;
        }
        if (p.sense[i] != RowSense::eq) {
            const double sc = p.sense[i] == RowSense::le ? 1.0 : -1.0;
            s.cols[slack_at][i] = sign * sc;
            ++slack_at;
        }
        s.cols[s.first_artificial + i][i] = 1.0;
    }
    return s;
}

class RevisedSimplex {
  public:
    explicit RevisedSimplex(Standardized std_form) : s_(std::move(std_form)) {
        const int m = s_.m;
        binv_ = Mat(m, m);
        for (int i = 0; i < m; ++i) binv_(i, i) = 1.0;
        // Initial basis: the row's +1 slack when it has one, else the
        // artificial. Either way the basis matrix is the identity, so
        // B^{-1} = I and x_B = b hold exactly.
        basis_.assign(m, -1);
        for (int j = s_.n_struct; j < s_.first_artificial; ++j) {
            for (int i = 0; i < m; ++i)
                if (s_.cols[j][i] != 0.0) {
                    if (s_.cols[j][i] > 0.0) basis_[i] = j;
                    break;
                }
        }
        for (int i = 0; i < m; ++i)
            if (basis_[i] < 0) basis_[i] = s_.first_artificial + i;
        xb_ = s_.b;
        in_basis_.assign(total_cols(), false);
        for (int j : basis_) in_basis_[j] = true;
    }

    int total_cols() const { return static_cast<int>(s_.cols.size()); }
    bool is_artificial(int j) const { return j >= s_.first_artificial; }

    /// Minimize `cost` over the current feasible basis. Returns false on
    /// unbounded. Artificial columns never enter when `block_artificials`.
    bool optimize(const Vec& cost, bool block_artificials, int& iterations) {
        const int m = s_.m;
        const int n = total_cols();
        const long max_iter = 1000L + 50L * (static_cast<long>(m) + n);
        bool bland = false;
        int no_progress = 0;
        double best_obj = objective(cost);
        const int bland_trigger = 3 * (m + n);

        for (long it = 0;; ++it) {
            if (it > max_iter)
                throw std::runtime_error(
                    "simplex: stalled after " + std::to_string(it) + " iterations (m=" +
                    std::to_string(m) + ", n=" + std::to_string(n) + ", obj=" +
                    std::to_string(objective(cost)) + ")");
            // y = cost_B^T B^{-1}
            Vec y(m, 0.0);
            for (int k = 0; k < m; ++k) {
                const double cb = cost[basis_[k]];
                if (cb == 0.0) continue;
                const double* row = binv_.row(k);
                for (int i = 0; i < m; ++i) y[i] += cb * row[i];
            }
            int enter = -1;
            double best_red = -kPivotTol;
            for (int j = 0; j < n; ++j) {
                if (in_basis_[j]) continue;
                if (block_artificials && is_artificial(j)) continue;
                double red = cost[j];
                const Vec& col = s_.cols[j];
                for (int i = 0; i < m; ++i) red -= y[i] * col[i];
                if (red < best_red) {
                    best_red = red;
                    enter = j;
                    if (bland) break;  // first improving index
                }
            }
            if (enter < 0) {
                iterations += static_cast<int>(it);
                return true;  // optimal for this cost vector
            }

            // w = B^{-1} A_enter
            Vec w(m, 0.0);
            const Vec& col = s_.cols[enter];
            for (int i = 0; i < m; ++i) {
                double sum = 0.0;
                const double* row = binv_.row(i);
                for (int k = 0; k < m; ++k) sum += row[k] * col[k];
                w[i] = sum;
            }

            // Ratio test. Basic artificials moving negative must leave at
            // ratio zero, otherwise they would turn positive again.
            int leave = -1;
            double theta = 0.0;
            for (int i = 0; i < m; ++i) {
                double ratio;
                if (w[i] > kPivotTol)
                    ratio = std::max(xb_[i], 0.0) / w[i];
                else if (w[i] < -kPivotTol && is_artificial(basis_[i]) && xb_[i] <= kPivotTol)
                    ratio = 0.0;
                else
                    continue;
                if (leave < 0 || ratio < theta - kPivotTol) {
                    leave = i;
                    theta = ratio;
                } else if (ratio <= theta + kPivotTol) {
                    // Tie break: lowest basis column index (Bland-safe).
                    if (basis_[i] < basis_[leave]) {
                        leave = i;
                        theta = std::min(theta, ratio);
                    }
                }
            }
            if (leave < 0) {
                iterations += static_cast<int>(it);
                return false;  // unbounded direction
            }

            pivot(enter, leave, w, theta);

            const double obj = objective(cost);
            if (obj < best_obj - kProgressTol * (1.0 + std::abs(best_obj))) {
                best_obj = obj;
                no_progress = 0;
            } else if (!bland && ++no_progress > bland_trigger) {
                bland = true;
            }
        }
    }

    void drive_out_artificials() {
        const int m = s_.m;
        for (int r = 0; r < m; ++r) {
            if (!is_artificial(basis_[r])) continue;
            int enter = -1;
            for (int j = 0; j < s_.first_artificial && enter < 0; ++j) {
                if (in_basis_[j]) continue;
                double wr = 0.0;
                const double* row = binv_.row(r);
                const Vec& col = s_.cols[j];
                for (int k = 0; k < m; ++k) wr += row[k] * col[k];
                if (std::abs(wr) > 1e-7) enter = j;
            }
            if (enter < 0) continue;  // redundant row, artificial stays at zero
            Vec w(m, 0.0);
            const Vec& col = s_.cols[enter];
            for (int i = 0; i < m; ++i) {
                double sum = 0.0;
                const double* row = binv_.row(i);
                for (int k = 0; k < m; ++k) sum += row[k] * col[k];
                w[i] = sum;
            }
            pivot(enter, r, w, 0.0);
        }
    }

    double objective(const Vec& cost) const {
        double v = 0.0;
        for (int i = 0; i < s_.m; ++i) v += cost[basis_[i]] * xb_[i];
        return v;
    }

    Vec dual(const Vec& cost) const {
        Vec y(s_.m, 0.0);
        for (int k = 0; k < s_.m; ++k) {
            const double cb = cost[basis_[k]];
            if (cb == 0.0) continue;
            const double* row = binv_.row(k);
            for (int i = 0; i < s_.m; ++i) y[i] += cb * row[i];
        }
        return y;
    }

    const std::vector<int>& basis() const { return basis_; }
    const Vec& xb() const { return xb_; }
    const Standardized& form() const { return s_; }

  private:
    void pivot(int enter, int leave, const Vec& w, double theta) {
        const int m = s_.m;
        for (int i = 0; i < m; ++i) xb_[i] -= theta * w[i];
        xb_[leave] = theta;
        const double piv = w[leave];
        double* lr = binv_.row(leave);
        for (int k = 0; k < m; ++k) lr[k] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double f = w[i];  // lr is already scaled by 1/piv
            if (f == 0.0) continue;
            double* row = binv_.row(i);
            for (int k = 0; k < m; ++k) row[k] -= f * lr[k];
        }
        in_basis_[basis_[leave]] = false;
        in_basis_[enter] = true;
        basis_[leave] = enter;
        if (++pivots_since_refresh_ >= kRefreshInterval) refresh();
    }

    /// Recompute B^{-1} and x_B from scratch (Gauss-Jordan on the basis
    /// columns) to shed accumulated product-form error.
    void refresh() {
        pivots_since_refresh_ = 0;
        const int m = s_.m;
        Mat aug(m, 2 * m, 0.0);
        for (int k = 0; k < m; ++k) {
            const Vec& col = s_.cols[basis_[k]];
            for (int i = 0; i < m; ++i) aug(i, k) = col[i];
        }
        for (int i = 0; i < m; ++i) aug(i, m + i) = 1.0;
        for (int c = 0; c < m; ++c) {
            int best = c;
            for (int i = c + 1; i < m; ++i)
                if (std::abs(aug(i, c)) > std::abs(aug(best, c))) best = i;
            if (std::abs(aug(best, c)) < 1e-13)
                throw std::runtime_error("simplex: singular basis during refresh");
            if (best != c)
                for (int j = 0; j < 2 * m; ++j) std::swap(aug(c, j), aug(best, j));
            const double piv = aug(c, c);
            for (int j = 0; j < 2 * m; ++j) aug(c, j) /= piv;
            for (int i = 0; i < m; ++i) {
                if (i == c) continue;
                const double f = aug(i, c);
                if (f == 0.0) continue;
                for (int j = 0; j < 2 * m; ++j) aug(i, j) -= f * aug(c, j);
            }
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) binv_(i, j) = aug(i, m + j);
        for (int i = 0; i < m; ++i) {
            double sum = 0.0;
            for (int k = 0; k < m; ++k) sum += binv_(i, k) * s_.b[k];
            xb_[i] = sum;
        }
    }

    Standardized s_;
    Mat binv_;
    std::vector<int> basis_;
    std::vector<bool> in_basis_;
    Vec xb_;
    int pivots_since_refresh_ = 0;
};

}  // namespace

LpProblem LpProblem::minimize(Vec objective) {
    LpProblem p;
    p.c = std::move(objective);
    return p;
}

void LpProblem::add_row(Vec coefficients, RowSense s, double b) {
    if (coefficients.size() != c.size())
        throw std::invalid_argument("lp: row width mismatch");
    rows.push_back(std::move(coefficients));
    sense.push_back(s);
    rhs.push_back(b);
}

LpSolution solve(const LpProblem& p) {
    Standardized sf = standardize(p);
    const int m = sf.m;
    const int first_art = sf.first_artificial;
    RevisedSimplex splx(std::move(sf));

    LpSolution out;
    out.x.assign(p.vars(), 0.0);
    out.dual.assign(m, 0.0);

    // Phase 1: minimize the artificial sum.
    bool need_phase1 = false;
    for (int j : splx.basis())
        if (j >= first_art) need_phase1 = true;
    if (need_phase1) {
        Vec cost1(splx.total_cols(), 0.0);
        for (int j = first_art; j < splx.total_cols(); ++j) cost1[j] = 1.0;
        if (!splx.optimize(cost1, true, out.iterations))
            throw std::runtime_error("simplex: unbounded phase 1");
        const double infeas = splx.objective(cost1);
        double bnorm = 0.0;
        for (double v : splx.form().b) bnorm = std::max(bnorm, v);
        if (infeas > 1e-8 * (1.0 + bnorm)) {
            out.status = Status::infeasible;
            out.value = infeas;
            return out;
        }
        splx.drive_out_artificials();
    }

    // Phase 2: original objective, artificials locked out.
    Vec cost2(splx.total_cols(), 0.0);
    for (int j = 0; j < p.vars(); ++j) cost2[j] = p.c[j];
    if (!splx.optimize(cost2, true, out.iterations)) {
        out.status = Status::unbounded;
        return out;
    }

    out.status = Status::optimal;
    out.basis = splx.basis();
    for (int i = 0; i < m; ++i) {
        const int j = splx.basis()[i];
        if (j < p.vars()) out.x[j] = splx.xb()[i];
    }
    out.value = 0.0;
    for (int j = 0; j < p.vars(); ++j) out.value += p.c[j] * out.x[j];
    const Vec y = splx.dual(cost2);
    for (int i = 0; i < m; ++i) out.dual[i] = splx.form().flipped[i] ? -y[i] : y[i];
    return out;
}

std::string dump(const LpProblem& p) {
    std::ostringstream os;
    os.precision(17);
    os << "minimize\n ";
    for (int j = 0; j < p.vars(); ++j) os << (j ? " " : "") << p.c[j];
    os << "\nsubject to\n";
    for (int i = 0; i < p.num_rows(); ++i) {
        os << " ";
        for (int j = 0; j < p.vars(); ++j) os << (j ? " " : "") << p.rows[i][j];
        switch (p.sense[i]) {
            case RowSense::le: os << " <= "; break;
            case RowSense::eq: os << " == "; break;
            case RowSense::ge: os << " >= "; break;
        }
        os << p.rhs[i] << "\n";
    }
    os << "x >= 0\n";
    return os.str();
}

}  // namespace ssn::lp
