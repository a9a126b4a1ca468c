#include "simplex.hpp"

#include <cmath>
#include <limits>

#include "qfep/error.hpp"

namespace qfep::detail {

PhaseOneResult phase_one(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, double eps) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    require(b.size() == m, ErrorKind::invalid_argument, "right-hand side size mismatch");
    for (Eigen::Index i = 0; i < m; ++i) require(b[i] >= 0.0, ErrorKind::invalid_argument, "b must be non-negative");

    // Tableau columns: [w (n) | artificials (m) | rhs]. Row m holds reduced costs.
    const Eigen::Index cols = n + m + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
    t.topLeftCorner(m, n) = a;
    t.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    t.col(cols - 1).head(m) = b;
    for (Eigen::Index j = 0; j < n; ++j) t(m, j) = -a.col(j).sum();
    t(m, cols - 1) = -b.sum();

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

    PhaseOneResult out;
    const int max_iter = 50 * static_cast<int>(m + n) + 1000;
    for (; out.iterations < max_iter; ++out.iterations) {
        // Bland's rule: lowest-index column with negative reduced cost.
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j)
            if (t(m, j) < -eps) {
                enter = j;
                break;
            }
        if (enter < 0) break;

        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (t(i, enter) <= eps) continue;
            const double ratio = t(i, cols - 1) / t(i, enter);
            if (ratio < best - 1e-15 ||
                (std::abs(ratio - best) <= 1e-15 && leave >= 0 &&
                 basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                best = ratio;
                leave = i;
            }
        }
        // Phase one is bounded below by zero, so an entering column always has a pivot.
        if (leave < 0) break;

        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = t(i, enter);
            if (f != 0.0) t.row(i) -= f * t.row(leave);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    out.primal = Eigen::VectorXd::Zero(n);
    double art = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index bi = basis[static_cast<std::size_t>(i)];
        const double v = t(i, cols - 1);
        if (bi < n)
            out.primal[bi] = v;
        else
            art += v;
    }
    out.infeasibility = art;
    // Reduced cost of artificial i is 1 - y_i.
    out.dual.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) out.dual[i] = 1.0 - t(m, n + i);
    return out;
}

}  // namespace qfep::detail
