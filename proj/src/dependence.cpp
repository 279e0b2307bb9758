#include "logonet/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "logonet/errors.hpp"

namespace logonet {

namespace {

Eigen::VectorXd column_stds(const Eigen::MatrixXd& cov) {
    return cov.diagonal().array().sqrt().matrix();
}

void require_spread(const ObservationMatrix& data) {
    if (data.q() < 2) throw degenerate_input("estimator requires at least two observations");
}

// pairs i<j with a[i] > a[j]; ties are not inversions
std::uint64_t merge_count(std::vector<double>& a, std::vector<double>& tmp, std::size_t lo,
                          std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = merge_count(a, tmp, lo, mid) + merge_count(a, tmp, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[j] < a[i]) {
            inv += mid - i;
            tmp[k++] = a[j++];
        } else {
            tmp[k++] = a[i++];
        }
    }
    while (i < mid) tmp[k++] = a[i++];
    while (j < hi) tmp[k++] = a[j++];
    std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
              tmp.begin() + static_cast<std::ptrdiff_t>(hi),
              a.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

std::uint64_t tie_pairs(const std::vector<double>& sorted) {
    std::uint64_t total = 0, run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

}  // namespace

double kendall_tau_from_counts(std::uint64_t n0, std::uint64_t n1, std::uint64_t n2,
                               std::int64_t concordant_minus_discordant) {
    if (n0 == n1 || n0 == n2)
        throw degenerate_input("kendall tau undefined for an all-tied column");
    double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
    return static_cast<double>(concordant_minus_discordant) / denom;
}

double kendall_tau_pair(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const std::size_t q = static_cast<std::size_t>(x.size());
    std::vector<std::size_t> order(q);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    std::uint64_t n0 = static_cast<std::uint64_t>(q) * (q - 1) / 2;
    std::uint64_t n1 = 0, n3 = 0;
    std::uint64_t run_x = 1, run_xy = 1;
    for (std::size_t i = 1; i <= q; ++i) {
        bool same_x = i < q && x[order[i]] == x[order[i - 1]];
        bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
        if (same_x) {
            ++run_x;
        } else {
            n1 += run_x * (run_x - 1) / 2;
            run_x = 1;
        }
        if (same_xy) {
            ++run_xy;
        } else {
            n3 += run_xy * (run_xy - 1) / 2;
            run_xy = 1;
        }
    }

    std::vector<double> ys(q);
    for (std::size_t i = 0; i < q; ++i) ys[i] = y[order[i]];
    std::vector<double> tmp(q);
    std::uint64_t swaps = merge_count(ys, tmp, 0, q);  // ys now sorted
    std::uint64_t n2 = tie_pairs(ys);

    std::int64_t num = static_cast<std::int64_t>(n0) - static_cast<std::int64_t>(n1) -
                       static_cast<std::int64_t>(n2) + static_cast<std::int64_t>(n3) -
                       2 * static_cast<std::int64_t>(swaps);
    return kendall_tau_from_counts(n0, n1, n2, num);
}

DependenceMatrix pearson_covariance(const ObservationMatrix& data) {
    require_spread(data);
    const auto& X = data.values();
    const double q = static_cast<double>(data.q());
    Eigen::MatrixXd D = X.rowwise() - X.colwise().mean();
    Eigen::MatrixXd cov = (D.transpose() * D) / q;
    cov = ((cov + cov.transpose()) / 2.0).eval();
    for (Eigen::Index j = 0; j < cov.cols(); ++j)
        if (cov(j, j) <= 0.0)
            throw degenerate_input("zero-variance column: " + data.labels()[j]);
    Eigen::VectorXd s = column_stds(cov);
    return {DependenceKind::pearson_covariance, std::move(cov), std::move(s)};
}

DependenceMatrix pearson_correlation(const ObservationMatrix& data) {
    DependenceMatrix cov = pearson_covariance(data);
    DependenceMatrix corr = covariance_to_correlation(cov);
    corr.kind = DependenceKind::pearson_correlation;
    return corr;
}

DependenceMatrix kendall_correlation(const ObservationMatrix& data, bool sine_transform) {
    require_spread(data);
    const auto& X = data.values();
    const Eigen::Index p = data.p();
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            double tau;
            try {
                tau = kendall_tau_pair(X.col(i), X.col(j));
            } catch (const degenerate_input&) {
                throw degenerate_input("all-tied column among: " + data.labels()[i] + ", " +
                                       data.labels()[j]);
            }
            if (sine_transform) tau = std::sin(M_PI * tau / 2.0);
            K(i, j) = K(j, i) = tau;
        }
    }
    Eigen::MatrixXd cov = pearson_covariance(data).matrix;
    return {DependenceKind::kendall_correlation, std::move(K), column_stds(cov)};
}

DependenceMatrix correlation_to_covariance(const DependenceMatrix& corr,
                                           const Eigen::VectorXd& scale) {
    if (!corr.is_correlation())
        throw domain_error("correlation_to_covariance: input is already a covariance");
    if (scale.size() != corr.matrix.rows())
        throw dimension_error("scale length does not match matrix size");
    if ((scale.array() <= 0.0).any())
        throw domain_error("correlation_to_covariance: non-positive scale entry");
    Eigen::MatrixXd out =
        scale.asDiagonal() * corr.matrix * scale.asDiagonal();
    return {DependenceKind::pearson_covariance, std::move(out), scale};
}

DependenceMatrix covariance_to_correlation(const DependenceMatrix& cov) {
    if (cov.is_correlation())
        throw domain_error("covariance_to_correlation: input is already a correlation");
    Eigen::VectorXd s = column_stds(cov.matrix);
    if ((s.array() <= 0.0).any())
        throw degenerate_input("covariance_to_correlation: non-positive variance");
    Eigen::VectorXd inv = s.cwiseInverse();
    Eigen::MatrixXd out = inv.asDiagonal() * cov.matrix * inv.asDiagonal();
    out.diagonal().setOnes();
    return {DependenceKind::pearson_correlation, std::move(out), s};
}

}  // namespace logonet
