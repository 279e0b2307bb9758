#pragma once

#include <Eigen/Dense>

#include "logonet/observation_matrix.hpp"

namespace logonet {

enum class DependenceKind { pearson_covariance, pearson_correlation, kendall_correlation };

struct DependenceMatrix {
    DependenceKind kind;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd scale;  // per-variable sample standard deviations (1/q normalization)

    bool is_correlation() const { return kind != DependenceKind::pearson_covariance; }
};

// ML normalization 1/q, so the assembled precision's fixed point holds exactly.
DependenceMatrix pearson_covariance(const ObservationMatrix& data);
DependenceMatrix pearson_correlation(const ObservationMatrix& data);

// Pairwise tau-b, O(q log q) per pair. sine_transform applies the
// elliptical consistency map sin(pi*tau/2) to off-diagonals (opt-in).
DependenceMatrix kendall_correlation(const ObservationMatrix& data, bool sine_transform = false);

DependenceMatrix correlation_to_covariance(const DependenceMatrix& corr,
                                           const Eigen::VectorXd& scale);
DependenceMatrix covariance_to_correlation(const DependenceMatrix& cov);

// tau-b of one column pair; exposed so the brute-force test oracle can
// share the final floating expression with the production path.
double kendall_tau_from_counts(std::uint64_t n0, std::uint64_t n1, std::uint64_t n2,
                               std::int64_t concordant_minus_discordant);
double kendall_tau_pair(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace logonet
