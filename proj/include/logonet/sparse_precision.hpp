#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "logonet/clique_forest.hpp"
#include "logonet/dependence.hpp"
#include "logonet/observation_matrix.hpp"

namespace logonet {

struct BlockFactor {
    std::vector<int> indices;
    Eigen::MatrixXd precision;  // inverse of the covariance block
    double logdet_precision;    // = -log|covariance block|
};

// Symmetric sparse J with support on forest edges + diagonal, built by
// local block inversions; positive definiteness certified at assembly.
class SparsePrecision {
public:
    SparsePrecision() : forest_(std::make_shared<CliqueForest>()) {}
    SparsePrecision(std::shared_ptr<const CliqueForest> forest,
                    std::map<std::pair<int, int>, double> entries,
                    std::vector<BlockFactor> clique_blocks, std::vector<BlockFactor> sep_blocks);

    int p() const { return forest_->p; }
    const CliqueForest& forest() const { return *forest_; }
    std::shared_ptr<const CliqueForest> forest_ptr() const { return forest_; }
    const std::map<std::pair<int, int>, double>& entries() const { return entries_; }
    double entry(int i, int j) const;
    const std::vector<BlockFactor>& clique_blocks() const { return clique_blocks_; }
    const std::vector<BlockFactor>& separator_blocks() const { return sep_blocks_; }

private:
    std::shared_ptr<const CliqueForest> forest_;
    std::map<std::pair<int, int>, double> entries_;
    std::vector<BlockFactor> clique_blocks_, sep_blocks_;
};

// J = sum of clique-block inverses minus separator-block inverses; every
// inversion is local. ridge > 0 adds eps*I to each block before inversion.
SparsePrecision assemble_precision(const DependenceMatrix& cov, const CliqueForest& forest,
                                   double ridge = 0.0);
SparsePrecision assemble_precision(const Eigen::MatrixXd& cov,
                                   std::shared_ptr<const CliqueForest> forest, double ridge = 0.0);
// same assembly from per-block covariance/moment matrices (EM path)
SparsePrecision assemble_precision_blocks(const std::vector<Eigen::MatrixXd>& clique_cov,
                                          const std::vector<Eigen::MatrixXd>& sep_cov,
                                          std::shared_ptr<const CliqueForest> forest,
                                          double ridge = 0.0);

// log|J| via the clique/separator decomposition
double log_det(const SparsePrecision& precision);

// (x-mu)' J (x-mu) as sum of clique forms minus separator forms
double mahalanobis_sq(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                      const SparsePrecision& precision);
// one distance per observation row (same decomposition, vectorized)
Eigen::VectorXd mahalanobis_sq_all(const ObservationMatrix& data, const Eigen::VectorXd& mu,
                                   const SparsePrecision& precision);

bool check_positive_definite(const SparsePrecision& precision);

Eigen::MatrixXd dense_embedding(const SparsePrecision& precision);

}  // namespace logonet
