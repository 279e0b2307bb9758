#pragma once

#include "logonet/sparse_precision.hpp"

namespace logonet {

enum class Estimator { pearson, kendall };

struct GaussianModel {
    Eigen::VectorXd mu;
    SparsePrecision precision;
};

// ML location = sample mean
Eigen::VectorXd fit_mu(const ObservationMatrix& data);

// l = (q/2) log|J| - (1/2) sum_s d2_s - (qp/2) log(2 pi)
double gaussian_log_likelihood(const ObservationMatrix& data, const GaussianModel& model);

GaussianModel fit_gaussian(const ObservationMatrix& data, const CliqueForest& forest,
                           Estimator estimator, bool kendall_sine = false, double ridge = 0.0);
// same fit from a covariance that was already computed
GaussianModel fit_gaussian(const ObservationMatrix& data, const CliqueForest& forest,
                           const DependenceMatrix& cov, double ridge = 0.0);

// relative error of the clique/separator density factorization at x
double pdf_factorization_check(const Eigen::VectorXd& x, const GaussianModel& model);

// covariance per the chosen estimator (shared with the Student-t module)
DependenceMatrix estimator_covariance(const ObservationMatrix& data, Estimator estimator,
                                      bool kendall_sine = false);

}  // namespace logonet
