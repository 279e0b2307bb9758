#pragma once

#include "logonet/errors.hpp"
#include "logonet/gaussian.hpp"
#include "logonet/sparse_precision.hpp"

namespace logonet {

struct StudentTModel {
    Eigen::VectorXd mu;
    SparsePrecision precision;  // inverse covariance J
    double nu = 0.0;
    int em_iterations = 0;
    double final_loglik = 0.0;
};

enum class NuSource { fixed, tail_estimate };

struct EmConfig {
    int max_iterations = 500;
    double tolerance = 1e-6;  // max relative change of mu and J entries
    NuSource nu_source = NuSource::fixed;
    double nu = 2.2;
    double tail_fraction = 0.05;
    double ridge = 0.0;
};

struct EmState {
    int iteration = 0;
    double nu = 0.0;
    Eigen::VectorXd mu;
    SparsePrecision precision;
    Eigen::VectorXd weights;
    double loglik = 0.0;
    double metric = 0.0;  // convergence metric of the latest update
};

struct convergence_error : error {
    convergence_error(const std::string& what, EmState state)
        : error(what), last_state(std::move(state)) {}
    EmState last_state;
};

double student_log_likelihood(const ObservationMatrix& data, const StudentTModel& model);

// w_s = (nu+p) / (nu + nu/(nu-2) * d2_s)
Eigen::VectorXd em_weights(const ObservationMatrix& data, const Eigen::VectorXd& mu,
                           const SparsePrecision& precision, double nu);

// one EM update: weighted mean, weighted local second moments on
// clique/separator blocks only (with the nu/(nu-2) factor), per-block
// inversion, then refreshed weights and log-likelihood
EmState em_step(const ObservationMatrix& data, const EmState& state, const CliqueForest& forest,
                const EmConfig& cfg);

StudentTModel fit_student_em(const ObservationMatrix& data, const CliqueForest& forest,
                             const EmConfig& cfg, Estimator estimator, bool kendall_sine = false);
// same fit initialized from a covariance that was already computed
StudentTModel fit_student_em(const ObservationMatrix& data, const CliqueForest& forest,
                             const EmConfig& cfg, const DependenceMatrix& initial_cov);

// Student-t without EM: location/covariance from the chosen estimator
StudentTModel fit_student_direct(const ObservationMatrix& data, const CliqueForest& forest,
                                 double nu, Estimator estimator, bool kendall_sine = false,
                                 double ridge = 0.0);
StudentTModel fit_student_direct(const ObservationMatrix& data, const CliqueForest& forest,
                                 double nu, const DependenceMatrix& cov, double ridge = 0.0);

// Tail-index estimate averaged over upper and lower tails of every
// column, k = ceil(tail_fraction*q) order statistics per tail, clamped
// to [2.05, 50]. Uses the moment (Dekkers-Einmahl-de Haan) estimator:
// the plain Hill ratio is biased low on Student-t tails at these k.
double estimate_nu_tail(const ObservationMatrix& data, double tail_fraction);

}  // namespace logonet
