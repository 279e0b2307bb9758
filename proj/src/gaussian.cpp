#include "logonet/gaussian.hpp"

#include <cmath>

#include "logonet/errors.hpp"

namespace logonet {

Eigen::VectorXd fit_mu(const ObservationMatrix& data) {
    if (data.q() < 1) throw degenerate_input("fit_mu requires at least one observation");
    return data.values().colwise().mean();
}

double gaussian_log_likelihood(const ObservationMatrix& data, const GaussianModel& model) {
    if (data.p() != model.precision.p())
        throw dimension_error("gaussian_log_likelihood: dimension mismatch");
    const double q = static_cast<double>(data.q());
    const double p = static_cast<double>(data.p());
    double d2sum = mahalanobis_sq_all(data, model.mu, model.precision).sum();
    return 0.5 * q * log_det(model.precision) - 0.5 * d2sum -
           0.5 * q * p * std::log(2.0 * M_PI);
}

DependenceMatrix estimator_covariance(const ObservationMatrix& data, Estimator estimator,
                                      bool kendall_sine) {
    if (estimator == Estimator::pearson) return pearson_covariance(data);
    DependenceMatrix corr = kendall_correlation(data, kendall_sine);
    return correlation_to_covariance(corr, corr.scale);
}

GaussianModel fit_gaussian(const ObservationMatrix& data, const CliqueForest& forest,
                           Estimator estimator, bool kendall_sine, double ridge) {
    DependenceMatrix cov = estimator_covariance(data, estimator, kendall_sine);
    return fit_gaussian(data, forest, cov, ridge);
}

GaussianModel fit_gaussian(const ObservationMatrix& data, const CliqueForest& forest,
                           const DependenceMatrix& cov, double ridge) {
    return {fit_mu(data), assemble_precision(cov, forest, ridge)};
}

double pdf_factorization_check(const Eigen::VectorXd& x, const GaussianModel& model) {
    constexpr double half_log_2pi = 0.91893853320467274178;  // log(2 pi)/2
    const auto& prec = model.precision;

    Eigen::MatrixXd J = dense_embedding(prec);
    Eigen::LLT<Eigen::MatrixXd> llt(J);
    if (llt.info() != Eigen::Success) throw error("precision not positive definite");
    double logdet_J = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    Eigen::VectorXd d = x - model.mu;
    double log_joint = 0.5 * logdet_J - 0.5 * d.dot(J * d) -
                       half_log_2pi * static_cast<double>(prec.p());

    // clique/separator factors from the marginal covariance blocks
    auto log_block_density = [&](const BlockFactor& f) {
        const int m = static_cast<int>(f.indices.size());
        Eigen::VectorXd dc(m);
        for (int a = 0; a < m; ++a) dc[a] = d[f.indices[a]];
        return 0.5 * f.logdet_precision - 0.5 * dc.dot(f.precision * dc) - half_log_2pi * m;
    };
    double log_fact = 0.0;
    for (const auto& f : prec.clique_blocks()) log_fact += log_block_density(f);
    for (const auto& f : prec.separator_blocks()) log_fact -= log_block_density(f);

    return std::abs(std::expm1(log_fact - log_joint));
}

}  // namespace logonet
