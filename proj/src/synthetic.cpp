#include "logonet/synthetic.hpp"

#include <cmath>

#include "logonet/errors.hpp"
#include "logonet/rng.hpp"

namespace logonet {

namespace {

Eigen::MatrixXd cholesky_of(const GeneratorSpec& spec) {
    const Eigen::Index p = spec.sigma.rows();
    if (spec.sigma.cols() != p || spec.mu.size() != p)
        throw dimension_error("generator spec dimensions disagree");
    if (spec.q < 0) throw domain_error("observation count must be non-negative");
    Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
    if (llt.info() != Eigen::Success)
        throw domain_error("generator sigma is not positive definite");
    return llt.matrixL();
}

}  // namespace

ObservationMatrix sample_gaussian(const GeneratorSpec& spec) {
    Eigen::MatrixXd L = cholesky_of(spec);
    const Eigen::Index p = spec.sigma.rows();
    Eigen::MatrixXd X(spec.q, p);
    Eigen::VectorXd z(p);
    for (int s = 0; s < spec.q; ++s) {
        rng_stream rs(spec.seed, static_cast<std::uint64_t>(s));
        for (Eigen::Index i = 0; i < p; ++i) z[i] = rs.next_normal();
        X.row(s) = (spec.mu + L * z).transpose();
    }
    return ObservationMatrix(std::move(X));
}

ObservationMatrix sample_student(const GeneratorSpec& spec) {
    if (!(spec.nu > 2.0)) throw domain_error("student_t generator requires nu > 2");
    Eigen::MatrixXd L = cholesky_of(spec);
    const Eigen::Index p = spec.sigma.rows();
    const double nu = spec.nu;
    Eigen::MatrixXd X(spec.q, p);
    Eigen::VectorXd g(p);
    for (int s = 0; s < spec.q; ++s) {
        rng_stream rs(spec.seed, static_cast<std::uint64_t>(s));
        double z = rs.next_gamma(nu / 2.0, nu / 2.0);
        for (Eigen::Index i = 0; i < p; ++i) g[i] = rs.next_normal();
        double scale = std::sqrt((nu - 2.0) / (nu * z));
        X.row(s) = (spec.mu + L * g * scale).transpose();
    }
    return ObservationMatrix(std::move(X));
}

ObservationMatrix sample(const GeneratorSpec& spec) {
    return spec.family == Family::normal ? sample_gaussian(spec) : sample_student(spec);
}

Eigen::MatrixXd factor_covariance(int p, int n_factors, std::uint64_t seed) {
    if (p < 1 || n_factors < 1) throw domain_error("factor covariance needs p, n_factors >= 1");
    // dedicated substream so the draws never collide with observation streams
    rng_stream rs(seed, 0xFAC70Cull << 32);
    Eigen::MatrixXd B(p, n_factors);
    for (int i = 0; i < p; ++i)
        for (int k = 0; k < n_factors; ++k) B(i, k) = 0.6 * rs.next_normal();
    Eigen::MatrixXd sigma = B * B.transpose();
    for (int i = 0; i < p; ++i) sigma(i, i) += 0.3 + 0.7 * rs.next_uniform();
    Eigen::VectorXd target(p);
    for (int i = 0; i < p; ++i) target[i] = 0.5 + 1.5 * rs.next_uniform();
    Eigen::VectorXd rescale = (target.array() / sigma.diagonal().array().sqrt()).matrix();
    return rescale.asDiagonal() * sigma * rescale.asDiagonal();
}

}  // namespace logonet
