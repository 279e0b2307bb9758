#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "logonet/observation_matrix.hpp"

namespace logonet {

enum class Family { normal, student_t };

struct GeneratorSpec {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;  // positive definite
    Family family = Family::normal;
    double nu = 0.0;  // student_t only, > 2
    std::uint64_t seed = 0;
    int q = 0;
};

// x(s) = mu + L z, one Philox substream per observation
ObservationMatrix sample_gaussian(const GeneratorSpec& spec);

// normal-mixture draw: z ~ Gamma(nu/2, rate nu/2), then
// x(s) = mu + L g sqrt((nu-2)/(nu z)); the covariance of x is sigma
ObservationMatrix sample_student(const GeneratorSpec& spec);

ObservationMatrix sample(const GeneratorSpec& spec);

// B B' + D with B ~ 0.6 N(0,1) loadings on n_factors factors and
// D ~ U[0.3, 1] idiosyncratic variances, then rescaled so the marginal
// standard deviations land in U[0.5, 2]. Deterministic in the seed.
Eigen::MatrixXd factor_covariance(int p, int n_factors, std::uint64_t seed);

}  // namespace logonet
