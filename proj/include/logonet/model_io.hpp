#pragma once

#include <string>

#include "logonet/gaussian.hpp"
#include "logonet/student.hpp"

namespace logonet {

std::string serialize_model(const GaussianModel& model);
std::string serialize_model(const StudentTModel& model);

enum class ModelType { gaussian, student_t };

struct AnyModel {
    ModelType type = ModelType::gaussian;
    Eigen::VectorXd mu;
    SparsePrecision precision;
    double nu = 0.0;
    int em_iterations = 0;
    double final_loglik = 0.0;
};

// Rebuilds the block factors from the precision's dense inverse (the
// constrained-ML fixed point makes that reconstruction exact up to
// floating error), so evaluation reuses the decomposition code paths.
AnyModel deserialize_model(const std::string& text);

double log_likelihood(const ObservationMatrix& data, const AnyModel& model);

}  // namespace logonet
