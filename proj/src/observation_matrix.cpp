#include "logonet/observation_matrix.hpp"

#include "logonet/errors.hpp"

namespace logonet {

namespace {

void validate(const Eigen::MatrixXd& values, const std::vector<std::string>& labels) {
    if (values.cols() < 1)
        throw dimension_error("observation matrix must have at least one column");
    if (labels.size() != static_cast<std::size_t>(values.cols()))
        throw dimension_error("label count does not match column count");
    if (!values.allFinite())
        throw degenerate_input("observation matrix contains non-finite entries");
}

std::vector<std::string> default_labels(Eigen::Index p) {
    std::vector<std::string> l;
    l.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i) l.push_back("v" + std::to_string(i));
    return l;
}

}  // namespace

ObservationMatrix::ObservationMatrix(Eigen::MatrixXd values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
    validate(values_, labels_);
}

ObservationMatrix::ObservationMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    labels_ = default_labels(values_.cols());
    validate(values_, labels_);
}

}  // namespace logonet
