#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace logonet {

// q x p panel: rows are observations, columns are variables. The
// constructor checks shape and finiteness; spread requirements (q >= 2,
// nonzero column variance) are enforced by the estimators that need
// them, so degenerate panels (empty test split, constant column) stay
// representable.
class ObservationMatrix {
public:
    ObservationMatrix(Eigen::MatrixXd values, std::vector<std::string> labels);
    explicit ObservationMatrix(Eigen::MatrixXd values);  // labels v0..v{p-1}

    Eigen::Index q() const { return values_.rows(); }
    Eigen::Index p() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> labels_;
};

}  // namespace logonet
