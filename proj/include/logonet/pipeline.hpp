#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "logonet/observation_matrix.hpp"

namespace logonet {

struct PricePanel {
    std::vector<std::string> dates;    // strictly increasing ISO-8601
    std::vector<std::string> tickers;  // p labels
    Eigen::MatrixXd prices;            // q x p, strictly positive
};

// Input CSV: first column `date`, one ticker per remaining column.
// Rows with any missing cell are dropped before validation.
PricePanel read_price_csv(const std::string& path);

// (q-1) x p first differences of log prices
ObservationMatrix compute_log_returns(const PricePanel& panel);

struct ResamplePlan {
    int n_resamples = 100;
    int p_select = 100;
    int q_train = 0;
    int q_test = 0;
    bool series_with_replacement = true;
    std::uint64_t seed = 0;
};

// Deterministic given (seed, resample_index): draw p_select series
// (with replacement if flagged; duplicates get 1e-7*std jitter), then
// q_train + q_test distinct rows; first q_train go to train.
std::pair<ObservationMatrix, ObservationMatrix> resample(const ObservationMatrix& returns,
                                                         const ResamplePlan& plan,
                                                         int resample_index);

// header row of labels, then one row of values per observation
ObservationMatrix read_observation_csv(const std::string& path);
void write_observation_csv(const std::string& path, const ObservationMatrix& data);

}  // namespace logonet
