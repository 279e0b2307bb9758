#pragma once

#include <limits>
#include <string>
#include <vector>

#include "logonet/pipeline.hpp"
#include "logonet/student.hpp"

namespace logonet {

enum class ModelId {
    normal_pearson,
    normal_kendall,
    student_pearson,
    student_pearson_em,
    student_kendall,
    student_kendall_em,
};

inline constexpr ModelId kAllModels[] = {
    ModelId::normal_pearson,  ModelId::normal_kendall,  ModelId::student_pearson,
    ModelId::student_pearson_em, ModelId::student_kendall, ModelId::student_kendall_em,
};

std::string to_string(ModelId model);
ModelId model_from_string(const std::string& name);
Estimator model_estimator(ModelId model);
bool model_is_student(ModelId model);
bool model_uses_em(ModelId model);

struct SweepConfig {
    std::vector<int> clique_sizes;
    std::vector<ModelId> models{std::begin(kAllModels), std::end(kAllModels)};
    ResamplePlan plan;
    NuSource nu_source = NuSource::fixed;
    double nu = 2.2;
    double tail_fraction = 0.05;
    int em_max_iterations = 500;
    double em_tolerance = 1e-6;
    double ridge = 0.0;
    bool kendall_sine = false;
    bool timing = false;  // wall_time_ms stays 0 unless set, keeping CSVs byte-stable
    int jobs = 1;
    std::string output_path;  // consumed by the CLI, not by run_sweep
};

struct SweepResult {
    int resample_id = 0;
    int max_clique = 0;
    long n_edges = -1;  // -1 renders as an empty cell
    ModelId model = ModelId::normal_pearson;
    double ll_train_per_obs = std::numeric_limits<double>::quiet_NaN();
    double ll_test_per_obs = std::numeric_limits<double>::quiet_NaN();
    int em_iterations = -1;  // -1 renders as an empty cell
    long wall_time_ms = 0;
    std::string status = "ok";
};

std::vector<SweepResult> run_sweep(const ObservationMatrix& returns, const SweepConfig& config);

struct AggregateRow {
    ModelId model = ModelId::normal_pearson;
    std::string model_label;  // set for external baseline rows, else derived from model
    int max_clique = -1;      // -1 renders as an empty cell (baseline rows)
    long n_edges = 0;
    double mean_ll_test = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
    bool is_argmax = false;
};

std::vector<AggregateRow> aggregate(const std::vector<SweepResult>& results);

// h = (n-1)p linear-interpolation quantile; values need not be sorted.
double quantile_linear(std::vector<double> values, double prob);

struct BaselinePoint {
    long n_edges = 0;
    double ll_test = 0.0;
};

std::vector<BaselinePoint> read_baseline_csv(const std::string& path);
std::vector<AggregateRow> baseline_rows(const std::vector<BaselinePoint>& points,
                                        const std::string& label = "glasso");

void write_results_csv(const std::string& path, const std::vector<SweepResult>& results);
std::vector<SweepResult> read_results_csv(const std::string& path);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);

}  // namespace logonet
