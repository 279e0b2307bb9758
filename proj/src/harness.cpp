#include "logonet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "logonet/csv.hpp"
#include "logonet/errors.hpp"
#include "logonet/mfcf.hpp"

namespace logonet {

namespace {

struct ModelInfo {
    ModelId id;
    const char* name;
    Estimator estimator;
    bool student;
    bool em;
};

constexpr ModelInfo kModelTable[] = {
    {ModelId::normal_pearson, "normal_pearson", Estimator::pearson, false, false},
    {ModelId::normal_kendall, "normal_kendall", Estimator::kendall, false, false},
    {ModelId::student_pearson, "student_pearson", Estimator::pearson, true, false},
    {ModelId::student_pearson_em, "student_pearson_em", Estimator::pearson, true, true},
    {ModelId::student_kendall, "student_kendall", Estimator::kendall, true, false},
    {ModelId::student_kendall_em, "student_kendall_em", Estimator::kendall, true, true},
};

const ModelInfo& info(ModelId id) { return kModelTable[static_cast<int>(id)]; }

int est_index(Estimator e) { return e == Estimator::pearson ? 0 : 1; }
const char* est_name(Estimator e) { return e == Estimator::pearson ? "pearson" : "kendall"; }

// status cells share the row with commas; keep diagnostics one-cell safe
std::string error_status(const std::string& what) {
    std::string s = "error: " + what;
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

std::string cell_double(double v) { return std::isfinite(v) ? csv::format_double(v) : std::string(); }

template <typename Fn>
void parallel_for(int n_tasks, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, n_tasks));
    if (jobs <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n_tasks) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct Prepared {
    std::optional<ObservationMatrix> train, test;
    std::string split_error;
    std::optional<DependenceMatrix> cov[2];
    std::string cov_error[2];
    double nu = 0.0;
    std::string nu_error;
};

void validate_config(const SweepConfig& config) {
    if (config.clique_sizes.empty()) throw config_error("clique_sizes must not be empty");
    for (int r : config.clique_sizes)
        if (r < 2) throw config_error("clique sizes must be at least 2");
    std::vector<int> sorted_sizes = config.clique_sizes;
    std::sort(sorted_sizes.begin(), sorted_sizes.end());
    if (std::adjacent_find(sorted_sizes.begin(), sorted_sizes.end()) != sorted_sizes.end())
        throw config_error("clique_sizes contains duplicates");
    if (config.models.empty()) throw config_error("models must not be empty");
    std::vector<int> ids;
    for (ModelId m : config.models) ids.push_back(static_cast<int>(m));
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw config_error("models contains duplicates");
    bool any_student = std::any_of(config.models.begin(), config.models.end(), model_is_student);
    if (any_student && config.nu_source == NuSource::fixed && !(config.nu > 2.0))
        throw config_error("nu must exceed 2");
    if (config.em_max_iterations < 1) throw config_error("em_max_iterations must be positive");
    if (!(config.em_tolerance > 0.0)) throw config_error("em_tolerance must be positive");
    if (config.ridge < 0.0) throw config_error("ridge must be nonnegative");
}

}  // namespace

std::string to_string(ModelId model) { return info(model).name; }

ModelId model_from_string(const std::string& name) {
    for (const auto& mi : kModelTable)
        if (name == mi.name) return mi.id;
    throw config_error("unknown model '" + name + "'");
}

Estimator model_estimator(ModelId model) { return info(model).estimator; }
bool model_is_student(ModelId model) { return info(model).student; }
bool model_uses_em(ModelId model) { return info(model).em; }

std::vector<SweepResult> run_sweep(const ObservationMatrix& returns, const SweepConfig& config) {
    validate_config(config);
    const int n_res = config.plan.n_resamples;
    if (n_res < 1) throw config_error("n_resamples must be positive");

    bool use_est[2] = {false, false};
    bool any_student = false;
    for (ModelId m : config.models) {
        use_est[est_index(model_estimator(m))] = true;
        any_student = any_student || model_is_student(m);
    }

    std::vector<Prepared> prep(static_cast<std::size_t>(n_res));
    parallel_for(n_res, config.jobs, [&](int r) {
        Prepared& P = prep[static_cast<std::size_t>(r)];
        try {
            auto [train, test] = resample(returns, config.plan, r);
            P.train.emplace(std::move(train));
            P.test.emplace(std::move(test));
        } catch (const config_error&) {
            throw;  // an infeasible plan fails every resample the same way
        } catch (const std::exception& ex) {
            P.split_error = error_status(ex.what());
            return;
        }
        for (int e = 0; e < 2; ++e) {
            if (!use_est[e]) continue;
            try {
                P.cov[e] = estimator_covariance(
                    *P.train, e == 0 ? Estimator::pearson : Estimator::kendall,
                    config.kendall_sine);
            } catch (const std::exception& ex) {
                P.cov_error[e] = error_status(ex.what());
            }
        }
        if (any_student) {
            if (config.nu_source == NuSource::fixed) {
                P.nu = config.nu;
            } else {
                try {
                    P.nu = estimate_nu_tail(*P.train, config.tail_fraction);
                } catch (const std::exception& ex) {
                    P.nu_error = error_status(ex.what());
                }
            }
        }
    });

    const int n_sizes = static_cast<int>(config.clique_sizes.size());
    const int n_tasks = n_res * n_sizes;
    std::vector<std::vector<SweepResult>> task_rows(static_cast<std::size_t>(n_tasks));

    parallel_for(n_tasks, config.jobs, [&](int task) {
        const int r = task / n_sizes;
        const int R = config.clique_sizes[static_cast<std::size_t>(task % n_sizes)];
        const Prepared& P = prep[static_cast<std::size_t>(r)];
        auto& rows = task_rows[static_cast<std::size_t>(task)];
        rows.reserve(config.models.size());

        std::shared_ptr<const CliqueForest> forest[2];
        std::string forest_error[2];
        long n_edges[2] = {-1, -1};
        for (int e = 0; e < 2; ++e) {
            if (!use_est[e]) continue;
            if (!P.split_error.empty()) {
                forest_error[e] = P.split_error;
            } else if (!P.cov_error[e].empty()) {
                forest_error[e] = P.cov_error[e];
            } else {
                try {
                    DependenceMatrix corr = covariance_to_correlation(*P.cov[e]);
                    auto built = std::make_shared<CliqueForest>(build_mfcf(corr, {R}));
                    n_edges[e] = static_cast<long>(edge_set(*built).size());
                    forest[e] = std::move(built);
                } catch (const config_error&) {
                    throw;  // e.g. clique size beyond p_select: global misconfiguration
                } catch (const std::exception& ex) {
                    forest_error[e] = error_status(ex.what());
                }
            }
        }

        for (ModelId m : config.models) {
            SweepResult row;
            row.resample_id = r;
            row.max_clique = R;
            row.model = m;
            const int e = est_index(model_estimator(m));
            const auto started = std::chrono::steady_clock::now();

            if (!forest[e]) {
                row.status = forest_error[e];
            } else {
                row.n_edges = n_edges[e];
                const ObservationMatrix& train = *P.train;
                const ObservationMatrix& test = *P.test;
                const double q_train = static_cast<double>(train.q());
                const double q_test = static_cast<double>(test.q());
                try {
                    if (!model_is_student(m)) {
                        GaussianModel g = fit_gaussian(train, *forest[e], *P.cov[e], config.ridge);
                        row.ll_train_per_obs = gaussian_log_likelihood(train, g) / q_train;
                        if (test.q() > 0)
                            row.ll_test_per_obs = gaussian_log_likelihood(test, g) / q_test;
                    } else if (!P.nu_error.empty()) {
                        row.status = P.nu_error;
                    } else if (!model_uses_em(m)) {
                        StudentTModel s =
                            fit_student_direct(train, *forest[e], P.nu, *P.cov[e], config.ridge);
                        row.ll_train_per_obs = s.final_loglik / q_train;
                        if (test.q() > 0)
                            row.ll_test_per_obs = student_log_likelihood(test, s) / q_test;
                    } else {
                        EmConfig ec;
                        ec.max_iterations = config.em_max_iterations;
                        ec.tolerance = config.em_tolerance;
                        ec.nu_source = NuSource::fixed;
                        ec.nu = P.nu;
                        ec.ridge = config.ridge;
                        StudentTModel s = fit_student_em(train, *forest[e], ec, *P.cov[e]);
                        row.em_iterations = s.em_iterations;
                        row.ll_train_per_obs = s.final_loglik / q_train;
                        if (test.q() > 0)
                            row.ll_test_per_obs = student_log_likelihood(test, s) / q_test;
                    }
                } catch (const config_error&) {
                    throw;
                } catch (const convergence_error& ex) {
                    row.em_iterations = ex.last_state.iteration;
                    row.status = error_status(ex.what());
                } catch (const std::exception& ex) {
                    row.status = error_status(ex.what());
                }
            }

            if (config.timing)
                row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::steady_clock::now() - started)
                                       .count();
            rows.push_back(std::move(row));
        }
    });

    std::vector<SweepResult> results;
    results.reserve(static_cast<std::size_t>(n_tasks) * config.models.size());
    for (auto& rows : task_rows)
        for (auto& row : rows) results.push_back(std::move(row));
    std::sort(results.begin(), results.end(), [](const SweepResult& a, const SweepResult& b) {
        if (a.resample_id != b.resample_id) return a.resample_id < b.resample_id;
        if (a.max_clique != b.max_clique) return a.max_clique < b.max_clique;
        return static_cast<int>(a.model) < static_cast<int>(b.model);
    });
    return results;
}

double quantile_linear(std::vector<double> values, double prob) {
    if (values.empty()) throw degenerate_input("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw domain_error("quantile probability outside [0, 1]");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double h = static_cast<double>(n - 1) * prob;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, n - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<AggregateRow> aggregate(const std::vector<SweepResult>& results) {
    struct Group {
        long n_edges = -1;
        std::vector<double> values;
    };
    std::map<std::pair<int, int>, Group> groups;  // (model order, max_clique)
    for (const auto& row : results) {
        if (row.status != "ok" || !std::isfinite(row.ll_test_per_obs)) continue;
        Group& g = groups[{static_cast<int>(row.model), row.max_clique}];
        g.values.push_back(row.ll_test_per_obs);
        g.n_edges = std::max(g.n_edges, row.n_edges);
    }

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, g] : groups) {
        AggregateRow out;
        out.model = static_cast<ModelId>(key.first);
        out.max_clique = key.second;
        out.n_edges = g.n_edges;
        out.mean_ll_test =
            std::accumulate(g.values.begin(), g.values.end(), 0.0) / static_cast<double>(g.values.size());
        out.q10 = quantile_linear(g.values, 0.10);
        out.q90 = quantile_linear(g.values, 0.90);
        rows.push_back(std::move(out));
    }

    // flag, per model, the clique size with the best mean (first on ties)
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t best = i, j = i;
        for (; j < rows.size() && rows[j].model == rows[i].model; ++j)
            if (rows[j].mean_ll_test > rows[best].mean_ll_test) best = j;
        rows[best].is_argmax = true;
        i = j;
    }
    return rows;
}

std::vector<BaselinePoint> read_baseline_csv(const std::string& path) {
    auto cells = csv::read_file(path);
    std::vector<BaselinePoint> points;
    std::size_t start = 0;
    if (!cells.empty() && !cells[0].empty()) {
        try {
            csv::parse_double(cells[0][0], path);
        } catch (const parse_error&) {
            start = 1;  // header row
        }
    }
    for (std::size_t r = start; r < cells.size(); ++r) {
        if (cells[r].size() < 2)
            throw parse_error(path + ": row " + std::to_string(r + 1) +
                              " needs n_edges and ll_test cells");
        const std::string where = path + " row " + std::to_string(r + 1);
        points.push_back({csv::parse_long(cells[r][0], where),
                          csv::parse_double(cells[r][1], where)});
    }
    return points;
}

std::vector<AggregateRow> baseline_rows(const std::vector<BaselinePoint>& points,
                                        const std::string& label) {
    std::vector<AggregateRow> rows;
    rows.reserve(points.size());
    for (const auto& pt : points) {
        AggregateRow row;
        row.model_label = label;
        row.max_clique = -1;
        row.n_edges = pt.n_edges;
        row.mean_ll_test = row.q10 = row.q90 = pt.ll_test;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_results_csv(const std::string& path, const std::vector<SweepResult>& results) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "resample_id,max_clique,n_edges,model,estimator,ll_train_per_obs,ll_test_per_obs,"
           "em_iterations,wall_time_ms,status\n";
    for (const auto& r : results) {
        out << r.resample_id << ',' << r.max_clique << ',';
        if (r.n_edges >= 0) out << r.n_edges;
        out << ',' << to_string(r.model) << ',' << est_name(model_estimator(r.model)) << ','
            << cell_double(r.ll_train_per_obs) << ',' << cell_double(r.ll_test_per_obs) << ',';
        if (r.em_iterations >= 0) out << r.em_iterations;
        out << ',' << r.wall_time_ms << ',' << r.status << '\n';
    }
    if (!out) throw io_error("failed writing " + path);
}

std::vector<SweepResult> read_results_csv(const std::string& path) {
    auto cells = csv::read_file(path);
    if (cells.empty()) throw parse_error(path + ": empty results file");
    const std::vector<std::string> header = {
        "resample_id", "max_clique", "n_edges",       "model",        "estimator",
        "ll_train_per_obs", "ll_test_per_obs", "em_iterations", "wall_time_ms", "status"};
    if (cells[0] != header) throw parse_error(path + ": unexpected results header");

    std::vector<SweepResult> results;
    results.reserve(cells.size() - 1);
    for (std::size_t r = 1; r < cells.size(); ++r) {
        const auto& row = cells[r];
        if (row.size() != header.size())
            throw parse_error(path + ": row " + std::to_string(r + 1) + " has " +
                              std::to_string(row.size()) + " cells");
        const std::string where = path + " row " + std::to_string(r + 1);
        SweepResult out;
        out.resample_id = static_cast<int>(csv::parse_long(row[0], where));
        out.max_clique = static_cast<int>(csv::parse_long(row[1], where));
        out.n_edges = row[2].empty() ? -1 : csv::parse_long(row[2], where);
        out.model = model_from_string(row[3]);
        out.ll_train_per_obs =
            row[5].empty() ? std::numeric_limits<double>::quiet_NaN() : csv::parse_double(row[5], where);
        out.ll_test_per_obs =
            row[6].empty() ? std::numeric_limits<double>::quiet_NaN() : csv::parse_double(row[6], where);
        out.em_iterations = row[7].empty() ? -1 : static_cast<int>(csv::parse_long(row[7], where));
        out.wall_time_ms = csv::parse_long(row[8], where);
        out.status = row[9];
        results.push_back(std::move(out));
    }
    return results;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "model,max_clique,n_edges,mean_ll_test,q10,q90,is_argmax\n";
    for (const auto& r : rows) {
        out << (r.model_label.empty() ? to_string(r.model) : r.model_label) << ',';
        if (r.max_clique >= 0) out << r.max_clique;
        out << ',' << r.n_edges << ',' << csv::format_double(r.mean_ll_test) << ','
            << csv::format_double(r.q10) << ',' << csv::format_double(r.q90) << ','
            << (r.is_argmax ? 1 : 0) << '\n';
    }
    if (!out) throw io_error("failed writing " + path);
}

}  // namespace logonet
