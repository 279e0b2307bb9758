#include "logonet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "logonet/csv.hpp"
#include "logonet/errors.hpp"
#include "logonet/rng.hpp"

namespace logonet {

PricePanel read_price_csv(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.size() < 2) throw parse_error(path + ": need a header and at least one data row");
    const auto& header = rows[0];
    if (header.empty() || header[0] != "date")
        throw parse_error(path + ": first header column must be 'date'");
    const std::size_t p = header.size() - 1;
    if (p == 0) throw parse_error(path + ": no ticker columns");

    PricePanel panel;
    panel.tickers.assign(header.begin() + 1, header.end());
    std::vector<Eigen::VectorXd> kept;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw parse_error(path + ": row " + std::to_string(r + 1) + " has " +
                              std::to_string(row.size()) + " cells, expected " +
                              std::to_string(header.size()));
        bool missing = false;
        for (std::size_t c = 1; c < row.size(); ++c)
            if (csv::is_missing(row[c])) missing = true;
        if (missing) continue;  // listwise deletion
        Eigen::VectorXd v(p);
        for (std::size_t c = 1; c < row.size(); ++c) {
            double price = csv::parse_double(row[c], path + " row " + std::to_string(r + 1));
            if (!(price > 0.0) || !std::isfinite(price))
                throw degenerate_input(path + ": non-positive price at row " +
                                       std::to_string(r + 1) + ", ticker " + header[c]);
            v[static_cast<Eigen::Index>(c - 1)] = price;
        }
        if (!panel.dates.empty() && row[0] <= panel.dates.back())
            throw degenerate_input(path + ": dates not strictly increasing at row " +
                                   std::to_string(r + 1));
        panel.dates.push_back(row[0]);
        kept.push_back(std::move(v));
    }
    panel.prices.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < kept.size(); ++r) panel.prices.row(static_cast<Eigen::Index>(r)) = kept[r];
    return panel;
}

ObservationMatrix compute_log_returns(const PricePanel& panel) {
    const Eigen::Index q = panel.prices.rows();
    if (q < 2) throw degenerate_input("log returns require at least two price rows");
    if ((panel.prices.array() <= 0.0).any())
        throw degenerate_input("non-positive price in panel");
    Eigen::MatrixXd logp = panel.prices.array().log();
    Eigen::MatrixXd ret = logp.bottomRows(q - 1) - logp.topRows(q - 1);
    return ObservationMatrix(std::move(ret), panel.tickers);
}

std::pair<ObservationMatrix, ObservationMatrix> resample(const ObservationMatrix& returns,
                                                         const ResamplePlan& plan,
                                                         int resample_index) {
    const Eigen::Index q = returns.q();
    const Eigen::Index p = returns.p();
    if (plan.p_select < 1 || plan.q_train < 1 || plan.q_test < 0)
        throw config_error("resample plan requires p_select >= 1, q_train >= 1, q_test >= 0");
    if (plan.q_train + plan.q_test > q)
        throw config_error("resample plan infeasible: q_train + q_test exceeds observations");
    if (!plan.series_with_replacement && plan.p_select > p)
        throw config_error("resample plan infeasible: p_select exceeds series count");

    rng_stream rs(plan.seed, static_cast<std::uint64_t>(resample_index));

    std::vector<int> cols(static_cast<std::size_t>(plan.p_select));
    if (plan.series_with_replacement) {
        for (auto& c : cols) c = static_cast<int>(rs.next_below(static_cast<std::uint64_t>(p)));
    } else {
        std::vector<int> pool(static_cast<std::size_t>(p));
        std::iota(pool.begin(), pool.end(), 0);
        for (int t = 0; t < plan.p_select; ++t) {
            std::size_t j = static_cast<std::size_t>(t) +
                            rs.next_below(static_cast<std::uint64_t>(p - t));
            std::swap(pool[static_cast<std::size_t>(t)], pool[j]);
            cols[static_cast<std::size_t>(t)] = pool[static_cast<std::size_t>(t)];
        }
    }

    const int n_rows = plan.q_train + plan.q_test;
    std::vector<int> pool(static_cast<std::size_t>(q));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> picked(static_cast<std::size_t>(n_rows));
    for (int t = 0; t < n_rows; ++t) {
        std::size_t j =
            static_cast<std::size_t>(t) + rs.next_below(static_cast<std::uint64_t>(q - t));
        std::swap(pool[static_cast<std::size_t>(t)], pool[j]);
        picked[static_cast<std::size_t>(t)] = pool[static_cast<std::size_t>(t)];
    }

    Eigen::MatrixXd sub(n_rows, plan.p_select);
    std::vector<std::string> labels(static_cast<std::size_t>(plan.p_select));
    for (int c = 0; c < plan.p_select; ++c) {
        labels[static_cast<std::size_t>(c)] = returns.labels()[static_cast<std::size_t>(cols[c])];
        for (int r = 0; r < n_rows; ++r) sub(r, c) = returns.values()(picked[r], cols[c]);
    }

    // jitter duplicated series so clique blocks stay nonsingular
    std::vector<int> seen(static_cast<std::size_t>(p), 0);
    for (int c = 0; c < plan.p_select; ++c) {
        int orig = cols[static_cast<std::size_t>(c)];
        if (++seen[static_cast<std::size_t>(orig)] < 2) continue;
        const auto& col = returns.values().col(orig);
        double mean = col.mean();
        double sd = std::sqrt((col.array() - mean).square().mean());
        // the correlation of a pair of duplicates lands at 1 - eps^2/2, so
        // eps must stay above sqrt(machine epsilon) to register in doubles
        double eps = 1e-7 * sd;
        for (int r = 0; r < n_rows; ++r) sub(r, c) += eps * rs.next_normal();
    }

    Eigen::MatrixXd train = sub.topRows(plan.q_train);
    Eigen::MatrixXd test = sub.bottomRows(plan.q_test);
    return {ObservationMatrix(std::move(train), labels), ObservationMatrix(std::move(test), labels)};
}

ObservationMatrix read_observation_csv(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.size() < 2) throw parse_error(path + ": expected a header row and observations");
    const std::vector<std::string>& labels = rows[0];
    const std::size_t p = labels.size();
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size() - 1),
                           static_cast<Eigen::Index>(p));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != p)
            throw parse_error(path + ": row " + std::to_string(r + 1) + " has " +
                              std::to_string(rows[r].size()) + " cells, expected " +
                              std::to_string(p));
        for (std::size_t c = 0; c < p; ++c)
            values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
                csv::parse_double(rows[r][c], path + " row " + std::to_string(r + 1));
    }
    return ObservationMatrix(std::move(values), labels);
}

void write_observation_csv(const std::string& path, const ObservationMatrix& data) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    for (Eigen::Index c = 0; c < data.p(); ++c) {
        if (c) out << ',';
        out << data.labels()[static_cast<std::size_t>(c)];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < data.q(); ++r) {
        for (Eigen::Index c = 0; c < data.p(); ++c) {
            if (c) out << ',';
            out << csv::format_double(data.values()(r, c));
        }
        out << '\n';
    }
    if (!out) throw io_error("failed writing " + path);
}

}  // namespace logonet
