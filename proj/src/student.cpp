#include "logonet/student.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "logonet/dependence.hpp"
#include "logonet/errors.hpp"

namespace logonet {

namespace {

void require_nu(double nu) {
    if (!(nu > 2.0)) throw domain_error("student-t requires nu > 2");
}

// weighted local moments restricted to one block
Eigen::MatrixXd weighted_block_moment(const ObservationMatrix& data, const Eigen::VectorXd& mu,
                                      const Eigen::VectorXd& w, const std::vector<int>& idx,
                                      double factor) {
    const Eigen::Index q = data.q();
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd D(q, m);
    for (int a = 0; a < m; ++a)
        D.col(a) = data.values().col(idx[a]).array() - mu[idx[a]];
    Eigen::MatrixXd M = D.transpose() * w.asDiagonal() * D;
    return M * (factor / static_cast<double>(q));
}

}  // namespace

double student_log_likelihood(const ObservationMatrix& data, const StudentTModel& model) {
    require_nu(model.nu);
    if (data.p() != model.precision.p())
        throw dimension_error("student_log_likelihood: dimension mismatch");
    const double q = static_cast<double>(data.q());
    const double p = static_cast<double>(data.p());
    const double nu = model.nu;
    double c = std::lgamma((nu + p) / 2.0) - std::lgamma(nu / 2.0) -
               (p / 2.0) * std::log((nu - 2.0) * M_PI);
    Eigen::VectorXd d2 = mahalanobis_sq_all(data, model.mu, model.precision);
    double tail = ((d2.array() / (nu - 2.0)).log1p()).sum();
    return q * c + 0.5 * q * log_det(model.precision) - 0.5 * (nu + p) * tail;
}

Eigen::VectorXd em_weights(const ObservationMatrix& data, const Eigen::VectorXd& mu,
                           const SparsePrecision& precision, double nu) {
    require_nu(nu);
    const double p = static_cast<double>(data.p());
    Eigen::VectorXd d2 = mahalanobis_sq_all(data, mu, precision);
    return ((nu + p) / (nu + (nu / (nu - 2.0)) * d2.array())).matrix();
}

EmState em_step(const ObservationMatrix& data, const EmState& state, const CliqueForest& forest,
                const EmConfig& cfg) {
    const double nu = state.nu;
    require_nu(nu);
    const Eigen::VectorXd& w = state.weights;
    const double wsum = w.sum();
    if (!(wsum > 0.0)) throw degenerate_input("em_step: weights sum to zero");

    Eigen::VectorXd mu_new = (data.values().transpose() * w) / wsum;

    const double factor = nu / (nu - 2.0);
    auto fp = state.precision.forest_ptr();
    std::vector<Eigen::MatrixXd> cb, sb;
    cb.reserve(forest.cliques.size());
    sb.reserve(forest.separators.size());
    for (const auto& c : forest.cliques)
        cb.push_back(weighted_block_moment(data, mu_new, w, c, factor));
    for (const auto& s : forest.separators)
        sb.push_back(weighted_block_moment(data, mu_new, w, s.vertices, factor));
    SparsePrecision J_new = assemble_precision_blocks(cb, sb, fp, cfg.ridge);

    // scale-free max relative change over mu and J entries
    double metric = 0.0;
    for (Eigen::Index i = 0; i < mu_new.size(); ++i)
        metric = std::max(metric,
                          std::abs(mu_new[i] - state.mu[i]) / (1.0 + std::abs(state.mu[i])));
    for (const auto& [ij, v_old] : state.precision.entries()) {
        double v_new = J_new.entry(ij.first, ij.second);
        metric = std::max(metric, std::abs(v_new - v_old) / (1.0 + std::abs(v_old)));
    }

    EmState next;
    next.iteration = state.iteration + 1;
    next.nu = nu;
    next.weights = em_weights(data, mu_new, J_new, nu);
    next.mu = std::move(mu_new);
    next.precision = std::move(J_new);
    next.metric = metric;
    StudentTModel snapshot{next.mu, next.precision, nu, next.iteration, 0.0};
    next.loglik = student_log_likelihood(data, snapshot);
    return next;
}

StudentTModel fit_student_direct(const ObservationMatrix& data, const CliqueForest& forest,
                                 double nu, Estimator estimator, bool kendall_sine,
                                 double ridge) {
    return fit_student_direct(data, forest, nu, estimator_covariance(data, estimator, kendall_sine),
                              ridge);
}

StudentTModel fit_student_direct(const ObservationMatrix& data, const CliqueForest& forest,
                                 double nu, const DependenceMatrix& cov, double ridge) {
    require_nu(nu);
    StudentTModel model{fit_mu(data), assemble_precision(cov, forest, ridge), nu, 0, 0.0};
    model.final_loglik = student_log_likelihood(data, model);
    return model;
}

StudentTModel fit_student_em(const ObservationMatrix& data, const CliqueForest& forest,
                             const EmConfig& cfg, Estimator estimator, bool kendall_sine) {
    return fit_student_em(data, forest, cfg, estimator_covariance(data, estimator, kendall_sine));
}

StudentTModel fit_student_em(const ObservationMatrix& data, const CliqueForest& forest,
                             const EmConfig& cfg, const DependenceMatrix& initial_cov) {
    if (!(cfg.tolerance > 0.0)) throw config_error("EM tolerance must be positive");
    double nu = cfg.nu_source == NuSource::fixed ? cfg.nu
                                                 : estimate_nu_tail(data, cfg.tail_fraction);
    require_nu(nu);

    const DependenceMatrix& cov = initial_cov;
    EmState state;
    state.nu = nu;
    state.mu = fit_mu(data);
    state.precision = assemble_precision(cov, forest, cfg.ridge);
    state.weights = em_weights(data, state.mu, state.precision, nu);
    StudentTModel init{state.mu, state.precision, nu, 0, 0.0};
    state.loglik = student_log_likelihood(data, init);

    for (int t = 0; t < cfg.max_iterations; ++t) {
        EmState next = em_step(data, state, forest, cfg);
        bool converged = next.metric < cfg.tolerance;
        state = std::move(next);
        if (converged)
            return {state.mu, state.precision, nu, state.iteration, state.loglik};
    }
    throw convergence_error("EM did not converge within " +
                                std::to_string(cfg.max_iterations) + " iterations",
                            std::move(state));
}

double estimate_nu_tail(const ObservationMatrix& data, double tail_fraction) {
    const Eigen::Index q = data.q();
    if (!(tail_fraction > 0.0) || tail_fraction >= 1.0)
        throw domain_error("tail_fraction must lie in (0, 1)");
    const std::size_t k =
        static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(q)));
    if (static_cast<double>(q) * tail_fraction < 10.0 || k + 1 > static_cast<std::size_t>(q))
        throw degenerate_input("estimate_nu_tail: insufficient observations for the tail fit");

    double sum = 0.0;
    int n_tails = 0;
    std::vector<double> v(static_cast<std::size_t>(q));
    for (Eigen::Index j = 0; j < data.p(); ++j) {
        for (double sign : {1.0, -1.0}) {
            for (Eigen::Index s = 0; s < q; ++s)
                v[static_cast<std::size_t>(s)] = sign * data.values()(s, j);
            std::sort(v.begin(), v.end(), std::greater<double>());
            double thr = v[k];
            if (!(thr > 0.0)) continue;  // no positive exceedances on this side
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                double l = std::log(v[i] / thr);
                m1 += l;
                m2 += l * l;
            }
            m1 /= static_cast<double>(k);
            m2 /= static_cast<double>(k);
            double gamma = m1 + 1.0 - 0.5 / (1.0 - m1 * m1 / m2);
            sum += gamma > 0.0 ? 1.0 / gamma : std::numeric_limits<double>::infinity();
            ++n_tails;
        }
    }
    if (n_tails == 0) throw degenerate_input("estimate_nu_tail: no usable tails");
    double est = sum / static_cast<double>(n_tails);
    return std::min(50.0, std::max(2.05, est));
}

}  // namespace logonet
