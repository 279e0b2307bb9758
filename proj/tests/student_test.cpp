#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "logonet/clique_forest.hpp"
#include "logonet/dependence.hpp"
#include "logonet/errors.hpp"
#include "logonet/gaussian.hpp"
#include "logonet/mfcf.hpp"
#include "logonet/rng.hpp"
#include "logonet/sparse_precision.hpp"
#include "logonet/student.hpp"
#include "logonet/synthetic.hpp"

using namespace logonet;

namespace {

CliqueForest full_forest(int p) {
    CliqueForest f;
    f.p = p;
    f.max_clique_size = p;
    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 0);
    f.cliques = {all};
    return f;
}

ObservationMatrix random_panel(int q, int p, std::uint64_t seed) {
    rng_stream rng(seed, 3);
    Eigen::MatrixXd x(q, p);
    for (int s = 0; s < q; ++s)
        for (int j = 0; j < p; ++j) x(s, j) = rng.next_normal();
    return ObservationMatrix(x);
}

ObservationMatrix student_panel(int q, int p, double nu, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.mu = Eigen::VectorXd::Zero(p);
    spec.sigma = factor_covariance(p, 2, seed + 1);
    spec.family = Family::student_t;
    spec.nu = nu;
    spec.q = q;
    spec.seed = seed;
    return sample(spec);
}

SparsePrecision unit_precision(int p) {
    return assemble_precision(Eigen::MatrixXd::Identity(p, p),
                              std::make_shared<CliqueForest>(full_forest(p)));
}

EmState make_state(const ObservationMatrix& data, const CliqueForest& forest,
                   const Eigen::MatrixXd& cov, double nu) {
    EmState s;
    s.nu = nu;
    s.mu = fit_mu(data);
    s.precision = assemble_precision(cov, std::make_shared<CliqueForest>(forest));
    s.weights = em_weights(data, s.mu, s.precision, nu);
    StudentTModel snapshot{s.mu, s.precision, nu, 0, 0.0};
    s.loglik = student_log_likelihood(data, snapshot);
    return s;
}

double param_distance(const StudentTModel& a, const StudentTModel& b) {
    double d = (a.mu - b.mu).cwiseAbs().maxCoeff();
    for (const auto& [ij, v] : a.precision.entries())
        d = std::max(d, std::abs(v - b.precision.entry(ij.first, ij.second)));
    return d;
}

}  // namespace

TEST_SUITE("student") {

TEST_CASE("log-likelihood at the center with unit precision and nu three") {
    StudentTModel model{Eigen::VectorXd::Zero(1), unit_precision(1), 3.0, 0, 0.0};
    ObservationMatrix data(Eigen::MatrixXd::Zero(1, 1));
    double ll = student_log_likelihood(data, model);
    CHECK(ll == doctest::Approx(std::log(2.0 / std::acos(-1.0))).epsilon(1e-12));
    CHECK(ll == doctest::Approx(-0.45158270528945482).epsilon(1e-12));
}

TEST_CASE("log-likelihood is additive over observations") {
    StudentTModel model{Eigen::VectorXd::Zero(2), unit_precision(2), 4.5, 0, 0.0};
    Eigen::MatrixXd one(1, 2);
    one << 0.4, -1.3;
    Eigen::MatrixXd two(2, 2);
    two << one, one;
    CHECK(student_log_likelihood(ObservationMatrix(two), model) ==
          2.0 * student_log_likelihood(ObservationMatrix(one), model));

    auto data = random_panel(60, 2, 21);
    Eigen::MatrixXd doubled(120, 2);
    doubled << data.values(), data.values();
    CHECK(student_log_likelihood(ObservationMatrix(doubled), model) ==
          doctest::Approx(2.0 * student_log_likelihood(data, model)).epsilon(1e-13));
}

TEST_CASE("large nu approaches the gaussian log-likelihood") {
    auto data = random_panel(100, 3, 33);
    auto cov = pearson_covariance(data);
    auto forest = full_forest(3);
    auto prec = assemble_precision(cov, forest);
    GaussianModel g{fit_mu(data), prec};
    StudentTModel t{g.mu, g.precision, 1e6, 0, 0.0};
    double gap = std::abs(student_log_likelihood(data, t) - gaussian_log_likelihood(data, g));
    CHECK(gap / static_cast<double>(data.q()) < 1e-3);
}

TEST_CASE("nu at or below two is rejected") {
    StudentTModel model{Eigen::VectorXd::Zero(1), unit_precision(1), 2.0, 0, 0.0};
    ObservationMatrix data(Eigen::MatrixXd::Zero(1, 1));
    CHECK_THROWS_AS(student_log_likelihood(data, model), domain_error);
    CHECK_THROWS_AS(em_weights(data, Eigen::VectorXd::Zero(1), unit_precision(1), 1.5),
                    domain_error);
    auto panel2 = random_panel(30, 1, 2);
    CHECK_THROWS_AS(fit_student_direct(panel2, full_forest(1), 2.0, Estimator::pearson),
                    domain_error);
}

TEST_CASE("em weights follow the closed form") {
    // zero distance
    ObservationMatrix at_center(Eigen::MatrixXd::Zero(1, 1));
    auto w0 = em_weights(at_center, Eigen::VectorXd::Zero(1), unit_precision(1), 3.0);
    CHECK(w0[0] == doctest::Approx((3.0 + 1.0) / 3.0).epsilon(1e-15));

    // p=1, nu=4, d2=2 -> 5 / (4 + 2*2) = 0.625
    Eigen::MatrixXd x(1, 1);
    x << std::sqrt(2.0);
    auto w = em_weights(ObservationMatrix(x), Eigen::VectorXd::Zero(1), unit_precision(1), 4.0);
    CHECK(w[0] == doctest::Approx(0.625).epsilon(1e-12));

    // strictly decreasing in the distance, vanishing in the limit
    Eigen::MatrixXd grid(6, 1);
    grid << 0.0, 0.5, 1.0, 2.0, 10.0, 1e6;
    auto wg = em_weights(ObservationMatrix(grid), Eigen::VectorXd::Zero(1), unit_precision(1),
                         4.0);
    for (int i = 1; i < 6; ++i) CHECK(wg[i] < wg[i - 1]);
    CHECK(wg[5] < 1e-9);
    CHECK(wg.minCoeff() > 0.0);
}

TEST_CASE("em step sends the mean to the unique data point") {
    Eigen::MatrixXd x(5, 2);
    for (int s = 0; s < 5; ++s) {
        x(s, 0) = 1.25;
        x(s, 1) = -0.5;
    }
    // constant data has no spread, so hand the step a synthetic state
    ObservationMatrix data(x);
    EmState state;
    state.nu = 4.0;
    state.mu = Eigen::VectorXd::Zero(2);
    state.precision = unit_precision(2);
    state.weights = em_weights(data, state.mu, state.precision, 4.0);
    // the weighted moment of constant data is singular; only the mean is defined
    CHECK_THROWS_AS(em_step(data, state, full_forest(2), EmConfig{}), block_conditioning_error);
    double wsum = state.weights.sum();
    Eigen::VectorXd mu_new = (data.values().transpose() * state.weights) / wsum;
    CHECK(mu_new[0] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(mu_new[1] == doctest::Approx(-0.5).epsilon(1e-15));

    // on a regular panel the step's mean is exactly the weighted mean
    auto panel = student_panel(80, 2, 3.0, 5);
    auto st = make_state(panel, full_forest(2), pearson_covariance(panel).matrix, 4.0);
    auto next = em_step(panel, st, full_forest(2), EmConfig{});
    Eigen::VectorXd want = (panel.values().transpose() * st.weights) / st.weights.sum();
    CHECK((next.mu - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one em step never decreases the likelihood") {
    rng_stream pick(404, 0);
    EmConfig cfg;
    for (int i = 0; i < 40; ++i) {
        int p = 2 + static_cast<int>(pick.next_below(5));  // up to 6
        int r = 2 + static_cast<int>(pick.next_below(static_cast<std::uint64_t>(p - 1)));
        double nu = 2.3 + 4.0 * pick.next_uniform();
        auto data = student_panel(40, p, 3.0, 2000 + static_cast<std::uint64_t>(i));
        auto corr = covariance_to_correlation(pearson_covariance(data));
        auto forest = (i % 2 == 0) ? full_forest(p) : build_mfcf(corr, BuildConfig{r});

        // random start: perturbed mean, covariance from a disjoint panel
        auto start_cov = pearson_covariance(random_panel(p + 15, p, 3000 + i));
        auto state = make_state(data, forest, start_cov.matrix, nu);
        for (Eigen::Index j = 0; j < p; ++j) state.mu[j] += pick.next_normal() * 0.3;
        state.weights = em_weights(data, state.mu, state.precision, nu);
        StudentTModel snap{state.mu, state.precision, nu, 0, 0.0};
        state.loglik = student_log_likelihood(data, snap);

        auto next = em_step(data, state, forest, cfg);
        CHECK(next.loglik >= state.loglik - 1e-8);
    }
}

TEST_CASE("em support never leaves the forest edges") {
    auto data = student_panel(200, 6, 3.0, 71);
    auto forest = build_mfcf(covariance_to_correlation(pearson_covariance(data)), BuildConfig{3});
    auto edges = edge_set(forest);
    auto state = make_state(data, forest, pearson_covariance(data).matrix, 3.0);
    for (int t = 0; t < 5; ++t) {
        state = em_step(data, state, forest, EmConfig{});
        for (const auto& [ij, v] : state.precision.entries())
            if (ij.first != ij.second)
                CHECK(std::binary_search(edges.begin(), edges.end(), ij));
    }
}

TEST_CASE("the em fit is self-consistent at convergence") {
    auto data = student_panel(2000, 4, 4.0, 55);
    EmConfig cfg;
    cfg.nu = 4.0;
    cfg.tolerance = 1e-8;
    auto model = fit_student_em(data, full_forest(4), cfg, Estimator::pearson);
    CHECK(model.em_iterations > 0);

    auto w = em_weights(data, model.mu, model.precision, model.nu);
    const double q = static_cast<double>(data.q());
    Eigen::VectorXd mu_fp = (data.values().transpose() * w) / w.sum();
    CHECK((mu_fp - model.mu).cwiseAbs().maxCoeff() < 1e-6);

    Eigen::MatrixXd centered = data.values().rowwise() - model.mu.transpose();
    Eigen::MatrixXd m = (model.nu / (model.nu - 2.0)) / q *
                        (centered.transpose() * w.asDiagonal() * centered);
    Eigen::MatrixXd J = dense_embedding(model.precision);
    CHECK((J * m - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("the final likelihood dominates every intermediate iterate") {
    auto data = student_panel(300, 3, 3.0, 90);
    auto forest = full_forest(3);
    EmConfig cfg;
    cfg.nu = 3.0;
    auto state = make_state(data, forest, pearson_covariance(data).matrix, cfg.nu);
    double best = state.loglik;
    StudentTModel fitted = fit_student_em(data, forest, cfg, Estimator::pearson);
    for (int t = 0; t < fitted.em_iterations; ++t) {
        state = em_step(data, state, forest, cfg);
        best = std::max(best, state.loglik);
    }
    CHECK(fitted.final_loglik >= best - 1e-8);
}

TEST_CASE("near-gaussian degrees of freedom recover independent normals") {
    GeneratorSpec spec;
    spec.mu = Eigen::VectorXd::Zero(3);
    spec.sigma = Eigen::MatrixXd::Identity(3, 3);
    spec.q = 20000;
    spec.seed = 14;
    auto data = sample_gaussian(spec);
    EmConfig cfg;
    cfg.nu = 1e6;
    auto model = fit_student_em(data, full_forest(3), cfg, Estimator::pearson);
    CHECK(model.mu.cwiseAbs().maxCoeff() < 0.05);
    Eigen::MatrixXd J = dense_embedding(model.precision);
    CHECK((J - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("pearson and kendall starts land on the same fixed point") {
    auto data = student_panel(4000, 4, 8.0, 61);
    auto forest = build_mfcf(covariance_to_correlation(pearson_covariance(data)), BuildConfig{3});
    EmConfig cfg;
    cfg.nu = 8.0;
    auto mp = fit_student_em(data, forest, cfg, Estimator::pearson);
    auto mk = fit_student_em(data, forest, cfg, Estimator::kendall);
    CHECK(param_distance(mp, mk) < cfg.tolerance * 10.0);
}

TEST_CASE("observation order does not change the fit") {
    auto data = student_panel(500, 4, 3.5, 88);
    std::vector<int> order(500);
    std::iota(order.begin(), order.end(), 0);
    rng_stream rng(9, 9);
    for (int i = 499; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)], order[rng.next_below(i + 1)]);
    Eigen::MatrixXd shuffled(500, 4);
    for (int s = 0; s < 500; ++s) shuffled.row(s) = data.values().row(order[s]);

    auto forest = full_forest(4);
    EmConfig cfg;
    cfg.nu = 3.5;
    auto a = fit_student_em(data, forest, cfg, Estimator::pearson);
    auto b = fit_student_em(ObservationMatrix(shuffled), forest, cfg, Estimator::pearson);
    CHECK(param_distance(a, b) < 1e-9);
    CHECK(std::abs(a.nu - b.nu) == 0.0);
}

TEST_CASE("non-convergence surfaces the last state") {
    auto data = student_panel(300, 3, 2.5, 17);
    EmConfig cfg;
    cfg.nu = 2.5;
    cfg.max_iterations = 1;
    cfg.tolerance = 1e-14;
    try {
        fit_student_em(data, full_forest(3), cfg, Estimator::pearson);
        FAIL("expected convergence_error");
    } catch (const convergence_error& e) {
        CHECK(e.last_state.iteration == 1);
        CHECK(e.last_state.nu == 2.5);
        CHECK(e.last_state.weights.size() == 300);
    }
}

TEST_CASE("direct fit skips em and keeps the estimator covariance") {
    auto data = student_panel(400, 4, 3.0, 29);
    auto forest = full_forest(4);
    auto model = fit_student_direct(data, forest, 3.0, Estimator::pearson);
    CHECK(model.em_iterations == 0);
    CHECK(model.nu == 3.0);
    Eigen::MatrixXd J = dense_embedding(model.precision);
    Eigen::MatrixXd dense_inv = pearson_covariance(data).matrix.inverse();
    CHECK((J - dense_inv).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(model.final_loglik == doctest::Approx(student_log_likelihood(data, model)));
}

TEST_CASE("tail estimate recovers student degrees of freedom") {
    for (double nu : {2.5, 3.0}) {
        GeneratorSpec spec;
        spec.mu = Eigen::VectorXd::Zero(1);
        spec.sigma = Eigen::MatrixXd::Identity(1, 1);
        spec.family = Family::student_t;
        spec.nu = nu;
        spec.q = 100000;
        spec.seed = 123;
        auto data = sample(spec);
        double est = estimate_nu_tail(data, 0.05);
        CHECK(est > nu - 0.5);
        CHECK(est < nu + 0.5);
    }
}

TEST_CASE("gaussian tails push the estimate toward the upper clamp") {
    GeneratorSpec spec;
    spec.mu = Eigen::VectorXd::Zero(1);
    spec.sigma = Eigen::MatrixXd::Identity(1, 1);
    spec.q = 100000;
    spec.seed = 321;
    auto data = sample_gaussian(spec);
    CHECK(estimate_nu_tail(data, 0.05) > 10.0);
}

TEST_CASE("tail estimate rejects thin samples and bad fractions") {
    auto data = random_panel(50, 1, 77);
    CHECK_THROWS_AS(estimate_nu_tail(data, 0.05), degenerate_input);  // k*q too small
    CHECK_THROWS_AS(estimate_nu_tail(data, 0.0), domain_error);
    CHECK_THROWS_AS(estimate_nu_tail(data, 1.0), domain_error);
    CHECK(estimate_nu_tail(random_panel(5000, 1, 78), 0.05) >= 2.05);
}

}  // TEST_SUITE
