#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "logonet/config.hpp"
#include "logonet/csv.hpp"
#include "logonet/errors.hpp"
#include "logonet/mfcf.hpp"
#include "logonet/model_io.hpp"
#include "logonet/pipeline.hpp"
#include "logonet/synthetic.hpp"

namespace {

using namespace logonet;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << text << '\n';
    if (!out) throw io_error("failed writing " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Estimator parse_estimator(const std::string& name) {
    if (name == "pearson") return Estimator::pearson;
    if (name == "kendall") return Estimator::kendall;
    throw config_error("unknown estimator '" + name + "' (use pearson or kendall)");
}

bool parse_kendall_transform(const std::string& name) {
    if (name == "none") return false;
    if (name == "sine") return true;
    throw config_error("unknown kendall transform '" + name + "' (use none or sine)");
}

struct GlobalArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 0;  // 0 = not given
};

int cmd_returns(const std::string& prices_path, const std::string& out_path) {
    PricePanel panel = read_price_csv(prices_path);
    ObservationMatrix returns = compute_log_returns(panel);
    write_observation_csv(out_path, returns);
    std::cout << "wrote " << returns.q() << " observations of " << returns.p() << " series to "
              << out_path << "\n";
    return 0;
}

int cmd_synth(int p, int q, const std::string& family, double nu, const std::string& sigma_kind,
              int n_factors, std::uint64_t seed, const std::string& out_path) {
    GeneratorSpec spec;
    spec.mu = Eigen::VectorXd::Zero(p);
    if (sigma_kind == "identity") {
        spec.sigma = Eigen::MatrixXd::Identity(p, p);
    } else if (sigma_kind == "factor") {
        spec.sigma = factor_covariance(p, n_factors, seed);
    } else {
        throw config_error("unknown sigma structure '" + sigma_kind +
                           "' (use identity or factor)");
    }
    if (family == "normal") {
        spec.family = Family::normal;
    } else if (family == "student_t") {
        spec.family = Family::student_t;
        spec.nu = nu;
    } else {
        throw config_error("unknown family '" + family + "' (use normal or student_t)");
    }
    spec.seed = seed;
    spec.q = q;
    write_observation_csv(out_path, sample(spec));
    std::cout << "wrote " << q << " observations of " << p << " series to " << out_path << "\n";
    return 0;
}

int cmd_build_net(const std::string& data_path, const std::string& estimator_name,
                  const std::string& transform, int max_clique, const std::string& out_path) {
    ObservationMatrix data = read_observation_csv(data_path);
    DependenceMatrix cov = estimator_covariance(data, parse_estimator(estimator_name),
                                                parse_kendall_transform(transform));
    CliqueForest forest = build_mfcf(covariance_to_correlation(cov), {max_clique});
    write_text(out_path, serialize(forest));
    std::cout << "built network with " << forest.cliques.size() << " cliques, "
              << edge_set(forest).size() << " edges\n";
    return 0;
}

int cmd_fit(const std::string& data_path, const std::string& network_path,
            const std::string& model_name, const std::string& nu_arg, double tail_fraction,
            int em_max_iterations, double em_tolerance, double ridge,
            const std::string& transform, const std::string& out_path) {
    ObservationMatrix data = read_observation_csv(data_path);
    CliqueForest forest = deserialize(read_text(network_path));
    ModelId model = model_from_string(model_name);
    Estimator estimator = model_estimator(model);
    const bool sine = parse_kendall_transform(transform);
    const double q = static_cast<double>(data.q());

    auto resolve_nu = [&]() -> double {
        if (nu_arg == "tail") return estimate_nu_tail(data, tail_fraction);
        return csv::parse_double(nu_arg, "--nu");
    };

    std::string serialized;
    double ll_train = 0.0;
    int iterations = -1;
    if (!model_is_student(model)) {
        GaussianModel g = fit_gaussian(data, forest, estimator, sine, ridge);
        ll_train = gaussian_log_likelihood(data, g) / q;
        serialized = serialize_model(g);
    } else if (!model_uses_em(model)) {
        StudentTModel s = fit_student_direct(data, forest, resolve_nu(), estimator, sine, ridge);
        ll_train = s.final_loglik / q;
        serialized = serialize_model(s);
    } else {
        EmConfig ec;
        ec.max_iterations = em_max_iterations;
        ec.tolerance = em_tolerance;
        ec.nu_source = NuSource::fixed;
        ec.nu = resolve_nu();
        ec.ridge = ridge;
        StudentTModel s = fit_student_em(data, forest, ec, estimator, sine);
        ll_train = s.final_loglik / q;
        iterations = s.em_iterations;
        serialized = serialize_model(s);
    }
    write_text(out_path, serialized);
    std::cout << "ll_train_per_obs=" << csv::format_double(ll_train) << "\n";
    if (iterations >= 0) std::cout << "em_iterations=" << iterations << "\n";
    return 0;
}

int cmd_eval(const std::string& data_path, const std::string& model_path) {
    ObservationMatrix data = read_observation_csv(data_path);
    AnyModel model = deserialize_model(read_text(model_path));
    double ll = log_likelihood(data, model) / static_cast<double>(data.q());
    std::cout << "ll_per_obs=" << csv::format_double(ll) << "\n";
    return 0;
}

int cmd_sweep(const GlobalArgs& global, const std::string& data_flag,
              const std::string& out_flag, bool timing_flag) {
    SweepFileConfig file;
    if (!global.config_path.empty())
        file = sweep_config_from_json(load_config_file(global.config_path));
    if (!data_flag.empty()) file.data = data_flag;
    if (!out_flag.empty()) file.sweep.output_path = out_flag;
    if (global.seed_given) file.sweep.plan.seed = global.seed;
    if (global.jobs > 0) file.sweep.jobs = global.jobs;
    if (timing_flag) file.sweep.timing = true;
    if (file.data.empty()) throw config_error("sweep needs a returns CSV (--data or config `data`)");
    if (file.sweep.output_path.empty())
        throw config_error("sweep needs an output path (--out or config `output_path`)");

    ObservationMatrix returns = read_observation_csv(file.data);
    std::vector<SweepResult> results = run_sweep(returns, file.sweep);
    write_results_csv(file.sweep.output_path, results);

    std::size_t failed = 0;
    for (const auto& r : results)
        if (r.status != "ok") ++failed;
    std::cout << "wrote " << results.size() << " rows to " << file.sweep.output_path;
    if (failed) std::cout << " (" << failed << " cells failed)";
    std::cout << "\n";
    return 0;
}

int cmd_aggregate(const std::string& results_path, const std::string& baseline_path,
                  const std::string& out_path) {
    std::vector<SweepResult> results = read_results_csv(results_path);
    std::vector<AggregateRow> rows = aggregate(results);
    if (!baseline_path.empty()) {
        std::vector<AggregateRow> merged = baseline_rows(read_baseline_csv(baseline_path));
        rows.insert(rows.end(), merged.begin(), merged.end());
    }
    write_aggregate_csv(out_path, rows);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chordal information-filtering networks and sparse elliptical model fits"};
    app.require_subcommand(1);
    app.fallthrough(true);

    GlobalArgs global;
    app.add_option("--config", global.config_path, "config file (TOML or JSON)");
    auto* seed_opt = app.add_option("--seed", global.seed, "RNG seed override");
    app.add_option("--jobs", global.jobs, "parallel workers");

    auto* c_returns = app.add_subcommand("returns", "log returns from a price panel CSV");
    std::string prices_path, out_path;
    c_returns->add_option("--prices", prices_path, "price panel CSV")->required();
    c_returns->add_option("--out", out_path, "output returns CSV")->required();

    auto* c_synth = app.add_subcommand("synth", "sample a synthetic panel");
    int synth_p = 30, synth_q = 500, synth_factors = 3;
    std::string synth_family = "normal", synth_sigma = "factor", synth_out;
    double synth_nu = 3.0;
    c_synth->add_option("--p", synth_p, "number of series");
    c_synth->add_option("--q", synth_q, "number of observations");
    c_synth->add_option("--family", synth_family, "normal or student_t");
    c_synth->add_option("--nu", synth_nu, "degrees of freedom (student_t)");
    c_synth->add_option("--sigma", synth_sigma, "covariance structure: identity or factor");
    c_synth->add_option("--factors", synth_factors, "factor count for --sigma factor");
    c_synth->add_option("--out", synth_out, "output CSV")->required();

    auto* c_build = app.add_subcommand("build-net", "learn a clique forest from returns");
    std::string build_data, build_estimator = "pearson", build_transform = "none", build_out;
    int build_R = 4;
    c_build->add_option("--data", build_data, "returns CSV")->required();
    c_build->add_option("--estimator", build_estimator, "pearson or kendall");
    c_build->add_option("--kendall-transform", build_transform,
                        "none, or sine for sin(pi tau / 2)");
    c_build->add_option("--max-clique", build_R, "maximum clique size")->required();
    c_build->add_option("--out", build_out, "output network JSON")->required();

    auto* c_fit = app.add_subcommand("fit", "fit a model on a learned network");
    std::string fit_data, fit_network, fit_model, fit_nu = "2.2", fit_transform = "none", fit_out;
    double fit_tail_fraction = 0.05, fit_tolerance = 1e-6, fit_ridge = 0.0;
    int fit_max_iter = 500;
    c_fit->add_option("--data", fit_data, "training returns CSV")->required();
    c_fit->add_option("--network", fit_network, "network JSON from build-net")->required();
    c_fit->add_option("--model", fit_model, "one of the six model ids")->required();
    c_fit->add_option("--nu", fit_nu, "degrees of freedom, or `tail`");
    c_fit->add_option("--tail-fraction", fit_tail_fraction, "tail fraction for --nu tail");
    c_fit->add_option("--em-max-iterations", fit_max_iter, "EM iteration cap");
    c_fit->add_option("--em-tolerance", fit_tolerance, "EM convergence tolerance");
    c_fit->add_option("--ridge", fit_ridge, "diagonal loading for block inversions");
    c_fit->add_option("--kendall-transform", fit_transform, "none, or sine for sin(pi tau / 2)");
    c_fit->add_option("--out", fit_out, "output model JSON")->required();

    auto* c_eval = app.add_subcommand("eval", "log-likelihood of a fitted model on data");
    std::string eval_data, eval_model;
    c_eval->add_option("--data", eval_data, "returns CSV")->required();
    c_eval->add_option("--model-file", eval_model, "model JSON from fit")->required();

    auto* c_sweep = app.add_subcommand("sweep", "clique-size sweep over models and resamples");
    std::string sweep_data, sweep_out;
    bool sweep_timing = false;
    c_sweep->add_option("--data", sweep_data, "returns CSV (overrides config `data`)");
    c_sweep->add_option("--out", sweep_out, "results CSV (overrides config `output_path`)");
    c_sweep->add_flag("--timing", sweep_timing, "record per-cell wall time");

    auto* c_agg = app.add_subcommand("aggregate", "quantile aggregation of sweep results");
    std::string agg_results, agg_baseline, agg_out;
    c_agg->add_option("--results", agg_results, "results CSV from sweep")->required();
    c_agg->add_option("--baseline", agg_baseline, "external baseline CSV (n_edges, ll_test)");
    c_agg->add_option("--out", agg_out, "output aggregate CSV")->required();

    CLI11_PARSE(app, argc, argv);
    global.seed_given = seed_opt->count() > 0;

    try {
        if (c_returns->parsed()) return cmd_returns(prices_path, out_path);
        if (c_synth->parsed()) {
            std::uint64_t seed = global.seed_given ? global.seed : 0;
            return cmd_synth(synth_p, synth_q, synth_family, synth_nu, synth_sigma, synth_factors,
                             seed, synth_out);
        }
        if (c_build->parsed())
            return cmd_build_net(build_data, build_estimator, build_transform, build_R, build_out);
        if (c_fit->parsed())
            return cmd_fit(fit_data, fit_network, fit_model, fit_nu, fit_tail_fraction,
                           fit_max_iter, fit_tolerance, fit_ridge, fit_transform, fit_out);
        if (c_eval->parsed()) return cmd_eval(eval_data, eval_model);
        if (c_sweep->parsed()) return cmd_sweep(global, sweep_data, sweep_out, sweep_timing);
        if (c_agg->parsed()) return cmd_aggregate(agg_results, agg_baseline, agg_out);
        std::cerr << "error: no subcommand given\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
