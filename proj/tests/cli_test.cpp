#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using std::filesystem::path;

namespace {

struct Run {
    int exit_code;
    std::string output;  // stdout and stderr combined
};

path work_dir() {
    auto dir = std::filesystem::temp_directory_path() / "logonet_cli";
    std::filesystem::create_directories(dir);
    return dir;
}

Run run_cli(const std::string& args) {
    auto log = work_dir() / "last_run.log";
    std::string cmd = std::string(LOGONET_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream in(log);
    std::string out{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return {rc == 0 ? 0 : 1, out};
}

std::string slurp(const path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

double printed_value(const std::string& output, const std::string& key) {
    auto pos = output.find(key + "=");
    REQUIRE(pos != std::string::npos);
    return std::stod(output.substr(pos + key.size() + 1));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth build fit eval round trip") {
    auto dir = work_dir();
    auto data = (dir / "panel.csv").string();
    auto net = (dir / "net.json").string();
    auto model = (dir / "model.json").string();

    auto synth = run_cli("--seed 11 synth --p 8 --q 400 --family normal --sigma factor --out " + data);
    CHECK(synth.exit_code == 0);
    CHECK(synth.output.find("wrote 400 observations of 8 series") != std::string::npos);

    auto build = run_cli("build-net --data " + data + " --estimator pearson --max-clique 3 --out " + net);
    CHECK(build.exit_code == 0);
    // p=8, R=3: 3 + 5*2 = 13 edges
    CHECK(build.output.find("13 edges") != std::string::npos);

    auto fit = run_cli("fit --data " + data + " --network " + net +
                       " --model normal_pearson --out " + model);
    REQUIRE(fit.exit_code == 0);
    double ll_fit = printed_value(fit.output, "ll_train_per_obs");
    CHECK(fit.output.find("em_iterations") == std::string::npos);

    auto eval = run_cli("eval --data " + data + " --model-file " + model);
    REQUIRE(eval.exit_code == 0);
    double ll_eval = printed_value(eval.output, "ll_per_obs");
    CHECK(ll_eval == doctest::Approx(ll_fit).epsilon(1e-10));

    auto doc = slurp(model);
    CHECK(doc.find("\"type\":\"gaussian\"") != std::string::npos);
    CHECK(doc.find("\"network\"") != std::string::npos);
}

TEST_CASE("student em fit reports iterations and serializes em metadata") {
    auto dir = work_dir();
    auto data = (dir / "student.csv").string();
    auto net = (dir / "student_net.json").string();
    auto model = (dir / "student_model.json").string();

    REQUIRE(run_cli("--seed 3 synth --p 6 --q 500 --family student_t --nu 4 --sigma factor --out " +
                    data).exit_code == 0);
    REQUIRE(run_cli("build-net --data " + data + " --estimator kendall --max-clique 3 --out " +
                    net).exit_code == 0);

    auto fit = run_cli("fit --data " + data + " --network " + net +
                       " --model student_kendall_em --nu 4 --out " + model);
    REQUIRE(fit.exit_code == 0);
    CHECK(printed_value(fit.output, "em_iterations") >= 1);

    auto doc = slurp(model);
    CHECK(doc.find("\"type\":\"student_t\"") != std::string::npos);
    CHECK(doc.find("\"nu\":4.0") != std::string::npos);
    CHECK(doc.find("\"em\"") != std::string::npos);
    CHECK(doc.find("\"iterations\"") != std::string::npos);

    auto eval = run_cli("eval --data " + data + " --model-file " + model);
    CHECK(eval.exit_code == 0);
}

TEST_CASE("tail-estimated degrees of freedom flow through fit") {
    auto dir = work_dir();
    auto data = (dir / "tail.csv").string();
    auto net = (dir / "tail_net.json").string();
    auto model = (dir / "tail_model.json").string();
    REQUIRE(run_cli("--seed 4 synth --p 3 --q 2000 --family student_t --nu 3 --sigma identity --out " +
                    data).exit_code == 0);
    REQUIRE(run_cli("build-net --data " + data + " --estimator pearson --max-clique 2 --out " +
                    net).exit_code == 0);
    auto fit = run_cli("fit --data " + data + " --network " + net +
                       " --model student_pearson --nu tail --out " + model);
    CHECK(fit.exit_code == 0);
    auto doc = slurp(model);
    CHECK(doc.find("\"nu\":") != std::string::npos);
}

TEST_CASE("returns subcommand computes log returns") {
    auto dir = work_dir();
    auto prices = dir / "prices.csv";
    auto returns = dir / "returns.csv";
    spit(prices, "date,AAA\n2020-01-01,100\n2020-01-02,110\n");
    auto rc = run_cli("returns --prices " + prices.string() + " --out " + returns.string());
    CHECK(rc.exit_code == 0);
    auto text = slurp(returns);
    CHECK(text.rfind("AAA\n", 0) == 0);
    CHECK(text.find("0.0953101798043") != std::string::npos);
}

TEST_CASE("seeded synthesis is reproducible from the command line") {
    auto dir = work_dir();
    auto a = dir / "seed_a.csv";
    auto b = dir / "seed_b.csv";
    auto c = dir / "seed_c.csv";
    REQUIRE(run_cli("--seed 5 synth --p 4 --q 50 --out " + a.string()).exit_code == 0);
    REQUIRE(run_cli("--seed 5 synth --p 4 --q 50 --out " + b.string()).exit_code == 0);
    REQUIRE(run_cli("--seed 6 synth --p 4 --q 50 --out " + c.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("config driven sweep and aggregation") {
    auto dir = work_dir();
    auto data = (dir / "sweep_panel.csv").string();
    REQUIRE(run_cli("--seed 21 synth --p 8 --q 300 --family normal --sigma factor --out " +
                    data).exit_code == 0);

    auto toml = dir / "sweep.toml";
    auto results = (dir / "results.csv").string();
    std::ostringstream cfg;
    cfg << "data = \"" << data << "\"\n"
        << "output_path = \"" << results << "\"\n"
        << "clique_sizes = [2, 4, 8]\n"
        << "models = [\"normal_pearson\", \"student_pearson_em\"]\n"
        << "nu = 3.0\n"
        << "n_resamples = 2\n"
        << "p_select = 8\n"
        << "q_train = 50\n"
        << "q_test = 50\n"
        << "series_with_replacement = false\n"
        << "seed = 13\n";
    spit(toml, cfg.str());

    auto sweep = run_cli("--config " + toml.string() + " sweep");
    REQUIRE(sweep.exit_code == 0);
    CHECK(sweep.output.find("wrote 12 rows") != std::string::npos);
    auto first = slurp(results);
    CHECK(first.rfind("resample_id,", 0) == 0);

    // rerun: byte-identical output
    REQUIRE(run_cli("--config " + toml.string() + " sweep").exit_code == 0);
    CHECK(slurp(results) == first);

    // the JSON spelling of the same config produces the same bytes
    auto json = dir / "sweep.json";
    std::ostringstream js;
    js << "{\"data\":\"" << data << "\",\"output_path\":\"" << results << "\","
       << "\"clique_sizes\":[2,4,8],\"models\":[\"normal_pearson\",\"student_pearson_em\"],"
       << "\"nu\":3.0,\"n_resamples\":2,\"p_select\":8,\"q_train\":50,\"q_test\":50,"
       << "\"series_with_replacement\":false,\"seed\":13}";
    spit(json, js.str());
    REQUIRE(run_cli("--config " + json.string() + " sweep").exit_code == 0);
    CHECK(slurp(results) == first);

    // aggregation with an external baseline merged in
    auto baseline = dir / "baseline.csv";
    spit(baseline, "n_edges,ll_test\n28,-9.75\n");
    auto agg_out = (dir / "agg.csv").string();
    auto agg = run_cli("aggregate --results " + results + " --baseline " + baseline.string() +
                       " --out " + agg_out);
    REQUIRE(agg.exit_code == 0);
    auto agg_text = slurp(agg_out);
    CHECK(agg_text.rfind("model,max_clique,n_edges,mean_ll_test,q10,q90,is_argmax\n", 0) == 0);
    CHECK(agg_text.find("glasso,,28,-9.75,-9.75,-9.75,0") != std::string::npos);
    CHECK(agg_text.find("normal_pearson,") != std::string::npos);
    CHECK(agg_text.find(",1\n") != std::string::npos);
}

TEST_CASE("flag overrides beat config file values") {
    auto dir = work_dir();
    auto data = (dir / "ovr_panel.csv").string();
    REQUIRE(run_cli("--seed 22 synth --p 6 --q 200 --out " + data).exit_code == 0);
    auto toml = dir / "ovr.toml";
    spit(toml,
         "clique_sizes = [2, 3]\nmodels = [\"normal_pearson\"]\n"
         "n_resamples = 2\np_select = 6\nq_train = 40\nq_test = 40\n"
         "series_with_replacement = false\nseed = 1\n");
    auto out_a = (dir / "ovr_a.csv").string();
    auto out_b = (dir / "ovr_b.csv").string();
    REQUIRE(run_cli("--config " + toml.string() + " sweep --data " + data + " --out " +
                    out_a).exit_code == 0);
    REQUIRE(run_cli("--config " + toml.string() + " --seed 2 sweep --data " + data + " --out " +
                    out_b).exit_code == 0);
    CHECK(slurp(out_a) != slurp(out_b));  // the seed override changed the resamples
}

TEST_CASE("failures exit nonzero with a diagnostic") {
    auto dir = work_dir();
    auto data = (dir / "err_panel.csv").string();
    auto net = (dir / "err_net.json").string();
    REQUIRE(run_cli("--seed 30 synth --p 4 --q 100 --out " + data).exit_code == 0);
    REQUIRE(run_cli("build-net --data " + data + " --max-clique 2 --out " + net).exit_code == 0);

    auto bad_model = run_cli("fit --data " + data + " --network " + net +
                             " --model elliptic_boogaloo --out " + (dir / "x.json").string());
    CHECK(bad_model.exit_code == 1);
    CHECK(bad_model.output.find("error:") != std::string::npos);

    auto bad_nu = run_cli("fit --data " + data + " --network " + net +
                          " --model student_pearson --nu 2.0 --out " + (dir / "x.json").string());
    CHECK(bad_nu.exit_code == 1);
    CHECK(bad_nu.output.find("error:") != std::string::npos);

    auto missing = run_cli("build-net --data /nonexistent.csv --max-clique 2 --out " + net);
    CHECK(missing.exit_code == 1);
    CHECK(missing.output.find("error:") != std::string::npos);

    auto bad_transform = run_cli("build-net --data " + data +
                                 " --estimator kendall --kendall-transform spline --out " + net +
                                 " --max-clique 2");
    CHECK(bad_transform.exit_code == 1);
    CHECK(bad_transform.output.find("kendall transform") != std::string::npos);

    auto cfg = dir / "bad.toml";
    spit(cfg, "clique_sizes = [2]\nunknown_knob = 1\n");
    auto bad_cfg = run_cli("--config " + cfg.string() + " sweep --data " + data + " --out " +
                           (dir / "y.csv").string());
    CHECK(bad_cfg.exit_code == 1);
    CHECK(bad_cfg.output.find("error:") != std::string::npos);

    auto no_sub = run_cli("");
    CHECK(no_sub.exit_code == 1);
}

TEST_CASE("sine transform is accepted on the kendall path") {
    auto dir = work_dir();
    auto data = (dir / "sine_panel.csv").string();
    auto net_plain = (dir / "sine_a.json").string();
    auto net_sine = (dir / "sine_b.json").string();
    REQUIRE(run_cli("--seed 9 synth --p 5 --q 300 --family student_t --nu 3 --out " +
                    data).exit_code == 0);
    REQUIRE(run_cli("build-net --data " + data + " --estimator kendall --max-clique 3 --out " +
                    net_plain).exit_code == 0);
    auto sine = run_cli("build-net --data " + data +
                        " --estimator kendall --kendall-transform sine --max-clique 3 --out " +
                        net_sine);
    CHECK(sine.exit_code == 0);
}

}  // TEST_SUITE
