#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "repsim/activation_io.hpp"
#include "repsim/cli.hpp"
#include "repsim/error.hpp"
#include "repsim/heatmap.hpp"
#include "repsim/similarity_matrix.hpp"
#include "temp_dir.hpp"
#include "../src/cli/demo.hpp"

using namespace repsim;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "repsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

DataMatrix seeded(std::size_t n, std::size_t p, double phase) {
    std::vector<double> v(n * p);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(1.7 * static_cast<double>(i) + phase) + 0.1 * phase;
    return DataMatrix(n, p, v);
}

ActivationSet layered(const std::vector<std::string>& names, std::size_t n) {
    std::vector<DataMatrix> layers;
    for (std::size_t i = 0; i < names.size(); ++i)
        layers.push_back(seeded(n, 3 + i, static_cast<double>(i)).with_label(names[i]));
    return ActivationSet(std::move(layers), "probe-1");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("metric prints the worked example") {
    TempDir dir("cli-metric");
    write_matrix(dir / "x.rsam", DataMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}}));
    write_matrix(dir / "y.rsam", DataMatrix::from_rows({{1}, {0}, {2}}));
    const auto x = (dir / "x.rsam").string(), y = (dir / "y.rsam").string();

    auto r = run({"--metric", "rv", "metric", x, y});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out == "0.698731303\n");
    r = run({"metric", x, y});
    CHECK(r.out == "0.386863525\n");
    r = run({"--metric", "cka", "metric", x, y});
    CHECK(r.out == "0.25\n");
    r = run({"--metric", "rv2", "metric", x, x});
    CHECK(r.out == "1\n");
}

TEST_CASE("metric error exits") {
    TempDir dir("cli-errors");
    write_matrix(dir / "a.rsam", seeded(100, 4, 0));
    write_matrix(dir / "b.rsam", seeded(90, 4, 1));
    write_matrix(dir / "z.rsam", DataMatrix(100, 2, std::vector<double>(200, 0.0)));
    const auto a = (dir / "a.rsam").string();

    auto r = run({"metric", a, (dir / "b.rsam").string()});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.err.find("100") != std::string::npos);
    CHECK(r.err.find("90") != std::string::npos);

    r = run({"metric", a, (dir / "z.rsam").string()});
    CHECK(r.code == cli::kExitDegenerate);

    CHECK(run({"metric", a}).code == cli::kExitUsage);
    CHECK(run({"--metric", "cosine", "metric", a, a}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"metric", a, (dir / "missing.rsam").string()}).code == cli::kExitFailure);
    CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("compare writes deterministic matrices") {
    TempDir dir("cli-compare");
    const std::vector<std::string> names{"l1", "l2", "l3", "l4", "l5"};
    const auto manifest = save_activation_set(layered(names, 40), dir.path(), "net").string();

    auto r = run({"compare", manifest, manifest, "--csv", (dir / "self.csv").string(), "--svg",
                  (dir / "self.svg").string(), "--title", "self"});
    REQUIRE(r.code == cli::kExitOk);
    const auto m = read_csv(dir / "self.csv");
    CHECK(m.rows() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(m(i, i) == 1.0);
    CHECK(m.row_labels() == names);

    r = run({"compare", manifest, manifest, "--csv", (dir / "again.csv").string(), "--svg",
             (dir / "again.svg").string(), "--title", "self"});
    CHECK(slurp(dir / "self.csv") == slurp(dir / "again.csv"));
    CHECK(slurp(dir / "self.svg") == slurp(dir / "again.svg"));

    r = run({"render", (dir / "self.csv").string(), "--svg", (dir / "render.svg").string(), "--title", "self"});
    CHECK(r.code == cli::kExitOk);
    CHECK(slurp(dir / "render.svg") == slurp(dir / "self.svg"));

    r = run({"compare", manifest, manifest, "--csv", (dir / "dec.csv").string(), "--decimate", "4"});
    CHECK(r.code == cli::kExitOk);
    CHECK(run({"compare", manifest, manifest, "--csv", (dir / "x.csv").string(), "--decimate", "0"}).code ==
          cli::kExitUsage);
}

TEST_CASE("compare keeps arbitrary layer names in order") {
    TempDir dir("cli-names");
    const std::vector<std::string> names{"c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "fc1", "fc2"};
    const auto a = save_activation_set(layered(names, 30), dir.path(), "a").string();
    const auto r = run({"--metric", "cka", "compare", a, a, "--csv", (dir / "m.csv").string()});
    REQUIRE(r.code == cli::kExitOk);
    const auto m = read_csv(dir / "m.csv");
    CHECK(m.row_labels() == names);
    CHECK(m.col_labels() == names);
    CHECK(m.metric() == "linear_cka");
}

TEST_CASE("compare rejects mismatched probes") {
    TempDir dir("cli-mismatch");
    const auto a = save_activation_set(layered({"l1", "l2"}, 30), dir.path(), "a").string();
    const auto b = save_activation_set(layered({"l1", "l2"}, 20), dir.path(), "b").string();
    const auto r = run({"compare", a, b, "--csv", (dir / "m.csv").string()});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.err.find("30") != std::string::npos);
    CHECK(r.err.find("20") != std::string::npos);
}

TEST_CASE("simulate writes a loadable manifest") {
    TempDir dir("cli-sim");
    const auto r = run({"--seed", "3", "simulate", "--recipe", "random_above", "--n", "2", "--epochs", "2",
                        "--out", dir.path().string()});
    REQUIRE(r.code == cli::kExitOk);
    const auto set = load_activation_set(dir / "random_above_2.json");
    CHECK(set.size() == 6);
    CHECK(set.n_obs() == 600);
    const auto acc = slurp(dir / "accuracy.csv");
    CHECK(acc.rfind("network,recipe,n_random_layers,top1\nrandom_above_2,random_above,2,", 0) == 0);
    CHECK(run({"simulate", "--recipe", "random_above", "--n", "6", "--out", dir.path().string()}).code ==
          cli::kExitUsage);
    CHECK(run({"simulate", "--recipe", "dropout", "--out", dir.path().string()}).code == cli::kExitUsage);
}

TEST_CASE("demo failure leaves a stage marker") {
    TempDir dir("cli-demo-fail");
    cli::DemoOptions opt;
    opt.config = experiment::default_config(1);
    opt.config.train.learning_rate = 0.0;
    opt.out_dir = dir.path();
    std::ostringstream log;
    CHECK_THROWS_AS(cli::run_demo(experiment::Suite::transfer_freeze, opt, log), ConfigError);
    const auto marker = slurp(dir / "STAGE_FAILED");
    CHECK(marker.find("stage: simulate") != std::string::npos);
    CHECK(marker.find("learning_rate") != std::string::npos);
}

TEST_CASE("installed binary") {
    TempDir dir("cli-binary");
    write_matrix(dir / "x.rsam", DataMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}}));
    const auto x = (dir / "x.rsam").string();
    const std::string cmd = std::string("\"") + REPSIM_CLI_PATH + "\" metric \"" + x + "\" \"" + x + "\" > \"" +
                            (dir / "out.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(slurp(dir / "out.txt") == "1\n");
    const int usage = std::system((std::string("\"") + REPSIM_CLI_PATH + "\" nope 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(usage) == 64);
}

}  // TEST_SUITE
