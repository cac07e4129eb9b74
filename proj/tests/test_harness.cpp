#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "harness/config.hpp"
#include "harness/experiments.hpp"
#include "harness/table.hpp"
#include "mom/estimators.hpp"
#include "mom/rng.hpp"

using namespace mom;
using namespace mom::harness;

namespace {

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "mom_harness_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

ExperimentConfig small_break_config() {
    ExperimentConfig config;
    config.command = Command::BreakMean;
    config.n_grid = {100, 400};
    config.runs = 20;
    config.mapping = MappingKind::Harmonic;
    config.seed = 4711;
    config.contamination.inlier_dist = Gaussian{0.0, 1.0};
    config.contamination.outlier_rule = DiracPower{0.5};
    config.contamination.placement.kind = PlacementKind::Shuffle;
    return config;
}

#ifdef MOM_CLI_PATH
int run_cli(const std::string& args) {
    const int status = std::system((std::string(MOM_CLI_PATH) + " " + args + " 2>/dev/null").c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}
#endif

}  // namespace

TEST_CASE("result tables round-trip through CSV") {
    ResultTable table;
    table.columns = {"name", "count", "value"};
    table.rows.push_back({std::string("alpha"), 3L, 0.1234567890123456});
    table.rows.push_back({std::string("beta"), -17L, 1e-300});
    table.rows.push_back({std::string("gamma"), 0L, std::nan("")});

    const auto path = scratch_dir() / "roundtrip.csv";
    write_results(path.string(), table);
    const ResultTable back = read_results(path.string());
    REQUIRE(back.columns == table.columns);
    REQUIRE(back.rows.size() == table.rows.size());
    CHECK(std::get<std::string>(back.rows[0][0]) == "alpha");
    CHECK(std::get<long>(back.rows[0][1]) == 3);
    // shortest round-trip representation: exact recovery
    CHECK(std::get<double>(back.rows[0][2]) == 0.1234567890123456);
    CHECK(std::get<double>(back.rows[1][2]) == 1e-300);
    CHECK(std::isnan(std::get<double>(back.rows[2][2])));

    // LF endings, comma separator, dot decimal
    const std::string text = slurp(path);
    CHECK(text.find("\r") == std::string::npos);
    CHECK(text.find("0.1234567890123456") != std::string::npos);
}

TEST_CASE("csv dataset reader") {
    const auto path = scratch_dir() / "data.csv";
    spit(path, "f1,f2,label\n1.5,2,0\n-0.25,1e2,1\n3,4,0\n");
    const PairwiseDataset data = read_csv_dataset(path.string());
    CHECK(data.size() == 3);
    CHECK(data.dim() == 2);
    CHECK(data.features(1, 1) == doctest::Approx(100.0));
    CHECK(data.labels[2] == doctest::Approx(0.0));

    spit(path, "f1,label\n1,0\nx,1\n");
    try {
        read_csv_dataset(path.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 1);
    }

    CHECK_THROWS_AS(read_csv_dataset((scratch_dir() / "missing.csv").string()), IoError);
}

TEST_CASE("config serialization mirrors the spec field names") {
    ExperimentConfig config = small_break_config();
    config.out = "x.csv";
    config.k_override = 12;
    const nlohmann::json j = to_json(config);
    CHECK(j.at("command") == "BreakMean");
    CHECK(j.at("contamination").at("inlier_dist").at("kind") == "Gaussian");
    CHECK(j.at("contamination").at("outlier_rule").at("exponent") == 0.5);
    CHECK(j.at("contamination").at("c_o") == 1.0);
    CHECK(j.at("contamination").at("alpha_o") == 0.5);
    CHECK(j.at("contamination").at("placement").at("kind") == "Shuffle");

    const ExperimentConfig back = config_from_json(j);
    CHECK(back.command == config.command);
    CHECK(back.n_grid == config.n_grid);
    CHECK(back.runs == config.runs);
    CHECK(back.seed == config.seed);
    CHECK(back.k_override == config.k_override);
    CHECK(to_json(back).dump() == j.dump());

    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"mapping", "Quadratic"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"runs", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"n_grid", {10, 10}}}), ConfigError);
}

TEST_CASE("fast statistic paths agree with the generic estimators") {
    Rng rng(4040);
    for (int trial = 0; trial < 200; ++trial) {
        Sample s;
        const long n = 2 + static_cast<long>(rng.uniform_int(30));
        for (long i = 0; i < n; ++i) s.values.push_back(rng.normal(0.0, 2.0));
        CHECK(variance_u_stat(s) ==
              doctest::Approx(u_statistic(s, variance_kernel())).epsilon(1e-12));

        Sample y;
        const long m = 1 + static_cast<long>(rng.uniform_int(30));
        for (long i = 0; i < m; ++i) y.values.push_back(rng.normal(0.0, 2.0));
        CHECK(mann_whitney_u_stat(s, y) ==
              doctest::Approx(two_sample_u(s, y, mann_whitney_kernel())).epsilon(1e-12));
    }
    // ties count as x <= y in both paths
    Sample a, b;
    a.values = {1.0, 2.0, 2.0};
    b.values = {2.0, 0.5};
    CHECK(mann_whitney_u_stat(a, b) == two_sample_u(a, b, mann_whitney_kernel()));
}

TEST_CASE("break experiment output is self-describing and deterministic") {
    const ExperimentConfig config = small_break_config();
    const ResultTable a = run_break_experiment(config);
    const ResultTable b = run_break_experiment(config);
    CHECK(to_csv(a) == to_csv(b));

    REQUIRE(a.rows.size() == 8);  // two n values x four estimators
    REQUIRE(a.columns.size() == 12);
    // row layout: n, estimator, k, epsilon, n_outliers present on every row
    for (const auto& row : a.rows) {
        CHECK(std::get<long>(row[1]) > 0);
        CHECK(std::get<long>(row[7]) >= 1);
        CHECK(std::get<double>(row[8]) > 0.0);
        CHECK(std::get<long>(row[9]) > 0);
        CHECK(std::get<std::string>(row[10]) == "harmonic");
    }
    // the empirical mean is ruined by design; the blocked median is not
    // (compare at n = 400 where the outlier fraction has thinned to 5%)
    const double mean_err = std::get<double>(a.rows[4][4]);
    const double mom_err = std::get<double>(a.rows[7][4]);
    CHECK(std::get<long>(a.rows[4][1]) == 400);
    CHECK(mean_err > 5.0 * mom_err);
}

TEST_CASE("coverage emits error rows for impossible confidence levels") {
    ExperimentConfig config = small_break_config();
    config.command = Command::Coverage;
    config.n_grid = {60};
    config.runs = 50;
    config.contamination.inlier_dist = StudentT{3};
    config.contamination.outlier_rule = DiracAt{25.0};
    config.contamination.c_o = std::sqrt(6.0);
    config.contamination.alpha_o = 0.0;
    config.coverage.path = BoundKind::Chebyshev;
    config.coverage.log_deltas = {-8.0, -0.5};  // the second sits above the range

    const ResultTable table = run_coverage(config);
    REQUIRE(table.rows.size() == 2);
    CHECK(std::get<std::string>(table.rows[0].back()) == "ok");
    CHECK(std::get<std::string>(table.rows[1].back()) == "DeltaOutOfRange");
    const double fraction = std::get<double>(table.rows[0][10]);
    CHECK(fraction <= std::exp(-8.0) + 0.05);

    // auto-spaced points always land inside the admissible range
    config.coverage.log_deltas.clear();
    config.coverage.delta_points = 4;
    const ResultTable spaced = run_coverage(config);
    for (const auto& row : spaced.rows) {
        CHECK(std::get<std::string>(row.back()) == "ok");
    }
}

TEST_CASE("subgaussian coverage path on clean gaussian data") {
    ExperimentConfig config;
    config.command = Command::Coverage;
    config.n_grid = {200};
    config.runs = 400;
    config.mapping = MappingKind::Harmonic;
    config.seed = 606;
    config.contamination.inlier_dist = Gaussian{0.0, 1.0};
    config.coverage.path = BoundKind::SubGaussian;
    config.coverage.log_deltas = {-5.0};  // inside (0, 1/e] for clean samples

    const ResultTable table = run_coverage(config);
    REQUIRE(table.rows.size() == 1);
    CHECK(std::get<std::string>(table.rows[0].back()) == "ok");
    CHECK(std::get<long>(table.rows[0][6]) == 1);  // clean data: a single block
    const double fraction = std::get<double>(table.rows[0][10]);
    const double delta = std::exp(-5.0);
    CHECK(fraction <= delta + 3.0 * std::sqrt(delta * (1.0 - delta) / 400.0));
}

TEST_CASE("calibration table matches the module outputs") {
    ExperimentConfig config = small_break_config();
    config.command = Command::Calibrate;
    config.n_grid = {100};
    const ResultTable table = run_calibrate(config);
    REQUIRE(table.rows.size() == 1);
    const AlphaMapping mapping = AlphaMapping::harmonic();
    const double epsilon = epsilon_of(config.contamination, 100);
    const DerivedConstants c = derived_constants(mapping, epsilon);
    CHECK(std::get<double>(table.rows[0][3]) == doctest::Approx(c.alpha));
    CHECK(std::get<double>(table.rows[0][4]) == doctest::Approx(c.beta));
    CHECK(std::get<long>(table.rows[0][9]) ==
          block_count_subgaussian(mapping, epsilon, 100));
}

TEST_CASE("learning summary has four cells and zero epochs returns the init risk") {
    ExperimentConfig config;
    config.command = Command::LearnRanking;
    config.runs = 2;
    config.seed = 99;
    config.learning.n_train = 40;
    config.learning.n_test = 30;
    config.learning.dim = 3;
    config.learning.epochs = 0;
    config.learning.k_blocks = 5;
    config.learning.fraction = 0.05;

    const RunOutput zero = run_learning(config);
    REQUIRE(zero.table.rows.size() == 4);
    const double first = std::get<double>(zero.table.rows[0][4]);
    for (const auto& row : zero.table.rows) {
        CHECK(std::get<double>(row[4]) == doctest::Approx(first));
    }

    config.learning.epochs = 10;
    config.learning.mou_epochs = 50;
    const RunOutput small = run_learning(config);
    REQUIRE(small.table.rows.size() == 4);
    CHECK(small.extra.size() == 4);  // four traces from run 0
    for (const auto& [name, trace] : small.extra) {
        CHECK(trace.columns.size() == 4);
        CHECK(!trace.rows.empty());
    }
}

TEST_CASE("learning accepts datasets from the CSV reader") {
    const auto dir = scratch_dir();
    Rng rng(515);
    const auto write_instance = [&](const std::filesystem::path& path, int rows) {
        std::ofstream out(path);
        out << "f1,f2,label\n";
        for (int i = 0; i < rows; ++i) {
            const double a = rng.normal();
            const double b = rng.normal();
            out << a << ',' << b << ',' << (a - b + 0.05 * rng.normal()) << '\n';
        }
    };
    write_instance(dir / "train.csv", 30);
    write_instance(dir / "test.csv", 20);

    ExperimentConfig config;
    config.command = Command::LearnRanking;
    config.runs = 1;
    config.seed = 3;
    config.learning.dataset_csv = (dir / "train.csv").string();
    config.learning.test_csv = (dir / "test.csv").string();
    config.learning.epochs = 5;
    config.learning.mou_epochs = 20;
    config.learning.k_blocks = 3;
    config.learning.fraction = 0.1;
    const RunOutput output = run_learning(config);
    REQUIRE(output.table.rows.size() == 4);
    for (const auto& row : output.table.rows) {
        CHECK(std::isfinite(std::get<double>(row[4])));
    }

    config.learning.test_csv = std::nullopt;
    CHECK_THROWS_AS(run_learning(config), ConfigError);
}

#ifdef MOM_CLI_PATH

TEST_CASE("cli end to end: determinism and exit codes") {
    const auto dir = scratch_dir();
    const auto config_path = dir / "cli_break.json";
    const auto out_a = dir / "out_a.csv";
    const auto out_b = dir / "out_b.csv";
    spit(config_path, R"({
      "command": "BreakMean",
      "n_grid": [60],
      "runs": 5,
      "mapping": "Harmonic",
      "seed": 7,
      "contamination": {
        "inlier_dist": {"kind": "Gaussian", "mean": 0.0, "sd": 1.0},
        "outlier_rule": {"kind": "DiracPower", "exponent": 0.5},
        "c_o": 1.0, "alpha_o": 0.5,
        "placement": {"kind": "Shuffle"}
      }
    })");

    CHECK(run_cli("break-mean --config " + config_path.string() + " --out " + out_a.string()) == 0);
    CHECK(run_cli("break-mean --config " + config_path.string() + " --out " + out_b.string()) == 0);
    CHECK(slurp(out_a) == slurp(out_b));  // byte-identical reruns
    CHECK(std::filesystem::exists(out_a.string() + ".meta.json"));

    // a different seed changes the numbers
    const auto out_c = dir / "out_c.csv";
    CHECK(run_cli("break-mean --config " + config_path.string() + " --seed 8 --out " +
                  out_c.string()) == 0);
    CHECK(slurp(out_a) != slurp(out_c));

    // config errors exit with 2
    CHECK(run_cli("break-mean --config " + (dir / "nope.json").string() + " --out " +
                  out_a.string()) == 2);
    const auto bad_json = dir / "bad.json";
    spit(bad_json, "{not json");
    CHECK(run_cli("break-mean --config " + bad_json.string() + " --out " + out_a.string()) == 2);
    CHECK(run_cli("nonsense --config " + config_path.string()) == 2);

    // numeric errors exit with 3 (outlier count reaches the breakdown point)
    const auto breakdown = dir / "breakdown.json";
    spit(breakdown, R"({
      "command": "BreakMean",
      "n_grid": [12],
      "runs": 2,
      "mapping": "Harmonic",
      "seed": 1,
      "contamination": {
        "inlier_dist": {"kind": "Gaussian", "mean": 0.0, "sd": 1.0},
        "outlier_rule": {"kind": "DiracAt", "value": 3.0},
        "c_o": 3.0, "alpha_o": 0.0,
        "placement": {"kind": "Append"}
      }
    })");
    CHECK(run_cli("break-mean --config " + breakdown.string() + " --out " + out_a.string()) == 3);
}

#endif  // MOM_CLI_PATH
