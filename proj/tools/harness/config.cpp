#include "harness/config.hpp"

#include <fstream>

namespace mom::harness {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

template <typename T>
T field(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad("field '" + std::string(key) + "': " + e.what());
    }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad("field '" + std::string(key) + "': " + e.what());
    }
}

MappingKind mapping_from_string(const std::string& name) {
    if (name == "Arithmetic") return MappingKind::Arithmetic;
    if (name == "Geometric") return MappingKind::Geometric;
    if (name == "Harmonic") return MappingKind::Harmonic;
    if (name == "Polynomial") return MappingKind::Polynomial;
    bad("unknown mapping '" + name + "'");
}

std::string mapping_to_string(MappingKind kind) {
    switch (kind) {
        case MappingKind::Arithmetic: return "Arithmetic";
        case MappingKind::Geometric: return "Geometric";
        case MappingKind::Harmonic: return "Harmonic";
        case MappingKind::Polynomial: return "Polynomial";
        case MappingKind::Custom: break;
    }
    bad("custom mappings are not expressible in a config file");
}

json inlier_to_json(const InlierDist& dist) {
    json j;
    std::visit(
        [&j](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                j = {{"kind", "Gaussian"}, {"mean", d.mean}, {"sd", d.sd}};
            } else if constexpr (std::is_same_v<T, Bernoulli>) {
                j = {{"kind", "Bernoulli"}, {"p", d.p}};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                j = {{"kind", "Uniform"}, {"lo", d.lo}, {"hi", d.hi}};
            } else if constexpr (std::is_same_v<T, StudentT>) {
                j = {{"kind", "StudentT"}, {"dof", d.dof}};
            } else {
                j = {{"kind", "Empirical"}, {"values", d.values}};
            }
        },
        dist);
    return j;
}

InlierDist inlier_from_json(const json& j) {
    const std::string kind = field<std::string>(j, "kind", "Gaussian");
    if (kind == "Gaussian") return Gaussian{field(j, "mean", 0.0), field(j, "sd", 1.0)};
    if (kind == "Bernoulli") return Bernoulli{field(j, "p", 0.5)};
    if (kind == "Uniform") return Uniform{field(j, "lo", 0.0), field(j, "hi", 1.0)};
    if (kind == "StudentT") return StudentT{field(j, "dof", 3)};
    if (kind == "Empirical") return Empirical{field(j, "values", std::vector<double>{})};
    bad("unknown inlier distribution '" + kind + "'");
}

json outlier_to_json(const OutlierRule& rule) {
    json j;
    std::visit(
        [&j](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, DiracPower>) {
                j = {{"kind", "DiracPower"}, {"exponent", r.exponent}};
            } else if constexpr (std::is_same_v<T, DiracAt>) {
                j = {{"kind", "DiracAt"}, {"value", r.value}};
            } else {
                j = {{"kind", "UniformBox"}, {"lo", r.lo}, {"hi", r.hi}};
            }
        },
        rule);
    return j;
}

OutlierRule outlier_from_json(const json& j) {
    const std::string kind = field<std::string>(j, "kind", "DiracPower");
    if (kind == "DiracPower") return DiracPower{field(j, "exponent", 0.5)};
    if (kind == "DiracAt") return DiracAt{field(j, "value", 0.0)};
    if (kind == "UniformBox") return UniformBox{field(j, "lo", 0.0), field(j, "hi", 1.0)};
    bad("unknown outlier rule '" + kind + "'");
}

BoundKind path_from_string(const std::string& name) {
    if (name == "Chebyshev") return BoundKind::Chebyshev;
    if (name == "SubGaussian") return BoundKind::SubGaussian;
    bad("coverage path must be Chebyshev or SubGaussian, got '" + name + "'");
}

}  // namespace

const char* to_string(Command command) {
    switch (command) {
        case Command::BreakMean: return "BreakMean";
        case Command::BreakMedian: return "BreakMedian";
        case Command::BreakVariance: return "BreakVariance";
        case Command::MannWhitney: return "MannWhitney";
        case Command::Coverage: return "Coverage";
        case Command::LearnRanking: return "LearnRanking";
        case Command::LearnMetric: return "LearnMetric";
        case Command::Calibrate: return "Calibrate";
    }
    return "unknown";
}

Command command_from_string(const std::string& name) {
    if (name == "BreakMean" || name == "break-mean") return Command::BreakMean;
    if (name == "BreakMedian" || name == "break-median") return Command::BreakMedian;
    if (name == "BreakVariance" || name == "break-variance") return Command::BreakVariance;
    if (name == "MannWhitney" || name == "mann-whitney") return Command::MannWhitney;
    if (name == "Coverage" || name == "coverage") return Command::Coverage;
    if (name == "LearnRanking" || name == "learn-ranking") return Command::LearnRanking;
    if (name == "LearnMetric" || name == "learn-metric") return Command::LearnMetric;
    if (name == "Calibrate" || name == "calibrate") return Command::Calibrate;
    bad("unknown command '" + name + "'");
}

nlohmann::json contamination_to_json(const ContaminationSpec& spec) {
    json j;
    j["inlier_dist"] = inlier_to_json(spec.inlier_dist);
    j["outlier_rule"] = spec.outlier_rule ? outlier_to_json(*spec.outlier_rule) : json(nullptr);
    j["c_o"] = spec.c_o;
    j["alpha_o"] = spec.alpha_o;
    json placement;
    placement["kind"] = spec.placement.kind == PlacementKind::Append ? "Append" : "Shuffle";
    if (spec.placement.shuffle_seed) placement["seed"] = *spec.placement.shuffle_seed;
    j["placement"] = placement;
    return j;
}

ContaminationSpec contamination_from_json(const json& j) {
    ContaminationSpec spec;
    if (j.contains("inlier_dist") && !j.at("inlier_dist").is_null()) {
        spec.inlier_dist = inlier_from_json(j.at("inlier_dist"));
    }
    if (j.contains("outlier_rule") && !j.at("outlier_rule").is_null()) {
        spec.outlier_rule = outlier_from_json(j.at("outlier_rule"));
    }
    spec.c_o = field(j, "c_o", 1.0);
    spec.alpha_o = field(j, "alpha_o", 0.5);
    if (j.contains("placement") && !j.at("placement").is_null()) {
        const json& p = j.at("placement");
        const std::string kind = field<std::string>(p, "kind", "Append");
        if (kind == "Append") {
            spec.placement.kind = PlacementKind::Append;
        } else if (kind == "Shuffle") {
            spec.placement.kind = PlacementKind::Shuffle;
            spec.placement.shuffle_seed = optional_field<std::uint64_t>(p, "seed");
        } else {
            bad("unknown placement '" + kind + "'");
        }
    }
    return spec;
}

nlohmann::json to_json(const ExperimentConfig& config) {
    json j;
    j["command"] = to_string(config.command);
    j["n_grid"] = config.n_grid;
    j["runs"] = config.runs;
    j["mapping"] = mapping_to_string(config.mapping);
    j["contamination"] = contamination_to_json(config.contamination);
    j["seed"] = config.seed;
    j["out"] = config.out;
    j["k_override"] = config.k_override ? json(*config.k_override) : json(nullptr);
    j["trim"] = config.trim;
    json coverage;
    coverage["path"] = config.coverage.path == BoundKind::Chebyshev ? "Chebyshev" : "SubGaussian";
    coverage["delta_points"] = config.coverage.delta_points;
    coverage["log_deltas"] = config.coverage.log_deltas;
    coverage["scale"] = config.coverage.scale ? json(*config.coverage.scale) : json(nullptr);
    j["coverage"] = coverage;
    json learning;
    learning["n_train"] = config.learning.n_train;
    learning["n_test"] = config.learning.n_test;
    learning["dim"] = config.learning.dim;
    learning["noise_sd"] = config.learning.noise_sd;
    learning["epochs"] = config.learning.epochs;
    learning["mou_epochs"] =
        config.learning.mou_epochs ? json(*config.learning.mou_epochs) : json(nullptr);
    learning["step0"] = config.learning.step0;
    learning["step_tau"] = config.learning.step_tau;
    learning["mou_step0"] =
        config.learning.mou_step0 ? json(*config.learning.mou_step0) : json(nullptr);
    learning["mou_step_tau"] = config.learning.mou_step_tau;
    learning["mou_warmup"] = config.learning.mou_warmup;
    learning["mou_restarts"] = config.learning.mou_restarts;
    learning["init_scale"] = config.learning.init_scale;
    learning["k_blocks"] = config.learning.k_blocks ? json(*config.learning.k_blocks) : json(nullptr);
    learning["lambda"] = config.learning.lambda;
    learning["fraction"] = config.learning.fraction;
    learning["box_width"] =
        config.learning.box_width ? json(*config.learning.box_width) : json(nullptr);
    learning["dataset_csv"] =
        config.learning.dataset_csv ? json(*config.learning.dataset_csv) : json(nullptr);
    learning["test_csv"] = config.learning.test_csv ? json(*config.learning.test_csv) : json(nullptr);
    j["learning"] = learning;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) bad("config root must be a JSON object");
    ExperimentConfig config;
    if (j.contains("command")) {
        config.command = command_from_string(field<std::string>(j, "command", "BreakMean"));
    }
    config.n_grid = field(j, "n_grid", std::vector<long>{});
    config.runs = field<long>(j, "runs", 1);
    if (config.runs < 1) bad("runs must be >= 1");
    for (std::size_t i = 1; i < config.n_grid.size(); ++i) {
        if (config.n_grid[i] <= config.n_grid[i - 1]) bad("n_grid must be strictly ascending");
    }
    config.mapping = mapping_from_string(field<std::string>(j, "mapping", "Harmonic"));
    if (j.contains("contamination") && !j.at("contamination").is_null()) {
        config.contamination = contamination_from_json(j.at("contamination"));
    }
    config.seed = field<std::uint64_t>(j, "seed", 0);
    config.out = field<std::string>(j, "out", "");
    config.k_override = optional_field<long>(j, "k_override");
    config.trim = field(j, "trim", 0.05);
    if (j.contains("coverage") && !j.at("coverage").is_null()) {
        const json& c = j.at("coverage");
        config.coverage.path = path_from_string(field<std::string>(c, "path", "Chebyshev"));
        config.coverage.delta_points = field(c, "delta_points", 5);
        if (config.coverage.delta_points < 1) bad("delta_points must be >= 1");
        config.coverage.log_deltas = field(c, "log_deltas", std::vector<double>{});
        config.coverage.scale = optional_field<double>(c, "scale");
    }
    if (j.contains("learning") && !j.at("learning").is_null()) {
        const json& l = j.at("learning");
        config.learning.n_train = field<long>(l, "n_train", 200);
        config.learning.n_test = field<long>(l, "n_test", 200);
        config.learning.dim = field<long>(l, "dim", 5);
        config.learning.noise_sd = field(l, "noise_sd", 0.1);
        config.learning.epochs = field<long>(l, "epochs", 300);
        config.learning.mou_epochs = optional_field<long>(l, "mou_epochs");
        config.learning.step0 = field(l, "step0", 0.5);
        config.learning.step_tau = field(l, "step_tau", 1.0);
        config.learning.mou_step0 = optional_field<double>(l, "mou_step0");
        config.learning.mou_step_tau = field(l, "mou_step_tau", 1.0);
        config.learning.mou_warmup = field<long>(l, "mou_warmup", 0);
        config.learning.mou_restarts = field<long>(l, "mou_restarts", 0);
        config.learning.init_scale = field(l, "init_scale", 0.1);
        config.learning.k_blocks = optional_field<long>(l, "k_blocks");
        config.learning.lambda = field(l, "lambda", 10.0);
        config.learning.fraction = field(l, "fraction", 0.05);
        config.learning.box_width = optional_field<double>(l, "box_width");
        config.learning.dataset_csv = optional_field<std::string>(l, "dataset_csv");
        config.learning.test_csv = optional_field<std::string>(l, "test_csv");
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
    }
    return config_from_json(j);
}

}  // namespace mom::harness
