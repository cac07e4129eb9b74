#ifndef MOM_HARNESS_CONFIG_HPP
#define MOM_HARNESS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mom/bounds.hpp"
#include "mom/calibration.hpp"
#include "mom/contamination.hpp"

namespace mom::harness {

/// Configuration problems (bad JSON, unknown enum values, missing fields).
/// Distinct from numeric errors so the CLI can map them to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class Command {
    BreakMean,
    BreakMedian,
    BreakVariance,
    MannWhitney,
    Coverage,
    LearnRanking,
    LearnMetric,
    Calibrate,
};

const char* to_string(Command command);
Command command_from_string(const std::string& name);

struct CoverageParams {
    BoundKind path = BoundKind::Chebyshev;  // Chebyshev or SubGaussian
    int delta_points = 5;
    std::vector<double> log_deltas;      // explicit points override the spacing
    std::optional<double> scale;         // sigma (Chebyshev) or rho (SubGaussian)
};

struct LearningParams {
    long n_train = 200;
    long n_test = 200;
    long dim = 5;
    double noise_sd = 0.1;
    long epochs = 300;
    std::optional<long> mou_epochs;  // median-block descent budget; defaults to `epochs`
    double step0 = 0.5;
    double step_tau = 1.0;            // decay delay of the full-batch schedule
    std::optional<double> mou_step0;  // defaults to step0
    double mou_step_tau = 1.0;        // decay delay of the median-block schedule
    long mou_warmup = 0;              // step ramp length of the median-block descent
    long mou_restarts = 0;            // extra seeded attempts when the objective stalls
    double init_scale = 0.1;          // ranking: sd of the random initial parameter
    std::optional<long> k_blocks;        // default: subgaussian rule on the contaminated size
    double lambda = 10.0;
    double fraction = 0.05;
    std::optional<double> box_width;
    std::optional<std::string> dataset_csv;  // replaces the synthetic instance
    std::optional<std::string> test_csv;
};

struct ExperimentConfig {
    Command command = Command::BreakMean;
    std::vector<long> n_grid;
    long runs = 1;
    MappingKind mapping = MappingKind::Harmonic;
    ContaminationSpec contamination;
    std::uint64_t seed = 0;
    std::string out;
    // command-specific knobs
    std::optional<long> k_override;
    double trim = 0.05;
    CoverageParams coverage;
    LearningParams learning;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

nlohmann::json contamination_to_json(const ContaminationSpec& spec);
ContaminationSpec contamination_from_json(const nlohmann::json& j);

}  // namespace mom::harness

#endif
