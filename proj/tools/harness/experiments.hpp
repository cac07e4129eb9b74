#ifndef MOM_HARNESS_EXPERIMENTS_HPP
#define MOM_HARNESS_EXPERIMENTS_HPP

#include <string>
#include <utility>
#include <vector>

#include "harness/config.hpp"
#include "harness/table.hpp"

namespace mom::harness {

/// Main table plus named side tables (per-epoch learning traces); the CLI
/// writes the side tables next to the main output as <stem>_<name>.csv.
struct RunOutput {
    ResultTable table;
    std::vector<std::pair<std::string, ResultTable>> extra;
};

ResultTable run_break_experiment(const ExperimentConfig& config);
ResultTable run_coverage(const ExperimentConfig& config);
RunOutput run_learning(const ExperimentConfig& config);
ResultTable run_calibrate(const ExperimentConfig& config);

RunOutput run_experiment(const ExperimentConfig& config);

/// Degree-2 variance U-statistic in its two-pass O(n) form; algebraically
/// identical to u_statistic with the variance kernel.
double variance_u_stat(const Sample& sample);

/// Mann-Whitney two-sample U-statistic in O((n+m) log m) via sorting.
double mann_whitney_u_stat(const Sample& x, const Sample& y);

}  // namespace mom::harness

#endif
