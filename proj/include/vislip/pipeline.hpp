#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vislip/config.hpp"

namespace vislip {

/// Artifact paths inside a run directory.
namespace artifacts {
std::string dataset(Method m);          // datasets/<method>.csv
std::string dataset_sidecar(Method m);  // datasets/<method>.json
std::string model(Method m);            // models/<method>.json
std::string metrics(Method m);          // metrics/<method>.json
std::string predictions(Method m);      // metrics/<method>_predictions.csv
std::string cv_table(Method m);         // metrics/<method>_cv.csv
inline constexpr const char* kTrials = "collection/trials.csv";
inline constexpr const char* kTrajectories = "collection/trajectories.csv";
inline constexpr const char* kCollection = "collection/summary.json";
inline constexpr const char* kEstimation = "metrics/summary.json";
inline constexpr const char* kStabilization = "stabilize/summary.json";
std::string outcomes(const std::string& controller);  // stabilize/<name>_outcomes.csv
std::string traces(const std::string& controller);    // stabilize/<name>_traces.csv
inline constexpr const char* kNoAction = "no_action";

/// Series written by cmd_report, plus the text summary.
std::vector<std::string> report_files();
}  // namespace artifacts

struct CommandResult {
    std::filesystem::path run_dir;
    std::vector<std::string> written;  // relative paths
};

CommandResult cmd_collect(const ExperimentConfig& cfg);
CommandResult cmd_train_eval(const ExperimentConfig& cfg);
CommandResult cmd_stabilize(const ExperimentConfig& cfg);
CommandResult cmd_report(const std::filesystem::path& run_dir);
/// collect -> train-eval -> stabilize -> report.
CommandResult cmd_demo(const ExperimentConfig& cfg);

/// Artifacts cmd_report needs, given the methods of a run.
std::vector<std::string> expected_run_artifacts(const std::vector<Method>& methods);

}  // namespace vislip
