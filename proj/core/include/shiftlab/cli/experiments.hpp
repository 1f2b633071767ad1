#pragma once

// Experiment drivers. Each kind maps a parsed config to a CSV table plus a
// summary with deterministic formatting (12 significant digits, stable row
// order), so identical configs reproduce byte-identical CSV output.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shiftlab/cli/config.hpp"

namespace shiftlab::cli {

using SummaryValue = std::variant<bool, std::int64_t, double, std::string>;

struct ResultRecord {
  std::string id;
  ExperimentKind kind = ExperimentKind::Temperedness;
  std::string digest;
  std::string unit;  // "nats" or "bits"; entropy-valued outputs honor it
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // cells preformatted
  std::vector<std::pair<std::string, SummaryValue>> summary;
  std::string resolved;  // config as actually run, seed override applied
  double wall_ms = 0.0;
};

// Runs the configured experiment. The seed override and worker count come
// from options; library errors propagate untouched. Sampled-point loops are
// indexed by slot, so the thread count never changes the results.
ResultRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string format_value(double v);  // %.12g
std::string csv_text(const ResultRecord& record);
std::string summary_json_text(const ResultRecord& record);

struct OutputPaths {
  std::string csv_path;
  std::string summary_path;
};

// Atomic (temp file + rename) writes of <out>/<id>.csv and
// <out>/<id>.summary.json.
OutputPaths write_result_files(const ResultRecord& record, const std::string& out_dir);

// One line per experiment kind, stable order and content.
std::string experiment_catalog_text();

}  // namespace shiftlab::cli
