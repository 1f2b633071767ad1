#pragma once

// Strict experiment configuration. JSON comes in, a typed config plus its
// canonical resolved form come out. Unknown keys are rejected at every level
// and unused sections are refused, so a reproduction can never silently drop
// a parameter.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shiftlab/entropy.hpp"
#include "shiftlab/folner.hpp"
#include "shiftlab/group.hpp"
#include "shiftlab/measure.hpp"
#include "shiftlab/shift.hpp"

namespace shiftlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExperimentKind {
  Temperedness,
  Growth,
  TopologicalEntropy,
  BowenEntropy,
  Smb,
  BrinKatok,
  ClaimRate,
  Stirling,
  GenericCertificate,
};

// Stable catalog order; names double as the config "kind" strings.
const std::vector<ExperimentKind>& all_experiment_kinds();
std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

struct GroupSpec {
  GroupKind kind = GroupKind::Z;
  FolnerFamily family = FolnerFamily::Boxes;
};

// Subshift over the group; forbidden words sit on contiguous coordinates
// 0..len-1 of the Z axis.
struct ShiftSpec {
  bool present = false;
  int alphabet = 2;
  std::vector<std::vector<Symbol>> forbidden_words;
};

struct MeasureSpec {
  bool present = false;
  InvariantMeasure::Kind kind = InvariantMeasure::Kind::Bernoulli;
  std::vector<double> probabilities;                 // Bernoulli
  std::vector<std::vector<double>> transition;       // Markov
  std::optional<std::vector<double>> stationary;     // Markov, optional
};

// Base point for a certificate: either sampled from the measure with the run
// seed or an explicit periodic configuration.
struct PointSpec {
  bool sampled = true;
  std::vector<std::int64_t> periods;
  std::vector<Symbol> pattern;
};

struct TemperednessParams {
  int n_max = 2;
  std::int64_t union_cap = 100'000'000;
};

struct GrowthParams {
  int n_lo = 2;
  int n_hi = 2;
};

struct TopologicalEntropyParams {
  std::vector<int> orders;
  double epsilon = 0.5;
};

struct BowenEntropyParams {
  double epsilon = 0.5;
  int n_lo = 1;
  int n_hi = 1;
  CoverSolver solver = CoverSolver::Greedy;
  double s_tolerance = 1e-3;
  CoverLimits limits;
};

struct SmbParams {
  std::vector<int> schedule;
  int points = 1;
};

struct BrinKatokParams {
  std::vector<int> schedule;
  int points = 1;
  double delta = 0.5;
};

struct ClaimRateParams {
  std::vector<std::int64_t> orders;
  double tolerance = 0.0;
  int depth = 1;
  double epsilon = 0.5;
};

struct StirlingParams {
  std::vector<std::int64_t> n;
  std::vector<double> q;
  std::vector<int> a;
};

struct GenericCertificateParams {
  int m_max = 1;
  std::vector<int> schedule;
  PointSpec point;
};

using ExperimentParams =
    std::variant<TemperednessParams, GrowthParams, TopologicalEntropyParams, BowenEntropyParams,
                 SmbParams, BrinKatokParams, ClaimRateParams, StirlingParams,
                 GenericCertificateParams>;

struct ExperimentConfig {
  std::string id;
  ExperimentKind kind = ExperimentKind::Temperedness;
  GroupSpec group;
  ShiftSpec shift;
  MeasureSpec measure;
  ExperimentParams params;
  std::uint64_t seed = 0;
  bool bits = false;
  // Canonical JSON with every default filled in; the digest input.
  std::string resolved;
};

// Throws ConfigError on malformed JSON, unknown keys, missing or mistyped
// fields, and sections the experiment kind does not consume.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Canonical one-line JSON with every default filled in; recompute after
// mutating a parsed config (e.g. a seed override).
std::string resolved_config_text(const ExperimentConfig& config);

// FNV-1a over the resolved form, 16 hex digits; platform independent.
std::string config_digest(const ExperimentConfig& config);

AmenableGroup build_group(const GroupSpec& spec);
FolnerSequence build_folner(const GroupSpec& spec);
Subshift build_subshift(const ExperimentConfig& config);
InvariantMeasure build_measure(const ExperimentConfig& config);

struct RunOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
};

}  // namespace shiftlab::cli
