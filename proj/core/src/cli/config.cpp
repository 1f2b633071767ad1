#include "shiftlab/cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "shiftlab/errors.hpp"

namespace shiftlab::cli {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      fail(std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

const ordered_json* find(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const ordered_json& require(const ordered_json& j, const char* key, const char* where) {
  const auto* p = find(j, key);
  if (p == nullptr) fail(std::string(where) + " is missing '" + key + "'");
  return *p;
}

std::int64_t as_int(const ordered_json& v, const char* name, std::int64_t min_value) {
  if (!v.is_number_integer()) fail(std::string("'") + name + "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < min_value) {
    fail(std::string("'") + name + "' must be >= " + std::to_string(min_value));
  }
  return x;
}

double as_double(const ordered_json& v, const char* name) {
  if (!v.is_number()) fail(std::string("'") + name + "' must be a number");
  return v.get<double>();
}

double as_positive(const ordered_json& v, const char* name) {
  const double x = as_double(v, name);
  if (!(x > 0.0)) fail(std::string("'") + name + "' must be positive");
  return x;
}

std::string as_string(const ordered_json& v, const char* name) {
  if (!v.is_string()) fail(std::string("'") + name + "' must be a string");
  return v.get<std::string>();
}

bool as_bool(const ordered_json& v, const char* name) {
  if (!v.is_boolean()) fail(std::string("'") + name + "' must be a boolean");
  return v.get<bool>();
}

template <typename T, typename Elem>
std::vector<T> as_array(const ordered_json& v, const char* name, Elem&& elem) {
  if (!v.is_array() || v.empty()) {
    fail(std::string("'") + name + "' must be a nonempty array");
  }
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(elem(e));
  return out;
}

template <typename T>
void require_increasing(const std::vector<T>& xs, const char* name) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] <= xs[i - 1]) {
      fail(std::string("'") + name + "' must be strictly increasing");
    }
  }
}

std::vector<int> int_schedule(const ordered_json& v, const char* name) {
  auto xs = as_array<int>(
      v, name, [&](const ordered_json& e) { return static_cast<int>(as_int(e, name, 1)); });
  require_increasing(xs, name);
  return xs;
}

GroupSpec parse_group(const ordered_json& j) {
  check_keys(j, {"kind", "family"}, "group");
  GroupSpec spec;
  const auto kind = as_string(require(j, "kind", "group"), "group.kind");
  if (kind == "Z") {
    spec.kind = GroupKind::Z;
  } else if (kind == "Z2") {
    spec.kind = GroupKind::Z2;
  } else if (kind == "Z3") {
    spec.kind = GroupKind::Z3;
  } else if (kind == "heisenberg") {
    spec.kind = GroupKind::Heisenberg;
  } else {
    fail("group.kind must be one of Z, Z2, Z3, heisenberg");
  }
  if (const auto* fam = find(j, "family")) {
    const auto name = as_string(*fam, "group.family");
    if (name == "boxes") {
      spec.family = FolnerFamily::Boxes;
    } else if (name == "shifted_boxes") {
      spec.family = FolnerFamily::ShiftedBoxes;
    } else {
      fail("group.family must be boxes or shifted_boxes");
    }
  }
  return spec;
}

ShiftSpec parse_shift(const ordered_json& j) {
  check_keys(j, {"alphabet", "forbidden_words"}, "shift");
  ShiftSpec spec;
  spec.present = true;
  spec.alphabet = static_cast<int>(as_int(require(j, "alphabet", "shift"), "shift.alphabet", 2));
  if (const auto* words = find(j, "forbidden_words")) {
    if (!words->is_array()) fail("'shift.forbidden_words' must be an array");
    for (const auto& w : *words) {
      if (!w.is_array() || w.empty()) {
        fail("each forbidden word must be a nonempty array of symbols");
      }
      std::vector<Symbol> word;
      for (const auto& s : w) {
        const auto sym = as_int(s, "forbidden word symbol", 0);
        if (sym >= spec.alphabet) fail("forbidden word symbol outside the alphabet");
        word.push_back(static_cast<Symbol>(sym));
      }
      spec.forbidden_words.push_back(std::move(word));
    }
  }
  return spec;
}

MeasureSpec parse_measure(const ordered_json& j) {
  MeasureSpec spec;
  spec.present = true;
  const auto type = as_string(require(j, "type", "measure"), "measure.type");
  if (type == "bernoulli") {
    check_keys(j, {"type", "p"}, "measure");
    spec.kind = InvariantMeasure::Kind::Bernoulli;
    spec.probabilities = as_array<double>(require(j, "p", "measure"), "measure.p",
                                          [](const ordered_json& e) {
                                            return as_double(e, "measure.p");
                                          });
  } else if (type == "markov") {
    check_keys(j, {"type", "transition", "stationary"}, "measure");
    spec.kind = InvariantMeasure::Kind::Markov;
    const auto& t = require(j, "transition", "measure");
    if (!t.is_array() || t.empty()) fail("'measure.transition' must be a nonempty array");
    for (const auto& row : t) {
      spec.transition.push_back(as_array<double>(row, "measure.transition row",
                                                 [](const ordered_json& e) {
                                                   return as_double(e, "measure.transition");
                                                 }));
    }
    if (const auto* st = find(j, "stationary")) {
      spec.stationary = as_array<double>(*st, "measure.stationary", [](const ordered_json& e) {
        return as_double(e, "measure.stationary");
      });
    }
  } else {
    fail("measure.type must be bernoulli or markov");
  }
  return spec;
}

PointSpec parse_point(const ordered_json& j) {
  PointSpec point;
  const auto type = as_string(require(j, "type", "params.point"), "point.type");
  if (type == "sample") {
    check_keys(j, {"type"}, "params.point");
    point.sampled = true;
  } else if (type == "periodic") {
    check_keys(j, {"type", "periods", "pattern"}, "params.point");
    point.sampled = false;
    point.periods = as_array<std::int64_t>(require(j, "periods", "params.point"),
                                           "point.periods", [](const ordered_json& e) {
                                             return as_int(e, "point.periods", 1);
                                           });
    point.pattern = as_array<Symbol>(require(j, "pattern", "params.point"), "point.pattern",
                                     [](const ordered_json& e) {
                                       return static_cast<Symbol>(as_int(e, "point.pattern", 0));
                                     });
  } else {
    fail("point.type must be sample or periodic");
  }
  return point;
}

ExperimentParams parse_params(ExperimentKind kind, const ordered_json& j) {
  switch (kind) {
    case ExperimentKind::Temperedness: {
      check_keys(j, {"n_max", "union_cap"}, "params");
      TemperednessParams p;
      p.n_max = static_cast<int>(as_int(require(j, "n_max", "params"), "n_max", 2));
      if (const auto* cap = find(j, "union_cap")) p.union_cap = as_int(*cap, "union_cap", 1);
      return p;
    }
    case ExperimentKind::Growth: {
      check_keys(j, {"n_lo", "n_hi"}, "params");
      GrowthParams p;
      if (const auto* lo = find(j, "n_lo")) p.n_lo = static_cast<int>(as_int(*lo, "n_lo", 2));
      p.n_hi = static_cast<int>(as_int(require(j, "n_hi", "params"), "n_hi", p.n_lo));
      return p;
    }
    case ExperimentKind::TopologicalEntropy: {
      check_keys(j, {"orders", "epsilon"}, "params");
      TopologicalEntropyParams p;
      p.orders = int_schedule(require(j, "orders", "params"), "orders");
      p.epsilon = as_positive(require(j, "epsilon", "params"), "epsilon");
      return p;
    }
    case ExperimentKind::BowenEntropy: {
      check_keys(j, {"epsilon", "n_lo", "n_hi", "solver", "s_tolerance", "universe_cap",
                     "candidate_cap", "node_cap"},
                 "params");
      BowenEntropyParams p;
      p.epsilon = as_positive(require(j, "epsilon", "params"), "epsilon");
      p.n_lo = static_cast<int>(as_int(require(j, "n_lo", "params"), "n_lo", 1));
      p.n_hi = static_cast<int>(as_int(require(j, "n_hi", "params"), "n_hi", p.n_lo));
      if (const auto* s = find(j, "solver")) {
        const auto name = as_string(*s, "solver");
        if (name == "greedy") {
          p.solver = CoverSolver::Greedy;
        } else if (name == "exact") {
          p.solver = CoverSolver::Exact;
        } else {
          fail("solver must be greedy or exact");
        }
      }
      if (const auto* tol = find(j, "s_tolerance")) p.s_tolerance = as_positive(*tol, "s_tolerance");
      if (const auto* cap = find(j, "universe_cap")) {
        p.limits.universe_cap = as_int(*cap, "universe_cap", 1);
      }
      if (const auto* cap = find(j, "candidate_cap")) {
        p.limits.candidate_cap = as_int(*cap, "candidate_cap", 1);
      }
      if (const auto* cap = find(j, "node_cap")) p.limits.node_cap = as_int(*cap, "node_cap", 1);
      return p;
    }
    case ExperimentKind::Smb: {
      check_keys(j, {"schedule", "points"}, "params");
      SmbParams p;
      p.schedule = int_schedule(require(j, "schedule", "params"), "schedule");
      p.points = static_cast<int>(as_int(require(j, "points", "params"), "points", 1));
      return p;
    }
    case ExperimentKind::BrinKatok: {
      check_keys(j, {"schedule", "points", "delta"}, "params");
      BrinKatokParams p;
      p.schedule = int_schedule(require(j, "schedule", "params"), "schedule");
      p.points = static_cast<int>(as_int(require(j, "points", "params"), "points", 1));
      p.delta = as_positive(require(j, "delta", "params"), "delta");
      return p;
    }
    case ExperimentKind::ClaimRate: {
      check_keys(j, {"orders", "tolerance", "depth", "epsilon"}, "params");
      ClaimRateParams p;
      p.orders = as_array<std::int64_t>(require(j, "orders", "params"), "orders",
                                        [](const ordered_json& e) {
                                          return as_int(e, "orders", 1);
                                        });
      require_increasing(p.orders, "orders");
      p.tolerance = as_positive(require(j, "tolerance", "params"), "tolerance");
      if (const auto* d = find(j, "depth")) p.depth = static_cast<int>(as_int(*d, "depth", 1));
      if (const auto* e = find(j, "epsilon")) p.epsilon = as_positive(*e, "epsilon");
      return p;
    }
    case ExperimentKind::Stirling: {
      check_keys(j, {"n", "q", "a"}, "params");
      StirlingParams p;
      p.n = as_array<std::int64_t>(require(j, "n", "params"), "n", [](const ordered_json& e) {
        return as_int(e, "n", 1);
      });
      p.q = as_array<double>(require(j, "q", "params"), "q", [](const ordered_json& e) {
        const double x = as_double(e, "q");
        if (!(x > 0.0 && x < 1.0)) fail("'q' entries must lie in (0, 1)");
        return x;
      });
      p.a = as_array<int>(require(j, "a", "params"), "a", [](const ordered_json& e) {
        return static_cast<int>(as_int(e, "a", 2));
      });
      return p;
    }
    case ExperimentKind::GenericCertificate: {
      check_keys(j, {"m_max", "schedule", "point"}, "params");
      GenericCertificateParams p;
      p.m_max = static_cast<int>(as_int(require(j, "m_max", "params"), "m_max", 1));
      p.schedule = int_schedule(require(j, "schedule", "params"), "schedule");
      p.point = parse_point(require(j, "point", "params"));
      return p;
    }
  }
  fail("unsupported experiment kind");
}

enum class Section { Required, Optional, Forbidden };

struct SectionRules {
  Section group = Section::Forbidden;
  Section shift = Section::Forbidden;
  Section measure = Section::Forbidden;
};

SectionRules rules_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Temperedness:
    case ExperimentKind::Growth:
      return {Section::Required, Section::Forbidden, Section::Forbidden};
    case ExperimentKind::TopologicalEntropy:
    case ExperimentKind::BowenEntropy:
      return {Section::Required, Section::Required, Section::Forbidden};
    case ExperimentKind::Smb:
    case ExperimentKind::BrinKatok:
      return {Section::Required, Section::Forbidden, Section::Required};
    case ExperimentKind::ClaimRate:
    case ExperimentKind::GenericCertificate:
      return {Section::Required, Section::Optional, Section::Required};
    case ExperimentKind::Stirling:
      return {Section::Forbidden, Section::Forbidden, Section::Forbidden};
  }
  fail("unsupported experiment kind");
}

void enforce_section(Section rule, bool present, const char* name, ExperimentKind kind) {
  if (rule == Section::Required && !present) {
    fail(std::string("'") + name + "' section is required for " + kind_name(kind));
  }
  if (rule == Section::Forbidden && present) {
    fail(std::string("'") + name + "' section is not used by " + kind_name(kind));
  }
}

ordered_json resolved_group(const GroupSpec& g) {
  ordered_json j;
  switch (g.kind) {
    case GroupKind::Z: j["kind"] = "Z"; break;
    case GroupKind::Z2: j["kind"] = "Z2"; break;
    case GroupKind::Z3: j["kind"] = "Z3"; break;
    case GroupKind::Heisenberg: j["kind"] = "heisenberg"; break;
  }
  j["family"] = g.family == FolnerFamily::Boxes ? "boxes" : "shifted_boxes";
  return j;
}

ordered_json resolved_params(const ExperimentConfig& c) {
  ordered_json j;
  switch (c.kind) {
    case ExperimentKind::Temperedness: {
      const auto& p = std::get<TemperednessParams>(c.params);
      j["n_max"] = p.n_max;
      j["union_cap"] = p.union_cap;
      break;
    }
    case ExperimentKind::Growth: {
      const auto& p = std::get<GrowthParams>(c.params);
      j["n_lo"] = p.n_lo;
      j["n_hi"] = p.n_hi;
      break;
    }
    case ExperimentKind::TopologicalEntropy: {
      const auto& p = std::get<TopologicalEntropyParams>(c.params);
      j["orders"] = p.orders;
      j["epsilon"] = p.epsilon;
      break;
    }
    case ExperimentKind::BowenEntropy: {
      const auto& p = std::get<BowenEntropyParams>(c.params);
      j["epsilon"] = p.epsilon;
      j["n_lo"] = p.n_lo;
      j["n_hi"] = p.n_hi;
      j["solver"] = p.solver == CoverSolver::Greedy ? "greedy" : "exact";
      j["s_tolerance"] = p.s_tolerance;
      j["universe_cap"] = p.limits.universe_cap;
      j["candidate_cap"] = p.limits.candidate_cap;
      j["node_cap"] = p.limits.node_cap;
      break;
    }
    case ExperimentKind::Smb: {
      const auto& p = std::get<SmbParams>(c.params);
      j["schedule"] = p.schedule;
      j["points"] = p.points;
      break;
    }
    case ExperimentKind::BrinKatok: {
      const auto& p = std::get<BrinKatokParams>(c.params);
      j["schedule"] = p.schedule;
      j["points"] = p.points;
      j["delta"] = p.delta;
      break;
    }
    case ExperimentKind::ClaimRate: {
      const auto& p = std::get<ClaimRateParams>(c.params);
      j["orders"] = p.orders;
      j["tolerance"] = p.tolerance;
      j["depth"] = p.depth;
      j["epsilon"] = p.epsilon;
      break;
    }
    case ExperimentKind::Stirling: {
      const auto& p = std::get<StirlingParams>(c.params);
      j["n"] = p.n;
      j["q"] = p.q;
      j["a"] = p.a;
      break;
    }
    case ExperimentKind::GenericCertificate: {
      const auto& p = std::get<GenericCertificateParams>(c.params);
      j["m_max"] = p.m_max;
      j["schedule"] = p.schedule;
      ordered_json pt;
      if (p.point.sampled) {
        pt["type"] = "sample";
      } else {
        pt["type"] = "periodic";
        pt["periods"] = p.point.periods;
        pt["pattern"] = p.point.pattern;
      }
      j["point"] = pt;
      break;
    }
  }
  return j;
}

}  // namespace

std::string resolved_config_text(const ExperimentConfig& c) {
  ordered_json j;
  j["id"] = c.id;
  j["kind"] = kind_name(c.kind);
  const auto rules = rules_for(c.kind);
  if (rules.group != Section::Forbidden) j["group"] = resolved_group(c.group);
  if (c.shift.present) {
    ordered_json s;
    s["alphabet"] = c.shift.alphabet;
    s["forbidden_words"] = c.shift.forbidden_words;
    j["shift"] = s;
  }
  if (c.measure.present) {
    ordered_json m;
    if (c.measure.kind == InvariantMeasure::Kind::Bernoulli) {
      m["type"] = "bernoulli";
      m["p"] = c.measure.probabilities;
    } else {
      m["type"] = "markov";
      m["transition"] = c.measure.transition;
      if (c.measure.stationary) m["stationary"] = *c.measure.stationary;
    }
    j["measure"] = m;
  }
  j["params"] = resolved_params(c);
  j["seed"] = c.seed;
  j["output"]["bits"] = c.bits;
  j["version"] = kToolVersion;
  return j.dump();
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds{
      ExperimentKind::Temperedness,      ExperimentKind::Growth,
      ExperimentKind::TopologicalEntropy, ExperimentKind::BowenEntropy,
      ExperimentKind::Smb,               ExperimentKind::BrinKatok,
      ExperimentKind::ClaimRate,         ExperimentKind::Stirling,
      ExperimentKind::GenericCertificate};
  return kinds;
}

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Temperedness: return "temperedness";
    case ExperimentKind::Growth: return "growth";
    case ExperimentKind::TopologicalEntropy: return "topological_entropy";
    case ExperimentKind::BowenEntropy: return "bowen_entropy";
    case ExperimentKind::Smb: return "smb";
    case ExperimentKind::BrinKatok: return "brin_katok";
    case ExperimentKind::ClaimRate: return "claim_rate";
    case ExperimentKind::Stirling: return "stirling";
    case ExperimentKind::GenericCertificate: return "generic_certificate";
  }
  fail("unsupported experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
  for (const auto kind : all_experiment_kinds()) {
    if (kind_name(kind) == name) return kind;
  }
  fail("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const auto j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded()) fail("invalid JSON");
  check_keys(j, {"id", "kind", "group", "shift", "measure", "params", "seed", "output"},
             "config");

  ExperimentConfig config;
  config.id = as_string(require(j, "id", "config"), "id");
  if (config.id.empty()) fail("'id' must be nonempty");
  for (const char ch : config.id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
    if (!ok) fail("'id' may contain only letters, digits, '_' and '-'");
  }
  config.kind = kind_from_name(as_string(require(j, "kind", "config"), "kind"));

  const auto rules = rules_for(config.kind);
  const auto* group = find(j, "group");
  const auto* shift = find(j, "shift");
  const auto* measure = find(j, "measure");
  enforce_section(rules.group, group != nullptr, "group", config.kind);
  enforce_section(rules.shift, shift != nullptr, "shift", config.kind);
  enforce_section(rules.measure, measure != nullptr, "measure", config.kind);
  if (group != nullptr) config.group = parse_group(*group);
  if (shift != nullptr) config.shift = parse_shift(*shift);
  if (measure != nullptr) config.measure = parse_measure(*measure);

  config.params = parse_params(config.kind, require(j, "params", "config"));

  if (const auto* seed = find(j, "seed")) {
    if (!seed->is_number_unsigned()) fail("'seed' must be a nonnegative integer");
    config.seed = seed->get<std::uint64_t>();
  }
  if (const auto* output = find(j, "output")) {
    check_keys(*output, {"bits"}, "output");
    if (const auto* bits = find(*output, "bits")) config.bits = as_bool(*bits, "output.bits");
  }

  config.resolved = resolved_config_text(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string config_digest(const ExperimentConfig& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char ch : config.resolved) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

AmenableGroup build_group(const GroupSpec& spec) { return AmenableGroup(spec.kind); }

FolnerSequence build_folner(const GroupSpec& spec) {
  return FolnerSequence(build_group(spec), spec.family);
}

Subshift build_subshift(const ExperimentConfig& config) {
  const auto group = build_group(config.group);
  int alphabet = config.shift.alphabet;
  if (!config.shift.present) {
    if (!config.measure.present) fail("'shift' section is required");
    alphabet = config.measure.kind == InvariantMeasure::Kind::Bernoulli
                   ? static_cast<int>(config.measure.probabilities.size())
                   : static_cast<int>(config.measure.transition.size());
  }
  std::vector<Cylinder> forbidden;
  for (const auto& word : config.shift.forbidden_words) {
    std::vector<Cylinder::Entry> entries;
    for (std::size_t i = 0; i < word.size(); ++i) {
      entries.emplace_back(
          GroupElement{{static_cast<std::int64_t>(i), 0, 0}, config.group.kind}, word[i]);
    }
    forbidden.emplace_back(std::move(entries));
  }
  return Subshift(group, alphabet, std::move(forbidden));
}

InvariantMeasure build_measure(const ExperimentConfig& config) {
  if (!config.measure.present) fail("'measure' section is required");
  if (config.measure.kind == InvariantMeasure::Kind::Bernoulli) {
    return InvariantMeasure::bernoulli(build_group(config.group), config.measure.probabilities);
  }
  if (config.group.kind != GroupKind::Z) {
    throw std::invalid_argument("markov measures require the Z group");
  }
  return InvariantMeasure::markov(config.measure.transition, config.measure.stationary);
}

}  // namespace shiftlab::cli
