#include "ndsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ndsim {

// ordered_json keeps declaration order for sweep axes and config echoes.
using json = nlohmann::ordered_json;

SimConfig::SimConfig() : seeds(make_seed_range(1, 20)) {}

PhyConfig SimConfig::phy_config() const {
  PhyConfig cfg;
  cfg.sir_threshold = phy.beta;
  cfg.wavelength = phy.lambda0;
  cfg.tx_power = phy.tx_power;
  cfg.gain_tx = phy.gain_tx;
  cfg.gain_rx = phy.gain_rx;
  cfg.sic = variant.sic;
  cfg.modulation_count = variant.modulation_count;
  // Perfect cancellation leaves no residual and ignores ambient noise.
  cfg.noise_floor = variant.sic == SicMode::imperfect ? phy.noise_floor : 0.0;
  cfg.residual_factor = variant.sic == SicMode::imperfect ? phy.xi : 0.0;
  return cfg;
}

void SimConfig::validate() const {
  arena_spec().validate();
  if (node_count < 2) throw std::invalid_argument("config: node_count must be at least 2");
  BeamGeometry geom(beam_count);  // validates evenness
  (void)geom;
  if (p_t < 0.0 || p_t > 1.0) throw std::invalid_argument("config: p_t must lie in [0, 1]");
  variant.validate();
  phy_config().validate();
  if (phy.xi < 0.0 || phy.xi > 1.0) throw std::invalid_argument("config: xi must lie in [0, 1]");
  if (comm_radius < near_field_radius(phy.lambda0))
    throw std::invalid_argument("config: r must be at least lambda0/(4*pi)");
  if (slot_budget < 0) throw std::invalid_argument("config: slot_budget must be nonnegative");
  if (seeds.empty()) throw std::invalid_argument("config: at least one seed is required");
  for (double t : thresholds)
    if (t <= 0.0 || t > 1.0) throw std::invalid_argument("config: thresholds must lie in (0, 1]");
  if (pbar_samples < 1) throw std::invalid_argument("config: pbar_samples must be positive");
}

std::size_t SweepSpec::grid_size() const {
  std::size_t n = 1;
  for (const auto& [name, values] : axes) n *= values.size();
  return n;
}

std::vector<std::uint64_t> make_seed_range(std::uint64_t base, int count) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  return seeds;
}

namespace {

[[noreturn]] void missing(const std::string& field) {
  throw ConfigParseError("missing required field `" + field + "`");
}

double require_number(const json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key)) missing(context + key);
  if (!obj[key].is_number()) throw ConfigParseError("field `" + context + key + "` must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigParseError("field `" + context + key + "` must be a number");
  return obj[key].get<double>();
}

int int_or(const json& obj, const std::string& key, int fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ConfigParseError("field `" + context + key + "` must be an integer");
  return obj[key].get<int>();
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw ConfigParseError("unknown field `" + context + key + "`");
  }
}

std::vector<std::uint64_t> parse_seeds(const json& spec) {
  if (spec.is_array()) {
    std::vector<std::uint64_t> seeds;
    for (const auto& s : spec) {
      if (!s.is_number_integer()) throw ConfigParseError("field `seeds` entries must be integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
    return seeds;
  }
  if (spec.is_object()) {
    reject_unknown_keys(spec, {"count", "base"}, "seeds.");
    const int count = int_or(spec, "count", 20, "seeds.");
    const std::uint64_t base = static_cast<std::uint64_t>(int_or(spec, "base", 1, "seeds."));
    if (count < 1) throw ConfigParseError("field `seeds.count` must be positive");
    return make_seed_range(base, count);
  }
  throw ConfigParseError("field `seeds` must be an array or {count, base}");
}

Variant parse_variant(const json& spec) {
  if (!spec.is_object()) throw ConfigParseError("field `variant` must be an object");
  reject_unknown_keys(spec, {"base", "sic", "h"}, "variant.");
  Variant v;
  if (spec.contains("base")) {
    const std::string base = spec["base"].get<std::string>();
    if (base == "CRA")
      v.base = BaseAlgorithm::cra;
    else if (base == "SBA")
      v.base = BaseAlgorithm::sba;
    else
      throw ConfigParseError("field `variant.base` must be \"CRA\" or \"SBA\"");
  }
  if (spec.contains("sic")) {
    const std::string sic = spec["sic"].get<std::string>();
    if (sic == "none")
      v.sic = SicMode::none;
    else if (sic == "perfect")
      v.sic = SicMode::perfect;
    else if (sic == "imperfect")
      v.sic = SicMode::imperfect;
    else
      throw ConfigParseError("field `variant.sic` must be one of none/perfect/imperfect");
  }
  v.modulation_count = int_or(spec, "h", 1, "variant.");
  return v;
}

SimConfig config_from_json(const json& root) {
  if (!root.is_object()) throw ConfigParseError("config root must be a JSON object");
  reject_unknown_keys(root,
                      {"arena", "node_count", "r", "beam_count", "p_t", "variant", "phy",
                       "slot_budget", "seeds", "thresholds", "pbar_samples"},
                      "");
  SimConfig cfg;

  if (root.contains("arena")) {
    const json& arena = root["arena"];
    if (!arena.is_object()) throw ConfigParseError("field `arena` must be an object");
    reject_unknown_keys(arena, {"a", "b"}, "arena.");
    cfg.arena_length = number_or(arena, "a", cfg.arena_length, "arena.");
    cfg.arena_width = number_or(arena, "b", cfg.arena_width, "arena.");
  }
  if (!root.contains("node_count")) missing("node_count");
  cfg.node_count = int_or(root, "node_count", 0, "");
  cfg.comm_radius = require_number(root, "r", "");
  cfg.beam_count = int_or(root, "beam_count", cfg.beam_count, "");
  cfg.p_t = number_or(root, "p_t", cfg.p_t, "");
  if (root.contains("variant")) cfg.variant = parse_variant(root["variant"]);
  if (root.contains("phy")) {
    const json& phy = root["phy"];
    if (!phy.is_object()) throw ConfigParseError("field `phy` must be an object");
    reject_unknown_keys(
        phy, {"beta", "lambda0", "tx_power", "gain_tx", "gain_rx", "noise_floor", "xi"}, "phy.");
    cfg.phy.beta = number_or(phy, "beta", cfg.phy.beta, "phy.");
    cfg.phy.lambda0 = number_or(phy, "lambda0", cfg.phy.lambda0, "phy.");
    cfg.phy.tx_power = number_or(phy, "tx_power", cfg.phy.tx_power, "phy.");
    cfg.phy.gain_tx = number_or(phy, "gain_tx", cfg.phy.gain_tx, "phy.");
    cfg.phy.gain_rx = number_or(phy, "gain_rx", cfg.phy.gain_rx, "phy.");
    cfg.phy.noise_floor = number_or(phy, "noise_floor", cfg.phy.noise_floor, "phy.");
    cfg.phy.xi = number_or(phy, "xi", cfg.phy.xi, "phy.");
  }
  cfg.slot_budget = int_or(root, "slot_budget", cfg.slot_budget, "");
  if (root.contains("seeds")) cfg.seeds = parse_seeds(root["seeds"]);
  if (root.contains("thresholds")) {
    if (!root["thresholds"].is_array()) throw ConfigParseError("field `thresholds` must be an array");
    cfg.thresholds.clear();
    for (const auto& t : root["thresholds"]) cfg.thresholds.push_back(t.get<double>());
  }
  cfg.pbar_samples = int_or(root, "pbar_samples", cfg.pbar_samples, "");

  if (const char* env = std::getenv("ND_SEED_BASE")) {
    char* end = nullptr;
    const unsigned long long base = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigParseError("ND_SEED_BASE must be an integer");
    cfg.seeds = make_seed_range(base, static_cast<int>(cfg.seeds.size()));
  }
  return cfg;
}

json parse_text(const std::string& text) {
  json root = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) throw ConfigParseError("invalid JSON");
  return root;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str());
}

}  // namespace

SimConfig parse_sim_config(const std::string& json_text) {
  return config_from_json(parse_text(json_text));
}

SimConfig load_sim_config(const std::string& path) { return config_from_json(read_file(path)); }

namespace {

SweepSpec sweep_from_json(const json& root) {
  if (!root.is_object()) throw ConfigParseError("sweep root must be a JSON object");
  reject_unknown_keys(root, {"base", "axes", "cap", "fraction_at"}, "");
  SweepSpec spec;
  if (!root.contains("base")) missing("base");
  spec.base = config_from_json(root["base"]);
  if (!root.contains("axes")) missing("axes");
  if (!root["axes"].is_object()) throw ConfigParseError("field `axes` must be an object");
  for (const auto& [name, values] : root["axes"].items()) {
    if (!values.is_array() || values.empty())
      throw ConfigParseError("axis `" + name + "` must be a nonempty array");
    std::vector<double> axis;
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigParseError("axis `" + name + "` entries must be numbers");
      axis.push_back(v.get<double>());
    }
    SimConfig probe = spec.base;
    apply_axis(probe, name, axis.front());  // rejects unknown axis names
    spec.axes.emplace_back(name, std::move(axis));
  }
  if (root.contains("cap")) {
    const int cap = int_or(root, "cap", 0, "");
    if (cap < 1) throw ConfigParseError("field `cap` must be positive");
    spec.cap = static_cast<std::size_t>(cap);
  }
  if (root.contains("fraction_at")) {
    if (!root["fraction_at"].is_array())
      throw ConfigParseError("field `fraction_at` must be an array");
    for (const auto& t : root["fraction_at"]) {
      if (!t.is_number_integer()) throw ConfigParseError("field `fraction_at` entries must be integers");
      spec.fraction_at.push_back(t.get<int>());
    }
  } else {
    spec.fraction_at.push_back(spec.base.slot_budget);
  }
  return spec;
}

CompareSpec compare_from_json(const json& root) {
  if (!root.is_object()) throw ConfigParseError("compare root must be a JSON object");
  CompareSpec spec;
  json base = root;
  if (base.contains("node_counts")) {
    if (!base["node_counts"].is_array())
      throw ConfigParseError("field `node_counts` must be an array");
    for (const auto& n : base["node_counts"]) {
      if (!n.is_number_integer())
        throw ConfigParseError("field `node_counts` entries must be integers");
      spec.node_counts.push_back(n.get<int>());
    }
    base.erase("node_counts");
  }
  if (base.contains("mpr_modulations")) {
    spec.mpr_modulations = int_or(base, "mpr_modulations", 2, "");
    base.erase("mpr_modulations");
  }
  spec.base = config_from_json(base);
  return spec;
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text) {
  return sweep_from_json(parse_text(json_text));
}

SweepSpec load_sweep_spec(const std::string& path) { return sweep_from_json(read_file(path)); }

CompareSpec parse_compare_spec(const std::string& json_text) {
  return compare_from_json(parse_text(json_text));
}

CompareSpec load_compare_spec(const std::string& path) {
  return compare_from_json(read_file(path));
}

std::string sim_config_to_json(const SimConfig& config) {
  json root;
  root["arena"] = {{"a", config.arena_length}, {"b", config.arena_width}};
  root["node_count"] = config.node_count;
  root["r"] = config.comm_radius;
  root["beam_count"] = config.beam_count;
  root["p_t"] = config.p_t;
  const char* sic = config.variant.sic == SicMode::none      ? "none"
                    : config.variant.sic == SicMode::perfect ? "perfect"
                                                             : "imperfect";
  root["variant"] = {{"base", config.variant.base == BaseAlgorithm::cra ? "CRA" : "SBA"},
                     {"sic", sic},
                     {"h", config.variant.modulation_count}};
  root["phy"] = {{"beta", config.phy.beta},       {"lambda0", config.phy.lambda0},
                 {"tx_power", config.phy.tx_power}, {"gain_tx", config.phy.gain_tx},
                 {"gain_rx", config.phy.gain_rx},   {"noise_floor", config.phy.noise_floor},
                 {"xi", config.phy.xi}};
  root["slot_budget"] = config.slot_budget;
  root["seeds"] = config.seeds;
  root["thresholds"] = config.thresholds;
  root["pbar_samples"] = config.pbar_samples;
  return root.dump(2);
}

void apply_axis(SimConfig& config, const std::string& axis, double value) {
  if (axis == "node_count")
    config.node_count = static_cast<int>(value);
  else if (axis == "p_t")
    config.p_t = value;
  else if (axis == "beam_count")
    config.beam_count = static_cast<int>(value);
  else if (axis == "xi")
    config.phy.xi = value;
  else if (axis == "h")
    config.variant.modulation_count = static_cast<int>(value);
  else if (axis == "beta")
    config.phy.beta = value;
  else if (axis == "slot_budget")
    config.slot_budget = static_cast<int>(value);
  else
    throw ConfigParseError("unknown sweep axis `" + axis + "`");
}

}  // namespace ndsim
