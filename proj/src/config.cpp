#include "hcrom/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hcrom/errors.hpp"
#include "hcrom/reduced_basis.hpp"

namespace hcrom {

using nlohmann::json;

int ExperimentConfig::d() const {
  if (geometry == "grid16") return 16;
  return 4;
}

namespace {

// Convert a byte offset from a json parse error into a line number.
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return "line " + std::to_string(line);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw ConfigError("config: unknown key '" + key + "' in " + where);
}

SampleSpec parse_sample(const json& obj, const std::string& where) {
  reject_unknown_keys(obj, {"kind", "grid_size", "include_infinity", "count", "p_infinity"},
                      where);
  SampleSpec s;
  s.kind = obj.value("kind", s.kind);
  if (s.kind != "grid" && s.kind != "random")
    throw ConfigError("config: " + where + ".kind must be \"grid\" or \"random\"");
  s.grid_size = obj.value("grid_size", s.grid_size);
  s.include_infinity = obj.value("include_infinity", s.include_infinity);
  s.count = obj.value("count", s.count);
  s.p_infinity = obj.value("p_infinity", s.p_infinity);
  return s;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + origin + ": parse error at " + locate(text, e.byte) + ": " +
                      e.what());
  }
  try {
    reject_unknown_keys(root,
                        {"version", "geometry", "cells_per_side", "active_axes", "mode",
                         "compare_geometries", "training", "test", "strategies", "n_max", "k_min",
                         "k_max", "c0", "sensors", "noise", "basis_dir", "seed", "out_dir"},
                        "top level");
    ExperimentConfig cfg;
    if (!root.contains("version")) throw ConfigError("config: missing \"version\"");
    cfg.version = root["version"].get<int>();
    if (cfg.version != 1)
      throw ConfigError("config: unsupported version " + std::to_string(cfg.version));
    cfg.geometry = root.value("geometry", cfg.geometry);
    if (cfg.geometry != "lipschitz4" && cfg.geometry != "latin4" && cfg.geometry != "grid16")
      throw ConfigError("config: unknown geometry '" + cfg.geometry + "'");
    cfg.cells_per_side = root.value("cells_per_side", cfg.cells_per_side);
    if (root.contains("active_axes"))
      cfg.active_axes = root["active_axes"].get<std::vector<int>>();
    for (int a : cfg.active_axes)
      if (a < 0 || a >= cfg.d())
        throw ConfigError("config: active axis " + std::to_string(a) + " out of range for " +
                          cfg.geometry);
    cfg.mode = root.value("mode", cfg.mode);
    if (cfg.mode != "strategies" && cfg.mode != "dimensions")
      throw ConfigError("config: mode must be \"strategies\" or \"dimensions\"");
    if (root.contains("compare_geometries"))
      cfg.compare_geometries = root["compare_geometries"].get<std::vector<std::string>>();
    if (cfg.compare_geometries.empty()) cfg.compare_geometries = {cfg.geometry};
    for (const std::string& g : cfg.compare_geometries)
      if (g != "lipschitz4" && g != "latin4" && g != "grid16")
        throw ConfigError("config: unknown geometry '" + g + "' in compare_geometries");
    if (root.contains("training")) cfg.training = parse_sample(root["training"], "training");
    if (root.contains("test")) cfg.test = parse_sample(root["test"], "test");
    if (root.contains("strategies"))
      cfg.strategies = root["strategies"].get<std::vector<std::string>>();
    for (const std::string& s : cfg.strategies) strategy_from_string(s);  // validates
    cfg.n_max = root.value("n_max", cfg.n_max);
    if (cfg.n_max < 1) throw ConfigError("config: n_max must be >= 1");
    cfg.k_min = root.value("k_min", cfg.k_min);
    cfg.k_max = root.value("k_max", cfg.k_max);
    if (cfg.k_min < 0 || cfg.k_max < cfg.k_min)
      throw ConfigError("config: need 0 <= k_min <= k_max");
    cfg.c0 = root.value("c0", cfg.c0);
    if (!(cfg.c0 > 0.0)) throw ConfigError("config: c0 must be positive");
    if (root.contains("sensors")) {
      reject_unknown_keys(root["sensors"], {"grid", "side"}, "sensors");
      cfg.sensors.grid = root["sensors"].value("grid", cfg.sensors.grid);
      cfg.sensors.side = root["sensors"].value("side", cfg.sensors.side);
    }
    cfg.noise = root.value("noise", cfg.noise);
    if (cfg.noise < 0.0) throw ConfigError("config: noise must be >= 0");
    cfg.basis_dir = root.value("basis_dir", cfg.basis_dir);
    cfg.seed = root.value("seed", cfg.seed);
    cfg.out_dir = root.value("out_dir", cfg.out_dir);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError("config " + origin + ": " + e.what());
  }
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str(), path.string());
}

namespace {

const char* kFig5 = R"json({
  "version": 1,
  "geometry": "lipschitz4",
  "cells_per_side": 16,
  "active_axes": [0],
  "mode": "strategies",
  "training": {"kind": "grid", "grid_size": 100, "include_infinity": true},
  "test": {"kind": "grid", "grid_size": 128, "include_infinity": true},
  "strategies": ["random", "random-inf", "greedy-h10", "greedy-galerkin"],
  "n_max": 15,
  "seed": 4242,
  "out_dir": "out/fig5"
})json";

const char* kFig6 = R"json({
  "version": 1,
  "geometry": "lipschitz4",
  "cells_per_side": 16,
  "active_axes": [0, 1],
  "mode": "strategies",
  "training": {"kind": "grid", "grid_size": 12, "include_infinity": true},
  "test": {"kind": "grid", "grid_size": 9, "include_infinity": true},
  "strategies": ["random", "random-inf", "greedy-h10", "greedy-galerkin"],
  "n_max": 20,
  "seed": 571,
  "out_dir": "out/fig6"
})json";

const char* kFig7 = R"json({
  "version": 1,
  "geometry": "lipschitz4",
  "cells_per_side": 16,
  "active_axes": [0, 1, 2, 3],
  "mode": "dimensions",
  "compare_geometries": ["lipschitz4", "latin4"],
  "training": {"kind": "grid", "grid_size": 5, "include_infinity": true},
  "test": {"kind": "grid", "grid_size": 3, "include_infinity": true},
  "strategies": ["greedy-galerkin"],
  "n_max": 16,
  "seed": 777,
  "out_dir": "out/fig7"
})json";

}  // namespace

std::vector<std::string> preset_names() { return {"fig5", "fig6", "fig7"}; }

std::string preset_json(const std::string& name) {
  if (name == "fig5") return kFig5;
  if (name == "fig6") return kFig6;
  if (name == "fig7") return kFig7;
  throw ConfigError("unknown preset '" + name + "'; available: fig5, fig6, fig7");
}

ExperimentConfig load_preset(const std::string& name) {
  return parse_config_json(preset_json(name), "preset " + name);
}

}  // namespace hcrom
