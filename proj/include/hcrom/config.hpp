#ifndef HCROM_CONFIG_HPP
#define HCROM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hcrom/pbdw.hpp"

namespace hcrom {

// How a training or test parameter set is drawn.
struct SampleSpec {
  std::string kind = "grid";     // "grid" | "random"
  int grid_size = 10;            // grid: z = 1/y in {0, 1/T, ..., 1}
  bool include_infinity = true;  // grid: include z = 0
  int count = 100;               // random: number of draws
  double p_infinity = 0.0;       // random: probability of an infinite entry
};

// One experiment, fully determined by this struct plus the seed.
struct ExperimentConfig {
  int version = 1;
  std::string geometry = "lipschitz4";
  int cells_per_side = 16;
  std::vector<int> active_axes = {0};
  std::string mode = "strategies";  // study layout: "strategies" | "dimensions"
  std::vector<std::string> compare_geometries;
  SampleSpec training;
  SampleSpec test;
  std::vector<std::string> strategies = {"greedy-galerkin"};
  int n_max = 15;
  int k_min = 0;
  int k_max = 3;
  double c0 = 1.0;
  SensorSpec sensors;
  double noise = 0.0;
  std::string basis_dir;
  std::uint64_t seed = 20240101;
  std::string out_dir = "out";

  int d() const;  // subdomain count of the geometry
};

ExperimentConfig parse_config_json(const std::string& text, const std::string& origin);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Built-in figure presets; the same JSON is checked into presets/.
std::vector<std::string> preset_names();
std::string preset_json(const std::string& name);
ExperimentConfig load_preset(const std::string& name);

}  // namespace hcrom

#endif
