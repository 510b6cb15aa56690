#ifndef HCROM_EXPERIMENTS_HPP
#define HCROM_EXPERIMENTS_HPP

#include <string>

#include "hcrom/config.hpp"
#include "hcrom/fem_system.hpp"
#include "hcrom/reduced_basis.hpp"

namespace hcrom {

FemSystem build_system(const ExperimentConfig& cfg);
FemSystem build_system(const ExperimentConfig& cfg, const std::string& geometry);

TrainingSet sample_params(const ExperimentConfig& cfg, const SampleSpec& spec,
                          std::uint64_t seed);

// CLI subcommand bodies. Each writes CSV/SVG/field artifacts under cfg.out_dir
// and prints a short report to stdout.
void run_solve(const ExperimentConfig& cfg, const std::string& y_text);
void run_basis(const ExperimentConfig& cfg, int threads);
void run_study(const ExperimentConfig& cfg, int threads);
void run_surrogate_study(const ExperimentConfig& cfg);
void run_pbdw(const ExperimentConfig& cfg, const std::string& truth_text,
              const std::string& measurement_file);
void run_estimate(const ExperimentConfig& cfg, const std::string& truth_text,
                  const std::string& measurement_file);

}  // namespace hcrom

#endif
