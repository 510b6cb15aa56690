#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hcrom/config.hpp"
#include "hcrom/errors.hpp"
#include "hcrom/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::int64_t seed = -1;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Experiment config (JSON)");
  cmd->add_option("--preset", o.preset,
                  "Built-in config: " + [] {
                    std::string s;
                    for (const std::string& n : hcrom::preset_names()) s += (s.empty() ? "" : ", ") + n;
                    return s;
                  }());
  cmd->add_option("--out", o.out_dir, "Output directory (overrides config)");
  cmd->add_option("--seed", o.seed, "Seed override (governs all randomness)");
  cmd->add_option("--threads", o.threads, "Worker threads for independent runs")
      ->check(CLI::PositiveNumber);
}

hcrom::ExperimentConfig resolve_config(const CommonOpts& o) {
  if (!o.config_path.empty() && !o.preset.empty())
    throw hcrom::ConfigError("--config and --preset are mutually exclusive");
  hcrom::ExperimentConfig cfg;
  if (!o.config_path.empty())
    cfg = hcrom::parse_config_file(o.config_path);
  else if (!o.preset.empty())
    cfg = hcrom::load_preset(o.preset);
  // else: defaults
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hcrom: reduced-order models for piecewise-constant diffusion with "
      "arbitrarily high contrast"};
  app.require_subcommand(1);

  CommonOpts solve_o, basis_o, study_o, surr_o, pbdw_o, est_o;
  std::string solve_y, pbdw_y, pbdw_meas, est_y, est_meas;

  CLI::App* solve = app.add_subcommand("solve", "Solve the full model at one parameter");
  add_common(solve, solve_o);
  solve->add_option("--y", solve_y, "Parameter vector, e.g. \"1,inf,2,1\"")->required();

  CLI::App* basis = app.add_subcommand("basis", "Build and archive reduced bases");
  add_common(basis, basis_o);

  CLI::App* study = app.add_subcommand("study", "Error-decay study across strategies");
  add_common(study, study_o);

  CLI::App* surrogate =
      app.add_subcommand("surrogate", "Rectangle-cover surrogate error study");
  add_common(surrogate, surr_o);

  CLI::App* pbdw = app.add_subcommand("pbdw", "PBDW state reconstruction from measurements");
  add_common(pbdw, pbdw_o);
  pbdw->add_option("--y", pbdw_y, "Ground-truth parameter; measurements are synthesized");
  pbdw->add_option("--measurements", pbdw_meas, "CSV of sensor,value rows");

  CLI::App* estimate =
      app.add_subcommand("estimate", "Recover the parameter from measurements");
  add_common(estimate, est_o);
  estimate->add_option("--y", est_y, "Ground-truth parameter; measurements are synthesized");
  estimate->add_option("--measurements", est_meas, "CSV of sensor,value rows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      hcrom::run_solve(resolve_config(solve_o), solve_y);
    else if (basis->parsed())
      hcrom::run_basis(resolve_config(basis_o), basis_o.threads);
    else if (study->parsed())
      hcrom::run_study(resolve_config(study_o), study_o.threads);
    else if (surrogate->parsed())
      hcrom::run_surrogate_study(resolve_config(surr_o));
    else if (pbdw->parsed())
      hcrom::run_pbdw(resolve_config(pbdw_o), pbdw_y, pbdw_meas);
    else if (estimate->parsed())
      hcrom::run_estimate(resolve_config(est_o), est_y, est_meas);
  } catch (const hcrom::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hcrom::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
