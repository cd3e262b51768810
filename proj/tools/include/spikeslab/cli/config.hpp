#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spikeslab/simulate.hpp"

namespace spikeslab::cli {

using Json = nlohmann::json;

// Parses a JSON object. Throws InvalidArgument on I/O or syntax errors.
Json load_config_file(const std::filesystem::path& path);

// Object-level merge; keys of `overrides` win.
void merge_into(Json& base, const Json& overrides);

// Preset values for a subcommand ("smoke" or "paper"). Throws
// InvalidArgument for an unknown name.
Json preset(std::string_view command, std::string_view name);

struct FitGlsConfig {
  std::string beta_hat;  // path, one value per line
  std::string corr;      // path, dense CSV
  double sigma_e2 = 1.0;
  double sigma_1_2 = 1.0;
  double p0 = 0.99;
  std::string scheme = "sparse";
  double sigma0 = 1e-10;
  // Naive initialization: "spike", "slab" or "best" (higher final ELBo).
  std::string init = "best";
  int sweeps = 100;
  double tol = 1e-8;
  std::uint64_t seed = 1;
};

struct FitPpcaConfig {
  std::string data;  // path, dense CSV with observations in rows
  int k = 2;
  double sigma_e2 = 1.0;
  double sigma_1_2 = 0.5;
  double p0 = 0.99;
  std::string scheme = "sparse";
  double sigma0 = 0.05;
  int sweeps = 250;
  std::uint64_t seed = 1;
};

struct ThresholdConfig {
  double p0 = 0.99;
  double sigma_e2 = 1.0;
  double sigma_1_2 = 1.0;
  double sigma0 = 1e-22;
  double grid_start = 0.0;
  double grid_stop = 6.0;
  double grid_step = 0.05;
  // Explicit grid; replaces start/stop/step when non-empty.
  std::vector<double> grid;
  int sweeps = 100;
  double tol = 1e-8;
  std::uint64_t seed = 1;

  std::vector<double> resolved_grid() const;
};

// Conversions reject unknown keys and wrongly typed values with
// InvalidArgument naming the key.
Json to_json(const sim::GlsSimConfig& c);
Json to_json(const sim::PpcaSimConfig& c);
Json to_json(const FitGlsConfig& c);
Json to_json(const FitPpcaConfig& c);
Json to_json(const ThresholdConfig& c);

sim::GlsSimConfig gls_sim_config(const Json& j);
sim::PpcaSimConfig ppca_sim_config(const Json& j);
FitGlsConfig fit_gls_config(const Json& j);
FitPpcaConfig fit_ppca_config(const Json& j);
ThresholdConfig threshold_config(const Json& j);

}  // namespace spikeslab::cli
