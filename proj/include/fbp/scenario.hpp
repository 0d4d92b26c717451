#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbp/phase_model.hpp"
#include "fbp/spectral.hpp"

namespace fbp {

/// g(x) = offset + amplitude * sum over modes m of cos(m pi x / L).
struct FinalDatum {
  double amplitude = 0.1;
  std::vector<int> modes{1};
  double offset = 0.0;

  [[nodiscard]] CosineSeries series(double length) const;
};

struct Margins {
  /// c1 = c2 = delta in the horizon certificate.
  double delta = 0.05;
  /// Lower bound every source must respect.
  double c2 = 0.5;
  double lambda_t_tol = 1e-8;
  double weak_tol = 1e-6;
  double entropy_tol = 1e-6;
  double certificate_tol = 1e-8;
  double monotonicity_tol = 1e-8;
  /// Spatial L2 distance above which two triples count as distinct.
  double distinct_tol = 1e-3;
  /// Relative mass drift allowed in the eps sweep.
  double conservation_tol = 1e-8;
  /// Relative round-trip error allowed by the inverse tool.
  double roundtrip_tol = 1e-8;
};

struct InverseSpec {
  std::vector<double> a{0.0};
  std::vector<double> b{1.0};
  double t_end = 1.0;
};

/// INI file with sections [phase], [grid], [final_datum], [sources],
/// [regularize], [margins], [inverse] and [output]. Lists are comma separated.
struct ScenarioConfig {
  PhaseParams phase = PhaseParams::defaults();
  Grid grid = Grid::defaults();
  FinalDatum final_datum;
  std::vector<std::vector<double>> sources{{1.0}, {1.0, 0.3}, {1.0, 0.0, 0.3}};
  std::vector<double> eps_list{0.1, 0.01, 0.001};
  /// Replaces the backward-solve u0 in the eps sweep.
  std::optional<double> u0_constant;
  Margins margins;
  InverseSpec inverse;
  std::filesystem::path output_dir = "fbp_out";

  [[nodiscard]] static ScenarioConfig defaults() { return {}; }
  /// Missing sections keep their defaults; unknown keys are errors.
  [[nodiscard]] static ScenarioConfig load(const std::filesystem::path& path);
  [[nodiscard]] static ScenarioConfig parse(std::istream& in);

  void validate() const;
  [[nodiscard]] std::vector<CosineSeries> source_series() const;
};

/// Each command writes under config.output_dir and returns a process exit code.
int cmd_counterexample(const ScenarioConfig& config, std::ostream& log);
int cmd_regularize(const ScenarioConfig& config, std::ostream& log);
int cmd_inverse(const ScenarioConfig& config, std::ostream& log);
/// Runs every manufactured violator through the battery; 0 when all are rejected.
int cmd_seed_check(const ScenarioConfig& config, std::ostream& log);

}  // namespace fbp
