#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "caloric/diagnostics/envelope.hpp"
#include "caloric/error.hpp"
#include "caloric/heatflow/heat.hpp"
#include "caloric/pipeline/initial_data.hpp"
#include "caloric/target/target.hpp"

namespace caloric::pipeline {

enum class Flow { Heat, SL, Gauge, Full };

std::string_view to_string(Flow flow) noexcept;

struct GridConfig {
  int n = 0;
  double side_length = 6.283185307179586;

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct HeatConfig {
  heatflow::HeatOptions options;
  bool dump_levels = false;

  friend bool operator==(const HeatConfig&, const HeatConfig&) = default;
};

struct SLConfig {
  double T = 0.01;
  double dt = -1.0;       // <= 0: the stability bound
  int record_every = 1;
  int dump_every = 0;     // checkpoint every n-th sample; 0 disables

  friend bool operator==(const SLConfig&, const SLConfig&) = default;
};

struct GaugeConfig {
  bool separation = true;
  double tail_ratio = 1e-10;
  bool dump = true;  // fields at s = 0

  friend bool operator==(const GaugeConfig&, const GaugeConfig&) = default;
};

struct DiagnosticsConfig {
  bool envelopes = true;
  std::vector<double> sigma{0.0, 0.375, 1.0};
  double delta = diagnostics::kDefaultDelta;
  int iterates = 4;
  bool decay_fits = true;
  std::vector<int> fit_shells{1, 2, 3};
  double fit_weight = 1.0;
  bool residuals = true;
  int residual_sample = -1;  // < 0: middle sample

  friend bool operator==(const DiagnosticsConfig&, const DiagnosticsConfig&) = default;
};

struct RunConfig {
  target::TargetKind target = target::TargetKind::Sphere2;
  Flow flow = Flow::Full;
  std::string output = "out";
  int threads = 1;
  GridConfig grid;
  InitialDataSpec initial;
  HeatConfig heat;
  SLConfig sl;
  GaugeConfig gauge;
  DiagnosticsConfig diagnostics;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Line-oriented key = value text with [section] headers and # comments.
// Values: numbers, true/false, quoted or bare strings, [a, b, ...] lists.
// Required: target, grid.n, initial.family. Unknown keys, repeated keys,
// out-of-range values and missing keys raise ConfigError naming the line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace caloric::pipeline
