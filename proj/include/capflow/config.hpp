#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "capflow/flow.hpp"
#include "capflow/initial_data.hpp"
#include "capflow/quermass.hpp"

namespace capflow::config {

// Explicit quermass input for the inequality suites.
struct QuermassFixture {
  std::optional<std::string> analytic;  // "flat_ball"
  std::vector<double> W;                // W_0 .. W_{n+1}
};

struct CapTableRequest {
  std::vector<int> ks;
  std::optional<std::vector<double>> radii;  // default grid when absent
  int n_beta = 100;
};

struct RunConfig {
  flow::FlowConfig flow;
  mobius::InitialDataSpec initial;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> formats{"csv", "json"};
  std::uint64_t seed = 0;
  int samples = 100000;
  double af_tolerance = 1e-8;
  double table_tolerance = 1e-8;
  std::optional<QuermassFixture> quermass;
  CapTableRequest captable;

  bool emits(const std::string& format) const;
};

// Throws ConfigError on malformed or out-of-range input.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
void set_formats(RunConfig& cfg, const std::string& format);

// Initial grid filled from the configured initial data.
geometry::HalfSphereGrid initial_grid(const RunConfig& cfg);
// Quermass vector from the fixture if present, else the pipeline on the initial grid.
quermass::QuermassVector fixture_quermass(const RunConfig& cfg);

}  // namespace capflow::config
