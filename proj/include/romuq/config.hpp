#pragma once

// Pipeline configuration. Plain text, one `key = value` per line grouped in
// `[section]` blocks; `#` starts a comment. Unknown sections or keys are
// errors so that typos cannot silently fall back to defaults. The `group`
// key may repeat and keeps its order; each one reads
//
//   group = count, alpha_mean, alpha_std, speed_mean, speed_std
//
// with angles in degrees and speeds in m/s. `print-config` emits the
// complete default file.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "romuq/fom.hpp"
#include "romuq/mesh.hpp"
#include "romuq/rom.hpp"
#include "romuq/sampling.hpp"

namespace romuq::config {

struct FlowConfig {
  double nu = 0.01;
  double chord = 1.0;
  fom::SimpleSettings simple;
};

struct RomConfig {
  rom::Layout layout{20, 10, 10};  // n_u, n_sup, n_p
  rom::NewtonSettings newton;
};

struct UqConfig {
  std::vector<sampling::SampleGroup> groups;
  int train = 100;
  int test = 200;
  int degree = 2;
};

struct PipelineConfig {
  mesh::MeshSpec mesh;
  FlowConfig flow;
  std::uint64_t seed = 2024;
  std::vector<sampling::SampleGroup> training;
  RomConfig rom;
  UqConfig uq;
  std::filesystem::path output_dir = "romuq-out";
};

/// Desk-scale defaults: blunt plate in a 6 x 3 box, about 60 training
/// samples spanning roughly -10..10 degrees, a 300-sample UQ bulk.
PipelineConfig default_config();

/// Parses on top of the defaults. Throws ConfigError with the line number.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Full configuration in the accepted grammar; parse_config(to_text(c))
/// reproduces c.
std::string to_text(const PipelineConfig& c);

/// Cross-field checks (mode counts, split sizes, mesh). Throws ConfigError.
void validate(const PipelineConfig& c);

/// Seed of the UQ campaign, derived from the run seed so that training and
/// UQ samples come from independent streams.
std::uint64_t uq_seed(const PipelineConfig& c);

} // namespace romuq::config
