#pragma once

// Batch pipeline behind the command line tool. Every stage writes into its
// own directory below the output directory:
//
//   offline/  samples.csv, fom_results.csv, snapshots/, eigenvalues.csv,
//             cumulative_energy.csv, basis.txt, operators.txt
//   online/   rom_results.csv, summary.csv
//   uq/       samples.csv, fom_results.csv, rom_results.csv, pce_fom.txt,
//             pce_rom.txt, predictions.csv, report.csv
//
// plus STATUS and manifest.sha256 (see artifacts.hpp).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "romuq/config.hpp"
#include "romuq/pce.hpp"
#include "romuq/rom.hpp"
#include "romuq/sampling.hpp"

namespace romuq::pipeline {

namespace fs = std::filesystem;

struct RunOptions {
  int jobs = 1;  // concurrent full-order solves
};

enum class SolveStatus { Converged, NotConverged, Diverged, Invalid };
std::string to_string(SolveStatus s);

struct FomRecord {
  fom::ParameterPoint mu;
  int group = 1;
  SolveStatus status = SolveStatus::Invalid;
  int iterations = 0;
  double momentum_residual = 0.0;
  double continuity_residual = 0.0;
  double cl = 0.0;

  bool ok() const noexcept { return status == SolveStatus::Converged; }
};

/// One full-order solve per sample on a pool of `jobs` workers. Results
/// come back in sample order whatever the scheduling; failed samples are
/// logged and flagged, not thrown. When `states` is given it receives the
/// flow state of every sample (empty fields for failures).
std::vector<FomRecord> run_fom_campaign(const mesh::MeshPtr& mesh, const sampling::SampleSet& samples,
                                        const config::PipelineConfig& cfg, int jobs,
                                        std::vector<fom::FlowState>* states = nullptr);

struct OfflineSummary {
  int requested = 0;
  int used = 0;
  rom::Layout layout;
};

OfflineSummary run_offline(const config::PipelineConfig& cfg, const RunOptions& opt = {});

struct OfflineArtifacts {
  mesh::MeshPtr mesh;
  sampling::SampleSet training;  // samples whose snapshot entered the basis
  std::vector<double> training_cl;
  rom::ReducedBasis basis;
  rom::ReducedOperators operators;  // as assembled, before any restriction
};

/// Throws ArtifactError when the offline stage is missing or incomplete.
OfflineArtifacts load_offline(const config::PipelineConfig& cfg);

struct OnlineRecord {
  fom::ParameterPoint mu;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double cl = 0.0;
  bool extrapolated = false;
};

/// Reduced solve plus lift for each query; zero initial guess.
OnlineRecord evaluate_rom(const OfflineArtifacts& off, const rom::ReducedOperators& ops,
                          const config::PipelineConfig& cfg, const fom::ParameterPoint& mu);

struct OnlineOptions {
  /// Sample CSV with the queries; the training samples when absent, which
  /// turns the run into a reproduction test against the stored FOM lift.
  std::optional<fs::path> queries;
  /// Optional FOM results CSV (index, ..., cl) matched to the queries by row.
  std::optional<fs::path> reference;
  /// Mode counts to use instead of the configured ones (must nest).
  std::optional<rom::Layout> layout;
};

struct OnlineSummary {
  std::vector<OnlineRecord> records;
  std::optional<double> error_percent;  // against the reference, over converged queries
};

OnlineSummary run_online(const config::PipelineConfig& cfg, const OnlineOptions& online = {});

struct ReportRow {
  std::string reference;
  std::string candidate;
  double error_percent = 0.0;
};

struct ComparisonReport {
  std::vector<ReportRow> rows;
  int train = 0;
  int test = 0;

  /// Error of the named row; throws ValidationError when absent.
  double error(const std::string& reference, const std::string& candidate) const;
};

ComparisonReport run_uq(const config::PipelineConfig& cfg, const RunOptions& opt = {});

/// Reads uq/report.csv.
ComparisonReport read_report(const fs::path& output_dir);
std::string format_report(const ComparisonReport& r);

} // namespace romuq::pipeline
