// romuq: offline snapshot campaign and ROM construction, online reduced
// queries, the PCE comparison campaign and its report.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 missing or incomplete artifacts.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "romuq/config.hpp"
#include "romuq/error.hpp"
#include "romuq/pipeline.hpp"

namespace {

using namespace romuq;

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kArtifactError = 4;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string output_dir;
  bool quiet = false;
};

config::PipelineConfig load(const Common& c) {
  config::PipelineConfig cfg = c.config_path.empty() ? config::default_config() : config::load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  config::validate(cfg);
  return cfg;
}

rom::Layout parse_modes(const std::string& text) {
  rom::Layout l;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d%c", &l.n_u, &l.n_p, &l.n_sup, &tail) != 3)
    throw ConfigError("--modes expects n_u,n_p,n_sup");
  return l;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order flow model with polynomial chaos uncertainty quantification"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("-c,--config", common.config_path, "Configuration file (defaults when omitted)");
  app.add_option("--seed", common.seed, "Override the run seed");
  app.add_option("-j,--jobs", common.jobs, "Concurrent full-order solves")->check(CLI::PositiveNumber);
  app.add_option("-o,--output-dir", common.output_dir, "Override the output directory");
  app.add_flag("-q,--quiet", common.quiet, "Only log warnings and errors");

  auto* offline = app.add_subcommand("offline", "Training campaign, POD, supremizers and reduced operators");
  auto* online = app.add_subcommand("online", "Reduced solves and lift at query samples");
  auto* uq = app.add_subcommand("uq", "PCE on FOM and on ROM outputs and the comparison report");
  auto* report = app.add_subcommand("report", "Print the comparison report of a finished uq stage");
  auto* print = app.add_subcommand("print-config", "Print the effective configuration (all defaults without --config)");

  std::string queries, reference, modes;
  online->add_option("--queries", queries, "Sample CSV (index,group,alpha,speed,...); training samples by default");
  online->add_option("--reference", reference, "FOM results CSV with a 'cl' column, one row per query");
  online->add_option("--modes", modes, "Mode counts n_u,n_p,n_sup nested in the offline basis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("romuq"));
  spdlog::set_level(common.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    const config::PipelineConfig cfg = load(common);
    pipeline::RunOptions opt;
    opt.jobs = common.jobs;

    if (print->parsed()) {
      std::cout << config::to_text(cfg);
    } else if (offline->parsed()) {
      const auto s = pipeline::run_offline(cfg, opt);
      std::cout << "offline: " << s.used << " of " << s.requested << " snapshots, basis (" << s.layout.n_u << ", "
                << s.layout.n_p << ", " << s.layout.n_sup << ") in " << (cfg.output_dir / "offline").string() << "\n";
    } else if (online->parsed()) {
      pipeline::OnlineOptions o;
      if (!queries.empty()) o.queries = queries;
      if (!reference.empty()) o.reference = reference;
      if (!modes.empty()) o.layout = parse_modes(modes);
      if (o.reference && !o.queries) throw ConfigError("--reference needs --queries");
      const auto s = pipeline::run_online(cfg, o);
      std::cout << "online: " << s.records.size() << " queries";
      if (s.error_percent) std::cout << ", relative error vs FOM " << *s.error_percent << " %";
      std::cout << "\n";
    } else if (uq->parsed()) {
      const auto r = pipeline::run_uq(cfg, opt);
      std::cout << pipeline::format_report(r);
    } else if (report->parsed()) {
      std::cout << pipeline::format_report(pipeline::read_report(cfg.output_dir));
    }
    return 0;
  } catch (const ConfigError& e) {
    spdlog::error("configuration: {}", e.what());
    return kConfigError;
  } catch (const ArtifactError& e) {
    spdlog::error("artifacts: {}", e.what());
    return kArtifactError;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kSolverError;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 1;
  }
}
