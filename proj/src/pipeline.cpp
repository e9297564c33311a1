#include "romuq/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "romuq/artifacts.hpp"
#include "romuq/error.hpp"
#include "romuq/pod.hpp"

namespace romuq::pipeline {

using artifacts::Stage;
using artifacts::write_text;
using fom::ParameterPoint;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kFom = "FOM";
const char* kRom = "ROM";
const char* kPceFom = "PCE-on-FOM";
const char* kPceRom = "PCE-on-ROM";

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string("nan"); }

std::string samples_text(const sampling::SampleSet& s) {
  std::ostringstream os;
  sampling::write_csv(os, s);
  return os.str();
}

std::string fom_results_text(const std::vector<FomRecord>& rec) {
  std::string s = "index,group,alpha,speed,status,iterations,momentum_residual,continuity_residual,cl\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const FomRecord& r = rec[i];
    s += fmt::format("{},{},{},{},{},{},{},{},{}\n", i, r.group, num(r.mu.alpha_deg), num(r.mu.speed),
                     to_string(r.status), r.iterations, num(r.momentum_residual), num(r.continuity_residual),
                     num(r.ok() ? r.cl : kNaN));
  }
  return s;
}

std::vector<FomRecord> parse_fom_results(const artifacts::Table& t) {
  std::vector<FomRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    FomRecord r;
    r.mu = {t.number(i, "alpha"), t.number(i, "speed")};
    r.group = static_cast<int>(t.number(i, "group"));
    const std::string& status = t.rows[i][t.column("status")];
    r.status = status == "converged"       ? SolveStatus::Converged
               : status == "not_converged" ? SolveStatus::NotConverged
               : status == "diverged"      ? SolveStatus::Diverged
                                           : SolveStatus::Invalid;
    r.iterations = static_cast<int>(t.number(i, "iterations"));
    r.momentum_residual = t.number(i, "momentum_residual");
    r.continuity_residual = t.number(i, "continuity_residual");
    r.cl = t.number(i, "cl");
    out.push_back(r);
  }
  return out;
}

std::string snapshot_text(const fom::FlowState& s) {
  const auto& m = *s.velocity.mesh();
  std::string out = "cell,x,y,u_x,u_y,p\n";
  for (int c = 0; c < m.cell_count(); ++c) {
    const auto x = m.center(c);
    const auto u = s.velocity.cells[c];
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", c, x.x, x.y, u.x, u.y, s.pressure[c]);
  }
  return out;
}

std::string spectrum_table(const rom::ReducedBasis& b, bool cumulative) {
  const linalg::DenseVector* spectra[] = {&b.velocity.eigenvalues, &b.pressure.eigenvalues,
                                          &b.supremizers.eigenvalues};
  std::vector<std::vector<double>> cols;
  std::size_t rows = 0;
  for (const auto* s : spectra) {
    cols.push_back(cumulative && s->size() > 0 ? pod::cumulative_energy(*s) : s->values());
    rows = std::max(rows, cols.back().size());
  }
  std::string out = "mode,u,p,u_sup\n";
  for (std::size_t r = 0; r < rows; ++r) {
    out += std::to_string(r + 1);
    for (const auto& c : cols) out += "," + (r < c.size() ? fmt::format("{:.17g}", c[r]) : std::string());
    out += '\n';
  }
  return out;
}

sampling::Standardization empirical_standardization(const sampling::SampleSet& s) {
  sampling::Standardization st;
  const double n = static_cast<double>(s.size());
  for (int d = 0; d < sampling::kDimensions; ++d) {
    double mean = 0.0;
    for (const auto& p : s.points) mean += sampling::coordinates(p)[d];
    mean /= n;
    double var = 0.0;
    for (const auto& p : s.points) var += std::pow(sampling::coordinates(p)[d] - mean, 2);
    st.mean[d] = mean;
    st.stddev[d] = s.size() > 1 && var > 0.0 ? std::sqrt(var / (n - 1.0)) : 1.0;
  }
  return st;
}

template <class F>
auto in_stage(const Stage& stage, const char* name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    spdlog::error("{} stage failed: {}", name, e.what());
    stage.mark_incomplete(e.what());
    throw;
  }
}

double error_over(const std::vector<double>& ref, const std::vector<double>& cand, const std::vector<std::size_t>& idx) {
  std::vector<double> r, c;
  for (std::size_t i : idx) {
    r.push_back(ref[i]);
    c.push_back(cand[i]);
  }
  return pce::relative_error(r, c);
}

} // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NotConverged: return "not_converged";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::Invalid: return "invalid";
  }
  return "invalid";
}

std::vector<FomRecord> run_fom_campaign(const mesh::MeshPtr& mesh, const sampling::SampleSet& samples,
                                        const config::PipelineConfig& cfg, int jobs,
                                        std::vector<fom::FlowState>* states) {
  const long n = static_cast<long>(samples.size());
  std::vector<FomRecord> rec(samples.size());
  if (states) states->assign(samples.size(), {});
  const int workers = std::max(1, jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long i = 0; i < n; ++i) {
    FomRecord& r = rec[i];
    r.mu = samples.points[i];
    r.group = samples.groups.empty() ? 1 : samples.groups[i];
    try {
      fom::validate(r.mu);
      fom::FlowState st = fom::solve_steady_ns(mesh, r.mu, cfg.flow.nu, cfg.flow.simple);
      r.iterations = st.iterations;
      r.momentum_residual = st.momentum_residual;
      r.continuity_residual = st.continuity_residual;
      if (st.converged) {
        r.status = SolveStatus::Converged;
        r.cl = fom::compute_lift(st, r.mu, cfg.flow.chord);
      } else {
        r.status = SolveStatus::NotConverged;
        spdlog::warn("sample {} (alpha {:.3f}, U {:.3f}) did not converge in {} iterations; excluded", i,
                     r.mu.alpha_deg, r.mu.speed, st.iterations);
      }
      if (states) (*states)[i] = std::move(st);
    } catch (const SolverDivergenceError& e) {
      r.status = SolveStatus::Diverged;
      spdlog::warn("sample {} (alpha {:.3f}, U {:.3f}) diverged: {}; excluded", i, r.mu.alpha_deg, r.mu.speed,
                   e.what());
    } catch (const std::exception& e) {
      r.status = SolveStatus::Invalid;
      spdlog::warn("sample {} rejected: {}; excluded", i, e.what());
    }
  }
  return rec;
}

OfflineSummary run_offline(const config::PipelineConfig& cfg, const RunOptions& opt) {
  config::validate(cfg);
  const Stage stage(cfg.output_dir / "offline", "offline");
  return in_stage(stage, "offline", [&] {
    const mesh::MeshPtr mesh = mesh::build_mesh(cfg.mesh);
    const sampling::SampleSet samples = sampling::merge_groups(cfg.training, cfg.seed);
    write_text(stage.file("samples.csv"), samples_text(samples));
    spdlog::info("offline: {} training samples, {} cells, {} workers", samples.size(), mesh->cell_count(), opt.jobs);

    std::vector<fom::FlowState> states;
    const std::vector<FomRecord> rec = run_fom_campaign(mesh, samples, cfg, opt.jobs, &states);
    write_text(stage.file("fom_results.csv"), fom_results_text(rec));

    pod::VelocitySnapshots us;
    pod::PressureSnapshots ps;
    std::filesystem::create_directories(stage.file("snapshots"));
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (!rec[i].ok()) continue;
      write_text(stage.file(fmt::format("snapshots/snapshot_{:04d}.csv", i)), snapshot_text(states[i]));
      us.snapshots.push_back(std::move(states[i].velocity));
      ps.snapshots.push_back(std::move(states[i].pressure));
      us.parameters.push_back(rec[i].mu);
      ps.parameters.push_back(rec[i].mu);
    }
    OfflineSummary summary;
    summary.requested = static_cast<int>(rec.size());
    summary.used = static_cast<int>(us.size());
    if (summary.used < summary.requested)
      spdlog::warn("offline: {} of {} samples excluded", summary.requested - summary.used, summary.requested);
    const rom::Layout& want = cfg.rom.layout;
    if (summary.used < std::max(want.n_u, want.n_sup))
      throw DegenerateInputError(fmt::format("offline: only {} converged snapshots for {} velocity and {} pressure modes",
                                             summary.used, want.n_u, want.n_sup));

    rom::ReducedBasis basis;
    basis.lifting = pod::compute_lifting(mesh);
    basis.velocity = pod::pod_modes(pod::homogenize(us, basis.lifting), want.n_u, opt.jobs);
    basis.pressure = pod::pod_modes(ps, std::max(want.n_p, want.n_sup), opt.jobs);
    basis.supremizers = pod::supremizer_modes(basis.pressure, std::min(want.n_sup, basis.pressure.size()));
    const rom::Layout got = basis.layout();
    if (got.n_u < want.n_u || got.n_p < want.n_p || got.n_sup < want.n_sup)
      throw DegenerateInputError(fmt::format(
          "offline: snapshots support only ({}, {}, {}) modes, configuration asks for ({}, {}, {})", got.n_u, got.n_p,
          got.n_sup, want.n_u, want.n_p, want.n_sup));
    const rom::ReducedOperators ops = rom::assemble_operators(basis, cfg.flow.nu, got, opt.jobs, cfg.flow.simple.convection);

    write_text(stage.file("eigenvalues.csv"), spectrum_table(basis, false));
    write_text(stage.file("cumulative_energy.csv"), spectrum_table(basis, true));
    {
      std::ostringstream os;
      artifacts::write_basis(os, basis);
      write_text(stage.file("basis.txt"), os.str());
    }
    {
      std::ostringstream os;
      rom::write_operators(os, ops);
      write_text(stage.file("operators.txt"), os.str());
    }
    summary.layout = got;
    stage.complete();
    spdlog::info("offline: basis ({} u, {} p, {} supremizer modes) from {} snapshots", got.n_u, got.n_p, got.n_sup,
                 summary.used);
    return summary;
  });
}

OfflineArtifacts load_offline(const config::PipelineConfig& cfg) {
  const fs::path dir = cfg.output_dir / "offline";
  Stage::require_complete(dir, "offline artifacts");
  OfflineArtifacts off;
  off.mesh = mesh::build_mesh(cfg.mesh);
  {
    std::istringstream is(artifacts::read_text(dir / "basis.txt"));
    off.basis = artifacts::read_basis(is, off.mesh);
  }
  {
    std::istringstream is(artifacts::read_text(dir / "operators.txt"));
    off.operators = rom::read_operators(is);
  }
  if (off.operators.nu != cfg.flow.nu)
    throw ArtifactError(fmt::format("offline operators were built for nu = {}, configuration says {}",
                                    off.operators.nu, cfg.flow.nu));
  if (off.operators.convection != cfg.flow.simple.convection)
    throw ArtifactError("offline operators were built with a different convection scheme than configured");
  if (!(off.operators.layout == off.basis.layout()))
    throw ArtifactError("offline operators and basis disagree on the mode counts");
  const std::vector<FomRecord> rec = parse_fom_results(artifacts::read_table(dir / "fom_results.csv"));
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (!rec[i].ok()) continue;
    off.training.points.push_back(rec[i].mu);
    off.training.groups.push_back(rec[i].group);
    off.training_cl.push_back(rec[i].cl);
  }
  if (off.training.size() == 0) throw ArtifactError("offline results contain no converged sample");
  off.training = sampling::standardize(off.training, empirical_standardization(off.training));
  return off;
}

OnlineRecord evaluate_rom(const OfflineArtifacts& off, const rom::ReducedOperators& ops,
                          const config::PipelineConfig& cfg, const ParameterPoint& mu) {
  OnlineRecord r;
  r.mu = mu;
  r.cl = kNaN;
  for (double z : off.training.standardization->forward(sampling::coordinates(mu)))
    r.extrapolated = r.extrapolated || std::abs(z) > 3.0;
  try {
    const rom::ReducedState s = rom::solve_reduced(ops, mu, nullptr, cfg.rom.newton);
    r.converged = s.converged;
    r.iterations = s.iterations;
    r.residual = s.residual;
    if (s.converged) r.cl = rom::rom_lift(off.basis, ops, s, mu, cfg.flow.chord);
    else
      spdlog::warn("reduced solve at alpha {:.3f}, U {:.3f} stopped after {} iterations, residual {:.3e}",
                   mu.alpha_deg, mu.speed, s.iterations, s.residual);
  } catch (const SolverDivergenceError& e) {
    spdlog::warn("reduced solve at alpha {:.3f}, U {:.3f} failed: {}", mu.alpha_deg, mu.speed, e.what());
  }
  return r;
}

OnlineSummary run_online(const config::PipelineConfig& cfg, const OnlineOptions& online) {
  config::validate(cfg);
  const OfflineArtifacts off = load_offline(cfg);
  const rom::ReducedOperators ops = off.operators.restrict(online.layout.value_or(cfg.rom.layout));

  sampling::SampleSet queries;
  std::optional<std::vector<double>> reference;
  if (online.queries) {
    std::istringstream is(artifacts::read_text(*online.queries));
    queries = sampling::read_csv(is);
    if (online.reference) {
      const artifacts::Table t = artifacts::read_table(*online.reference);
      if (t.rows.size() != queries.size())
        throw ArtifactError(fmt::format("reference has {} rows for {} queries", t.rows.size(), queries.size()));
      reference.emplace();
      for (std::size_t i = 0; i < t.rows.size(); ++i) reference->push_back(t.number(i, "cl"));
    }
  } else {
    queries = off.training;
    reference = off.training_cl;
  }

  const Stage stage(cfg.output_dir / "online", "online");
  return in_stage(stage, "online", [&] {
    OnlineSummary out;
    for (const auto& mu : queries.points) out.records.push_back(evaluate_rom(off, ops, cfg, mu));

    std::string csv = "index,alpha,speed,converged,iterations,residual,cl_rom,extrapolated";
    csv += reference ? ",cl_fom\n" : "\n";
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
      const OnlineRecord& r = out.records[i];
      csv += fmt::format("{},{},{},{},{},{},{},{}", i, num(r.mu.alpha_deg), num(r.mu.speed), r.converged ? 1 : 0,
                         r.iterations, num(r.residual), num(r.cl), r.extrapolated ? 1 : 0);
      if (reference) {
        csv += "," + num((*reference)[i]);
        if (r.converged && std::isfinite((*reference)[i])) usable.push_back(i);
      }
      csv += '\n';
    }
    write_text(stage.file("rom_results.csv"), csv);

    std::string summary = "key,value\n";
    summary += fmt::format("queries,{}\n", out.records.size());
    summary += fmt::format("n_u,{}\nn_p,{}\nn_sup,{}\n", ops.layout.n_u, ops.layout.n_p, ops.layout.n_sup);
    if (reference && !usable.empty()) {
      std::vector<double> cl;
      for (const auto& r : out.records) cl.push_back(r.cl);
      out.error_percent = error_over(*reference, cl, usable);
      summary += fmt::format("compared,{}\nerror_percent,{:.17g}\n", usable.size(), *out.error_percent);
      spdlog::info("online: relative L2 error against FOM {:.4f}% over {} queries", *out.error_percent,
                   usable.size());
    }
    write_text(stage.file("summary.csv"), summary);
    stage.complete();
    return out;
  });
}

double ComparisonReport::error(const std::string& reference, const std::string& candidate) const {
  for (const auto& r : rows)
    if (r.reference == reference && r.candidate == candidate) return r.error_percent;
  throw ValidationError(fmt::format("report has no row '{} vs {}'", reference, candidate));
}

ComparisonReport run_uq(const config::PipelineConfig& cfg, const RunOptions& opt) {
  config::validate(cfg);
  const OfflineArtifacts off = load_offline(cfg);
  const rom::ReducedOperators ops = off.operators.restrict(cfg.rom.layout);
  const mesh::MeshPtr& mesh = off.mesh;

  sampling::SampleSet samples = sampling::merge_groups(cfg.uq.groups, config::uq_seed(cfg));
  const sampling::Standardization standard =
      cfg.uq.groups.size() == 1 ? sampling::Standardization{cfg.uq.groups[0].mean, cfg.uq.groups[0].stddev}
                                : empirical_standardization(samples);
  samples = sampling::standardize(samples, standard);
  const std::string sample_csv = samples_text(samples);

  const fs::path dir = cfg.output_dir / "uq";
  // Full-order results of an earlier run on the very same samples are reused.
  std::optional<std::vector<FomRecord>> cached;
  {
    std::error_code ec;
    if (fs::exists(dir / "samples.csv", ec) && fs::exists(dir / "fom_results.csv", ec) &&
        artifacts::read_text(dir / "samples.csv") == sample_csv) {
      try {
        auto rec = parse_fom_results(artifacts::read_table(dir / "fom_results.csv"));
        if (rec.size() == samples.size()) cached = std::move(rec);
      } catch (const ArtifactError& e) {
        spdlog::warn("uq: ignoring unreadable cached FOM results: {}", e.what());
      }
    }
  }

  const Stage stage(dir, "uq");
  return in_stage(stage, "uq", [&] {
    write_text(stage.file("samples.csv"), sample_csv);
    std::vector<FomRecord> fom_rec;
    if (cached) {
      spdlog::info("uq: reusing {} cached full-order results", cached->size());
      fom_rec = std::move(*cached);
    } else {
      spdlog::info("uq: {} full-order solves on {} workers", samples.size(), opt.jobs);
      fom_rec = run_fom_campaign(mesh, samples, cfg, opt.jobs);
    }
    write_text(stage.file("fom_results.csv"), fom_results_text(fom_rec));

    std::vector<OnlineRecord> rom_rec;
    for (const auto& mu : samples.points) rom_rec.push_back(evaluate_rom(off, ops, cfg, mu));
    {
      std::string csv = "index,alpha,speed,converged,iterations,residual,cl\n";
      for (std::size_t i = 0; i < rom_rec.size(); ++i) {
        const auto& r = rom_rec[i];
        csv += fmt::format("{},{},{},{},{},{},{}\n", i, num(r.mu.alpha_deg), num(r.mu.speed), r.converged ? 1 : 0,
                           r.iterations, num(r.residual), num(r.cl));
      }
      write_text(stage.file("rom_results.csv"), csv);
    }

    const std::size_t n_train = static_cast<std::size_t>(cfg.uq.train);
    const std::size_t n_test = static_cast<std::size_t>(cfg.uq.test);
    std::vector<double> cl_fom(samples.size(), kNaN), cl_rom(samples.size(), kNaN);
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n_train + n_test; ++i) {
      if (!fom_rec[i].ok() || !rom_rec[i].converged || !std::isfinite(rom_rec[i].cl)) continue;
      cl_fom[i] = fom_rec[i].cl;
      cl_rom[i] = rom_rec[i].cl;
      (i < n_train ? train : test).push_back(i);
    }
    const std::size_t p1 = pce::basis_count(sampling::kDimensions, cfg.uq.degree);
    if (train.size() < p1)
      throw ValidationError(fmt::format("uq: {} usable training samples for {} PCE coefficients", train.size(), p1));
    if (test.empty()) throw ValidationError("uq: no usable test sample");
    if (train.size() < n_train || test.size() < n_test)
      spdlog::warn("uq: {} training and {} test samples dropped after solver failures", n_train - train.size(),
                   n_test - test.size());

    auto fit_on = [&](const std::vector<double>& y) {
      sampling::SampleSet s;
      s.standardization = samples.standardization;
      std::vector<double> v;
      for (std::size_t i : train) {
        s.points.push_back(samples.points[i]);
        s.zeta.push_back(samples.zeta[i]);
        v.push_back(y[i]);
      }
      return pce::fit(s, v, cfg.uq.degree);
    };
    const pce::PCEModel model_fom = fit_on(cl_fom);
    const pce::PCEModel model_rom = fit_on(cl_rom);
    for (const auto& [name, model] : {std::pair{"pce_fom.txt", &model_fom}, std::pair{"pce_rom.txt", &model_rom}}) {
      std::ostringstream os;
      pce::write_model(os, *model);
      write_text(stage.file(name), os.str());
    }

    std::vector<double> pred_fom(samples.size()), pred_rom(samples.size());
    std::string csv = "index,split,usable,alpha,speed,cl_fom,cl_rom,pce_fom,pce_rom,extrapolated\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto pf = pce::predict(model_fom, samples.points[i]);
      const auto pr = pce::predict(model_rom, samples.points[i]);
      pred_fom[i] = pf.value;
      pred_rom[i] = pr.value;
      const char* split = i < n_train ? "train" : i < n_train + n_test ? "test" : "unused";
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i, split, std::isfinite(cl_fom[i]) ? 1 : 0,
                         num(samples.points[i].alpha_deg), num(samples.points[i].speed), num(cl_fom[i]),
                         num(cl_rom[i]), num(pf.value), num(pr.value), pf.extrapolated ? 1 : 0);
    }
    write_text(stage.file("predictions.csv"), csv);

    ComparisonReport report;
    report.train = static_cast<int>(train.size());
    report.test = static_cast<int>(test.size());
    report.rows = {{kFom, kRom, error_over(cl_fom, cl_rom, test)},
                   {kFom, kPceFom, error_over(cl_fom, pred_fom, test)},
                   {kRom, kPceRom, error_over(cl_rom, pred_rom, test)},
                   {kFom, kPceRom, error_over(cl_fom, pred_rom, test)}};
    std::string rep = "reference,candidate,error_percent,test_samples\n";
    for (const auto& r : report.rows)
      rep += fmt::format("{},{},{:.17g},{}\n", r.reference, r.candidate, r.error_percent, report.test);
    write_text(stage.file("report.csv"), rep);
    stage.complete();
    spdlog::info("uq report:\n{}", format_report(report));
    return report;
  });
}

ComparisonReport read_report(const fs::path& output_dir) {
  Stage::require_complete(output_dir / "uq", "UQ results");
  const artifacts::Table t = artifacts::read_table(output_dir / "uq" / "report.csv");
  ComparisonReport r;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    r.rows.push_back({t.rows[i][t.column("reference")], t.rows[i][t.column("candidate")],
                      t.number(i, "error_percent")});
    r.test = static_cast<int>(t.number(i, "test_samples"));
  }
  const artifacts::Table pred = artifacts::read_table(output_dir / "uq" / "predictions.csv");
  const int split = pred.column("split"), usable = pred.column("usable");
  if (split < 0 || usable < 0) throw ArtifactError("predictions.csv lacks split/usable columns");
  for (const auto& row : pred.rows)
    if (row[split] == "train" && row[usable] == "1") ++r.train;
  return r;
}

std::string format_report(const ComparisonReport& r) {
  std::string s = fmt::format("{:<12} {:<12} {:>12}\n", "reference", "candidate", "error [%]");
  for (const auto& row : r.rows) s += fmt::format("{:<12} {:<12} {:>12.4f}\n", row.reference, row.candidate, row.error_percent);
  s += fmt::format("PCE trained on {} samples, errors over {} test samples\n", r.train, r.test);
  return s;
}

} // namespace romuq::pipeline
