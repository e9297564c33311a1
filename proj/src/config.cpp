#include "romuq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "romuq/error.hpp"
#include "romuq/pce.hpp"

namespace romuq::config {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

class Parser {
public:
  explicit Parser(PipelineConfig& c) : c_(c) {}

  void line(int lineno, std::string_view raw) {
    lineno_ = lineno;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) return;
    if (s.front() == '[') {
      if (s.back() != ']') fail("unterminated section header");
      section_ = trim(std::string_view(s).substr(1, s.size() - 2));
      static const char* known[] = {"mesh", "flow", "run", "training", "rom", "uq"};
      if (std::find(std::begin(known), std::end(known), section_) == std::end(known))
        fail(fmt::format("unknown section [{}]", section_));
      return;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (section_.empty()) fail("key outside of any section");
    if (value.empty()) fail(fmt::format("empty value for '{}'", key));
    assign(key, value);
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(fmt::format("config line {}: {}", lineno_, what));
  }

  double number(const std::string& v) const {
    double x = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(x))
      fail(fmt::format("'{}' is not a finite number", v));
    return x;
  }

  long long integer(const std::string& v) const {
    long long x = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || end != v.data() + v.size()) fail(fmt::format("'{}' is not an integer", v));
    return x;
  }

  int small_int(const std::string& v) const {
    const long long x = integer(v);
    if (x < -1000000000LL || x > 1000000000LL) fail(fmt::format("'{}' is out of range", v));
    return static_cast<int>(x);
  }

  mesh::PatchRole role(const std::string& v) const {
    try {
      return mesh::parse_patch_role(v);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  sampling::SampleGroup group(const std::string& v) const {
    const auto parts = split_list(v);
    if (parts.size() != 5) fail("group needs: count, alpha_mean, alpha_std, speed_mean, speed_std");
    sampling::SampleGroup g;
    g.count = small_int(parts[0]);
    g.mean = {number(parts[1]), number(parts[3])};
    g.stddev = {number(parts[2]), number(parts[4])};
    return g;
  }

  void add_group(std::vector<sampling::SampleGroup>& dst, const std::string& v) {
    if (!replaced_[section_]) {
      dst.clear();
      replaced_[section_] = true;
    }
    dst.push_back(group(v));
  }

  void assign(const std::string& key, const std::string& v) {
    using Setter = std::function<void(const std::string&)>;
    const std::map<std::string, Setter> table = setters();
    const auto it = table.find(section_ + "." + key);
    if (it == table.end()) fail(fmt::format("unknown key '{}' in [{}]", key, section_));
    it->second(v);
  }

  std::map<std::string, std::function<void(const std::string&)>> setters() {
    auto& m = c_.mesh;
    auto& f = c_.flow;
    return {
        {"mesh.x_min", [&](auto& v) { m.x_min = number(v); }},
        {"mesh.x_max", [&](auto& v) { m.x_max = number(v); }},
        {"mesh.y_min", [&](auto& v) { m.y_min = number(v); }},
        {"mesh.y_max", [&](auto& v) { m.y_max = number(v); }},
        {"mesh.nx", [&](auto& v) { m.nx = small_int(v); }},
        {"mesh.ny", [&](auto& v) { m.ny = small_int(v); }},
        {"mesh.obstacle",
         [&](auto& v) {
           if (v == "none") {
             m.obstacle.reset();
             return;
           }
           const auto p = split_list(v);
           if (p.size() != 4) fail("obstacle needs: x0, y0, x1, y1 (or none)");
           m.obstacle = mesh::Rect{number(p[0]), number(p[1]), number(p[2]), number(p[3])};
         }},
        {"mesh.left", [&](auto& v) { m.left = role(v); }},
        {"mesh.right", [&](auto& v) { m.right = role(v); }},
        {"mesh.bottom", [&](auto& v) { m.bottom = role(v); }},
        {"mesh.top", [&](auto& v) { m.top = role(v); }},
        {"flow.nu", [&](auto& v) { f.nu = number(v); }},
        {"flow.chord", [&](auto& v) { f.chord = number(v); }},
        {"flow.relax_velocity", [&](auto& v) { f.simple.relax_velocity = number(v); }},
        {"flow.relax_pressure", [&](auto& v) { f.simple.relax_pressure = number(v); }},
        {"flow.tolerance", [&](auto& v) { f.simple.tolerance = number(v); }},
        {"flow.max_iterations", [&](auto& v) { f.simple.max_iterations = small_int(v); }},
        {"flow.convection",
         [&](auto& v) {
           if (v == "central")
             f.simple.convection = fvm::Scheme::Central;
           else if (v == "upwind")
             f.simple.convection = fvm::Scheme::Upwind;
           else
             fail("convection must be central or upwind");
         }},
        {"run.seed",
         [&](auto& v) {
           const long long s = integer(v);
           if (s < 0) fail("seed must be nonnegative");
           c_.seed = static_cast<std::uint64_t>(s);
         }},
        {"run.output_dir", [&](auto& v) { c_.output_dir = v; }},
        {"training.group", [&](auto& v) { add_group(c_.training, v); }},
        {"rom.n_u", [&](auto& v) { c_.rom.layout.n_u = small_int(v); }},
        {"rom.n_p", [&](auto& v) { c_.rom.layout.n_p = small_int(v); }},
        {"rom.n_sup", [&](auto& v) { c_.rom.layout.n_sup = small_int(v); }},
        {"rom.newton_tolerance", [&](auto& v) { c_.rom.newton.tolerance = number(v); }},
        {"rom.newton_max_iterations", [&](auto& v) { c_.rom.newton.max_iterations = small_int(v); }},
        {"uq.group", [&](auto& v) { add_group(c_.uq.groups, v); }},
        {"uq.train", [&](auto& v) { c_.uq.train = small_int(v); }},
        {"uq.test", [&](auto& v) { c_.uq.test = small_int(v); }},
        {"uq.degree", [&](auto& v) { c_.uq.degree = small_int(v); }},
    };
  }

  PipelineConfig& c_;
  std::string section_;
  int lineno_ = 0;
  std::map<std::string, bool> replaced_;
};

int total(const std::vector<sampling::SampleGroup>& groups) {
  int n = 0;
  for (const auto& g : groups) n += g.count;
  return n;
}

std::string groups_text(const std::vector<sampling::SampleGroup>& groups) {
  std::string s;
  for (const auto& g : groups)
    s += fmt::format("group = {}, {}, {}, {}, {}\n", g.count, g.mean[0], g.stddev[0], g.mean[1], g.stddev[1]);
  return s;
}

} // namespace

PipelineConfig default_config() {
  PipelineConfig c;
  c.mesh.x_min = 0.0;
  c.mesh.x_max = 6.0;
  c.mesh.y_min = -1.5;
  c.mesh.y_max = 1.5;
  c.mesh.nx = 72;
  c.mesh.ny = 36;
  c.mesh.obstacle = mesh::Rect{1.5, -1.0 / 6.0, 2.5, 1.0 / 6.0};
  c.mesh.left = mesh::PatchRole::Inlet;
  c.mesh.bottom = mesh::PatchRole::Inlet;
  c.mesh.top = mesh::PatchRole::Inlet;
  c.mesh.right = mesh::PatchRole::Outlet;
  c.training = {{20, {0.0, 1.0}, {4.0, 0.1}},
                {10, {-5.0, 1.0}, {1.5, 0.1}},
                {10, {5.0, 1.0}, {1.5, 0.1}},
                {10, {-8.5, 1.0}, {1.0, 0.1}},
                {10, {8.5, 1.0}, {1.0, 0.1}}};
  c.uq.groups = {{300, {0.0, 1.0}, {4.0, 0.1}}};
  return c;
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c = default_config();
  Parser p(c);
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) p.line(++lineno, line);
  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const PipelineConfig& c) {
  const auto& m = c.mesh;
  std::string s;
  s += "# romuq pipeline configuration\n\n[mesh]\n";
  s += fmt::format("x_min = {}\nx_max = {}\ny_min = {}\ny_max = {}\nnx = {}\nny = {}\n", m.x_min, m.x_max, m.y_min,
                   m.y_max, m.nx, m.ny);
  if (m.obstacle)
    s += fmt::format("obstacle = {}, {}, {}, {}\n", m.obstacle->x0, m.obstacle->y0, m.obstacle->x1, m.obstacle->y1);
  else
    s += "obstacle = none\n";
  s += fmt::format("left = {}\nright = {}\nbottom = {}\ntop = {}\n", mesh::to_string(m.left), mesh::to_string(m.right),
                   mesh::to_string(m.bottom), mesh::to_string(m.top));
  s += "\n[flow]\n";
  s += fmt::format("nu = {}\nchord = {}\nrelax_velocity = {}\nrelax_pressure = {}\ntolerance = {}\nmax_iterations = {}\n",
                   c.flow.nu, c.flow.chord, c.flow.simple.relax_velocity, c.flow.simple.relax_pressure,
                   c.flow.simple.tolerance, c.flow.simple.max_iterations);
  s += fmt::format("convection = {}\n", c.flow.simple.convection == fvm::Scheme::Central ? "central" : "upwind");
  s += "\n[run]\n";
  s += fmt::format("seed = {}\noutput_dir = {}\n", c.seed, c.output_dir.string());
  s += "\n[training]\n# group = count, alpha_mean, alpha_std, speed_mean, speed_std\n";
  s += groups_text(c.training);
  s += "\n[rom]\n";
  s += fmt::format("n_u = {}\nn_p = {}\nn_sup = {}\nnewton_tolerance = {}\nnewton_max_iterations = {}\n",
                   c.rom.layout.n_u, c.rom.layout.n_p, c.rom.layout.n_sup, c.rom.newton.tolerance,
                   c.rom.newton.max_iterations);
  s += "\n[uq]\n";
  s += groups_text(c.uq.groups);
  s += fmt::format("train = {}\ntest = {}\ndegree = {}\n", c.uq.train, c.uq.test, c.uq.degree);
  return s;
}

void validate(const PipelineConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  try {
    mesh::StructuredMesh::build(c.mesh);
  } catch (const Error& e) {
    throw ConfigError(fmt::format("[mesh]: {}", e.what()));
  }
  require(c.mesh.obstacle.has_value(), "[mesh]: an obstacle is required to evaluate the lift coefficient");
  require(c.flow.nu > 0.0, "[flow] nu must be positive");
  require(c.flow.chord > 0.0, "[flow] chord must be positive");
  require(c.flow.simple.relax_velocity > 0.0 && c.flow.simple.relax_velocity <= 1.0,
          "[flow] relax_velocity must lie in (0, 1]");
  require(c.flow.simple.relax_pressure > 0.0 && c.flow.simple.relax_pressure <= 1.0,
          "[flow] relax_pressure must lie in (0, 1]");
  require(c.flow.simple.tolerance > 0.0, "[flow] tolerance must be positive");
  require(c.flow.simple.max_iterations >= 1, "[flow] max_iterations must be at least 1");

  for (const auto* groups : {&c.training, &c.uq.groups}) {
    require(!groups->empty(), "sampling: at least one group is required");
    for (const auto& g : *groups) {
      try {
        sampling::validate(g);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
  }

  const auto& l = c.rom.layout;
  require(l.n_u >= 1, "[rom] n_u must be at least 1");
  require(l.n_p >= 1, "[rom] n_p must be at least 1");
  require(l.n_p <= l.n_sup,
          "[rom] n_p must not exceed n_sup: the reduced continuity rows need one supremizer per pressure mode");
  const int n_train = total(c.training);
  require(n_train >= std::max(l.n_u, l.n_sup),
          fmt::format("[training] {} samples cannot provide {} velocity and {} pressure modes", n_train, l.n_u,
                      l.n_sup));
  require(c.rom.newton.tolerance > 0.0, "[rom] newton_tolerance must be positive");
  require(c.rom.newton.max_iterations >= 1, "[rom] newton_max_iterations must be at least 1");

  require(c.uq.degree >= 0 && c.uq.degree <= 10, "[uq] degree must lie in 0..10");
  const auto p1 = pce::basis_count(sampling::kDimensions, c.uq.degree);
  require(c.uq.train >= static_cast<int>(p1),
          fmt::format("[uq] train = {} is below the {} PCE coefficients of degree {}", c.uq.train, p1, c.uq.degree));
  require(c.uq.test >= 1, "[uq] test must be at least 1");
  require(c.uq.train + c.uq.test <= total(c.uq.groups),
          fmt::format("[uq] train + test = {} exceeds the {} UQ samples", c.uq.train + c.uq.test, total(c.uq.groups)));
}

std::uint64_t uq_seed(const PipelineConfig& c) { return sampling::group_seed(c.seed, 0x5551ULL); }

} // namespace romuq::config
