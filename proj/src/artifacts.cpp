#include "romuq/artifacts.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <openssl/evp.h>

#include "romuq/error.hpp"

namespace romuq::artifacts {

using mesh::BoundaryCondition;
using mesh::ScalarField;
using mesh::Vec2;
using mesh::VectorField;
using mesh::VelocityField;

namespace {

constexpr const char* kBasisMagic = "romuq-basis";
constexpr int kBasisVersion = 1;
constexpr const char* kManifest = "manifest.sha256";
constexpr const char* kStatus = "STATUS";

template <class T>
T read_value(std::istream& is, const char* what) {
  T v;
  if (!(is >> v)) throw ArtifactError(fmt::format("basis file: cannot read {}", what));
  return v;
}

void expect(std::istream& is, const std::string& tag) {
  const auto got = read_value<std::string>(is, tag.c_str());
  if (got != tag) throw ArtifactError(fmt::format("basis file: expected '{}', found '{}'", tag, got));
}

void put(std::ostream& os, double v) { fmt::print(os, "{:.17g}", v); }
void put(std::ostream& os, Vec2 v) { fmt::print(os, "{:.17g} {:.17g}", v.x, v.y); }
void get(std::istream& is, double& v) { v = read_value<double>(is, "value"); }
void get(std::istream& is, Vec2& v) {
  v.x = read_value<double>(is, "value");
  v.y = read_value<double>(is, "value");
}

template <class T>
void write_cells(std::ostream& os, const mesh::CellField<T>& f) {
  for (const auto& bc : f.bcs()) {
    fmt::print(os, "bc {} ", static_cast<int>(bc.kind));
    put(os, bc.value);
    os << '\n';
  }
  for (const T& v : f.values()) {
    put(os, v);
    os << '\n';
  }
}

template <class T>
mesh::CellField<T> read_cells(std::istream& is, const mesh::MeshPtr& m) {
  std::vector<BoundaryCondition<T>> bcs(m->patch_count());
  for (auto& bc : bcs) {
    expect(is, "bc");
    const int kind = read_value<int>(is, "boundary kind");
    if (kind < 0 || kind > 2) throw ArtifactError("basis file: bad boundary kind");
    bc.kind = static_cast<typename BoundaryCondition<T>::Kind>(kind);
    get(is, bc.value);
  }
  std::vector<T> values(m->cell_count());
  for (T& v : values) get(is, v);
  return mesh::CellField<T>(m, std::move(values), std::move(bcs));
}

void write_velocity(std::ostream& os, const VelocityField& u) {
  write_cells(os, u.cells);
  os << "flux\n";
  for (double f : u.flux) {
    put(os, f);
    os << '\n';
  }
}

VelocityField read_velocity(std::istream& is, const mesh::MeshPtr& m) {
  VectorField cells = read_cells<Vec2>(is, m);
  expect(is, "flux");
  std::vector<double> flux(m->face_count());
  for (double& f : flux) get(is, f);
  return VelocityField(std::move(cells), std::move(flux));
}

void write_spectrum(std::ostream& os, const char* name, const linalg::DenseVector& v) {
  fmt::print(os, "spectrum {} {}", name, v.size());
  for (double x : v) fmt::print(os, " {:.17g}", x);
  os << '\n';
}

linalg::DenseVector read_spectrum(std::istream& is, const char* name) {
  expect(is, "spectrum");
  expect(is, name);
  linalg::DenseVector v(read_value<std::size_t>(is, "spectrum length"));
  for (double& x : v) x = read_value<double>(is, "eigenvalue");
  return v;
}

template <class Field, class Writer>
void write_modes(std::ostream& os, const char* name, const std::vector<Field>& modes, Writer w) {
  fmt::print(os, "modes {} {}\n", name, modes.size());
  for (const Field& f : modes) w(os, f);
}

template <class Field, class Reader>
std::vector<Field> read_modes(std::istream& is, const char* name, Reader r) {
  expect(is, "modes");
  expect(is, name);
  const auto n = read_value<std::size_t>(is, "mode count");
  std::vector<Field> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(r(is));
  return out;
}

std::vector<fs::path> stage_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir);
    if (rel == kManifest || rel == kStatus) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

} // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError(fmt::format("cannot open '{}' for hashing", path.string()));
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw ArtifactError("SHA-256 initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

void write_basis(std::ostream& os, const rom::ReducedBasis& b) {
  const auto& m = *b.lifting.x.mesh();
  fmt::print(os, "{} {}\n", kBasisMagic, kBasisVersion);
  fmt::print(os, "mesh {} {} {} {} {}\n", m.nx(), m.ny(), m.cell_count(), m.face_count(), m.patch_count());
  write_spectrum(os, "u", b.velocity.eigenvalues);
  write_spectrum(os, "p", b.pressure.eigenvalues);
  write_spectrum(os, "u_sup", b.supremizers.eigenvalues);
  write_modes(os, "lift", std::vector<VelocityField>{b.lifting.x, b.lifting.y}, write_velocity);
  write_modes(os, "u", b.velocity.modes, write_velocity);
  write_modes(os, "u_sup", b.supremizers.modes, write_velocity);
  write_modes(os, "p", b.pressure.modes, [](std::ostream& o, const ScalarField& f) { write_cells(o, f); });
  if (!os) throw ArtifactError("basis file: write failed");
}

rom::ReducedBasis read_basis(std::istream& is, const mesh::MeshPtr& mesh) {
  if (read_value<std::string>(is, "header") != kBasisMagic) throw ArtifactError("basis file: bad header");
  if (read_value<int>(is, "version") != kBasisVersion) throw ArtifactError("basis file: unsupported version");
  expect(is, "mesh");
  const int sig[] = {mesh->nx(), mesh->ny(), mesh->cell_count(), mesh->face_count(), mesh->patch_count()};
  for (int s : sig)
    if (read_value<int>(is, "mesh signature") != s)
      throw ArtifactError("basis file was written for a different mesh than the configured one");
  rom::ReducedBasis b;
  b.velocity.kind = pod::BasisKind::Velocity;
  b.pressure.kind = pod::BasisKind::Pressure;
  b.supremizers.kind = pod::BasisKind::Supremizer;
  b.velocity.eigenvalues = read_spectrum(is, "u");
  b.pressure.eigenvalues = read_spectrum(is, "p");
  b.supremizers.eigenvalues = read_spectrum(is, "u_sup");
  auto rv = [&](std::istream& s) { return read_velocity(s, mesh); };
  auto lift = read_modes<VelocityField>(is, "lift", rv);
  if (lift.size() != 2) throw ArtifactError("basis file: lifting pair must have two fields");
  b.lifting = {std::move(lift[0]), std::move(lift[1])};
  b.velocity.modes = read_modes<VelocityField>(is, "u", rv);
  b.supremizers.modes = read_modes<VelocityField>(is, "u_sup", rv);
  b.pressure.modes = read_modes<ScalarField>(is, "p", [&](std::istream& s) { return read_cells<double>(s, mesh); });
  return b;
}

Stage::Stage(fs::path dir, std::string name) : dir_(std::move(dir)), name_(std::move(name)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ArtifactError(fmt::format("cannot create '{}': {}", dir_.string(), ec.message()));
  mark_incomplete("running");
}

void Stage::mark_incomplete(const std::string& reason) const {
  write_text(dir_ / kStatus, fmt::format("incomplete: {}\n", reason));
}

void Stage::complete() const {
  std::string manifest;
  for (const fs::path& rel : stage_files(dir_))
    manifest += fmt::format("{}  {}\n", sha256_file(dir_ / rel), rel.generic_string());
  write_text(dir_ / kManifest, manifest);
  write_text(dir_ / kStatus, "complete\n");
}

bool Stage::is_complete(const fs::path& dir) {
  std::ifstream in(dir / kStatus);
  std::string line;
  return in && std::getline(in, line) && line == "complete";
}

void Stage::require_complete(const fs::path& dir, const std::string& what) {
  if (!is_complete(dir))
    throw ArtifactError(fmt::format("{} missing or incomplete in '{}'; run the stage that produces it first", what,
                                    dir.string()));
}

void write_text(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError(fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!out) throw ArtifactError(fmt::format("write to '{}' failed", path.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw ArtifactError(fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError(fmt::format("missing artifact '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw ArtifactError(fmt::format("table has no column '{}'", name));
  const std::string& s = rows.at(row)[c];
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArtifactError(fmt::format("table row {} column '{}': '{}' is not a number", row + 1, name, s));
  }
}

Table read_table(const fs::path& path) {
  std::istringstream in(read_text(path));
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  };
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError(fmt::format("'{}' is empty", path.string()));
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line));
    if (t.rows.back().size() != t.header.size())
      throw ArtifactError(fmt::format("'{}': row {} has {} columns, header has {}", path.string(), t.rows.size(),
                                      t.rows.back().size(), t.header.size()));
  }
  return t;
}

} // namespace romuq::artifacts
