#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "romuq/rom.hpp"

namespace romuq::artifacts {

namespace fs = std::filesystem;

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

/// Lossless text form of a reduced basis: lifting pair, velocity,
/// supremizer and pressure modes with their boundary tables and face
/// fluxes, plus the eigenvalue spectra. Reading checks the mesh signature.
void write_basis(std::ostream& os, const rom::ReducedBasis& basis);
rom::ReducedBasis read_basis(std::istream& is, const mesh::MeshPtr& mesh);

/// Stage directories carry a STATUS file ("complete" or "incomplete: ...")
/// and a manifest.sha256 in `sha256sum -c` format covering every other file
/// below the directory.
class Stage {
public:
  Stage(fs::path dir, std::string name);

  const fs::path& dir() const noexcept { return dir_; }
  fs::path file(const std::string& relative) const { return dir_ / relative; }

  void mark_incomplete(const std::string& reason) const;
  /// Writes the manifest, then STATUS = complete.
  void complete() const;

  static bool is_complete(const fs::path& dir);
  /// Throws ArtifactError unless `dir` holds a complete stage.
  static void require_complete(const fs::path& dir, const std::string& what);

private:
  fs::path dir_;
  std::string name_;
};

/// Writes `text` to `path` atomically enough for a batch pipeline (temp file
/// plus rename). Throws ArtifactError on failure.
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

/// Comma-separated rows with a header; throws ArtifactError on ragged rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  double number(std::size_t row, const std::string& name) const;
};

Table read_table(const fs::path& path);

} // namespace romuq::artifacts
