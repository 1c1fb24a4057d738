// Output emission: CSV tables, legacy VTK snapshots, checksummed manifest.
#pragma once

#include "latinpgd/mesh.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace latinpgd {

/// Shortest round-trip decimal text of a double.
std::string format_number(double v);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Comma-separated table with a fixed header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  std::string str() const;
  int rows() const { return rows_; }

 private:
  std::vector<std::string> header_;
  std::string body_;
  int rows_ = 0;
};

/// Legacy ASCII VTK (2.0) of a hexahedral mesh with nodal displacement and
/// per-element scalars.
std::string vtk_snapshot(const Mesh& mesh, const Eigen::VectorXd& u, const std::map<std::string, Eigen::VectorXd>& cell_scalars,
                         const std::string& title);

/// Average of a per-Gauss-point scalar over each element.
Eigen::VectorXd element_average(const Mesh& mesh, const Eigen::VectorXd& gauss_values);

/// Directory of run outputs. Every file goes through write() so that the
/// manifest lists it with its schema tag and SHA-256.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& name, const std::string& content, const std::string& schema);
  /// Writes manifest.json: provenance entries plus the file list.
  void write_manifest(const std::map<std::string, std::string>& provenance) const;
  std::vector<std::string> files() const;

 private:
  struct Entry {
    std::string name, schema, sha256;
    std::size_t bytes = 0;
  };
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

/// Recomputes every checksum listed in dir/manifest.json. Returns an empty
/// string when all match, else a description of the first mismatch.
std::string verify_manifest(const std::filesystem::path& dir);

}  // namespace latinpgd
