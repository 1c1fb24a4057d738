#include "latinpgd/io.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace latinpgd {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return o.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return sha256_hex(s.str());
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CsvTable: empty header");
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width mismatch");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_number(row[i]);
  }
  body_ += '\n';
  ++rows_;
}

std::string CsvTable::str() const {
  std::string s;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) s += ',';
    s += header_[i];
  }
  return s + '\n' + body_;
}

Eigen::VectorXd element_average(const Mesh& mesh, const Eigen::VectorXd& gauss_values) {
  if (gauss_values.size() != mesh.num_gauss()) throw std::invalid_argument("element_average: size mismatch");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(mesh.num_elements());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(mesh.num_elements());
  for (int g = 0; g < mesh.num_gauss(); ++g) {
    sum(mesh.gauss[g].element) += gauss_values(g);
    count(mesh.gauss[g].element) += 1;
  }
  return sum.cwiseQuotient(count.cwiseMax(1.0));
}

std::string vtk_snapshot(const Mesh& mesh, const Eigen::VectorXd& u,
                         const std::map<std::string, Eigen::VectorXd>& cell_scalars, const std::string& title) {
  if (u.size() != mesh.num_dofs()) throw std::invalid_argument("vtk_snapshot: displacement size mismatch");
  std::string s = "# vtk DataFile Version 2.0\n" + title + "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  s += "POINTS " + std::to_string(mesh.num_nodes()) + " double\n";
  for (int n = 0; n < mesh.num_nodes(); ++n)
    s += format_number(mesh.nodes(n, 0)) + ' ' + format_number(mesh.nodes(n, 1)) + ' ' + format_number(mesh.nodes(n, 2)) + '\n';
  const int ne = mesh.num_elements();
  s += "CELLS " + std::to_string(ne) + ' ' + std::to_string(9 * ne) + '\n';
  for (const auto& e : mesh.elements) {
    s += '8';
    for (int n : e) s += ' ' + std::to_string(n);
    s += '\n';
  }
  s += "CELL_TYPES " + std::to_string(ne) + '\n';
  for (int e = 0; e < ne; ++e) s += "12\n";
  s += "POINT_DATA " + std::to_string(mesh.num_nodes()) + "\nVECTORS displacement double\n";
  for (int n = 0; n < mesh.num_nodes(); ++n)
    s += format_number(u(3 * n)) + ' ' + format_number(u(3 * n + 1)) + ' ' + format_number(u(3 * n + 2)) + '\n';
  if (!cell_scalars.empty()) s += "CELL_DATA " + std::to_string(ne) + '\n';
  for (const auto& [name, v] : cell_scalars) {
    if (v.size() != ne) throw std::invalid_argument("vtk_snapshot: cell scalar '" + name + "' size mismatch");
    s += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e) s += format_number(v(e)) + '\n';
  }
  return s;
}

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void OutputDir::write(const std::string& name, const std::string& content, const std::string& schema) {
  std::ofstream out(root_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (root_ / name).string());
  out << content;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + (root_ / name).string());
  for (auto& e : entries_)
    if (e.name == name) {
      e = {name, schema, sha256_hex(content), content.size()};
      return;
    }
  entries_.push_back({name, schema, sha256_hex(content), content.size()});
}

void OutputDir::write_manifest(const std::map<std::string, std::string>& provenance) const {
  nlohmann::ordered_json j;
  j["manifest_version"] = 1;
  j["provenance"] = provenance;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& e : entries_)
    j["files"].push_back({{"name", e.name}, {"schema", e.schema}, {"bytes", e.bytes}, {"sha256", e.sha256}});
  std::ofstream out(root_ / "manifest.json", std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest in " + root_.string());
}

std::vector<std::string> OutputDir::files() const {
  std::vector<std::string> f;
  for (const auto& e : entries_) f.push_back(e.name);
  return f;
}

std::string verify_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) return "missing manifest.json";
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    return std::string("unreadable manifest: ") + e.what();
  }
  for (const auto& f : j.at("files")) {
    const std::string name = f.at("name");
    if (!fs::exists(dir / name)) return "missing file " + name;
    if (sha256_file(dir / name) != f.at("sha256").get<std::string>()) return "checksum mismatch for " + name;
  }
  return {};
}

}  // namespace latinpgd
