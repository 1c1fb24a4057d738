// Run configuration: sectioned key = value text, presets, canonical dump.
#pragma once

#include "latinpgd/material.hpp"
#include "latinpgd/mesh.hpp"
#include "latinpgd/newmark.hpp"
#include "latinpgd/time_grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace latinpgd {

/// Input error; line is 0 when the problem is not tied to one line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

struct MeshConfig {
  double d1 = 0, d2 = 0, d3 = 0;  // m
  int nx = 0, ny = 0, nz = 0;
  SupportKind support = SupportKind::midline;
};

struct LoadConfig {
  double horizon = 0;  // s
  std::vector<SineComponent> sines;
};

struct SolverConfig {
  int n_t = 0;
  double xi_stop = 0;
  double zeta_stop = 1e-2;
  int fixed_point_max = 5;
  double omega = 0.4;
  int mode_cap = 150;
  std::uint64_t seed = 1;
  bool damping = false;
  double damping_f1 = 8.99;  // Hz, Rayleigh anchor frequencies
  double damping_f2 = 45.8;
  TdgScheme scheme = TdgScheme::jump;
  double nnr_tolerance = 1e-4;
  int nnr_max_iterations = 200;
  InitialVelocity nnr_start = InitialVelocity::quasi_static;
  DampingFrame nnr_damping = DampingFrame::relative;
  double compress_tol = 0;  // 0 disables compression after convergence
  int modal_modes = 5;
};

/// Uniaxial strain drive of the 0D material run:
/// eps_x(t) = amplitude (t / duration) sin(2 pi frequency t).
struct MatpointConfig {
  double amplitude = 4e-4;
  double frequency = 2;
  double duration = 2;
  int samples = 2001;
};

struct OutputConfig {
  std::string directory = "out";
  bool vtk = false;
  std::vector<double> snapshots;  // s
  bool timings = true;
};

struct RunConfig {
  std::string name;
  MeshConfig mesh;
  MaterialParams material;
  LoadConfig load;
  SolverConfig solver;
  MatpointConfig matpoint;
  OutputConfig output;

  /// Range checks; throws ConfigError.
  void validate() const;
  double max_amplitude() const;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

/// Canonical text of a configuration; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& config);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);

Mesh build_mesh(const MeshConfig& m);
RayleighDamping build_damping(const RunConfig& c);
NnrConfig build_nnr(const RunConfig& c);
LoadCase build_load(const RunConfig& c);

}  // namespace latinpgd
