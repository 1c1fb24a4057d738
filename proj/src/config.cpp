#include "latinpgd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace latinpgd {

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) throw ConfigError("not a finite number: '" + s + "'", line);
  return v;
}

template <typename Int>
Int to_int(const std::string& s, int line) {
  Int v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError("not an integer: '" + s + "'", line);
  return v;
}

bool to_bool(const std::string& s, int line) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigError("expected on/off: '" + s + "'", line);
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

const char* on_off(bool b) { return b ? "on" : "off"; }

std::string support_name(SupportKind k) { return k == SupportKind::face ? "face" : "midline"; }
std::string start_name(InitialVelocity v) { return v == InitialVelocity::rest ? "rest" : "quasi_static"; }
std::string frame_name(DampingFrame f) { return f == DampingFrame::absolute ? "absolute" : "relative"; }

struct Key {
  std::function<void(const std::string&, int)> set;
  bool required = false;
  bool repeatable = false;
};

using Table = std::map<std::string, Key>;

Table make_table(RunConfig& c) {
  Table t;
  auto num = [](double& x) { return [&x](const std::string& v, int l) { x = to_double(v, l); }; };
  auto integer = [](int& x) { return [&x](const std::string& v, int l) { x = to_int<int>(v, l); }; };
  auto flag = [](bool& x) { return [&x](const std::string& v, int l) { x = to_bool(v, l); }; };

  t[".name"] = {[&c](const std::string& v, int) { c.name = v; }};

  t["mesh.d1"] = {num(c.mesh.d1), true};
  t["mesh.d2"] = {num(c.mesh.d2), true};
  t["mesh.d3"] = {num(c.mesh.d3), true};
  t["mesh.nx"] = {integer(c.mesh.nx), true};
  t["mesh.ny"] = {integer(c.mesh.ny), true};
  t["mesh.nz"] = {integer(c.mesh.nz), true};
  t["mesh.support"] = {[&c](const std::string& v, int l) {
    if (v == "face") c.mesh.support = SupportKind::face;
    else if (v == "midline") c.mesh.support = SupportKind::midline;
    else throw ConfigError("support must be face or midline", l);
  }};

  MaterialParams& m = c.material;
  t["material.rho"] = {num(m.rho)};
  t["material.young"] = {num(m.young)};
  t["material.poisson"] = {num(m.poisson)};
  t["material.y0"] = {num(m.y0)};
  t["material.a_d"] = {num(m.a_d)};
  t["material.tau_c"] = {num(m.tau_c)};
  t["material.a_delay"] = {num(m.a_delay)};
  t["material.a_c"] = {num(m.a_c)};
  t["material.damping_ratio"] = {num(m.xi)};

  t["load.horizon"] = {num(c.load.horizon), true};
  t["load.sine"] = {[&c](const std::string& v, int l) {
    const auto w = split_ws(v);
    if (w.size() != 2) throw ConfigError("sine expects 'amplitude frequency'", l);
    c.load.sines.push_back({to_double(w[0], l), to_double(w[1], l)});
  }, true, true};

  SolverConfig& s = c.solver;
  t["solver.n_t"] = {integer(s.n_t), true};
  t["solver.xi_stop"] = {num(s.xi_stop), true};
  t["solver.zeta_stop"] = {num(s.zeta_stop)};
  t["solver.fixed_point_max"] = {integer(s.fixed_point_max)};
  t["solver.omega"] = {num(s.omega)};
  t["solver.mode_cap"] = {integer(s.mode_cap)};
  t["solver.seed"] = {[&s](const std::string& v, int l) { s.seed = to_int<std::uint64_t>(v, l); }};
  t["solver.damping"] = {flag(s.damping)};
  t["solver.damping_f1"] = {num(s.damping_f1)};
  t["solver.damping_f2"] = {num(s.damping_f2)};
  t["solver.tdg_scheme"] = {[&s](const std::string& v, int l) {
    try {
      s.scheme = parse_tdg_scheme(v);
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), l);
    }
  }};
  t["solver.nnr_tolerance"] = {num(s.nnr_tolerance)};
  t["solver.nnr_max_iterations"] = {integer(s.nnr_max_iterations)};
  t["solver.nnr_start"] = {[&s](const std::string& v, int l) {
    if (v == "rest") s.nnr_start = InitialVelocity::rest;
    else if (v == "quasi_static") s.nnr_start = InitialVelocity::quasi_static;
    else throw ConfigError("nnr_start must be rest or quasi_static", l);
  }};
  t["solver.nnr_damping"] = {[&s](const std::string& v, int l) {
    if (v == "absolute") s.nnr_damping = DampingFrame::absolute;
    else if (v == "relative") s.nnr_damping = DampingFrame::relative;
    else throw ConfigError("nnr_damping must be absolute or relative", l);
  }};
  t["solver.compress_tol"] = {num(s.compress_tol)};
  t["solver.modal_modes"] = {integer(s.modal_modes)};

  t["matpoint.amplitude"] = {num(c.matpoint.amplitude)};
  t["matpoint.frequency"] = {num(c.matpoint.frequency)};
  t["matpoint.duration"] = {num(c.matpoint.duration)};
  t["matpoint.samples"] = {integer(c.matpoint.samples)};

  t["output.directory"] = {[&c](const std::string& v, int) { c.output.directory = v; }};
  t["output.vtk"] = {flag(c.output.vtk)};
  t["output.snapshots"] = {[&c](const std::string& v, int l) {
    c.output.snapshots.clear();
    for (const auto& w : split_ws(v)) c.output.snapshots.push_back(to_double(w, l));
  }};
  t["output.timings"] = {flag(c.output.timings)};
  return t;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  Table table = make_table(c);
  std::map<std::string, int> seen;
  std::string section;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(text.substr(1, text.size() - 2));
      static const std::set<std::string> sections{"mesh", "material", "load", "solver", "matpoint", "output"};
      if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const std::string full = section + "." + key;
    const auto it = table.find(full);
    if (it == table.end())
      throw ConfigError("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"), line);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    if (seen.count(full) && !it->second.repeatable)
      throw ConfigError("duplicate key '" + key + "' (first on line " + std::to_string(seen[full]) + ")", line);
    it->second.set(value, line);
    seen.emplace(full, line);
  }
  std::string missing;
  for (const auto& [name, key] : table)
    if (key.required && !seen.count(name)) missing += (missing.empty() ? "" : ", ") + name;
  if (!missing.empty()) throw ConfigError("missing required keys: " + missing);
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("out of range: " + what);
  };
  require(mesh.d1 > 0 && mesh.d2 > 0 && mesh.d3 > 0, "mesh dimensions must be positive");
  require(mesh.nx >= 1 && mesh.ny >= 1 && mesh.nz >= 1, "mesh divisions must be >= 1");
  require(mesh.support == SupportKind::face || mesh.nz % 2 == 0, "midline supports need an even nz");
  try {
    material.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("out of range: ") + e.what());
  }
  require(load.horizon > 0, "load.horizon must be positive");
  require(!load.sines.empty(), "load needs at least one sine");
  for (const auto& s : load.sines) require(s.frequency >= 0, "sine frequency must be non-negative");
  require(solver.n_t >= 1, "solver.n_t must be >= 1");
  require(solver.xi_stop > 0, "solver.xi_stop must be positive");
  require(solver.zeta_stop > 0, "solver.zeta_stop must be positive");
  require(solver.fixed_point_max >= 1, "solver.fixed_point_max must be >= 1");
  require(solver.omega > 0 && solver.omega <= 1, "solver.omega must lie in (0, 1]");
  require(solver.mode_cap >= 0, "solver.mode_cap must be >= 0");
  require(solver.damping_f1 > 0 && solver.damping_f2 > solver.damping_f1, "need 0 < damping_f1 < damping_f2");
  require(solver.nnr_tolerance > 0, "solver.nnr_tolerance must be positive");
  require(solver.nnr_max_iterations >= 1, "solver.nnr_max_iterations must be >= 1");
  require(solver.compress_tol >= 0 && solver.compress_tol < 1, "solver.compress_tol must lie in [0, 1)");
  require(solver.modal_modes >= 1, "solver.modal_modes must be >= 1");
  require(matpoint.duration > 0 && matpoint.samples >= 2 && matpoint.frequency >= 0, "matpoint drive");
  require(!output.directory.empty(), "output.directory must not be empty");
  for (double t : output.snapshots) require(t >= 0 && t <= load.horizon, "snapshot instants must lie in [0, horizon]");
}

double RunConfig::max_amplitude() const {
  double a = 0;
  for (const auto& s : load.sines) a += std::abs(s.amplitude);
  return a;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  if (!c.name.empty()) o << "name = " << c.name << "\n\n";
  o << "[mesh]\n"
    << "d1 = " << fmt(c.mesh.d1) << "\nd2 = " << fmt(c.mesh.d2) << "\nd3 = " << fmt(c.mesh.d3) << "\n"
    << "nx = " << c.mesh.nx << "\nny = " << c.mesh.ny << "\nnz = " << c.mesh.nz << "\n"
    << "support = " << support_name(c.mesh.support) << "\n\n";
  const MaterialParams& m = c.material;
  o << "[material]\n"
    << "rho = " << fmt(m.rho) << "\nyoung = " << fmt(m.young) << "\npoisson = " << fmt(m.poisson) << "\n"
    << "y0 = " << fmt(m.y0) << "\na_d = " << fmt(m.a_d) << "\ntau_c = " << fmt(m.tau_c) << "\n"
    << "a_delay = " << fmt(m.a_delay) << "\na_c = " << fmt(m.a_c) << "\ndamping_ratio = " << fmt(m.xi) << "\n\n";
  o << "[load]\nhorizon = " << fmt(c.load.horizon) << "\n";
  for (const auto& s : c.load.sines) o << "sine = " << fmt(s.amplitude) << " " << fmt(s.frequency) << "\n";
  const SolverConfig& s = c.solver;
  o << "\n[solver]\n"
    << "n_t = " << s.n_t << "\nxi_stop = " << fmt(s.xi_stop) << "\nzeta_stop = " << fmt(s.zeta_stop) << "\n"
    << "fixed_point_max = " << s.fixed_point_max << "\nomega = " << fmt(s.omega) << "\n"
    << "mode_cap = " << s.mode_cap << "\nseed = " << s.seed << "\n"
    << "damping = " << on_off(s.damping) << "\ndamping_f1 = " << fmt(s.damping_f1)
    << "\ndamping_f2 = " << fmt(s.damping_f2) << "\n"
    << "tdg_scheme = " << to_string(s.scheme) << "\n"
    << "nnr_tolerance = " << fmt(s.nnr_tolerance) << "\nnnr_max_iterations = " << s.nnr_max_iterations << "\n"
    << "nnr_start = " << start_name(s.nnr_start) << "\nnnr_damping = " << frame_name(s.nnr_damping) << "\n"
    << "compress_tol = " << fmt(s.compress_tol) << "\nmodal_modes = " << s.modal_modes << "\n\n";
  o << "[matpoint]\n"
    << "amplitude = " << fmt(c.matpoint.amplitude) << "\nfrequency = " << fmt(c.matpoint.frequency) << "\n"
    << "duration = " << fmt(c.matpoint.duration) << "\nsamples = " << c.matpoint.samples << "\n\n";
  o << "[output]\ndirectory = " << c.output.directory << "\nvtk = " << on_off(c.output.vtk) << "\n";
  if (!c.output.snapshots.empty()) {
    o << "snapshots =";
    for (double t : c.output.snapshots) o << " " << fmt(t);
    o << "\n";
  }
  o << "timings = " << on_off(c.output.timings) << "\n";
  return o.str();
}

namespace {

RunConfig desk_base(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.mesh = {8.0, 0.3, 0.3, 16, 2, 2, SupportKind::midline};
  c.load.horizon = 2.0;
  c.solver.n_t = 100;
  c.solver.xi_stop = 5e-4;
  c.output.directory = "out/" + name;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"mono_sine", "multi_sine", "elastic", "beam_modal"}; }

RunConfig preset(const std::string& name) {
  if (name == "mono_sine") {
    RunConfig c = desk_base(name);
    // Amplitude derived by `calibrate` (max damage 0.42 at the monitored point).
    c.load.sines = {{4.25e-2, 3.0}};
    c.solver.n_t = 400;
    c.solver.damping = true;
    c.output.snapshots = {2.0};
    return c;
  }
  if (name == "multi_sine") {
    RunConfig c = desk_base(name);
    // Equal amplitudes derived by `calibrate`.
    const double a = 7.86e-3;
    c.load.sines = {{a, 1.0}, {a, 2.3}, {a, 3.6}, {a, 5.0}};
    c.solver.n_t = 400;
    c.solver.xi_stop = 4e-3;
    c.solver.damping = true;
    return c;
  }
  if (name == "elastic") {
    RunConfig c = desk_base(name);
    c.load.sines = {{1e-3, 3.0}};
    c.solver.xi_stop = 1e-6;
    return c;
  }
  if (name == "beam_modal") {
    RunConfig c = desk_base(name);
    c.mesh.nx = 48;
    c.mesh.ny = 4;
    c.mesh.nz = 4;
    c.load.sines = {{1e-3, 3.0}};
    c.solver.modal_modes = 5;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

Mesh build_mesh(const MeshConfig& m) { return generate_box_mesh(m.d1, m.d2, m.d3, m.nx, m.ny, m.nz, m.support); }

RayleighDamping build_damping(const RunConfig& c) {
  if (!c.solver.damping) return {};
  return rayleigh_coeffs(c.material.xi, c.solver.damping_f1, c.solver.damping_f2);
}

NnrConfig build_nnr(const RunConfig& c) {
  NnrConfig n;
  n.tolerance = c.solver.nnr_tolerance;
  n.max_iterations = c.solver.nnr_max_iterations;
  n.horizon = c.load.horizon;
  n.steps = 2 * c.solver.n_t;
  n.start = c.solver.nnr_start;
  n.damping = c.solver.nnr_damping;
  return n;
}

LoadCase build_load(const RunConfig& c) {
  LoadCase l;
  l.sines = c.load.sines;
  return l;
}

}  // namespace latinpgd
