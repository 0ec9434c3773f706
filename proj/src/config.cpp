#include "cuspwave/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "cuspwave/errors.hpp"

namespace cuspwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  const auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || p != last) fail(line, "expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v, int line) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) fail(line, "expected an integer, got '" + v + "'");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  background.validate();
  grid.validate();
  if (scheme.stencil_order != 2 && scheme.stencil_order != 4)
    throw Error(ErrorKind::InvalidArgument, "stencil_order must be 2 or 4");
  if (!(scheme.cfl > 0.0 && scheme.cfl <= 1.0)) throw Error(ErrorKind::InvalidArgument, "cfl must lie in (0, 1]");
  perturbation.validate();
  if (output.snapshot_stride < 0) throw Error(ErrorKind::InvalidArgument, "snapshot_stride must be >= 0");
  if (diagnostics.k < 1 || diagnostics.k > 3) throw Error(ErrorKind::InvalidArgument, "diagnostics k must be 1..3");
  if (isometry) Isometry(isometry->a, isometry->b, isometry->c, isometry->d);
}

void RunConfig::set_dx(double dx) { grid.nx = GridSpec::nx_for_dx(grid.L, dx); }

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  std::optional<double> dx;
  bool nx_set = false;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string l = trim(raw);
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') fail(line, "malformed section header");
      section = trim(l.substr(1, l.size() - 2));
      if (section == "isometry" && !cfg.isometry) cfg.isometry = IsometrySpec{};
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(l.substr(0, eq));
    const std::string val = trim(l.substr(eq + 1));
    auto num = [&] { return to_double(val, line); };
    auto unknown = [&] { fail(line, "unknown key '" + key + "' in [" + section + "]"); };

    if (section == "background") {
      auto& b = cfg.background;
      if (key == "R0") b.R0 = num();
      else if (key == "W0") b.W0 = num();
      else if (key == "W1") b.W1 = num();
      else if (key == "q0") b.q0 = num();
      else if (key == "a0") b.a0 = num();
      else unknown();
    } else if (section == "grid") {
      auto& g = cfg.grid;
      if (key == "L") g.L = num();
      else if (key == "nx") { g.nx = to_int(val, line); nx_set = true; }
      else if (key == "dx") dx = num();
      else if (key == "t_final") g.t_final = num();
      else if (key == "output_stride") g.output_stride = to_int(val, line);
      else unknown();
    } else if (section == "scheme") {
      if (key == "stencil_order") cfg.scheme.stencil_order = to_int(val, line);
      else if (key == "cfl") cfg.scheme.cfl = num();
      else unknown();
    } else if (section == "perturbation") {
      if (key != "bump") unknown();
      std::istringstream ws(val);
      std::vector<std::string> parts;
      for (std::string w; ws >> w;) parts.push_back(w);
      if (parts.size() != 4 && parts.size() != 5) fail(line, "bump = target amplitude center width [shape]");
      Bump b;
      try {
        b.target = parse_target(parts[0]);
        if (parts.size() == 5) b.shape = parse_shape(parts[4]);
      } catch (const Error& e) {
        fail(line, e.what());
      }
      b.amplitude = to_double(parts[1], line);
      b.center = to_double(parts[2], line);
      b.width = to_double(parts[3], line);
      cfg.perturbation.bumps.push_back(b);
    } else if (section == "lapse") {
      if (key != "mode") unknown();
      try {
        cfg.lapse = parse_lapse_mode(val);
      } catch (const Error& e) {
        fail(line, e.what());
      }
    } else if (section == "isometry") {
      auto& m = *cfg.isometry;
      if (key == "a") m.a = num();
      else if (key == "b") m.b = num();
      else if (key == "c") m.c = num();
      else if (key == "d") m.d = num();
      else unknown();
    } else if (section == "output") {
      if (key == "csv") cfg.output.csv = val;
      else if (key == "verdict") cfg.output.verdict = val;
      else if (key == "snapshot_stride") cfg.output.snapshot_stride = to_int(val, line);
      else unknown();
    } else if (section == "diagnostics") {
      if (key == "k") cfg.diagnostics.k = to_int(val, line);
      else if (key == "window_start") cfg.diagnostics.window_start = num();
      else if (key == "c_max") cfg.diagnostics.c_max = num();
      else if (key == "lambda_max") cfg.diagnostics.lambda_max = num();
      else if (key == "residual_tol") cfg.diagnostics.residual_tol = num();
      else if (key == "drift_constant") cfg.diagnostics.drift_constant = num();
      else unknown();
    } else {
      fail(line, section.empty() ? "key outside any section" : "unknown section [" + section + "]");
    }
  }
  if (dx) {
    if (nx_set) throw Error(ErrorKind::Parse, "give either nx or dx, not both");
    if (!(*dx > 0.0)) throw Error(ErrorKind::Parse, "dx must be positive");
    cfg.set_dx(*dx);
  }
  cfg.grid.cfl = cfg.scheme.cfl;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Parse, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream o;
  const auto& b = cfg.background;
  o << "[background]\nR0 = " << fmt(b.R0) << "\nW0 = " << fmt(b.W0) << "\nW1 = " << fmt(b.W1)
    << "\nq0 = " << fmt(b.q0) << "\na0 = " << fmt(b.a0) << "\n\n";
  const auto& g = cfg.grid;
  o << "[grid]\nL = " << fmt(g.L) << "\nnx = " << g.nx << "\nt_final = " << fmt(g.t_final)
    << "\noutput_stride = " << g.output_stride << "\n\n";
  o << "[scheme]\nstencil_order = " << cfg.scheme.stencil_order << "\ncfl = " << fmt(cfg.scheme.cfl) << "\n\n";
  o << "[perturbation]\n";
  for (const auto& bump : cfg.perturbation.bumps)
    o << "bump = " << to_string(bump.target) << ' ' << fmt(bump.amplitude) << ' ' << fmt(bump.center) << ' '
      << fmt(bump.width) << ' ' << to_string(bump.shape) << '\n';
  o << "\n[lapse]\nmode = " << to_string(cfg.lapse) << "\n\n";
  if (cfg.isometry) {
    const auto& m = *cfg.isometry;
    o << "[isometry]\na = " << fmt(m.a) << "\nb = " << fmt(m.b) << "\nc = " << fmt(m.c) << "\nd = " << fmt(m.d)
      << "\n\n";
  }
  o << "[output]\ncsv = " << cfg.output.csv << "\nverdict = " << cfg.output.verdict
    << "\nsnapshot_stride = " << cfg.output.snapshot_stride << "\n\n";
  const auto& d = cfg.diagnostics;
  o << "[diagnostics]\nk = " << d.k << "\nwindow_start = " << fmt(d.window_start) << "\nc_max = " << fmt(d.c_max)
    << "\nlambda_max = " << fmt(d.lambda_max) << "\nresidual_tol = " << fmt(d.residual_tol)
    << "\ndrift_constant = " << fmt(d.drift_constant) << "\n";
  return o.str();
}

}  // namespace cuspwave
