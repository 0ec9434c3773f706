#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace cuspwave {

enum class BumpTarget { R, Rt, W, Wt, q, qt };
enum class BumpShape {
  Smooth,  // exp(1 - 1/(1 - s^2)), C-infinity, peak 1
  Cosine,  // (1 + cos(pi s)) / 2, C^1 at the edges
};

const char* to_string(BumpTarget t);
const char* to_string(BumpShape s);
BumpTarget parse_target(const std::string& s);
BumpShape parse_shape(const std::string& s);

// Derivatives b, b', ..., b'''' of the unit profile on [-1, 1] (zero outside).
std::array<double, 5> shape_derivatives(BumpShape shape, double s);
// ∫_{-1}^{s} b.
double shape_integral(BumpShape shape, double s);

struct Bump {
  BumpTarget target = BumpTarget::W;
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
  BumpShape shape = BumpShape::Smooth;

  double lo() const { return center - width; }
  double hi() const { return center + width; }

  double value(double x) const;
  // f, f', f'', f''', f''''
  std::array<double, 5> derivatives(double x) const;
  // F, f, f', f'', f''' with F the antiderivative vanishing left of the support.
  std::array<double, 5> antiderivative_jet(double x) const;
  double integral() const;
};

struct PerturbationSpec {
  std::vector<Bump> bumps;

  void validate() const;
  bool empty() const { return bumps.empty(); }
  bool has_target(BumpTarget t) const;
  // [lo, hi] covering all bumps; (0, 0) when empty.
  std::pair<double, double> support() const;
  double support_radius() const;
  // Sum of all bumps with the given target.
  double value(BumpTarget t, double x) const;
};

}  // namespace cuspwave
