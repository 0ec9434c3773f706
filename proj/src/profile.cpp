#include "cuspwave/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cuspwave/errors.hpp"
#include "cuspwave/jet.hpp"

namespace cuspwave {

namespace {

std::array<double, 5> smooth_derivatives(double s) {
  const double u = 1.0 - s * s;
  if (u <= 1.0 / 700.0) return {0.0, 0.0, 0.0, 0.0, 0.0};
  using J = Jet<4>;
  const J sv = J::variable(s);
  const J g = 1.0 - 1.0 / (1.0 - sv * sv);
  const J b = exp(g);
  return {b.derivative(0), b.derivative(1), b.derivative(2), b.derivative(3), b.derivative(4)};
}

// Cumulative integral of the smooth profile, tabulated once and read back
// with cubic Hermite interpolation (the table stores I and I' = b).
class SmoothIntegralTable {
 public:
  static const SmoothIntegralTable& instance() {
    static const SmoothIntegralTable table;
    return table;
  }

  double operator()(double s) const {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return values_.back();
    const double pos = (s + 1.0) / h_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= kCells) i = kCells - 1;
    const double tau = pos - static_cast<double>(i);
    const double t2 = tau * tau, t3 = t2 * tau;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tau;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * values_[i] + h10 * h_ * slopes_[i] + h01 * values_[i + 1] + h11 * h_ * slopes_[i + 1];
  }

  double total() const { return values_.back(); }

 private:
  static constexpr std::size_t kCells = 8192;

  SmoothIntegralTable() : h_(2.0 / kCells), values_(kCells + 1), slopes_(kCells + 1) {
    // 8-point Gauss-Legendre per cell.
    static constexpr std::array<double, 4> nodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                 0.9602898564975363};
    static constexpr std::array<double, 4> weights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                   0.1012285362903763};
    double acc = 0.0;
    values_[0] = 0.0;
    for (std::size_t i = 0; i <= kCells; ++i) slopes_[i] = smooth_derivatives(-1.0 + h_ * i)[0];
    for (std::size_t i = 0; i < kCells; ++i) {
      const double a = -1.0 + h_ * i;
      const double mid = a + 0.5 * h_, half = 0.5 * h_;
      double cell = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        cell += weights[k] * (smooth_derivatives(mid - half * nodes[k])[0] + smooth_derivatives(mid + half * nodes[k])[0]);
      }
      acc += cell * half;
      values_[i + 1] = acc;
    }
  }

  double h_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

}  // namespace

const char* to_string(BumpTarget t) {
  switch (t) {
    case BumpTarget::R: return "R";
    case BumpTarget::Rt: return "Rt";
    case BumpTarget::W: return "W";
    case BumpTarget::Wt: return "Wt";
    case BumpTarget::q: return "q";
    case BumpTarget::qt: return "qt";
  }
  return "?";
}

const char* to_string(BumpShape s) { return s == BumpShape::Smooth ? "smooth" : "cosine"; }

BumpTarget parse_target(const std::string& s) {
  if (s == "R") return BumpTarget::R;
  if (s == "Rt") return BumpTarget::Rt;
  if (s == "W") return BumpTarget::W;
  if (s == "Wt") return BumpTarget::Wt;
  if (s == "q") return BumpTarget::q;
  if (s == "qt") return BumpTarget::qt;
  throw Error(ErrorKind::Parse, "unknown bump target '" + s + "'");
}

BumpShape parse_shape(const std::string& s) {
  if (s == "smooth") return BumpShape::Smooth;
  if (s == "cosine") return BumpShape::Cosine;
  throw Error(ErrorKind::Parse, "unknown bump shape '" + s + "'");
}

std::array<double, 5> shape_derivatives(BumpShape shape, double s) {
  if (!(s > -1.0 && s < 1.0)) return {0.0, 0.0, 0.0, 0.0, 0.0};
  if (shape == BumpShape::Smooth) return smooth_derivatives(s);
  constexpr double pi = std::numbers::pi;
  const double c = std::cos(pi * s), sn = std::sin(pi * s);
  return {0.5 * (1.0 + c), -0.5 * pi * sn, -0.5 * pi * pi * c, 0.5 * pi * pi * pi * sn,
          0.5 * pi * pi * pi * pi * c};
}

double shape_integral(BumpShape shape, double s) {
  if (shape == BumpShape::Smooth) return SmoothIntegralTable::instance()(s);
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 0.5 * (s + 1.0) + std::sin(std::numbers::pi * s) / (2.0 * std::numbers::pi);
}

double Bump::value(double x) const { return amplitude * shape_derivatives(shape, (x - center) / width)[0]; }

std::array<double, 5> Bump::derivatives(double x) const {
  auto d = shape_derivatives(shape, (x - center) / width);
  double scale = amplitude;
  for (auto& v : d) {
    v *= scale;
    scale /= width;
  }
  return d;
}

std::array<double, 5> Bump::antiderivative_jet(double x) const {
  const double s = (x - center) / width;
  const auto d = derivatives(x);
  return {amplitude * width * shape_integral(shape, s), d[0], d[1], d[2], d[3]};
}

double Bump::integral() const { return amplitude * width * shape_integral(shape, 1.0); }

void PerturbationSpec::validate() const {
  for (const auto& b : bumps) {
    if (!(b.width > 0.0)) throw Error(ErrorKind::InvalidArgument, "bump width must be positive");
    if (!std::isfinite(b.amplitude) || !std::isfinite(b.center))
      throw Error(ErrorKind::InvalidArgument, "bump amplitude and center must be finite");
  }
}

bool PerturbationSpec::has_target(BumpTarget t) const {
  return std::any_of(bumps.begin(), bumps.end(), [t](const Bump& b) { return b.target == t; });
}

std::pair<double, double> PerturbationSpec::support() const {
  if (bumps.empty()) return {0.0, 0.0};
  double lo = bumps.front().lo(), hi = bumps.front().hi();
  for (const auto& b : bumps) {
    lo = std::min(lo, b.lo());
    hi = std::max(hi, b.hi());
  }
  return {lo, hi};
}

double PerturbationSpec::support_radius() const {
  const auto [lo, hi] = support();
  return std::max(std::abs(lo), std::abs(hi));
}

double PerturbationSpec::value(BumpTarget t, double x) const {
  double v = 0.0;
  for (const auto& b : bumps)
    if (b.target == t) v += b.value(x);
  return v;
}

}  // namespace cuspwave
