#include "cuspwave/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cuspwave/errors.hpp"

namespace cuspwave {

void GridSpec::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidArgument, "grid L must be positive");
  if (nx < 16) throw Error(ErrorKind::InvalidArgument, "grid nx must be at least 16");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw Error(ErrorKind::InvalidArgument, "cfl must lie in (0, 1]");
  if (!(t_final > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_final must be positive");
  if (output_stride < 1) throw Error(ErrorKind::InvalidArgument, "output_stride must be >= 1");
}

int GridSpec::nx_for_dx(double L, double dx) {
  const double cells = 2.0 * L / dx;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * cells)
    throw Error(ErrorKind::InvalidArgument, "dx does not divide the domain [-L, L] evenly");
  return static_cast<int>(rounded) + 1;
}

Grid::Grid(GridSpec spec, int stencil_order) : spec_(spec), order_(stencil_order) {
  spec_.validate();
  if (order_ != 2 && order_ != 4) throw Error(ErrorKind::InvalidArgument, "stencil order must be 2 or 4");
  dx_ = spec_.dx();
  const double dt_max = spec_.cfl * dx_;
  steps_ = static_cast<int>(std::ceil(spec_.t_final / dt_max - 1e-9));
  steps_ = std::max(steps_, 1);
  dt_ = spec_.t_final / steps_;
  xs_.resize(static_cast<std::size_t>(spec_.nx));
  for (int i = 0; i < spec_.nx; ++i) xs_[static_cast<std::size_t>(i)] = -spec_.L + i * dx_;
  xs_.back() = spec_.L;
}

Field Grid::sample(const std::function<double(double)>& f) const {
  Field out(xs_.size());
  std::transform(xs_.begin(), xs_.end(), out.begin(), f);
  return out;
}

namespace {

void check_size(const Grid& grid, std::span<const double> f) {
  if (static_cast<int>(f.size()) != grid.size())
    throw Error(ErrorKind::InvalidArgument, "field length does not match grid");
}

}  // namespace

namespace {

// Σ_k c[k] (f[base + dir k] - f[base]) for stencils whose weights sum to zero;
// constants map to exactly zero.
template <std::size_t M>
double closure(std::span<const double> f, std::size_t base, long dir, const std::array<double, M>& c) {
  double s = 0.0;
  for (std::size_t k = 1; k < M; ++k) s += c[k] * (f[static_cast<std::size_t>(static_cast<long>(base) + dir * static_cast<long>(k))] - f[base]);
  return s;
}

}  // namespace

// Stencils are written as sums of differences so that constants map to zero exactly.
Field d1(const Grid& grid, std::span<const double> f) {
  check_size(grid, f);
  const std::size_t n = f.size();
  Field out(n);
  const double h = grid.dx();
  if (grid.stencil_order() == 2) {
    const double c = 1.0 / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * c;
    constexpr std::array<double, 3> e{-3.0, 4.0, -1.0};
    out[0] = closure(f, 0, 1, e) * c;
    out[n - 1] = -closure(f, n - 1, -1, e) * c;
    return out;
  }
  const double c = 1.0 / (12.0 * h);
  for (std::size_t i = 2; i + 2 < n; ++i) out[i] = (8.0 * (f[i + 1] - f[i - 1]) - (f[i + 2] - f[i - 2])) * c;
  constexpr std::array<double, 5> e0{-25.0, 48.0, -36.0, 16.0, -3.0};
  out[0] = closure(f, 0, 1, e0) * c;
  out[n - 1] = -closure(f, n - 1, -1, e0) * c;
  // f'(x1) ≈ (-3 f0 - 10 f1 + 18 f2 - 6 f3 + f4) / 12h
  auto near = [&](std::size_t i, long dir) {
    const auto at = [&](long k) { return f[static_cast<std::size_t>(static_cast<long>(i) + dir * k)] - f[i]; };
    return -3.0 * at(-1) + 18.0 * at(1) - 6.0 * at(2) + at(3);
  };
  out[1] = near(1, 1) * c;
  out[n - 2] = -near(n - 2, -1) * c;
  return out;
}

Field d2(const Grid& grid, std::span<const double> f) {
  check_size(grid, f);
  const std::size_t n = f.size();
  Field out(n);
  const double h = grid.dx();
  if (grid.stencil_order() == 2) {
    const double c = 1.0 / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = ((f[i + 1] - f[i]) + (f[i - 1] - f[i])) * c;
    constexpr std::array<double, 4> e{2.0, -5.0, 4.0, -1.0};
    out[0] = closure(f, 0, 1, e) * c;
    out[n - 1] = closure(f, n - 1, -1, e) * c;
    return out;
  }
  const double c = 1.0 / (12.0 * h * h);
  for (std::size_t i = 2; i + 2 < n; ++i)
    out[i] = (16.0 * ((f[i + 1] - f[i]) + (f[i - 1] - f[i])) - ((f[i + 2] - f[i]) + (f[i - 2] - f[i]))) * c;
  constexpr std::array<double, 6> e0{45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
  out[0] = closure(f, 0, 1, e0) * c;
  out[n - 1] = closure(f, n - 1, -1, e0) * c;
  // f''(x1) ≈ (10 f0 - 15 f1 - 4 f2 + 14 f3 - 6 f4 + f5) / 12h²
  auto near = [&](std::size_t i, long dir) {
    const auto at = [&](long k) { return f[static_cast<std::size_t>(static_cast<long>(i) + dir * k)] - f[i]; };
    return 10.0 * at(-1) - 4.0 * at(1) + 14.0 * at(2) - 6.0 * at(3) + at(4);
  };
  out[1] = near(1, 1) * c;
  out[n - 2] = near(n - 2, -1) * c;
  return out;
}

Field d3(const Grid& grid, std::span<const double> f) { return d1(grid, d2(grid, f)); }

Field dn(const Grid& grid, std::span<const double> f, int n) {
  switch (n) {
    case 0: return Field(f.begin(), f.end());
    case 1: return d1(grid, f);
    case 2: return d2(grid, f);
    case 3: return d3(grid, f);
    default: break;
  }
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  return d2(grid, dn(grid, f, n - 2));
}

Quadrature integrate(const Grid& grid, std::span<const double> f) {
  check_size(grid, f);
  double s = 0.0;
  for (double v : f) s += v;
  s -= 0.5 * (f.front() + f.back());
  Quadrature q;
  q.value = s * grid.dx();
  const double peak = sup_abs(f);
  q.boundary_warning = std::max(std::abs(f.front()), std::abs(f.back())) > 1e-12 * peak && peak > 0.0;
  return q;
}

Quadrature integrate(const Grid& grid, std::span<const double> f, const std::function<double(double)>& weight) {
  check_size(grid, f);
  Field g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] * weight(grid.x(static_cast<int>(i)));
  return integrate(grid, g);
}

Field cumulative_integral(const Grid& grid, std::span<const double> f) {
  check_size(grid, f);
  const Field df = d1(grid, f);
  const double h = grid.dx();
  Field out(f.size());
  double s = 0.0;
  out[0] = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    s += 0.5 * h * (f[i - 1] + f[i]);
    out[i] = s - h * h / 12.0 * (df[i] - df[0]);
  }
  return out;
}

double sup_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace cuspwave
