#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cuspwave {

/// Uniform grid on [-L, L]. Time step is cfl * dx.
struct GridSpec {
  double L = 20.0;
  int nx = 4001;
  double cfl = 0.25;
  double t_final = 10.0;
  int output_stride = 40;

  void validate() const;
  double dx() const { return 2.0 * L / (nx - 1); }
  static int nx_for_dx(double L, double dx);
};

using Field = std::vector<double>;

class Grid {
 public:
  explicit Grid(GridSpec spec, int stencil_order = 2);

  const GridSpec& spec() const { return spec_; }
  int size() const { return spec_.nx; }
  double dx() const { return dx_; }
  double L() const { return spec_.L; }
  double x(int i) const { return xs_[static_cast<std::size_t>(i)]; }
  std::span<const double> xs() const { return xs_; }
  int stencil_order() const { return order_; }

  // Number of steps and the uniform dt that lands exactly on t_final.
  int steps() const { return steps_; }
  double dt() const { return dt_; }

  Field zeros() const { return Field(xs_.size(), 0.0); }
  Field sample(const std::function<double(double)>& f) const;

 private:
  GridSpec spec_;
  int order_;
  double dx_;
  int steps_;
  double dt_;
  std::vector<double> xs_;
};

// Centered first/second derivatives of the grid's stencil order, with
// one-sided closures of matching order at the ends.
Field d1(const Grid& grid, std::span<const double> f);
Field d2(const Grid& grid, std::span<const double> f);
Field d3(const Grid& grid, std::span<const double> f);
Field dn(const Grid& grid, std::span<const double> f, int n);

struct Quadrature {
  double value = 0.0;
  // Set when the weighted integrand is not negligible at the domain ends.
  bool boundary_warning = false;
};

// Trapezoid rule over [-L, L].
Quadrature integrate(const Grid& grid, std::span<const double> f);
Quadrature integrate(const Grid& grid, std::span<const double> f,
                     const std::function<double(double)>& weight);

// Running trapezoid integral from the left end, with the fourth-order
// end correction -dx^2/12 (f'(x) - f'(x0)).
Field cumulative_integral(const Grid& grid, std::span<const double> f);

double sup_abs(std::span<const double> f);

}  // namespace cuspwave
