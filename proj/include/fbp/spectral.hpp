#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fbp {

/// Uniform space-time grid on [0,L] x [0,T_end], endpoints included.
struct Grid {
  double length = 3.141592653589793;
  double t_end = 1.0;
  std::size_t n_x = 128;
  std::size_t n_t = 256;
  std::size_t n_modes = 32;

  [[nodiscard]] static Grid defaults() { return {}; }

  /// Throws ConfigurationError unless n_x >= 2 n_modes, n_t >= 2, all positive.
  void validate() const;

  [[nodiscard]] double dx() const { return length / static_cast<double>(n_x - 1); }
  [[nodiscard]] double dt() const { return t_end / static_cast<double>(n_t - 1); }
  [[nodiscard]] double x(std::size_t i) const { return length * static_cast<double>(i) / static_cast<double>(n_x - 1); }
  [[nodiscard]] double t(std::size_t j) const { return t_end * static_cast<double>(j) / static_cast<double>(n_t - 1); }
  [[nodiscard]] std::vector<double> nodes() const;

  /// Halves both spacings: 2(n-1)+1 samples per axis.
  [[nodiscard]] Grid refined() const;
  /// First `n_keep` time samples, with T_end moved to the last kept time.
  [[nodiscard]] Grid truncated(std::size_t n_keep) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// sum_k coeffs[k] cos(k pi x / length).
struct CosineSeries {
  double length = 3.141592653589793;
  std::vector<double> coeffs;

  [[nodiscard]] static CosineSeries zeros(double length, std::size_t n_modes) {
    return {length, std::vector<double>(n_modes, 0.0)};
  }

  [[nodiscard]] std::size_t size() const { return coeffs.size(); }
  [[nodiscard]] double coefficient(std::size_t k) const { return k < coeffs.size() ? coeffs[k] : 0.0; }
  /// (k pi / L)^2
  [[nodiscard]] double eigenvalue(std::size_t k) const;

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double derivative(double x) const;
  /// Values at the n_x uniform nodes of [0, length].
  [[nodiscard]] std::vector<double> synthesize(std::size_t n_x) const;
  [[nodiscard]] std::vector<double> synthesize_derivative(std::size_t n_x) const;

  /// Copy with at least n coefficients (zero padded).
  [[nodiscard]] CosineSeries padded(std::size_t n) const;
};

/// Scalar field on a Grid, stored one time slice after another.
class Field2D {
 public:
  Field2D() = default;
  Field2D(Grid grid, std::string label);
  Field2D(Grid grid, std::vector<double> values, std::string label);

  /// Samples fn(x, t) at every grid node.
  [[nodiscard]] static Field2D sample(const Grid& grid, const std::function<double(double, double)>& fn,
                                      std::string label);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  [[nodiscard]] double& at(std::size_t ix, std::size_t jt) { return values_[jt * grid_.n_x + ix]; }
  [[nodiscard]] double at(std::size_t ix, std::size_t jt) const { return values_[jt * grid_.n_x + ix]; }

  [[nodiscard]] std::span<double> slice(std::size_t jt) { return {values_.data() + jt * grid_.n_x, grid_.n_x}; }
  [[nodiscard]] std::span<const double> slice(std::size_t jt) const {
    return {values_.data() + jt * grid_.n_x, grid_.n_x};
  }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  /// First n_keep time samples.
  [[nodiscard]] Field2D truncated(std::size_t n_keep) const;
  /// Linear interpolation in time at t (clamped to [0, T_end]).
  [[nodiscard]] std::vector<double> at_time(double t) const;

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;

  /// Tab-separated dump: header "x" then the node coordinates, then one row
  /// per time sample starting with t.
  void write_csv(const std::filesystem::path& path) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::string label_;
};

/// Discrete cosine (DCT-I) coefficients of samples at n uniform nodes
/// including both endpoints, truncated to n_modes (<= n) terms.
[[nodiscard]] CosineSeries cosine_analyze(std::span<const double> samples, double length, std::size_t n_modes);

/// Coefficient k scaled by -(k pi / L)^2.
[[nodiscard]] CosineSeries second_derivative(const CosineSeries& s);

/// Exact Neumann solution operator of w_t = kappa w_xx over a step dt.
/// Throws InstabilityError when a nonzero mode would grow by more than e^700.
[[nodiscard]] CosineSeries propagate_heat(const CosineSeries& s, double kappa, double dt);

/// Trapezoid rule over [0, L] for samples at uniform nodes.
[[nodiscard]] double integrate_x(std::span<const double> samples, double length);

/// Trapezoid rule in x and t over the whole grid.
[[nodiscard]] double integrate_qt(const Field2D& f);

/// x-derivatives of every time slice through the full collocation interpolant.
[[nodiscard]] Field2D spectral_dx(const Field2D& f);
[[nodiscard]] Field2D spectral_dxx(const Field2D& f);

/// Second-order finite differences in t (centered inside, one-sided at ends).
[[nodiscard]] Field2D finite_difference_dt(const Field2D& f);

/// Cumulative trapezoid integral in t: out(x, t_j) = int_0^{t_j} f(x, s) ds.
[[nodiscard]] Field2D cumulative_time_integral(const Field2D& f);

/// Spatial L2 norm (trapezoid) of a slice.
[[nodiscard]] double l2_norm_x(std::span<const double> samples, double length);

}  // namespace fbp
