#include "fbp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "fbp/errors.hpp"

namespace fbp {

namespace {

constexpr double kGrowthLimit = 700.0;

// cos(pi m / N) and sin(pi m / N) for m = 0..2N-1; index (j*k) mod 2N.
struct TrigTable {
  explicit TrigTable(std::size_t n_intervals) : period(2 * n_intervals), cos_(period), sin_(period) {
    for (std::size_t m = 0; m < period; ++m) {
      const double angle = std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_intervals);
      cos_[m] = std::cos(angle);
      sin_[m] = std::sin(angle);
    }
  }
  [[nodiscard]] double cos(std::size_t j, std::size_t k) const { return cos_[(j * k) % period]; }
  [[nodiscard]] double sin(std::size_t j, std::size_t k) const { return sin_[(j * k) % period]; }

  std::size_t period;
  std::vector<double> cos_, sin_;
};

std::vector<double> dct_analyze(std::span<const double> f, const TrigTable& table, std::size_t n_modes) {
  const std::size_t n = f.size();
  const std::size_t intervals = n - 1;
  std::vector<double> a(n_modes, 0.0);
  for (std::size_t k = 0; k < n_modes; ++k) {
    double acc = 0.5 * (f[0] + f[intervals] * table.cos(intervals, k));
    for (std::size_t j = 1; j < intervals; ++j) acc += f[j] * table.cos(j, k);
    double scale = 2.0 / static_cast<double>(intervals);
    if (k == 0 || k == intervals) scale *= 0.5;
    a[k] = scale * acc;
  }
  return a;
}

enum class Derivative { none, first, second };

std::vector<double> dct_synthesize(std::span<const double> a, std::size_t n, double length, Derivative order) {
  std::vector<double> out(n, 0.0);
  if (n == 1) {
    out[0] = order == Derivative::none ? (a.empty() ? 0.0 : a[0]) : 0.0;
    return out;
  }
  const TrigTable table(n - 1);
  const double wavenumber = std::numbers::pi / length;
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] == 0.0) continue;
      const double kk = wavenumber * static_cast<double>(k);
      switch (order) {
        case Derivative::none: acc += a[k] * table.cos(j, k); break;
        case Derivative::first: acc -= a[k] * kk * table.sin(j, k); break;
        case Derivative::second: acc -= a[k] * kk * kk * table.cos(j, k); break;
      }
    }
    out[j] = acc;
  }
  return out;
}

Field2D spectral_derivative(const Field2D& f, Derivative order, const char* suffix) {
  const Grid& g = f.grid();
  Field2D out(g, f.label() + suffix);
  const TrigTable table(g.n_x - 1);
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const auto a = dct_analyze(f.slice(j), table, g.n_x);
    const auto d = dct_synthesize(a, g.n_x, g.length, order);
    std::copy(d.begin(), d.end(), out.slice(j).begin());
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

void Grid::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigurationError(fmt::format("grid: L must be positive, got {}", length));
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigurationError(fmt::format("grid: T_end must be positive, got {}", t_end));
  if (n_modes < 1) throw ConfigurationError("grid: n_modes must be positive");
  if (n_t < 2) throw ConfigurationError(fmt::format("grid: n_t must be at least 2, got {}", n_t));
  if (n_x < 2 * n_modes) {
    throw ConfigurationError(fmt::format("grid: n_x={} must be at least 2*n_modes={}", n_x, 2 * n_modes));
  }
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_x);
  for (std::size_t i = 0; i < n_x; ++i) xs[i] = x(i);
  return xs;
}

Grid Grid::refined() const {
  Grid g = *this;
  g.n_x = 2 * (n_x - 1) + 1;
  g.n_t = 2 * (n_t - 1) + 1;
  return g;
}

Grid Grid::truncated(std::size_t n_keep) const {
  if (n_keep < 2 || n_keep > n_t) {
    throw PreconditionError(fmt::format("grid: cannot keep {} of {} time samples", n_keep, n_t));
  }
  Grid g = *this;
  g.t_end = t(n_keep - 1);
  g.n_t = n_keep;
  return g;
}

// ---------------------------------------------------------------------------
// CosineSeries

double CosineSeries::eigenvalue(std::size_t k) const {
  const double kk = std::numbers::pi * static_cast<double>(k) / length;
  return kk * kk;
}

double CosineSeries::operator()(double x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    acc += coeffs[k] * std::cos(std::numbers::pi * static_cast<double>(k) * x / length);
  }
  return acc;
}

double CosineSeries::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    const double kk = std::numbers::pi * static_cast<double>(k) / length;
    acc -= coeffs[k] * kk * std::sin(kk * x);
  }
  return acc;
}

std::vector<double> CosineSeries::synthesize(std::size_t n_x) const {
  return dct_synthesize(coeffs, n_x, length, Derivative::none);
}

std::vector<double> CosineSeries::synthesize_derivative(std::size_t n_x) const {
  return dct_synthesize(coeffs, n_x, length, Derivative::first);
}

CosineSeries CosineSeries::padded(std::size_t n) const {
  CosineSeries out = *this;
  if (out.coeffs.size() < n) out.coeffs.resize(n, 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Field2D

Field2D::Field2D(Grid grid, std::string label)
    : grid_(grid), values_(grid.n_x * grid.n_t, 0.0), label_(std::move(label)) {}

Field2D::Field2D(Grid grid, std::vector<double> values, std::string label)
    : grid_(grid), values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() != grid_.n_x * grid_.n_t) {
    throw ConfigurationError(fmt::format("field {}: {} values for a {}x{} grid", label_, values_.size(), grid_.n_x, grid_.n_t));
  }
}

Field2D Field2D::sample(const Grid& grid, const std::function<double(double, double)>& fn, std::string label) {
  Field2D f(grid, std::move(label));
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    const double t = grid.t(j);
    for (std::size_t i = 0; i < grid.n_x; ++i) f.at(i, j) = fn(grid.x(i), t);
  }
  return f;
}

Field2D Field2D::truncated(std::size_t n_keep) const {
  const Grid g = grid_.truncated(n_keep);
  std::vector<double> v(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n_keep * grid_.n_x));
  return {g, std::move(v), label_};
}

std::vector<double> Field2D::at_time(double t) const {
  const double pos = std::clamp(t / grid_.dt(), 0.0, static_cast<double>(grid_.n_t - 1));
  const auto j0 = std::min(static_cast<std::size_t>(std::floor(pos)), grid_.n_t - 2);
  double w = pos - static_cast<double>(j0);
  // Snap to a sample when t sits on the grid up to round-off.
  if (std::abs(w) < 1e-9) w = 0.0;
  if (std::abs(1.0 - w) < 1e-9) w = 1.0;
  std::vector<double> out(grid_.n_x);
  for (std::size_t i = 0; i < grid_.n_x; ++i) {
    const double lo = at(i, j0);
    const double hi = at(i, j0 + 1);
    out[i] = w == 0.0 ? lo : (w == 1.0 ? hi : (1.0 - w) * lo + w * hi);
  }
  return out;
}

double Field2D::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

bool Field2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void Field2D::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigurationError(fmt::format("cannot open {} for writing", path.string()));
  std::string line = "x";
  for (std::size_t i = 0; i < grid_.n_x; ++i) line += fmt::format("\t{:.17g}", grid_.x(i));
  out << line << '\n';
  for (std::size_t j = 0; j < grid_.n_t; ++j) {
    line = fmt::format("{:.17g}", grid_.t(j));
    for (std::size_t i = 0; i < grid_.n_x; ++i) line += fmt::format("\t{:.17g}", at(i, j));
    out << line << '\n';
  }
}

// ---------------------------------------------------------------------------
// Transforms and quadrature

CosineSeries cosine_analyze(std::span<const double> samples, double length, std::size_t n_modes) {
  if (samples.size() < 2) {
    throw ConfigurationError(fmt::format("cosine_analyze: need at least 2 samples, got {}", samples.size()));
  }
  if (n_modes < 1 || n_modes > samples.size()) {
    throw ConfigurationError(fmt::format("cosine_analyze: {} modes requested from {} samples", n_modes, samples.size()));
  }
  const TrigTable table(samples.size() - 1);
  return {length, dct_analyze(samples, table, n_modes)};
}

CosineSeries second_derivative(const CosineSeries& s) {
  CosineSeries out = s;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] *= -s.eigenvalue(k);
  return out;
}

CosineSeries propagate_heat(const CosineSeries& s, double kappa, double dt) {
  if (dt < 0.0) throw PreconditionError(fmt::format("propagate_heat: negative step {}", dt));
  CosineSeries out = s;
  for (std::size_t k = 1; k < out.coeffs.size(); ++k) {
    const double exponent = -kappa * s.eigenvalue(k) * dt;
    if (exponent > kGrowthLimit && out.coeffs[k] != 0.0) {
      throw InstabilityError(fmt::format("propagate_heat: mode {} grows by exp({:.1f})", k, exponent));
    }
    out.coeffs[k] *= std::exp(exponent);
  }
  return out;
}

double integrate_x(std::span<const double> samples, double length) {
  const std::size_t n = samples.size();
  if (n < 2) return 0.0;
  double acc = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < n; ++i) acc += samples[i];
  return acc * length / static_cast<double>(n - 1);
}

double integrate_qt(const Field2D& f) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const double w = (j == 0 || j + 1 == g.n_t) ? 0.5 : 1.0;
    acc += w * integrate_x(f.slice(j), g.length);
  }
  return acc * g.dt();
}

Field2D spectral_dx(const Field2D& f) { return spectral_derivative(f, Derivative::first, "_x"); }

Field2D spectral_dxx(const Field2D& f) { return spectral_derivative(f, Derivative::second, "_xx"); }

Field2D finite_difference_dt(const Field2D& f) {
  const Grid& g = f.grid();
  Field2D out(g, f.label() + "_t");
  const double h = g.dt();
  const std::size_t last = g.n_t - 1;
  for (std::size_t i = 0; i < g.n_x; ++i) {
    if (g.n_t == 2) {
      const double d = (f.at(i, 1) - f.at(i, 0)) / h;
      out.at(i, 0) = d;
      out.at(i, 1) = d;
      continue;
    }
    out.at(i, 0) = (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) / (2.0 * h);
    for (std::size_t j = 1; j < last; ++j) out.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
    out.at(i, last) = (3.0 * f.at(i, last) - 4.0 * f.at(i, last - 1) + f.at(i, last - 2)) / (2.0 * h);
  }
  return out;
}

Field2D cumulative_time_integral(const Field2D& f) {
  const Grid& g = f.grid();
  Field2D out(g, "int_" + f.label());
  const double h = g.dt();
  for (std::size_t j = 1; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      out.at(i, j) = out.at(i, j - 1) + 0.5 * h * (f.at(i, j - 1) + f.at(i, j));
    }
  }
  return out;
}

double l2_norm_x(std::span<const double> samples, double length) {
  std::vector<double> sq(samples.size());
  std::transform(samples.begin(), samples.end(), sq.begin(), [](double x) { return x * x; });
  return std::sqrt(integrate_x(sq, length));
}

}  // namespace fbp
