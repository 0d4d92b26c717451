#include "fbp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fbp/errors.hpp"

namespace fbp {

namespace {

constexpr double kGrowthLimit = 700.0;

// Dense DCT-I pair on n nodes, all n modes retained.
class CollocationBasis {
 public:
  explicit CollocationBasis(std::size_t n) : n_(n), analysis_(n * n), synthesis_(n * n) {
    const std::size_t intervals = n - 1;
    for (std::size_t k = 0; k < n; ++k) {
      const double scale = (k == 0 || k == intervals ? 1.0 : 2.0) / static_cast<double>(intervals);
      for (std::size_t j = 0; j < n; ++j) {
        const double c = std::cos(std::numbers::pi * static_cast<double>((j * k) % (2 * intervals)) /
                                  static_cast<double>(intervals));
        const double w = (j == 0 || j == intervals) ? 0.5 : 1.0;
        analysis_[k * n + j] = scale * w * c;
        synthesis_[j * n + k] = c;
      }
    }
  }

  void analyze(std::span<const double> f, std::span<double> a) const { apply(analysis_, f, a); }
  void synthesize(std::span<const double> a, std::span<double> f) const { apply(synthesis_, a, f); }

 private:
  void apply(const std::vector<double>& m, std::span<const double> in, std::span<double> out) const {
    for (std::size_t r = 0; r < n_; ++r) {
      const double* row = m.data() + r * n_;
      double acc = 0.0;
      for (std::size_t c = 0; c < n_; ++c) acc += row[c] * in[c];
      out[r] = acc;
    }
  }

  std::size_t n_;
  std::vector<double> analysis_;
  std::vector<double> synthesis_;
};

void check_unstable_range(std::span<const double> values, const PhaseParams& params, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > params.b && values[i] < params.c)) {
      throw DomainError(fmt::format("{}: value {} at node {} outside the unstable phase ({}, {})", what, values[i], i,
                                    params.b, params.c));
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Backward branch problem

BackwardBranchSolution solve_unstable_backward(const CosineSeries& g, const PhaseParams& params, const Grid& grid) {
  params.validate();
  grid.validate();
  if (g.coeffs.empty()) throw ConfigurationError("solve_unstable_backward: empty final datum");
  check_unstable_range(g.synthesize(grid.n_x), params, "solve_unstable_backward final datum");

  const double kappa = std::abs(params.unstable_slope());
  BackwardBranchSolution sol;
  sol.final_data = g;
  sol.u0 = propagate_heat(g, kappa, grid.t_end);
  sol.u_bar = Field2D(grid, "u_bar");
  sol.v_bar = Field2D(grid, "v_bar");
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    const auto slice = propagate_heat(g, kappa, grid.t_end - grid.t(j)).synthesize(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      sol.u_bar.at(i, j) = slice[i];
      sol.v_bar.at(i, j) = eval_phi(params, slice[i]);
    }
  }
  for (std::size_t j = 0; j < grid.n_t; ++j) check_unstable_range(sol.u_bar.slice(j), params, "backward solution");
  return sol;
}

BackwardBranchSolution solve_unstable_backward(std::span<const double> g, const PhaseParams& params,
                                               const Grid& grid) {
  grid.validate();
  if (g.size() != grid.n_x) {
    throw ConfigurationError(fmt::format("solve_unstable_backward: {} samples for n_x={}", g.size(), grid.n_x));
  }
  check_unstable_range(g, params, "solve_unstable_backward final datum");
  const double h = grid.dx();
  const std::size_t n = g.size();
  const double slope_left = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
  const double slope_right = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
  double scale = 1.0;
  for (double x : g) scale = std::max(scale, std::abs(x));
  const double tol = 1e-3 * scale;
  if (std::abs(slope_left) > tol || std::abs(slope_right) > tol) {
    throw BoundaryError(fmt::format("final datum must satisfy g'(0)=g'(L)=0; measured {} and {}", slope_left,
                                    slope_right));
  }
  return solve_unstable_backward(cosine_analyze(g, grid.length, grid.n_modes), params, grid);
}

CosineSeries unstable_image(const CosineSeries& u, const PhaseParams& params) {
  CosineSeries v = u;
  const double slope = params.unstable_slope();
  for (double& a : v.coeffs) a *= slope;
  if (!v.coeffs.empty()) v.coeffs[0] += params.unstable_intercept();
  return v;
}

// ---------------------------------------------------------------------------
// Sourced negative-diffusion problem

CosineSeries inverse_source_from_endpoints(const CosineSeries& a, const CosineSeries& b, double t_end,
                                           double sigma_abs) {
  if (a.size() != b.size()) {
    throw ConfigurationError(fmt::format("inverse source: endpoint series have {} and {} modes", a.size(), b.size()));
  }
  if (a.length != b.length) throw ConfigurationError("inverse source: endpoint series on different domains");
  if (!(t_end > 0.0)) throw ConfigurationError("inverse source: T must be positive");
  if (!(sigma_abs > 0.0)) throw ConfigurationError("inverse source: |sigma| must be positive");

  CosineSeries f = CosineSeries::zeros(a.length, a.size());
  if (a.size() == 0) return f;
  f.coeffs[0] = (b.coeffs[0] - a.coeffs[0]) * sigma_abs / t_end;
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double mu = a.eigenvalue(k);
    const double exponent = mu * t_end / sigma_abs;
    if (exponent > kGrowthLimit) {
      throw InstabilityError(fmt::format(
          "inverse source: mode {} needs exp({:.1f}); the endpoint coefficients must decay fast enough "
          "(summability restriction on a_k)",
          k, exponent));
    }
    const double growth = std::exp(exponent);
    f.coeffs[k] = mu * (b.coeffs[k] - a.coeffs[k] * growth) / std::expm1(exponent);
  }
  return f;
}

SourcedSolution::SourcedSolution(Field2D v, CosineSeries f, CosineSeries v0, double sigma_abs)
    : v_(std::move(v)), f_(std::move(f)), v0_(std::move(v0)), sigma_abs_(sigma_abs) {}

CosineSeries SourcedSolution::coefficients_at(double t) const {
  const std::size_t m = std::max(f_.size(), v0_.size());
  CosineSeries out = CosineSeries::zeros(v0_.length, m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = v0_.coefficient(k);
    const double fk = f_.coefficient(k);
    if (k == 0) {
      out.coeffs[0] = a + fk * t / sigma_abs_;
      continue;
    }
    const double mu = out.eigenvalue(k);
    const double rt = mu * t / sigma_abs_;
    out.coeffs[k] = a * std::exp(rt) + fk / mu * std::expm1(rt);
  }
  return out;
}

CosineSeries SourcedSolution::rate_at(double t) const {
  const std::size_t m = std::max(f_.size(), v0_.size());
  CosineSeries out = CosineSeries::zeros(v0_.length, m);
  for (std::size_t k = 0; k < m; ++k) {
    const double fk = f_.coefficient(k);
    if (k == 0) {
      out.coeffs[0] = fk / sigma_abs_;
      continue;
    }
    const double mu = out.eigenvalue(k);
    const double r = mu / sigma_abs_;
    out.coeffs[k] = (v0_.coefficient(k) + fk / mu) * r * std::exp(r * t);
  }
  return out;
}

Field2D SourcedSolution::time_derivative() const {
  const Grid& g = v_.grid();
  Field2D out(g, "v_t");
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const auto slice = rate_at(g.t(j)).synthesize(g.n_x);
    std::copy(slice.begin(), slice.end(), out.slice(j).begin());
  }
  return out;
}

double SourcedSolution::min_source() const {
  const auto values = f_.synthesize(v_.grid().n_x);
  return *std::min_element(values.begin(), values.end());
}

SourcedSolution SourcedSolution::truncated(std::size_t n_keep) const {
  return {v_.truncated(n_keep), f_, v0_, sigma_abs_};
}

SourcedSolution solve_sourced(const CosineSeries& f, const CosineSeries& v0, double sigma_abs, const Grid& grid) {
  grid.validate();
  if (!(sigma_abs > 0.0)) throw ConfigurationError("solve_sourced: |sigma| must be positive");
  if (f.length != v0.length || v0.length != grid.length) {
    throw ConfigurationError("solve_sourced: source, initial profile and grid must share L");
  }
  const std::size_t m = std::max(f.size(), v0.size());
  if (2 * m > grid.n_x) {
    throw ConfigurationError(fmt::format("solve_sourced: {} modes exceed the grid resolution n_x={}", m, grid.n_x));
  }
  for (std::size_t k = 1; k < m; ++k) {
    const double mu = v0.eigenvalue(k);
    const double active = v0.coefficient(k) + f.coefficient(k) / mu;
    const double exponent = mu * grid.t_end / sigma_abs;
    if (active != 0.0 && exponent > kGrowthLimit) {
      throw InstabilityError(fmt::format("solve_sourced: mode {} grows by exp({:.1f}) over the horizon", k, exponent));
    }
  }
  SourcedSolution shell(Field2D(grid, "v"), f, v0, sigma_abs);
  Field2D v(grid, "v");
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    const auto slice = shell.coefficients_at(grid.t(j)).synthesize(grid.n_x);
    std::copy(slice.begin(), slice.end(), v.slice(j).begin());
  }
  if (!v.all_finite()) throw InstabilityError("solve_sourced: non-finite values");
  return {std::move(v), f, v0, sigma_abs};
}

// ---------------------------------------------------------------------------
// Pseudoparabolic regularization

EpsSolution solve_pseudoparabolic(std::span<const double> u0, double eps, const PhaseParams& params,
                                  const Grid& grid, const PseudoparabolicOptions& options) {
  params.validate();
  grid.validate();
  if (!(eps > 0.0)) throw ConfigurationError(fmt::format("solve_pseudoparabolic: eps must be positive, got {}", eps));
  if (u0.size() != grid.n_x) {
    throw ConfigurationError(fmt::format("solve_pseudoparabolic: {} samples for n_x={}", u0.size(), grid.n_x));
  }
  for (double x : u0) {
    if (!std::isfinite(x)) throw DomainError("solve_pseudoparabolic: non-finite initial datum");
  }

  const double stable_step = eps / (4.0 * std::max(1.0, params.max_slope()));
  double h_max = stable_step;
  if (options.max_step > 0.0) {
    if (options.max_step > stable_step) {
      throw ConfigurationError(fmt::format(
          "solve_pseudoparabolic: step {} too large for eps={}; use a step <= {}", options.max_step, eps, stable_step));
    }
    h_max = options.max_step;
  }

  const std::size_t n = grid.n_x;
  const CollocationBasis basis(n);
  std::vector<double> mu(n);
  {
    const auto probe = CosineSeries::zeros(grid.length, n);
    for (std::size_t k = 0; k < n; ++k) mu[k] = probe.eigenvalue(k);
  }

  std::vector<double> grid_u(n), grid_phi(n), phi_hat(n);
  // u_t = v_xx with v_k = phi_k / (1 + eps mu_k), evaluated in coefficient space.
  auto rhs = [&](std::span<const double> u_hat, std::span<double> out) {
    basis.synthesize(u_hat, grid_u);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(grid_u[i])) throw InstabilityError("solve_pseudoparabolic: state overflowed");
      grid_phi[i] = eval_phi(params, grid_u[i]);
    }
    basis.analyze(grid_phi, phi_hat);
    for (std::size_t k = 0; k < n; ++k) out[k] = -mu[k] * phi_hat[k] / (1.0 + eps * mu[k]);
  };
  auto record = [&](std::span<const double> u_hat, std::size_t j, EpsSolution& sol) {
    basis.synthesize(u_hat, sol.u_eps.slice(j));
    for (std::size_t i = 0; i < n; ++i) grid_phi[i] = eval_phi(params, sol.u_eps.at(i, j));
    basis.analyze(grid_phi, phi_hat);
    for (std::size_t k = 0; k < n; ++k) phi_hat[k] /= (1.0 + eps * mu[k]);
    basis.synthesize(phi_hat, sol.v_eps.slice(j));
  };
  auto filter = [&](std::span<double> u_hat) {
    if (options.noise_filter <= 0.0) return;
    double peak = 0.0;
    for (double a : u_hat) peak = std::max(peak, std::abs(a));
    const double floor = options.noise_filter * peak;
    for (std::size_t k = 1; k < n; ++k) {
      if (std::abs(u_hat[k]) < floor) u_hat[k] = 0.0;
    }
  };

  EpsSolution sol;
  sol.eps = eps;
  sol.u_eps = Field2D(grid, fmt::format("u_eps({:g})", eps));
  sol.v_eps = Field2D(grid, fmt::format("v_eps({:g})", eps));

  const std::size_t substeps = static_cast<std::size_t>(std::ceil(grid.dt() / h_max - 1e-12));
  const double h = grid.dt() / static_cast<double>(substeps);
  sol.step = h;

  std::vector<double> u_hat(n), k1(n), k2(n), k3(n), k4(n), stage(n);
  basis.analyze(u0, u_hat);
  filter(u_hat);
  record(u_hat, 0, sol);
  for (std::size_t j = 1; j < grid.n_t; ++j) {
    for (std::size_t s = 0; s < substeps; ++s) {
      rhs(u_hat, k1);
      for (std::size_t k = 0; k < n; ++k) stage[k] = u_hat[k] + 0.5 * h * k1[k];
      rhs(stage, k2);
      for (std::size_t k = 0; k < n; ++k) stage[k] = u_hat[k] + 0.5 * h * k2[k];
      rhs(stage, k3);
      for (std::size_t k = 0; k < n; ++k) stage[k] = u_hat[k] + h * k3[k];
      rhs(stage, k4);
      for (std::size_t k = 0; k < n; ++k) u_hat[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
      filter(u_hat);
      ++sol.steps;
    }
    if (!std::all_of(u_hat.begin(), u_hat.end(), [](double a) { return std::isfinite(a); })) {
      throw InstabilityError(fmt::format("solve_pseudoparabolic: overflow before t={}", grid.t(j)));
    }
    record(u_hat, j, sol);
  }
  return sol;
}

}  // namespace fbp
