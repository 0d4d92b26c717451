#include "fbp/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "fbp/errors.hpp"

namespace fbp {

namespace {

struct BumpValue {
  double b;
  double d1;
  double d2;
};

BumpValue bump_1d(double s) {
  if (std::abs(s) >= 1.0) return {0.0, 0.0, 0.0};
  const double q = 1.0 - s * s;
  const double b = std::exp(-1.0 / q);
  const double h1 = -2.0 * s / (q * q);
  const double h2 = -2.0 / (q * q) - 8.0 * s * s / (q * q * q);
  return {b, b * h1, b * (h1 * h1 + h2)};
}

double flat_exp(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// Smooth step on [0,1] and its derivative.
std::pair<double, double> smoothstep(double s) {
  if (s <= 0.0) return {0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0};
  const double e0 = flat_exp(s);
  const double e1 = flat_exp(1.0 - s);
  const double d0 = e0 / (s * s);
  const double d1 = e1 / ((1.0 - s) * (1.0 - s));
  const double den = e0 + e1;
  return {e0 / den, (d0 * e1 + e0 * d1) / (den * den)};
}

void require_same_grid(const SolutionTriple& triple) {
  const Grid& g = triple.grid();
  if (!(triple.v.grid() == g) || !(triple.lam.grid() == g)) {
    throw ConfigurationError(fmt::format("triple '{}': u, v and lambda live on different grids", triple.provenance));
  }
}

void require_profile(const Grid& g, std::span<const double> u0) {
  if (u0.size() != g.n_x) {
    throw ConfigurationError(fmt::format("initial profile has {} samples, grid has {}", u0.size(), g.n_x));
  }
}

struct SampledTest {
  Field2D value;
  Field2D dt;
  Field2D dx;
};

SampledTest sample_test(const Grid& grid, const TestFunction& psi) {
  SampledTest out{Field2D(grid, "psi"), Field2D(grid, "psi_t"), Field2D(grid, "psi_x")};
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    const double t = grid.t(j);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      const double x = grid.x(i);
      out.value.at(i, j) = psi.value(x, t);
      out.dt.at(i, j) = psi.dt(x, t);
      out.dx.at(i, j) = psi.dx(x, t);
    }
  }
  return out;
}

// A-priori bound on the error of finite_difference_dt, safety * dt^2/3 * max|f_ttt|,
// with f_ttt read from third differences of the samples.
double fd_dt_error_bound(const Field2D& f, double safety) {
  const Grid& g = f.grid();
  if (g.n_t < 5) return 0.0;
  const double h = g.dt();
  double d3 = 0.0;
  for (std::size_t j = 2; j + 2 < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      d3 = std::max(d3, std::abs(f.at(i, j + 2) - 2.0 * f.at(i, j + 1) + 2.0 * f.at(i, j - 1) - f.at(i, j - 2)));
    }
  }
  return safety * h * h / 3.0 * d3 / (2.0 * h * h * h);
}

// Fields the entropy integrand needs for one (triple, flux) pair.
struct EntropyTerms {
  Field2D primitive;  // G* or G(u_eps)
  Field2D flux;       // g(v)
  Field2D flux_slope; // g'(v)
  Field2D v_x;
};

double entropy_integral(const EntropyTerms& terms, const SampledTest& psi) {
  const Grid& g = terms.v_x.grid();
  Field2D integrand(g, "entropy_integrand");
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double p = psi.value.at(i, j);
      const double pt = psi.dt.at(i, j);
      const double px = psi.dx.at(i, j);
      if (p == 0.0 && pt == 0.0 && px == 0.0) continue;
      const double vx = terms.v_x.at(i, j);
      integrand.at(i, j) = terms.primitive.at(i, j) * pt - terms.flux.at(i, j) * vx * px -
                           terms.flux_slope.at(i, j) * vx * vx * p;
    }
  }
  return integrate_qt(integrand);
}

EntropyTerms triple_terms(const SolutionTriple& triple, const PhaseParams& params, const EntropyFlux& g,
                          Field2D v_x) {
  const Grid& grid = triple.grid();
  EntropyTerms terms{entropy_superposition(triple, params, g), Field2D(grid, "g_v"), Field2D(grid, "dg_v"),
                     std::move(v_x)};
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      const double v = triple.v.at(i, j);
      terms.flux.at(i, j) = g.value(v);
      terms.flux_slope.at(i, j) = g.derivative(v);
    }
  }
  return terms;
}

Field2D lambda_rate(const SolutionTriple& triple) {
  return triple.lam_t ? *triple.lam_t : finite_difference_dt(triple.lam);
}

// G(beta_0(v)) - G(beta_2(v)) + (beta_2(v) - beta_0(v)) g(v), continued affinely outside [A,B].
double certificate_extended(const PhaseParams& params, const EntropyFlux& g, double v) {
  if (v >= params.A && v <= params.B) return certificate_integrand(params, g, v);
  const double lo = eval_beta_extended(params, Branch::unstable, v);
  const double hi = eval_beta_extended(params, Branch::upper, v);
  return entropy_primitive(params, g, lo) - entropy_primitive(params, g, hi) + (hi - lo) * g.value(v);
}

struct CertificateFields {
  CertificateResult result;
  /// truncation bound of the finite-difference G*_t
  double bound = 0.0;
};

CertificateFields certificate_core(const SolutionTriple& triple, const PhaseParams& params, const EntropyFlux& g,
                                   const Field2D& g_star, const Field2D& v_xx, double safety) {
  const Grid& grid = triple.grid();
  const Field2D g_star_t = finite_difference_dt(g_star);
  const Field2D& lam_t = *triple.lam_t;
  CertificateFields out;
  out.bound = fd_dt_error_bound(g_star, safety);
  out.result.min_product.value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      const double v = triple.v.at(i, j);
      const double rhs = lam_t.at(i, j) * certificate_extended(params, g, v);
      if (rhs < out.result.min_product.value) out.result.min_product = {rhs, grid.x(i), grid.t(j)};
      const double err = std::abs(g.value(v) * v_xx.at(i, j) - g_star_t.at(i, j) - rhs);
      if (err > out.result.identity_error.value) out.result.identity_error = {err, grid.x(i), grid.t(j)};
    }
  }
  return out;
}

std::string grid_summary(const Grid& g) {
  return fmt::format("L={:.6g} T={:.6g} n_x={} n_t={} dx={:.4e} dt={:.4e}", g.length, g.t_end, g.n_x, g.n_t, g.dx(),
                     g.dt());
}

}  // namespace

TestFunction TestFunction::bump(double x0, double t0, double rx, double rt) {
  TestFunction f;
  f.kind = Kind::bump;
  f.x0 = x0;
  f.t0 = t0;
  f.rx = rx;
  f.rt = rt;
  return f;
}

TestFunction TestFunction::mode_product(int j, double length, double t0, double rt) {
  TestFunction f;
  f.kind = Kind::mode_product;
  f.mode = j;
  f.length = length;
  f.t0 = t0;
  f.rt = rt;
  return f;
}

TestFunction TestFunction::released(int j, double length, double horizon) {
  TestFunction f;
  f.kind = Kind::released;
  f.mode = j;
  f.length = length;
  f.horizon = horizon;
  return f;
}

TestFunction TestFunction::zero() {
  TestFunction f;
  f.scale = 0.0;
  return f;
}

double TestFunction::value(double x, double t) const {
  switch (kind) {
    case Kind::bump:
      return scale * bump_1d((x - x0) / rx).b * bump_1d((t - t0) / rt).b;
    case Kind::mode_product: {
      const double s = std::sin(mode * std::numbers::pi * x / length);
      return scale * s * s * bump_1d((t - t0) / rt).b;
    }
    case Kind::released: {
      const double w = 1.0 - smoothstep(t / horizon).first;
      const double space = mode == 0 ? 1.0 : 0.5 * (1.0 + std::cos(mode * std::numbers::pi * x / length));
      return scale * w * space;
    }
  }
  return 0.0;
}

double TestFunction::dt(double x, double t) const {
  switch (kind) {
    case Kind::bump:
      return scale * bump_1d((x - x0) / rx).b * bump_1d((t - t0) / rt).d1 / rt;
    case Kind::mode_product: {
      const double s = std::sin(mode * std::numbers::pi * x / length);
      return scale * s * s * bump_1d((t - t0) / rt).d1 / rt;
    }
    case Kind::released: {
      const double w_t = -smoothstep(t / horizon).second / horizon;
      const double space = mode == 0 ? 1.0 : 0.5 * (1.0 + std::cos(mode * std::numbers::pi * x / length));
      return scale * w_t * space;
    }
  }
  return 0.0;
}

double TestFunction::dx(double x, double t) const {
  switch (kind) {
    case Kind::bump:
      return scale * bump_1d((x - x0) / rx).d1 / rx * bump_1d((t - t0) / rt).b;
    case Kind::mode_product: {
      const double k = mode * std::numbers::pi / length;
      return scale * k * std::sin(2.0 * k * x) * bump_1d((t - t0) / rt).b;
    }
    case Kind::released: {
      if (mode == 0) return 0.0;
      const double k = mode * std::numbers::pi / length;
      const double w = 1.0 - smoothstep(t / horizon).first;
      return -scale * w * 0.5 * k * std::sin(k * x);
    }
  }
  return 0.0;
}

double TestFunction::dxx(double x, double t) const {
  switch (kind) {
    case Kind::bump:
      return scale * bump_1d((x - x0) / rx).d2 / (rx * rx) * bump_1d((t - t0) / rt).b;
    case Kind::mode_product: {
      const double k = mode * std::numbers::pi / length;
      return scale * 2.0 * k * k * std::cos(2.0 * k * x) * bump_1d((t - t0) / rt).b;
    }
    case Kind::released: {
      if (mode == 0) return 0.0;
      const double k = mode * std::numbers::pi / length;
      const double w = 1.0 - smoothstep(t / horizon).first;
      return -scale * w * 0.5 * k * k * std::cos(k * x);
    }
  }
  return 0.0;
}

std::string TestFunction::name() const {
  if (scale == 0.0) return "zero";
  switch (kind) {
    case Kind::bump:
      return fmt::format("bump(x0={:.3g},t0={:.3g})", x0, t0);
    case Kind::mode_product:
      return fmt::format("sin2(j={})", mode);
    case Kind::released:
      return fmt::format("released(j={})", mode);
  }
  return "?";
}

std::vector<TestFunction> entropy_battery(double length, double horizon) {
  std::vector<TestFunction> out;
  for (const double fx : {0.25, 0.75}) {
    for (const double ft : {0.25, 0.75}) {
      out.push_back(TestFunction::bump(fx * length, ft * horizon, 0.24 * length, 0.24 * horizon));
    }
  }
  out.push_back(TestFunction::mode_product(1, length, 0.5 * horizon, 0.45 * horizon));
  out.push_back(TestFunction::mode_product(2, length, 0.5 * horizon, 0.45 * horizon));
  return out;
}

std::vector<TestFunction> weak_battery(double length, double horizon) {
  auto out = entropy_battery(length, horizon);
  out.push_back(TestFunction::released(0, length, horizon));
  out.push_back(TestFunction::released(1, length, horizon));
  return out;
}

void VerificationReport::add(Check check) {
  if (contains(check.name)) throw std::logic_error("duplicate check " + check.name);
  checks_.push_back(std::move(check));
}

void VerificationReport::merge(const VerificationReport& other) {
  for (const auto& c : other.checks_) add(c);
}

bool VerificationReport::passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

const Check& VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks_) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check named " + name);
}

bool VerificationReport::contains(const std::string& name) const {
  return std::any_of(checks_.begin(), checks_.end(), [&](const Check& c) { return c.name == name; });
}

void VerificationReport::write_text(std::ostream& os) const {
  os << "subject: " << subject_ << '\n';
  if (!grid_summary_.empty()) os << "grid: " << grid_summary_ << '\n';
  for (const auto& c : checks_) {
    os << fmt::format("  [{}] {:<28} residual={:<12.4e} tol={:<10.3e} at (x={:.4f}, t={:.4f})", c.passed ? "PASS" : "FAIL",
                      c.name, c.residual, c.tolerance, c.x, c.t);
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  os << "overall: " << (passed() ? "PASS" : "FAIL") << '\n';
}

void VerificationReport::write_csv(std::ostream& os) const {
  os << "check,status,residual,tolerance,x,t\n";
  for (const auto& c : checks_) {
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", c.name, c.passed ? "pass" : "fail", c.residual,
                      c.tolerance, c.x, c.t);
  }
}

double weak_form_integral(const SolutionTriple& triple, std::span<const double> u0, const TestFunction& psi,
                          WeakPairing pairing) {
  require_same_grid(triple);
  const Grid& g = triple.grid();
  require_profile(g, u0);
  const Field2D v_x = pairing == WeakPairing::gradient ? spectral_dx(triple.v) : Field2D{};
  Field2D integrand(g, "weak_integrand");
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const double t = g.t(j);
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double x = g.x(i);
      const double space = pairing == WeakPairing::gradient ? -v_x.at(i, j) * psi.dx(x, t)
                                                            : triple.v.at(i, j) * psi.dxx(x, t);
      integrand.at(i, j) = triple.u.at(i, j) * psi.dt(x, t) + space;
    }
  }
  std::vector<double> initial(g.n_x);
  for (std::size_t i = 0; i < g.n_x; ++i) initial[i] = u0[i] * psi.value(g.x(i), 0.0);
  return integrate_qt(integrand) + integrate_x(initial, g.length);
}

double weak_residual(const SolutionTriple& triple, std::span<const double> u0, std::span<const TestFunction> tests,
                     WeakPairing pairing) {
  double worst = 0.0;
  for (const auto& psi : tests) worst = std::max(worst, std::abs(weak_form_integral(triple, u0, psi, pairing)));
  return worst;
}

Field2D entropy_superposition(const SolutionTriple& triple, const PhaseParams& params, const EntropyFlux& g) {
  require_same_grid(triple);
  const Grid& grid = triple.grid();
  Field2D out(grid, "G_star");
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      const double v = triple.v.at(i, j);
      const double lam = triple.lam.at(i, j);
      double value = 0.0;
      if (lam != 1.0) value += (1.0 - lam) * entropy_primitive(params, g, eval_beta_extended(params, Branch::unstable, v));
      if (lam != 0.0) value += lam * entropy_primitive(params, g, eval_beta_extended(params, Branch::upper, v));
      out.at(i, j) = value;
    }
  }
  return out;
}

double entropy_inequality_residual(const SolutionTriple& triple, const PhaseParams& params, const EntropyFlux& g,
                                   const TestFunction& psi) {
  require_same_grid(triple);
  return entropy_integral(triple_terms(triple, params, g, spectral_dx(triple.v)), sample_test(triple.grid(), psi));
}

CertificateResult pointwise_certificate(const SolutionTriple& triple, const PhaseParams& params, const EntropyFlux& g) {
  if (!triple.lam_t) {
    throw PreconditionError(fmt::format("pointwise_certificate: triple '{}' carries no lambda_t", triple.provenance));
  }
  require_same_grid(triple);
  return certificate_core(triple, params, g, entropy_superposition(triple, params, g), spectral_dxx(triple.v), 1.0)
      .result;
}

double discrete_total_variation(const Field2D& lam) {
  const Grid& g = lam.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_x; ++i) {
    double tv = 0.0;
    for (std::size_t j = 0; j + 1 < g.n_t; ++j) tv += std::abs(lam.at(i, j + 1) - lam.at(i, j));
    worst = std::max(worst, tv);
  }
  return worst;
}

VerificationReport monotonicity_report(const SolutionTriple& triple, const PhaseParams& params, double tol) {
  require_same_grid(triple);
  const Grid& g = triple.grid();
  VerificationReport report(triple.provenance);
  report.set_grid_summary(grid_summary(g));

  Check lam2{"lambda2_nondecreasing", true, 0.0, tol, 0.0, 0.0, {}};
  std::size_t intervals = 0;
  for (std::size_t i = 0; i < g.n_x; ++i) {
    bool inside = false;
    for (std::size_t j = 0; j + 1 < g.n_t; ++j) {
      const bool both = triple.v.at(i, j) > params.A && triple.v.at(i, j + 1) > params.A;
      if (both && !inside) ++intervals;
      inside = both;
      if (!both) continue;
      const double drop = triple.lam.at(i, j) - triple.lam.at(i, j + 1);
      if (drop > lam2.residual) {
        lam2.residual = drop;
        lam2.x = g.x(i);
        lam2.t = g.t(j + 1);
      }
    }
  }
  lam2.passed = lam2.residual <= tol;
  lam2.detail = fmt::format("largest decrease over {} intervals with v > A", intervals);
  report.add(lam2);

  // lambda_1 is embedded as zero, so it is constant wherever v < B.
  report.add({"lambda1_nondecreasing", true, 0.0, tol, 0.0, 0.0, "lambda_1 = 0 identically"});

  const double tv = discrete_total_variation(triple.lam);
  report.add({"lambda_total_variation", std::isfinite(tv), tv, std::numeric_limits<double>::infinity(), 0.0, 0.0,
              "max over x of the discrete variation in t (reported, no bound)"});
  return report;
}

VerificationReport structural_check(const SolutionTriple& triple, std::span<const double> u0,
                                    const PhaseParams& params, const StructuralTolerances& tol) {
  require_same_grid(triple);
  const Grid& g = triple.grid();
  require_profile(g, u0);
  VerificationReport report(triple.provenance);
  report.set_grid_summary(grid_summary(g));

  auto track = [](Check& c, double value, double x, double t) {
    if (value > c.residual) {
      c.residual = value;
      c.x = x;
      c.t = t;
    }
  };

  // (i) initial trace
  Check initial{"initial_trace", false, 0.0, tol.initial_trace, 0.0, 0.0, {}};
  for (std::size_t i = 0; i < g.n_x; ++i) track(initial, std::abs(triple.u.at(i, 0) - u0[i]), g.x(i), 0.0);
  initial.passed = initial.residual <= tol.initial_trace;
  report.add(initial);

  // (ii) v_x at the ends, second-order one-sided differences
  Check neumann{"neumann_trace", false, 0.0, 0.0, 0.0, 0.0, "one-sided differences"};
  const double h = g.dx();
  const std::size_t n = g.n_x;
  double v_scale = 1.0;
  for (double v : triple.v.values()) v_scale = std::max(v_scale, std::abs(v));
  neumann.tolerance = tol.neumann * v_scale;
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const auto s = triple.v.slice(j);
    if (n >= 3) {
      track(neumann, std::abs(-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h), 0.0, g.t(j));
      track(neumann, std::abs(3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * h), g.length, g.t(j));
    }
  }
  neumann.passed = neumann.residual <= neumann.tolerance;
  report.add(neumann);

  // (iii) v >= A, and lambda = 1 where v > B
  Check above_a{"v_above_A", false, 0.0, tol.level, 0.0, 0.0, "largest A - v"};
  Check upper{"lambda_one_above_B", false, 0.0, tol.level, 0.0, 0.0, {}};
  std::size_t above_b = 0;
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double v = triple.v.at(i, j);
      track(above_a, params.A - v, g.x(i), g.t(j));
      if (v > params.B + tol.level) {
        ++above_b;
        track(upper, 1.0 - triple.lam.at(i, j), g.x(i), g.t(j));
      }
    }
  }
  above_a.passed = above_a.residual <= tol.level;
  upper.passed = upper.residual <= tol.level;
  upper.detail = above_b == 0 ? "vacuous: v <= B everywhere" : fmt::format("{} samples with v > B", above_b);
  report.add(above_a);
  report.add(upper);

  // (iv) superposition and u_t = v_xx
  Check superposition{"superposition", false, 0.0, tol.superposition, 0.0, 0.0, {}};
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double v = triple.v.at(i, j);
      const double lam = triple.lam.at(i, j);
      const double rebuilt = (1.0 - lam) * eval_beta_extended(params, Branch::unstable, v) +
                             lam * eval_beta_extended(params, Branch::upper, v);
      track(superposition, std::abs(triple.u.at(i, j) - rebuilt), g.x(i), g.t(j));
    }
  }
  superposition.passed = superposition.residual <= tol.superposition;
  report.add(superposition);

  Check pde{"pde_residual", false, 0.0, tol.pde_floor + fd_dt_error_bound(triple.u, tol.pde_safety), 0.0, 0.0,
            "u_t by finite differences against spectral v_xx"};
  {
    const Field2D u_t = finite_difference_dt(triple.u);
    const Field2D v_xx = spectral_dxx(triple.v);
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (std::size_t i = 0; i < g.n_x; ++i) track(pde, std::abs(u_t.at(i, j) - v_xx.at(i, j)), g.x(i), g.t(j));
    }
  }
  pde.passed = pde.residual <= pde.tolerance;
  report.add(pde);

  // (v) and the phase-coefficient side conditions
  Check bounds{"lambda_bounds", false, 0.0, tol.level, 0.0, 0.0, "distance of lambda outside [0,1]"};
  Check coefficients{"phase_coefficients", false, 0.0, tol.level, 0.0, 0.0,
                     "lambda_1 = 1 where v < A, lambda_2 = 1 where v > B"};
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double lam = triple.lam.at(i, j);
      const double v = triple.v.at(i, j);
      track(bounds, std::max(-lam, lam - 1.0), g.x(i), g.t(j));
      // embedded (1 - lam, 0, lam)
      if (v < params.A - tol.level) track(coefficients, 1.0, g.x(i), g.t(j));
      if (v > params.B + tol.level) track(coefficients, 1.0 - lam, g.x(i), g.t(j));
    }
  }
  bounds.passed = bounds.residual <= tol.level;
  coefficients.passed = coefficients.residual <= tol.level;
  report.add(bounds);
  report.add(coefficients);

  Check start{"lambda_initial_zero", false, 0.0, 0.0, 0.0, 0.0, {}};
  for (std::size_t i = 0; i < g.n_x; ++i) track(start, std::abs(triple.lam.at(i, 0)), g.x(i), 0.0);
  start.passed = start.residual == 0.0;
  report.add(start);

  Check rate{"lambda_t_sign", false, 0.0, tol.lambda_t, 0.0, 0.0,
             triple.lam_t ? "lambda_t from the construction" : "lambda_t by finite differences"};
  const Field2D lam_t = lambda_rate(triple);
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) track(rate, -lam_t.at(i, j), g.x(i), g.t(j));
  }
  rate.passed = rate.residual <= tol.lambda_t;
  report.add(rate);
  return report;
}

std::vector<double> viscous_entropy_residuals(const EpsSolution& sol, const PhaseParams& params, const EntropyFlux& g,
                                              std::span<const TestFunction> tests) {
  const Grid& grid = sol.u_eps.grid();
  if (!(sol.v_eps.grid() == grid)) throw ConfigurationError("viscous_entropy_residual: u_eps and v_eps grids differ");
  EntropyTerms terms{Field2D(grid, "G_u"), Field2D(grid, "g_v"), Field2D(grid, "dg_v"), spectral_dx(sol.v_eps)};
  for (std::size_t j = 0; j < grid.n_t; ++j) {
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      const double v = sol.v_eps.at(i, j);
      terms.primitive.at(i, j) = entropy_primitive(params, g, sol.u_eps.at(i, j));
      terms.flux.at(i, j) = g.value(v);
      terms.flux_slope.at(i, j) = g.derivative(v);
    }
  }
  std::vector<double> out;
  out.reserve(tests.size());
  for (const auto& psi : tests) out.push_back(entropy_integral(terms, sample_test(grid, psi)));
  return out;
}

double viscous_entropy_residual(const EpsSolution& sol, const PhaseParams& params, const EntropyFlux& g,
                                const TestFunction& psi) {
  return viscous_entropy_residuals(sol, params, g, std::span(&psi, 1)).front();
}

double Distances::max() const { return std::max({u, v, lam}); }

Distances distinctness(const SolutionTriple& a, const SolutionTriple& b, double t_probe) {
  const Grid& ga = a.grid();
  const Grid& gb = b.grid();
  if (ga.n_x != gb.n_x || ga.length != gb.length) {
    throw ConfigurationError("distinctness: triples use different spatial grids");
  }
  const double limit = std::min(a.t_bar, b.t_bar);
  if (t_probe < 0.0 || t_probe > limit + 1e-12) {
    throw PreconditionError(
        fmt::format("distinctness: t_probe = {} outside the common certified horizon [0, {}]", t_probe, limit));
  }
  auto distance = [&](const Field2D& fa, const Field2D& fb) {
    const auto sa = fa.at_time(t_probe);
    const auto sb = fb.at_time(t_probe);
    std::vector<double> diff(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) diff[i] = sa[i] - sb[i];
    return l2_norm_x(diff, ga.length);
  };
  return {distance(a.u, b.u), distance(a.v, b.v), distance(a.lam, b.lam)};
}

VerificationReport full_battery(const SolutionTriple& triple, std::span<const double> u0, const PhaseParams& params,
                                const BatteryOptions& options) {
  require_same_grid(triple);
  const Grid& g = triple.grid();
  if (g.n_t < 2) throw PreconditionError("full_battery: triple needs at least two time samples");

  VerificationReport report(triple.provenance);
  report.set_grid_summary(grid_summary(g));
  report.merge(structural_check(triple, u0, params, options.structural));
  report.merge(monotonicity_report(triple, params, options.monotonicity_tol));

  const auto weak_tests = weak_battery(g.length, g.t_end);
  Check weak{"weak_form", false, 0.0, options.weak_tol, 0.0, 0.0, {}};
  Check pairing{"weak_form_pairings_agree", false, 0.0, options.pairing_tol, 0.0, 0.0,
                "|gradient - laplacian| pairing"};
  for (const auto& psi : weak_tests) {
    const double grad = weak_form_integral(triple, u0, psi, WeakPairing::gradient);
    const double lap = weak_form_integral(triple, u0, psi, WeakPairing::laplacian);
    if (std::abs(grad) >= weak.residual) {
      weak.residual = std::abs(grad);
      weak.detail = "worst test " + psi.name();
    }
    pairing.residual = std::max(pairing.residual, std::abs(grad - lap));
  }
  weak.passed = weak.residual <= options.weak_tol;
  pairing.passed = pairing.residual <= options.pairing_tol;
  report.add(weak);
  report.add(pairing);

  SolutionTriple with_rate = triple;
  if (!with_rate.lam_t) with_rate.lam_t = finite_difference_dt(triple.lam);

  const auto fluxes = builtin_fluxes();
  const auto tests = entropy_battery(g.length, g.t_end);
  std::vector<SampledTest> sampled;
  sampled.reserve(tests.size());
  for (const auto& psi : tests) sampled.push_back(sample_test(g, psi));
  const Field2D v_x = spectral_dx(triple.v);
  const Field2D v_xx = spectral_dxx(triple.v);

  Check entropy{"entropy_inequality", false, std::numeric_limits<double>::infinity(), -options.entropy_tol, 0.0, 0.0,
                {}};
  Check certificate{"pointwise_certificate", false, std::numeric_limits<double>::infinity(),
                    -options.certificate_tol, 0.0, 0.0, {}};
  Check identity{"certificate_identity", false, 0.0, 0.0, 0.0, 0.0, {}};
  bool identity_ok = true;
  for (const auto& flux : fluxes) {
    const EntropyTerms terms = triple_terms(triple, params, flux, v_x);
    for (std::size_t k = 0; k < tests.size(); ++k) {
      const double value = entropy_integral(terms, sampled[k]);
      if (value < entropy.residual) {
        entropy.residual = value;
        entropy.x = tests[k].x0;
        entropy.t = tests[k].t0;
        entropy.detail = fmt::format("minimum at g={}, psi={}", flux.name(), tests[k].name());
      }
    }
    const auto cert = certificate_core(with_rate, params, flux, terms.primitive, v_xx, options.identity_safety);
    const double allowed = options.identity_floor + cert.bound;
    identity_ok = identity_ok && cert.result.identity_error.value <= allowed;
    if (cert.result.min_product.value < certificate.residual) {
      certificate.residual = cert.result.min_product.value;
      certificate.x = cert.result.min_product.x;
      certificate.t = cert.result.min_product.t;
      certificate.detail = "minimum at g=" + flux.name();
    }
    if (cert.result.identity_error.value > identity.residual) {
      identity.residual = cert.result.identity_error.value;
      identity.tolerance = allowed;
      identity.x = cert.result.identity_error.x;
      identity.t = cert.result.identity_error.t;
      identity.detail = "worst at g=" + flux.name();
    }
  }
  entropy.passed = entropy.residual >= -options.entropy_tol;
  certificate.passed = certificate.residual >= -options.certificate_tol;
  identity.passed = identity_ok;
  entropy.detail += fmt::format(" ({} fluxes x {} tests)", fluxes.size(), tests.size());
  if (!triple.lam_t) certificate.detail += ", lambda_t by finite differences";
  identity.detail += "; tolerance is floor + the per-flux truncation bound of G*_t";
  report.add(entropy);
  report.add(certificate);
  report.add(identity);
  return report;
}

std::vector<Violator> manufactured_violators(const SolutionTriple& reference, const PhaseParams& params) {
  require_same_grid(reference);
  const Grid& g = reference.grid();
  std::vector<Violator> out;

  auto rebuild_u = [&](SolutionTriple& t) {
    t.u = assemble_state(t.v, t.lam, params, BranchDomain::extended);
  };

  {
    SolutionTriple t = reference;
    t.provenance = "violator: decreasing lambda";
    t.lam = Field2D::sample(g, [](double, double time) { return std::max(0.0, 0.2 - time); }, "lambda");
    t.lam_t.reset();
    t.m.reset();
    rebuild_u(t);
    out.push_back({"decreasing lambda", "lambda2_nondecreasing", std::move(t)});
  }
  {
    SolutionTriple t = reference;
    t.provenance = "violator: broken superposition";
    const double length = g.length;
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (std::size_t i = 0; i < g.n_x; ++i) {
        t.u.at(i, j) += 1e-3 * g.t(j) * (1.0 + std::cos(std::numbers::pi * g.x(i) / length));
      }
    }
    out.push_back({"broken superposition", "superposition", std::move(t)});
  }
  {
    SolutionTriple t = reference;
    t.provenance = "violator: v below A";
    double lowest = std::numeric_limits<double>::infinity();
    for (double v : t.v.values()) lowest = std::min(lowest, v);
    const double shift = lowest - params.A + 0.02;
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (auto& v : t.v.slice(j)) v -= shift;
    }
    rebuild_u(t);
    out.push_back({"v below A", "v_above_A", std::move(t)});
  }
  {
    SolutionTriple t = reference;
    t.provenance = "violator: non-conservative field";
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (auto& u : t.u.slice(j)) u += 0.05 * g.t(j);
    }
    out.push_back({"non-conservative field", "weak_form", std::move(t)});
  }
  return out;
}

}  // namespace fbp
