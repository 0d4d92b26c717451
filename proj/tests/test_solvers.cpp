#include <cmath>

#include <gtest/gtest.h>

#include "fbp/errors.hpp"
#include "fbp/solvers.hpp"
#include "support.hpp"

using namespace fbp;
using fbp::testing::Gen;
using fbp::testing::kPi;
using fbp::testing::max_abs_diff;

namespace {

const PhaseParams kDefault = PhaseParams::defaults();

double mass(std::span<const double> u, double length) { return integrate_x(u, length); }

// Explicit finite differences for w_s = kappa w_xx, mirrored Neumann ghosts.
std::vector<double> heat_by_differences(std::vector<double> w, double length, double kappa, double horizon) {
  const std::size_t n = w.size();
  const double h = length / static_cast<double>(n - 1);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / (0.4 * h * h / kappa)));
  const double dt = horizon / static_cast<double>(steps);
  std::vector<double> next(n);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i == 0 ? w[1] : w[i - 1];
      const double right = i + 1 == n ? w[n - 2] : w[i + 1];
      next[i] = w[i] + dt * kappa * (left - 2 * w[i] + right) / (h * h);
    }
    w.swap(next);
  }
  return w;
}

}  // namespace

TEST(Backward, SingleModeClosedForm) {
  const Grid g;
  const auto sol = solve_unstable_backward(fbp::testing::default_final(), kDefault, g);
  EXPECT_NEAR(sol.u0.coeffs[1], 0.1 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(sol.u0.coeffs[1], 0.0367879, 1e-7);
  for (std::size_t j = 0; j < g.n_t; j += 15) {
    for (std::size_t i = 0; i < g.n_x; i += 7) {
      const double exact = 0.1 * std::exp(g.t(j) - 1.0) * std::cos(g.x(i));
      EXPECT_NEAR(sol.u_bar.at(i, j), exact, 1e-15);
      EXPECT_EQ(sol.v_bar.at(i, j), eval_phi(kDefault, sol.u_bar.at(i, j)));
    }
  }
}

TEST(Backward, AgreesWithReversedFiniteDifferenceFlow) {
  const Grid g;
  const auto sol = solve_unstable_backward(fbp::testing::default_final(), kDefault, g);
  const std::size_t n = 101;
  std::vector<double> final_samples(n);
  for (std::size_t i = 0; i < n; ++i) final_samples[i] = 0.1 * std::cos(kPi * i / (n - 1.0));
  const auto u0_fd = heat_by_differences(final_samples, kPi, 1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(u0_fd[i], sol.u0(kPi * i / (n - 1.0)), 2e-5);
}

TEST(Backward, ConstantIsSteady) {
  const Grid g;
  const auto sol = solve_unstable_backward(CosineSeries{kPi, {0.15}}, kDefault, g);
  for (double x : sol.u_bar.values()) EXPECT_NEAR(x, 0.15, 1e-15);
}

TEST(Backward, Errors) {
  const Grid g;
  EXPECT_THROW((void)solve_unstable_backward(CosineSeries{kPi, {0.0, 1.5}}, kDefault, g), DomainError);
  std::vector<double> sloped(g.n_x);
  for (std::size_t i = 0; i < g.n_x; ++i) sloped[i] = 0.1 * std::sin(g.x(i));
  EXPECT_THROW((void)solve_unstable_backward(sloped, kDefault, g), BoundaryError);
  std::vector<double> fine(g.n_x);
  for (std::size_t i = 0; i < g.n_x; ++i) fine[i] = 0.1 * std::cos(g.x(i));
  const auto sol = solve_unstable_backward(fine, kDefault, g);
  EXPECT_NEAR(sol.u0.coeffs[1], 0.1 * std::exp(-1.0), 1e-14);
}

TEST(BackwardProperty, MassAndRangeAndDuality) {
  Gen gen(41);
  const Grid g;
  for (int trial = 0; trial < 30; ++trial) {
    CosineSeries final_datum = gen.series(kPi, gen.index(1, 6), 0.04);
    final_datum.coeffs[0] = gen.uniform(-0.3, 0.3);
    const auto sol = solve_unstable_backward(final_datum, kDefault, g);
    const double m = mass(final_datum.synthesize(g.n_x), kPi);
    for (std::size_t j = 0; j < g.n_t; j += 5) EXPECT_NEAR(mass(sol.u_bar.slice(j), kPi), m, 1e-13);
    // Forward again under u_t = -u_xx reproduces g.
    const auto back = propagate_heat(sol.u0, -1.0, g.t_end);
    double scale = 0.0;
    for (double c : final_datum.coeffs) scale = std::max(scale, std::abs(c));
    for (std::size_t k = 0; k < final_datum.size(); ++k) {
      EXPECT_LE(std::abs(back.coeffs[k] - final_datum.coeffs[k]), 1e-8 * scale);
    }
    for (double u : sol.u_bar.values()) {
      EXPECT_GT(u, kDefault.b);
      EXPECT_LT(u, kDefault.c);
    }
  }
}

TEST(InverseSource, HandValues) {
  const auto f0 = inverse_source_from_endpoints(CosineSeries{kPi, {0.0}}, CosineSeries{kPi, {1.0}}, 1.0, 1.0);
  EXPECT_EQ(f0.coeffs[0], 1.0);
  const auto f1 = inverse_source_from_endpoints(CosineSeries{kPi, {0.0, 0.0}},
                                                CosineSeries{kPi, {0.0, std::exp(1.0) - 1.0}}, 1.0, 1.0);
  EXPECT_NEAR(f1.coeffs[1], 1.0, 1e-15);
  // Mode-0 formula with other values.
  const auto f2 = inverse_source_from_endpoints(CosineSeries{kPi, {0.25}}, CosineSeries{kPi, {1.75}}, 0.5, 2.0);
  EXPECT_EQ(f2.coeffs[0], (1.75 - 0.25) * 2.0 / 0.5);
}

TEST(InverseSource, FreeEvolutionNeedsNoSource) {
  Gen gen(42);
  const Grid g;
  for (int trial = 0; trial < 50; ++trial) {
    CosineSeries a{kPi, std::vector<double>(6)};
    for (std::size_t k = 0; k < 6; ++k) a.coeffs[k] = gen.uniform(-1, 1) * std::exp(-static_cast<double>(k * k));
    const auto free = solve_sourced(CosineSeries::zeros(kPi, 6), a, 1.0, g);
    const auto b = free.coefficients_at(g.t_end);
    const auto f = inverse_source_from_endpoints(a, b, g.t_end, 1.0);
    for (double fk : f.coeffs) EXPECT_NEAR(fk, 0.0, 1e-12);
  }
}

TEST(InverseSource, Errors) {
  const CosineSeries a{kPi, {0.0, 0.0}};
  EXPECT_THROW((void)inverse_source_from_endpoints(a, CosineSeries{kPi, {1.0}}, 1.0, 1.0), ConfigurationError);
  EXPECT_THROW((void)inverse_source_from_endpoints(a, a, 0.0, 1.0), ConfigurationError);
  EXPECT_THROW((void)inverse_source_from_endpoints(a, a, 1.0, 0.0), ConfigurationError);
  // The default exponent k^2 reaches the guard at k = 27.
  const auto many = CosineSeries::zeros(kPi, 40);
  EXPECT_THROW((void)inverse_source_from_endpoints(many, many, 1.0, 1.0), InstabilityError);
  const auto fine = CosineSeries::zeros(kPi, 26);
  EXPECT_NO_THROW((void)inverse_source_from_endpoints(fine, fine, 1.0, 1.0));
}

TEST(InverseSourceProperty, RoundTripOnTheSummableClass) {
  Gen gen(43);
  const Grid g;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t modes = gen.index(1, 9);
    CosineSeries a{kPi, std::vector<double>(modes)};
    CosineSeries b{kPi, std::vector<double>(modes)};
    for (std::size_t k = 0; k < modes; ++k) {
      a.coeffs[k] = gen.uniform(-1, 1) * std::exp(-a.eigenvalue(k) * g.t_end);
      b.coeffs[k] = gen.uniform(-1, 1);
    }
    const auto f = inverse_source_from_endpoints(a, b, g.t_end, 1.0);
    const auto sol = solve_sourced(f, a, 1.0, g);
    const auto target = b.synthesize(g.n_x);
    const auto reached = sol.v().slice(g.n_t - 1);
    double scale = 1.0;
    for (double x : target) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < g.n_x; ++i) EXPECT_LE(std::abs(reached[i] - target[i]), 1e-8 * scale);
  }
}

TEST(InverseSource, UnweightedHighModesLoseDoublePrecision) {
  // a_8 is multiplied by e^64 on the way forward, so O(1) data cannot round trip.
  const Grid g;
  CosineSeries a{kPi, std::vector<double>(9, 0.0)};
  CosineSeries b{kPi, std::vector<double>(9, 0.0)};
  a.coeffs[8] = 0.7;
  b.coeffs[8] = -0.4;
  const auto f = inverse_source_from_endpoints(a, b, g.t_end, 1.0);
  const auto sol = solve_sourced(f, a, 1.0, g);
  EXPECT_GT(std::abs(sol.coefficients_at(g.t_end).coeffs[8] - b.coeffs[8]), 1e-8);
}

TEST(Sourced, ConstantGrowth) {
  const Grid g;
  const auto sol = solve_sourced(CosineSeries{kPi, {0.6}}, CosineSeries{kPi, {-0.2}}, 2.0, g);
  for (std::size_t j = 0; j < g.n_t; j += 11) {
    for (std::size_t i = 0; i < g.n_x; i += 13) EXPECT_NEAR(sol.v().at(i, j), -0.2 + 0.3 * g.t(j), 1e-15);
  }
  EXPECT_NEAR(sol.min_source(), 0.6, 1e-15);
}

TEST(Sourced, UnitSourceShiftsTheBaselineByT) {
  const Grid g;
  const auto base = solve_unstable_backward(fbp::testing::default_final(), kDefault, g);
  const auto sol = solve_sourced(CosineSeries{kPi, {1.0}}, unstable_image(base.u0, kDefault), 1.0, g);
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      ASSERT_NEAR(sol.v().at(i, j), base.v_bar.at(i, j) + g.t(j), 1e-8);
    }
  }
}

TEST(SourcedProperty, ResidualOfTheEquation) {
  Gen gen(44);
  const Grid g;
  for (int trial = 0; trial < 30; ++trial) {
    const double sigma_abs = gen.uniform(0.5, 2.0);
    const auto f = gen.series(kPi, gen.index(1, 5), 1.0);
    CosineSeries v0 = gen.series(kPi, gen.index(1, 5), 1.0);
    for (std::size_t k = 0; k < v0.size(); ++k) v0.coeffs[k] *= std::exp(-v0.eigenvalue(k) / sigma_abs);
    const auto sol = solve_sourced(f, v0, sigma_abs, g);
    const Field2D vt = sol.time_derivative();
    const Field2D vxx = spectral_dxx(sol.v());
    const auto fx = f.synthesize(g.n_x);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (std::size_t i = 0; i < g.n_x; ++i) {
        worst = std::max(worst, std::abs(sigma_abs * vt.at(i, j) + vxx.at(i, j) - fx[i]));
      }
    }
    EXPECT_LE(worst, 1e-8 * std::max(1.0, 1e-3 * vxx.max_abs()));
    // Analytic rate against finite differences, within the O(dt^2) truncation bound.
    double third = 0.0;
    for (std::size_t k = 1; k < std::max(f.size(), v0.size()); ++k) {
      const double mu = f.eigenvalue(k);
      const double rate = mu / sigma_abs;
      third += std::abs(v0.coefficient(k) + f.coefficient(k) / mu) * rate * rate * rate * std::exp(rate * g.t_end);
    }
    const Field2D fd = finite_difference_dt(sol.v());
    EXPECT_LE(max_abs_diff(fd, vt), g.dt() * g.dt() / 3.0 * third + 1e-10 * std::max(1.0, vt.max_abs()));
  }
}

TEST(Sourced, Errors) {
  const Grid g;
  EXPECT_THROW((void)solve_sourced(CosineSeries{kPi, {1.0}}, CosineSeries{kPi, {0.0}}, 0.0, g), ConfigurationError);
  EXPECT_THROW((void)solve_sourced(CosineSeries{2.0, {1.0}}, CosineSeries{kPi, {0.0}}, 1.0, g), ConfigurationError);
  EXPECT_THROW((void)solve_sourced(CosineSeries::zeros(kPi, 65), CosineSeries{kPi, {0.0}}, 1.0, g), ConfigurationError);
  CosineSeries hot = CosineSeries::zeros(kPi, 30);
  hot.coeffs[29] = 1.0;
  EXPECT_THROW((void)solve_sourced(CosineSeries{kPi, {1.0}}, hot, 1.0, g), InstabilityError);
}

TEST(Sourced, TruncationKeepsThePrefix) {
  const Grid g;
  const auto sol = solve_sourced(CosineSeries{kPi, {1.0, 0.2}}, CosineSeries{kPi, {0.0, 0.01}}, 1.0, g);
  const auto cut = sol.truncated(100);
  EXPECT_EQ(cut.v().grid().n_t, 100u);
  for (std::size_t i = 0; i < g.n_x; ++i) EXPECT_EQ(cut.v().at(i, 99), sol.v().at(i, 99));
}

TEST(Pseudoparabolic, EquilibriumStaysPut) {
  Grid g;
  g.n_t = 21;
  g.t_end = 0.2;
  for (double kappa : {-2.0, 0.3, 1.7}) {
    const std::vector<double> u0(g.n_x, kappa);
    const auto sol = solve_pseudoparabolic(u0, 0.1, kDefault, g);
    for (double u : sol.u_eps.values()) EXPECT_NEAR(u, kappa, 1e-14);
    for (double v : sol.v_eps.values()) EXPECT_NEAR(v, eval_phi(kDefault, kappa), 1e-14);
  }
}

TEST(Pseudoparabolic, StableBranchDecayRate) {
  Grid g;
  g.n_t = 11;
  g.t_end = 0.5;
  std::vector<double> u0(g.n_x);
  for (std::size_t i = 0; i < g.n_x; ++i) u0[i] = 3.0 + 0.2 * std::cos(g.x(i));
  PhaseParams steep = kDefault;
  steep.alpha2 = 1.5;
  steep.gamma2 = steep.A - steep.alpha2 * steep.c;
  for (const PhaseParams& p : {kDefault, steep}) {
    for (double eps : {0.1, 0.01, 0.001}) {
      const auto sol = solve_pseudoparabolic(u0, eps, p, g);
      const double mu = 1.0;
      const double expected = p.alpha2 * mu / (1.0 + eps * mu);
      const auto a0 = cosine_analyze(sol.u_eps.slice(0), kPi, 4);
      const auto a1 = cosine_analyze(sol.u_eps.slice(g.n_t - 1), kPi, 4);
      const double rate = -std::log(a1.coeffs[1] / a0.coeffs[1]) / g.t_end;
      EXPECT_LE(std::abs(rate - expected) / expected, 1e-6) << "eps " << eps << " alpha " << p.alpha2;
    }
  }
}

TEST(Pseudoparabolic, ApproachesHeatFlowAsEpsShrinks) {
  Grid g;
  g.n_t = 11;
  g.t_end = 0.5;
  std::vector<double> u0(g.n_x);
  for (std::size_t i = 0; i < g.n_x; ++i) u0[i] = 3.0 + 0.2 * std::cos(g.x(i)) + 0.1 * std::cos(2 * g.x(i));
  double previous = 1e300;
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto sol = solve_pseudoparabolic(u0, eps, kDefault, g);
    double dist = 0.0;
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (std::size_t i = 0; i < g.n_x; ++i) {
        const double t = g.t(j);
        const double heat = 3.0 + 0.2 * std::exp(-t) * std::cos(g.x(i)) + 0.1 * std::exp(-4 * t) * std::cos(2 * g.x(i));
        dist = std::max(dist, std::abs(sol.u_eps.at(i, j) - heat));
      }
    }
    EXPECT_LT(dist, previous);
    EXPECT_LE(dist, 0.2 * eps);
    previous = dist;
  }
}

TEST(PseudoparabolicProperty, ConservationAndHelmholtzRelation) {
  Gen gen(45);
  Grid g;
  g.n_t = 11;
  g.t_end = 0.2;
  const auto base = solve_unstable_backward(fbp::testing::default_final(), kDefault, g);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> u0 = base.u0.synthesize(g.n_x);
    const auto bumpy = gen.series(kPi, 5, 0.5);
    const auto extra = bumpy.synthesize(g.n_x);
    for (std::size_t i = 0; i < g.n_x; ++i) u0[i] += extra[i];
    const double eps = trial % 2 == 0 ? 0.1 : 0.01;
    const auto sol = solve_pseudoparabolic(u0, eps, kDefault, g);
    const double m0 = mass(sol.u_eps.slice(0), kPi);
    for (std::size_t j = 0; j < g.n_t; ++j) {
      EXPECT_LE(std::abs(mass(sol.u_eps.slice(j), kPi) - m0), 1e-8 * std::max(1.0, std::abs(m0)));
    }
    // (I - eps d_xx) v = phi(u) on the collocation grid.
    const Field2D vxx = spectral_dxx(sol.v_eps);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (std::size_t i = 0; i < g.n_x; ++i) {
        const double lhs = sol.v_eps.at(i, j) - eps * vxx.at(i, j);
        worst = std::max(worst, std::abs(lhs - eval_phi(kDefault, sol.u_eps.at(i, j))));
      }
    }
    EXPECT_LE(worst, 1e-9);
  }
}

TEST(Pseudoparabolic, Errors) {
  Grid g;
  g.n_t = 3;
  const std::vector<double> u0(g.n_x, 0.0);
  EXPECT_THROW((void)solve_pseudoparabolic(u0, 0.0, kDefault, g), ConfigurationError);
  EXPECT_THROW((void)solve_pseudoparabolic(std::vector<double>(5, 0.0), 0.1, kDefault, g), ConfigurationError);
  PseudoparabolicOptions opts;
  opts.max_step = 0.1;
  EXPECT_THROW((void)solve_pseudoparabolic(u0, 0.1, kDefault, g, opts), ConfigurationError);
  opts.max_step = 0.01;
  const auto sol = solve_pseudoparabolic(u0, 0.1, kDefault, g, opts);
  EXPECT_LE(sol.step, 0.01);
}
