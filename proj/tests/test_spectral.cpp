#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fbp/errors.hpp"
#include "fbp/spectral.hpp"
#include "support.hpp"

using namespace fbp;
using fbp::testing::Gen;
using fbp::testing::kPi;

namespace {

std::vector<double> sample(std::size_t n, double length, const std::function<double(double)>& f) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(length * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

}  // namespace

TEST(Grid, ValidateAndRefine) {
  Grid g = Grid::defaults();
  EXPECT_NO_THROW(g.validate());
  EXPECT_DOUBLE_EQ(g.x(g.n_x - 1), g.length);
  EXPECT_DOUBLE_EQ(g.t(g.n_t - 1), g.t_end);
  const Grid r = g.refined();
  EXPECT_EQ(r.n_x, 255u);
  EXPECT_EQ(r.n_t, 511u);
  EXPECT_DOUBLE_EQ(r.dx(), 0.5 * g.dx());
  const Grid cut = g.truncated(129);
  EXPECT_DOUBLE_EQ(cut.t_end, g.t(128));
  EXPECT_EQ(cut.n_t, 129u);
  EXPECT_THROW((void)g.truncated(1), PreconditionError);
  g.n_x = 63;
  EXPECT_THROW(g.validate(), ConfigurationError);
  g = Grid::defaults();
  g.n_t = 1;
  EXPECT_THROW(g.validate(), ConfigurationError);
}

TEST(Analyze, PureModes) {
  const std::size_t n = 128;
  const auto constant = sample(n, kPi, [](double) { return 0.7; });
  const auto c = cosine_analyze(constant, kPi, 32);
  EXPECT_NEAR(c.coeffs[0], 0.7, 1e-14);
  for (std::size_t k = 1; k < c.size(); ++k) EXPECT_NEAR(c.coeffs[k], 0.0, 1e-14);

  const auto mode1 = cosine_analyze(sample(n, kPi, [](double x) { return std::cos(x); }), kPi, 32);
  for (std::size_t k = 0; k < mode1.size(); ++k) EXPECT_NEAR(mode1.coeffs[k], k == 1 ? 1.0 : 0.0, 1e-12);

  const auto sq = cosine_analyze(sample(n, kPi, [](double x) { return std::cos(x) * std::cos(x); }), kPi, 32);
  for (std::size_t k = 0; k < sq.size(); ++k) EXPECT_NEAR(sq.coeffs[k], (k == 0 || k == 2) ? 0.5 : 0.0, 1e-12);
}

TEST(Analyze, TooFewSamples) {
  const std::vector<double> one{1.0};
  EXPECT_THROW((void)cosine_analyze(one, kPi, 1), ConfigurationError);
  const std::vector<double> four(4, 1.0);
  EXPECT_THROW((void)cosine_analyze(four, kPi, 5), ConfigurationError);
}

TEST(AnalyzeProperty, SynthesizeRoundTrip) {
  Gen gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const double length = gen.uniform(0.5, 10.0);
    const std::size_t modes = gen.index(1, 40);
    const std::size_t n = 2 * modes + gen.index(0, 60);
    const CosineSeries s = gen.series(length, modes, 1.0);
    const auto back = cosine_analyze(s.synthesize(n), length, modes);
    for (std::size_t k = 0; k < modes; ++k) EXPECT_NEAR(back.coeffs[k], s.coeffs[k], 1e-12);
    const auto again = back.synthesize(n);
    const auto orig = s.synthesize(n);
    double scale = 1.0;
    for (double v : orig) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) EXPECT_LE(std::abs(again[i] - orig[i]), 1e-12 * scale);
  }
}

TEST(AnalyzeProperty, ParsevalOnTheGrid) {
  Gen gen(32);
  for (int trial = 0; trial < 200; ++trial) {
    const double length = gen.uniform(0.5, 10.0);
    const std::size_t modes = gen.index(1, 40);
    const std::size_t n = 2 * modes + gen.index(0, 60);
    const CosineSeries s = gen.series(length, modes, 1.0);
    double coeff_energy = length * s.coeffs[0] * s.coeffs[0];
    for (std::size_t k = 1; k < modes; ++k) coeff_energy += 0.5 * length * s.coeffs[k] * s.coeffs[k];
    const double grid_energy = std::pow(l2_norm_x(s.synthesize(n), length), 2);
    EXPECT_LE(std::abs(grid_energy - coeff_energy), 1e-10 * coeff_energy);
  }
}

TEST(SeriesProperty, ZeroSlopeAtBothEnds) {
  Gen gen(33);
  for (int trial = 0; trial < 100; ++trial) {
    const double length = gen.uniform(0.5, 10.0);
    const CosineSeries s = gen.series(length, gen.index(1, 30), 1.0);
    EXPECT_NEAR(s.derivative(0.0), 0.0, 1e-12);
    EXPECT_NEAR(s.derivative(length), 0.0, 1e-10);
    const auto d = s.synthesize_derivative(65);
    EXPECT_NEAR(d.front(), 0.0, 1e-12);
    EXPECT_NEAR(d.back(), 0.0, 1e-10);
  }
}

TEST(SecondDerivative, HandValues) {
  const CosineSeries c{kPi, {2.5}};
  EXPECT_EQ(second_derivative(c).coeffs[0], 0.0);
  const auto d = second_derivative(CosineSeries{kPi, {0.0, 1.0}});
  EXPECT_NEAR(d.coeffs[1], -1.0, 1e-15);
  const auto d3 = second_derivative(CosineSeries{2.0, {0.0, 0.0, 0.0, 1.0}});
  EXPECT_NEAR(d3.coeffs[3], -std::pow(3.0 * kPi / 2.0, 2), 1e-12);
}

TEST(SecondDerivative, CenteredDifferencesConvergeAtSecondOrder) {
  const CosineSeries s{kPi, {0.3, 1.0, -0.4, 0.2}};
  auto fd_error = [&](std::size_t n) {
    const double h = kPi / static_cast<double>(n - 1);
    const auto v = s.synthesize(n);
    const auto exact = second_derivative(s).synthesize(n);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      worst = std::max(worst, std::abs((v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h) - exact[i]));
    }
    return worst;
  };
  const double e1 = fd_error(65);
  const double e2 = fd_error(129);
  const double e3 = fd_error(257);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.05);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.05);
}

TEST(SpectralDerivatives, FieldsMatchAnalyticDerivatives) {
  Grid g;
  const Field2D f = Field2D::sample(g, [](double x, double t) { return t * std::cos(x) + std::cos(3 * x); }, "f");
  const Field2D fx = spectral_dx(f);
  const Field2D fxx = spectral_dxx(f);
  for (std::size_t j = 0; j < g.n_t; j += 17) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double x = g.x(i);
      const double t = g.t(j);
      EXPECT_NEAR(fx.at(i, j), -t * std::sin(x) - 3 * std::sin(3 * x), 1e-11);
      EXPECT_NEAR(fxx.at(i, j), -t * std::cos(x) - 9 * std::cos(3 * x), 1e-10);
    }
  }
}

TEST(Propagate, HandValues) {
  const CosineSeries s{kPi, {0.4, 1.0}};
  const auto out = propagate_heat(s, 1.0, 1.0);
  EXPECT_NEAR(out.coeffs[1], std::exp(-1.0), 1e-15);
  EXPECT_EQ(out.coeffs[0], 0.4);
  EXPECT_EQ(propagate_heat(s, -3.0, 2.0).coeffs[0], 0.4);
  EXPECT_THROW((void)propagate_heat(s, 1.0, -0.1), PreconditionError);
}

TEST(Propagate, MatchesFineFiniteDifferenceHeatFlow) {
  // Explicit scheme for w_t = w_xx with mirrored Neumann ghosts.
  const std::size_t n = 101;
  const double h = kPi / (n - 1);
  const double dt = 0.4 * h * h;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(1.0 / dt));
  const double step = 1.0 / static_cast<double>(steps);
  std::vector<double> w = sample(n, kPi, [](double x) { return std::cos(x); });
  std::vector<double> next(n);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i == 0 ? w[1] : w[i - 1];
      const double right = i + 1 == n ? w[n - 2] : w[i + 1];
      next[i] = w[i] + step * (left - 2 * w[i] + right) / (h * h);
    }
    w.swap(next);
  }
  const auto exact = propagate_heat(CosineSeries{kPi, {0.0, 1.0}}, 1.0, 1.0).synthesize(n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(w[i], exact[i], 1e-4);
}

TEST(Propagate, GrowthGuardNamesTheMode) {
  CosineSeries s = CosineSeries::zeros(kPi, 40);
  s.coeffs[39] = 1e-3;
  try {
    (void)propagate_heat(s, -1.0, 1.0);
    FAIL() << "expected InstabilityError";
  } catch (const InstabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("mode 39"), std::string::npos);
  }
  s.coeffs[39] = 0.0;
  s.coeffs[20] = 1.0;
  EXPECT_NO_THROW((void)propagate_heat(s, -1.0, 1.0));
  // Strong decay is not an error.
  s.coeffs[39] = 1.0;
  EXPECT_NO_THROW((void)propagate_heat(s, 1.0, 100.0));
}

TEST(PropagateProperty, Semigroup) {
  Gen gen(34);
  for (int trial = 0; trial < 200; ++trial) {
    const double length = gen.uniform(1.0, 6.0);
    const CosineSeries s = gen.series(length, gen.index(1, 12), 1.0);
    const double kappa = gen.uniform(-0.2, 2.0);
    const double t1 = gen.uniform(0.0, 1.0);
    const double t2 = gen.uniform(0.0, 1.0);
    const auto two = propagate_heat(propagate_heat(s, kappa, t1), kappa, t2);
    const auto one = propagate_heat(s, kappa, t1 + t2);
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_NEAR(two.coeffs[k], one.coeffs[k], 1e-13 * std::max(1.0, std::abs(one.coeffs[k])));
    }
  }
}

TEST(PropagateProperty, CommutesWithDifferentiation) {
  Gen gen(35);
  for (int trial = 0; trial < 200; ++trial) {
    const double length = gen.uniform(1.0, 6.0);
    const CosineSeries s = gen.series(length, gen.index(1, 16), 1.0);
    const double kappa = gen.uniform(0.0, 2.0);
    const double dt = gen.uniform(0.0, 1.0);
    const auto a = second_derivative(propagate_heat(s, kappa, dt));
    const auto b = propagate_heat(second_derivative(s), kappa, dt);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_LE(std::abs(a.coeffs[k] - b.coeffs[k]), 1e-12 * std::max(1.0, std::abs(a.coeffs[k])));
  }
}

TEST(Quadrature, HandValues) {
  Grid g;
  EXPECT_NEAR(integrate_qt(Field2D::sample(g, [](double, double) { return 1.0; }, "one")), kPi, 1e-13);
  EXPECT_NEAR(integrate_qt(Field2D::sample(g, [](double x, double) { return std::cos(x); }, "c")), 0.0, 1e-13);
  EXPECT_NEAR(integrate_qt(Field2D::sample(g, [](double, double t) { return t; }, "t")), kPi / 2, 1e-13);
}

TEST(Quadrature, SecondOrderOnSmoothProduct) {
  // int_0^pi (1 + x^2) dx * int_0^1 e^t dt
  const double exact = (kPi + kPi * kPi * kPi / 3.0) * (std::exp(1.0) - 1.0);
  auto error = [&](std::size_t n) {
    Grid g;
    g.n_x = n;
    g.n_t = n;
    g.n_modes = 1;
    return std::abs(integrate_qt(Field2D::sample(g, [](double x, double t) { return (1 + x * x) * std::exp(t); }, "f")) - exact);
  };
  const double e1 = error(33);
  const double e2 = error(65);
  const double e3 = error(129);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.05);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.05);
}

TEST(TimeOperators, DifferenceAndCumulativeIntegral) {
  Grid g;
  const Field2D f = Field2D::sample(g, [](double x, double t) { return std::cos(x) * t * t; }, "f");
  const Field2D ft = finite_difference_dt(f);
  const Field2D cum = cumulative_time_integral(ft);
  for (std::size_t j = 0; j < g.n_t; j += 31) {
    for (std::size_t i = 0; i < g.n_x; i += 9) {
      EXPECT_NEAR(ft.at(i, j), 2 * g.t(j) * std::cos(g.x(i)), 1e-12);
      EXPECT_NEAR(cum.at(i, j), f.at(i, j), 1e-5);
    }
  }
}

TEST(Field, InterpolationTruncationAndCsv) {
  Grid g;
  g.n_x = 8;
  g.n_t = 5;
  g.n_modes = 2;
  const Field2D f = Field2D::sample(g, [](double x, double t) { return x + 10 * t; }, "f");
  const auto mid = f.at_time(0.3);
  for (std::size_t i = 0; i < g.n_x; ++i) EXPECT_NEAR(mid[i], g.x(i) + 3.0, 1e-13);
  EXPECT_EQ(f.truncated(3).grid().n_t, 3u);
  EXPECT_TRUE(f.all_finite());
  EXPECT_NEAR(f.max_abs(), kPi + 10.0, 1e-13);

  const auto path = std::filesystem::temp_directory_path() / "fbp_field_csv_test.csv";
  f.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("x\t", 0), 0u);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, g.n_t);
  std::filesystem::remove(path);
}
