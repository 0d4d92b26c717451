#pragma once

// Shared helpers for the unit tests: seeded generators and field comparisons.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fbp/counterexample.hpp"
#include "fbp/phase_model.hpp"
#include "fbp/spectral.hpp"

namespace fbp::testing {

constexpr double kPi = 3.141592653589793;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return index(0, 1) == 1; }

  /// Coefficients uniform in [-scale, scale], `n` of them.
  CosineSeries series(double length, std::size_t n, double scale) {
    CosineSeries s{length, std::vector<double>(n)};
    for (double& c : s.coeffs) c = uniform(-scale, scale);
    return s;
  }

  /// Valid phase parameters: b < c, A < B, positive outer slopes,
  /// intercepts chosen so phi is continuous at b and c.
  PhaseParams phase() {
    PhaseParams p;
    p.b = uniform(-3.0, 0.0);
    p.c = p.b + uniform(0.2, 3.0);
    p.A = uniform(-3.0, 1.0);
    p.B = p.A + uniform(0.2, 3.0);
    p.alpha1 = uniform(0.2, 4.0);
    p.alpha2 = uniform(0.2, 4.0);
    p.gamma1 = p.B - p.alpha1 * p.b;
    p.gamma2 = p.A - p.alpha2 * p.c;
    return p;
  }

  /// One of the three flux families with random parameters.
  EntropyFlux flux(double lo, double hi) {
    switch (index(0, 2)) {
      case 0: return EntropyFlux::identity();
      case 1: {
        const double p = uniform(lo, hi);
        const double q = uniform(p, hi);
        return EntropyFlux::clamp(p, q, uniform(0.0, 0.5 * (q - p)));
      }
      default: return EntropyFlux::sigmoid(uniform(lo, hi), uniform(0.05, 1.0));
    }
  }

  /// Like flux(), but corners and sigmoid scales no sharper than `min_width`,
  /// so that quadrature on a given grid resolves g'(v).
  EntropyFlux smooth_flux(double lo, double hi, double min_width) {
    switch (index(0, 2)) {
      case 0: return EntropyFlux::identity();
      case 1: {
        const double p = uniform(lo, hi - 2 * min_width);
        const double q = uniform(p + 2 * min_width, hi);
        return EntropyFlux::clamp(p, q, uniform(min_width, 0.5 * (q - p)));
      }
      default: return EntropyFlux::sigmoid(uniform(lo, hi), uniform(min_width, 1.0));
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs_diff(const Field2D& a, const Field2D& b) {
  double worst = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  return worst;
}

inline CosineSeries default_final(double length = kPi) { return {length, {0.0, 0.1}}; }

inline std::vector<CosineSeries> default_sources(double length = kPi) {
  return {{length, {1.0}}, {length, {1.0, 0.3}}, {length, {1.0, 0.0, 0.3}}};
}

/// Copy of `triple` restricted to its first `n_keep` time samples.
inline SolutionTriple first_samples(const SolutionTriple& triple, std::size_t n_keep) {
  SolutionTriple cut = triple;
  cut.t_bar = triple.grid().t(n_keep - 1);
  return cut.restricted();
}

/// Index of the node closest to x.
inline std::size_t nearest(const Grid& grid, double x) {
  return static_cast<std::size_t>(std::lround(x / grid.dx()));
}

}  // namespace fbp::testing
