#include "fbp/phase_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "fbp/errors.hpp"

namespace fbp {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(fmt::format("{}: non-finite argument {}", what, x));
}

// log(cosh(z)) without overflow.
double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// One affine piece of phi: slope * s + intercept on [lo, hi].
struct Piece {
  double lo, hi, slope, intercept;
};

// int_{x0}^{x1} g(phi(s)) ds for x0 <= x1, one closed-form term per piece.
double integrate_flux(const PhaseParams& params, const EntropyFlux& g, double x0, double x1) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::array<Piece, 3> pieces{{
      {-inf, params.b, params.alpha1, params.gamma1},
      {params.b, params.c, params.unstable_slope(), params.unstable_intercept()},
      {params.c, inf, params.alpha2, params.gamma2},
  }};
  double total = 0.0;
  for (const auto& piece : pieces) {
    const double lo = std::max(x0, piece.lo);
    const double hi = std::min(x1, piece.hi);
    if (!(lo < hi)) continue;
    const double w_lo = piece.slope * lo + piece.intercept;
    const double w_hi = piece.slope * hi + piece.intercept;
    total += (g.antiderivative(w_hi) - g.antiderivative(w_lo)) / piece.slope;
  }
  return total;
}

}  // namespace

std::string to_string(Branch branch) {
  switch (branch) {
    case Branch::unstable: return "beta_0 (unstable)";
    case Branch::lower: return "beta_1 (lower stable)";
    case Branch::upper: return "beta_2 (upper stable)";
  }
  return "unknown branch";
}

void PhaseParams::validate() const {
  for (double x : {b, c, A, B, alpha1, alpha2, gamma1, gamma2}) {
    if (!std::isfinite(x)) throw ConfigurationError("phase parameters must be finite");
  }
  if (!(b < c)) throw ConfigurationError(fmt::format("phase: need b < c, got b={} c={}", b, c));
  if (!(A < B)) throw ConfigurationError(fmt::format("phase: need A < B, got A={} B={}", A, B));
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) {
    throw ConfigurationError(fmt::format("phase: stable slopes must be positive, got {} {}", alpha1, alpha2));
  }
  const double scale = 1.0 + std::max({std::abs(b), std::abs(c), std::abs(A), std::abs(B)});
  const double tol = 1e-12 * scale * (1.0 + std::max(alpha1, alpha2));
  if (std::abs(alpha1 * b + gamma1 - B) > tol) {
    throw ConfigurationError(fmt::format("phase: discontinuous at b, alpha1*b+gamma1={} but B={}", alpha1 * b + gamma1, B));
  }
  if (std::abs(alpha2 * c + gamma2 - A) > tol) {
    throw ConfigurationError(fmt::format("phase: discontinuous at c, alpha2*c+gamma2={} but A={}", alpha2 * c + gamma2, A));
  }
}

double PhaseParams::max_slope() const {
  return std::max({alpha1, alpha2, std::abs(unstable_slope())});
}

double eval_phi(const PhaseParams& params, double u) {
  require_finite(u, "eval_phi");
  if (u <= params.b) return params.alpha1 * u + params.gamma1;
  if (u < params.c) return params.unstable_slope() * u + params.unstable_intercept();
  return params.alpha2 * u + params.gamma2;
}

double eval_phi_slope(const PhaseParams& params, double u) {
  require_finite(u, "eval_phi_slope");
  if (u < params.b) return params.alpha1;
  if (u < params.c) return params.unstable_slope();
  return params.alpha2;
}

double eval_beta_extended(const PhaseParams& params, Branch branch, double v) {
  switch (branch) {
    case Branch::unstable: return (v - params.unstable_intercept()) * params.sigma();
    case Branch::lower: return (v - params.gamma1) / params.alpha1;
    case Branch::upper: return (v - params.gamma2) / params.alpha2;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval_beta(const PhaseParams& params, Branch branch, double v) {
  require_finite(v, "eval_beta");
  const bool ok = [&] {
    switch (branch) {
      case Branch::unstable: return params.A <= v && v <= params.B;
      case Branch::lower: return v <= params.B;
      case Branch::upper: return params.A <= v;
    }
    return false;
  }();
  if (!ok) throw DomainError(fmt::format("{}: v={} outside the branch domain", to_string(branch), v));
  // Pin the shared endpoints so that beta_0(A) == beta_2(A) == c exactly.
  if (branch == Branch::unstable) {
    if (v == params.A) return params.c;
    if (v == params.B) return params.b;
  }
  if (branch == Branch::upper && v == params.A) return params.c;
  if (branch == Branch::lower && v == params.B) return params.b;
  return eval_beta_extended(params, branch, v);
}

double branch_gap_slope(const PhaseParams& params) {
  return 1.0 / params.alpha2 - params.sigma();
}

double branch_gap(const PhaseParams& params, double v) {
  require_finite(v, "branch_gap");
  if (v < params.A || v > params.B) {
    throw DomainError(fmt::format("branch_gap: v={} outside [A,B]=[{},{}]", v, params.A, params.B));
  }
  return branch_gap_extended(params, v);
}

double branch_gap_extended(const PhaseParams& params, double v) {
  // Written relative to A so that the gap vanishes exactly there.
  return branch_gap_slope(params) * (v - params.A);
}

// ---------------------------------------------------------------------------
// Entropy fluxes

EntropyFlux EntropyFlux::clamp(double lo, double hi, double corner) {
  EntropyFlux g{Kind::clamp, lo, hi, corner};
  g.validate();
  return g;
}

EntropyFlux EntropyFlux::sigmoid(double center, double scale) {
  EntropyFlux g{Kind::sigmoid, center, 0.0, scale};
  g.validate();
  return g;
}

void EntropyFlux::validate() const {
  if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(s)) {
    throw ConfigurationError("entropy flux parameters must be finite");
  }
  switch (kind) {
    case Kind::identity: return;
    case Kind::clamp:
      if (q < p) throw ConfigurationError(fmt::format("clamp flux needs p <= q, got {} {}", p, q));
      if (s < 0.0) throw ConfigurationError("clamp flux corner width must be nonnegative");
      if (p < q && q - p < s) {
        throw ConfigurationError(fmt::format("clamp flux corners overlap: q-p={} < s={}", q - p, s));
      }
      return;
    case Kind::sigmoid:
      if (!(s > 0.0)) throw ConfigurationError("sigmoid flux scale must be positive");
      return;
  }
}

double EntropyFlux::value(double v) const {
  switch (kind) {
    case Kind::identity: return v;
    case Kind::sigmoid: return std::tanh((v - p) / s);
    case Kind::clamp: {
      if (p == q) return p;
      const double h = 0.5 * s;
      if (v <= p - h) return p;
      if (v < p + h) return p + (v - p + h) * (v - p + h) / (4.0 * h);
      if (v <= q - h) return v;
      if (v < q + h) return q - (q + h - v) * (q + h - v) / (4.0 * h);
      return q;
    }
  }
  return 0.0;
}

double EntropyFlux::derivative(double v) const {
  switch (kind) {
    case Kind::identity: return 1.0;
    case Kind::sigmoid: {
      const double th = std::tanh((v - p) / s);
      return (1.0 - th * th) / s;
    }
    case Kind::clamp: {
      if (p == q) return 0.0;
      const double h = 0.5 * s;
      if (v <= p - h) return 0.0;
      if (v < p + h) return (v - p + h) / (2.0 * h);
      if (v <= q - h) return 1.0;
      if (v < q + h) return (q + h - v) / (2.0 * h);
      return 0.0;
    }
  }
  return 0.0;
}

double EntropyFlux::antiderivative(double v) const {
  switch (kind) {
    case Kind::identity: return 0.5 * v * v;
    case Kind::sigmoid: return s * log_cosh((v - p) / s);
    case Kind::clamp: {
      if (p == q) return p * v;
      const double h = 0.5 * s;
      const double w = 2.0 * h;
      const double corner = h > 0.0 ? w * w * w / (12.0 * h) : 0.0;
      const double at_p_lo = p * (p - h);
      if (v <= p - h) return p * v;
      if (v < p + h) return at_p_lo + p * (v - (p - h)) + std::pow(v - p + h, 3) / (12.0 * h);
      const double at_p_hi = at_p_lo + p * w + corner;
      if (v <= q - h) return at_p_hi + 0.5 * (v * v - (p + h) * (p + h));
      const double at_q_lo = at_p_hi + 0.5 * ((q - h) * (q - h) - (p + h) * (p + h));
      if (v < q + h) return at_q_lo + q * (v - (q - h)) - (w * w * w - std::pow(q + h - v, 3)) / (12.0 * h);
      const double at_q_hi = at_q_lo + q * w - corner;
      return at_q_hi + q * (v - (q + h));
    }
  }
  return 0.0;
}

std::string EntropyFlux::name() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::clamp:
      if (p == q) return fmt::format("constant({:g})", p);
      return fmt::format("clamp({:g},{:g};{:g})", p, q, s);
    case Kind::sigmoid: return fmt::format("sigmoid({:g};{:g})", p, s);
  }
  return "unknown";
}

std::vector<EntropyFlux> builtin_fluxes() {
  return {
      EntropyFlux::identity(),
      EntropyFlux::clamp(-0.5, 0.5, 0.1),
      EntropyFlux::clamp(0.0, 1.0, 0.2),
      EntropyFlux::clamp(-1.0, 0.0, 0.2),
      EntropyFlux::clamp(0.2, 0.6, 0.1),
      EntropyFlux::clamp(-0.05, 0.05, 0.05),
      EntropyFlux::constant(0.4),
      EntropyFlux::sigmoid(0.0, 0.1),
      EntropyFlux::sigmoid(0.0, 1.0),
      EntropyFlux::sigmoid(0.5, 0.2),
      EntropyFlux::sigmoid(-0.3, 0.5),
      EntropyFlux::sigmoid(0.8, 0.05),
  };
}

double entropy_primitive(const PhaseParams& params, const EntropyFlux& g, double u) {
  require_finite(u, "entropy_primitive");
  if (u >= 0.0) return integrate_flux(params, g, 0.0, u);
  return -integrate_flux(params, g, u, 0.0);
}

double certificate_integrand(const PhaseParams& params, const EntropyFlux& g, double v) {
  require_finite(v, "certificate_integrand");
  if (v < params.A || v > params.B) {
    throw DomainError(fmt::format("certificate_integrand: v={} outside [A,B]", v));
  }
  const double lo = eval_beta(params, Branch::unstable, v);
  const double hi = eval_beta(params, Branch::upper, v);
  return entropy_primitive(params, g, lo) - entropy_primitive(params, g, hi) + (hi - lo) * g.value(v);
}

}  // namespace fbp
