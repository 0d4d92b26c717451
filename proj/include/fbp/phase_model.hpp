#pragma once

#include <array>
#include <string>
#include <vector>

namespace fbp {

/// Monotone pieces of the flux: the decreasing middle piece and the two
/// increasing outer pieces. Numbering follows the phase coefficients
/// lambda_0 (unstable), lambda_1 (lower stable), lambda_2 (upper stable).
enum class Branch : int { unstable = 0, lower = 1, upper = 2 };

[[nodiscard]] std::string to_string(Branch branch);

/// Piecewise-linear, nonmonotone flux
///
///   phi(u) = alpha1 u + gamma1            u <= b
///            (A (u - b) - B (u - c))/(c-b) b < u < c
///            alpha2 u + gamma2            u >= c
///
/// with A = phi(c) < phi(b) = B. The outer pieces are the stable phases.
struct PhaseParams {
  double b = -1.0;
  double c = 1.0;
  double A = -1.0;
  double B = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double gamma1 = 2.0;
  double gamma2 = -2.0;

  /// b=-1, c=1, A=-1, B=1, unit slopes; the middle piece is phi(u) = -u.
  [[nodiscard]] static PhaseParams defaults() { return {}; }

  /// Throws ConfigurationError on ordering, positivity or continuity failures.
  void validate() const;

  /// Inverse slope of the middle piece, (c-b)/(A-B) < 0.
  [[nodiscard]] double sigma() const { return (c - b) / (A - B); }
  [[nodiscard]] double sigma_abs() const { return -sigma(); }

  /// Middle piece as slope * u + intercept.
  [[nodiscard]] double unstable_slope() const { return (A - B) / (c - b); }
  [[nodiscard]] double unstable_intercept() const { return (B * c - A * b) / (c - b); }

  /// Largest |phi'| over all three pieces.
  [[nodiscard]] double max_slope() const;

  friend bool operator==(const PhaseParams&, const PhaseParams&) = default;
};

[[nodiscard]] double eval_phi(const PhaseParams& params, double u);

/// phi' away from the breakpoints (one-sided value from the right at b, c).
[[nodiscard]] double eval_phi_slope(const PhaseParams& params, double u);

/// Inverse of one monotone piece. Domains: unstable [A,B], lower (-inf,B],
/// upper [A,inf). Throws DomainError naming the branch otherwise.
[[nodiscard]] double eval_beta(const PhaseParams& params, Branch branch, double v);

/// Affine continuation of a branch inverse past its domain; no checks.
[[nodiscard]] double eval_beta_extended(const PhaseParams& params, Branch branch, double v);

/// beta_2(v) - beta_0(v) on [A,B]; zero exactly at v = A.
[[nodiscard]] double branch_gap(const PhaseParams& params, double v);

/// Same quantity through the affine continuation of beta_0; valid for v > B.
[[nodiscard]] double branch_gap_extended(const PhaseParams& params, double v);

/// d(branch_gap)/dv = 1/alpha2 - sigma.
[[nodiscard]] double branch_gap_slope(const PhaseParams& params);

/// Nondecreasing C^1 entropy flux g used in the entropy inequality.
///
///   identity: g(v) = v
///   clamp:    g(v) = min(max(v, p), q) with both corners rounded by
///             quadratic blends of total width s (s = 0 gives the sharp
///             clamp, p == q gives the constant p)
///   sigmoid:  g(v) = tanh((v - p) / s)
struct EntropyFlux {
  enum class Kind { identity, clamp, sigmoid };

  Kind kind = Kind::identity;
  double p = 0.0;
  double q = 0.0;
  double s = 1.0;

  [[nodiscard]] static EntropyFlux identity() { return {}; }
  [[nodiscard]] static EntropyFlux clamp(double lo, double hi, double corner = 0.0);
  [[nodiscard]] static EntropyFlux constant(double value) { return clamp(value, value); }
  [[nodiscard]] static EntropyFlux sigmoid(double center, double scale);

  void validate() const;

  [[nodiscard]] double value(double v) const;
  [[nodiscard]] double derivative(double v) const;
  /// Antiderivative of g, anchored at an arbitrary point.
  [[nodiscard]] double antiderivative(double v) const;

  [[nodiscard]] std::string name() const;
};

/// Twelve flux instances spanning the three families.
[[nodiscard]] std::vector<EntropyFlux> builtin_fluxes();

/// G(u) = int_0^u g(phi(s)) ds, integrated exactly on each affine piece.
[[nodiscard]] double entropy_primitive(const PhaseParams& params, const EntropyFlux& g, double u);

/// G(beta_0(v)) - G(beta_2(v)) + (beta_2(v) - beta_0(v)) g(v), which equals
/// int_{beta_0(v)}^{beta_2(v)} [g(v) - g(phi(s))] ds and is nonnegative.
[[nodiscard]] double certificate_integrand(const PhaseParams& params, const EntropyFlux& g, double v);

}  // namespace fbp
