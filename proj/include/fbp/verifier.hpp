#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fbp/counterexample.hpp"
#include "fbp/phase_model.hpp"
#include "fbp/solvers.hpp"
#include "fbp/spectral.hpp"

namespace fbp {

/// Nonnegative smooth test function on [0,L] x [0,T].
///   bump:         b((x-x0)/rx) b((t-t0)/rt), b(s) = exp(-1/(1-s^2))
///   mode_product: sin^2(j pi x / L) b((t-t0)/rt)
///   released:     W(t) (1 + cos(j pi x / L))/2 (W(t) for j = 0), W = 1 - smoothstep(t/T);
///                 not compactly supported in t, W(0) = 1 and W(T) = 0. Weak form only.
struct TestFunction {
  enum class Kind { bump, mode_product, released };

  Kind kind = Kind::bump;
  double x0 = 0.0;
  double t0 = 0.0;
  double rx = 1.0;
  double rt = 1.0;
  int mode = 0;
  double length = 3.141592653589793;
  double horizon = 1.0;
  double scale = 1.0;

  [[nodiscard]] static TestFunction bump(double x0, double t0, double rx, double rt);
  [[nodiscard]] static TestFunction mode_product(int j, double length, double t0, double rt);
  [[nodiscard]] static TestFunction released(int j, double length, double horizon);
  [[nodiscard]] static TestFunction zero();

  [[nodiscard]] double value(double x, double t) const;
  [[nodiscard]] double dt(double x, double t) const;
  [[nodiscard]] double dx(double x, double t) const;
  [[nodiscard]] double dxx(double x, double t) const;
  [[nodiscard]] bool compactly_supported() const { return kind != Kind::released; }
  [[nodiscard]] std::string name() const;
};

/// Four bumps centred at the quarter points plus sin^2 products for j = 1, 2.
[[nodiscard]] std::vector<TestFunction> entropy_battery(double length, double horizon);
/// entropy_battery plus released tests (j = 0, 1) that see the initial trace.
[[nodiscard]] std::vector<TestFunction> weak_battery(double length, double horizon);

struct Check {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  double x = 0.0;
  double t = 0.0;
  std::string detail;
};

class VerificationReport {
 public:
  explicit VerificationReport(std::string subject = {}) : subject_(std::move(subject)) {}

  void add(Check check);
  void merge(const VerificationReport& other);

  [[nodiscard]] bool passed() const;
  [[nodiscard]] const std::vector<Check>& checks() const { return checks_; }
  /// Throws std::out_of_range if absent.
  [[nodiscard]] const Check& find(const std::string& name) const;
  [[nodiscard]] bool contains(const std::string& name) const;
  [[nodiscard]] const std::string& subject() const { return subject_; }
  void set_grid_summary(std::string summary) { grid_summary_ = std::move(summary); }
  [[nodiscard]] const std::string& grid_summary() const { return grid_summary_; }

  void write_text(std::ostream& os) const;
  /// check,status,residual,tolerance,x,t
  void write_csv(std::ostream& os) const;

 private:
  std::string subject_;
  std::string grid_summary_;
  std::vector<Check> checks_;
};

enum class WeakPairing {
  /// u psi_t - v_x psi_x
  gradient,
  /// u psi_t + v psi_xx; equal to the gradient form when v_x vanishes at x = 0, L.
  laplacian,
};

/// int int (u psi_t - v_x psi_x) dx dt + int u0 psi(x, 0) dx, by grid quadrature.
[[nodiscard]] double weak_form_integral(const SolutionTriple& triple, std::span<const double> u0,
                                        const TestFunction& psi, WeakPairing pairing = WeakPairing::gradient);
/// Max of |weak_form_integral| over the tests.
[[nodiscard]] double weak_residual(const SolutionTriple& triple, std::span<const double> u0,
                                   std::span<const TestFunction> tests, WeakPairing pairing = WeakPairing::gradient);

/// G* = sum_i lam_i G(beta_i(v)) with (lam_0, lam_1, lam_2) = (1 - lam, 0, lam).
[[nodiscard]] Field2D entropy_superposition(const SolutionTriple& triple, const PhaseParams& params,
                                            const EntropyFlux& g);

/// int int {G* psi_t - g(v) v_x psi_x - g'(v) v_x^2 psi} dx dt.
[[nodiscard]] double entropy_inequality_residual(const SolutionTriple& triple, const PhaseParams& params,
                                                 const EntropyFlux& g, const TestFunction& psi);

struct Extremum {
  double value = 0.0;
  double x = 0.0;
  double t = 0.0;
};

struct CertificateResult {
  /// min of lam_t * certificate_integrand(v)
  Extremum min_product;
  /// max |(g(v) v_xx - G*_t) - lam_t certificate_integrand(v)|, G*_t by finite differences
  Extremum identity_error;
};

/// Throws PreconditionError when the triple carries no lam_t.
[[nodiscard]] CertificateResult pointwise_certificate(const SolutionTriple& triple, const PhaseParams& params,
                                                      const EntropyFlux& g);

/// lam_2 = lam nondecreasing in t where v > A, lam_1 = 0 where v < B; also
/// reports the largest discrete total variation in t.
[[nodiscard]] VerificationReport monotonicity_report(const SolutionTriple& triple, const PhaseParams& params,
                                                     double tol);

/// Largest over x of sum_j |lam(x, t_{j+1}) - lam(x, t_j)|.
[[nodiscard]] double discrete_total_variation(const Field2D& lam);

struct StructuralTolerances {
  double initial_trace = 1e-10;
  double neumann = 1e-3;
  double level = 1e-8;
  double superposition = 1e-10;
  /// |u_t - v_xx| allowed: pde_floor + pde_safety * dt^2/3 * max|u_ttt|, with
  /// u_ttt from third differences.
  double pde_floor = 1e-8;
  double pde_safety = 2.0;
  double lambda_t = 1e-8;
};

[[nodiscard]] VerificationReport structural_check(const SolutionTriple& triple, std::span<const double> u0,
                                                  const PhaseParams& params, const StructuralTolerances& tol = {});

/// int int {G(u_eps) psi_t - g(v_eps) v_eps_x psi_x - g'(v_eps) (v_eps_x)^2 psi} dx dt.
[[nodiscard]] double viscous_entropy_residual(const EpsSolution& sol, const PhaseParams& params,
                                              const EntropyFlux& g, const TestFunction& psi);

/// viscous_entropy_residual for each test, sharing G(u_eps) across tests.
[[nodiscard]] std::vector<double> viscous_entropy_residuals(const EpsSolution& sol, const PhaseParams& params,
                                                            const EntropyFlux& g,
                                                            std::span<const TestFunction> tests);

struct Distances {
  double u = 0.0;
  double v = 0.0;
  double lam = 0.0;

  [[nodiscard]] double max() const;
};

/// Spatial L2 distances at t_probe. Throws PreconditionError past either
/// certified horizon, ConfigurationError if the spatial grids differ.
[[nodiscard]] Distances distinctness(const SolutionTriple& a, const SolutionTriple& b, double t_probe);

struct BatteryOptions {
  double weak_tol = 1e-6;
  /// The laplacian pairing differentiates psi twice; its quadrature error
  /// is ~1e-5 on the default grid and drops ~100x per refinement.
  double pairing_tol = 1e-4;
  double entropy_tol = 1e-6;
  double certificate_tol = 1e-8;
  /// Identity error allowed: identity_floor + identity_safety * dt^2/3 * max|G*_ttt|,
  /// the truncation bound of the finite-difference G*_t.
  double identity_floor = 1e-8;
  double identity_safety = 2.0;
  double monotonicity_tol = 1e-8;
  StructuralTolerances structural;
};

/// Every check above on a triple already restricted to its horizon.
[[nodiscard]] VerificationReport full_battery(const SolutionTriple& triple, std::span<const double> u0,
                                              const PhaseParams& params, const BatteryOptions& options = {});

struct Violator {
  std::string name;
  /// Check in full_battery that must fail.
  std::string target_check;
  SolutionTriple triple;
};

/// Decreasing lambda, broken superposition, v below A and a non-conservative
/// u, each derived from a valid restricted triple.
[[nodiscard]] std::vector<Violator> manufactured_violators(const SolutionTriple& reference, const PhaseParams& params);

}  // namespace fbp
