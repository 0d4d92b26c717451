#pragma once

#include <span>
#include <vector>

#include "fbp/phase_model.hpp"
#include "fbp/spectral.hpp"

namespace fbp {

/// Solution of u_t = phi(u)_xx on the unstable branch with data at the final
/// time. Since phi is affine there the problem is a linear heat equation with
/// negative diffusivity run from T back to 0, i.e. a forward-diffusion from
/// the final datum.
struct BackwardBranchSolution {
  Field2D u_bar;
  Field2D v_bar;
  CosineSeries u0;
  CosineSeries final_data;
};

/// Final datum as a cosine series; its values on the grid must lie in (b, c).
[[nodiscard]] BackwardBranchSolution solve_unstable_backward(const CosineSeries& g, const PhaseParams& params,
                                                             const Grid& grid);

/// Final datum sampled on the grid nodes. Throws BoundaryError if the
/// one-sided slopes at x = 0 or x = L are not zero to 1e-3 max(1, |g|).
[[nodiscard]] BackwardBranchSolution solve_unstable_backward(std::span<const double> g, const PhaseParams& params,
                                                             const Grid& grid);

/// phi applied in coefficient space to a profile lying in the unstable phase.
[[nodiscard]] CosineSeries unstable_image(const CosineSeries& u, const PhaseParams& params);

/// Time-independent source f with |sigma| v_t + v_xx = f taking
/// synthesize(a) at t = 0 to synthesize(b) at t = t_end:
///   f_0 = (b_0 - a_0)|sigma| / T
///   f_k = mu_k (b_k - a_k e^{E_k}) / (e^{E_k} - 1),  E_k = mu_k T / |sigma|.
[[nodiscard]] CosineSeries inverse_source_from_endpoints(const CosineSeries& a, const CosineSeries& b, double t_end,
                                                         double sigma_abs);

/// Mode-wise exact solution of |sigma| v_t + v_xx = f(x).
class SourcedSolution {
 public:
  SourcedSolution(Field2D v, CosineSeries f, CosineSeries v0, double sigma_abs);

  [[nodiscard]] const Field2D& v() const { return v_; }
  [[nodiscard]] const CosineSeries& source() const { return f_; }
  [[nodiscard]] const CosineSeries& initial() const { return v0_; }
  [[nodiscard]] double sigma_abs() const { return sigma_abs_; }

  [[nodiscard]] CosineSeries coefficients_at(double t) const;
  /// Coefficients of v_t at time t.
  [[nodiscard]] CosineSeries rate_at(double t) const;
  /// v_t sampled on the grid from the analytic mode solution.
  [[nodiscard]] Field2D time_derivative() const;
  [[nodiscard]] double min_source() const;
  /// First n_keep time samples.
  [[nodiscard]] SourcedSolution truncated(std::size_t n_keep) const;

 private:
  Field2D v_;
  CosineSeries f_;
  CosineSeries v0_;
  double sigma_abs_;
};

/// v_k(t) = (v_k(0) + f_k/mu_k) e^{mu_k t/|sigma|} - f_k/mu_k for k >= 1 and
/// v_0(t) = v_0(0) + f_0 t/|sigma|. Throws InstabilityError if a nonzero mode
/// would grow past e^700 within the grid horizon.
[[nodiscard]] SourcedSolution solve_sourced(const CosineSeries& f, const CosineSeries& v0, double sigma_abs,
                                            const Grid& grid);

struct PseudoparabolicOptions {
  /// Fixed RK4 step; 0 selects eps / (4 max(1, max|phi'|)).
  double max_step = 0.0;
  /// Coefficients below this fraction of the largest one are zeroed after
  /// every step (Krasny filter). Set to 0 to disable.
  double noise_filter = 1e-13;
};

struct EpsSolution {
  double eps = 0.0;
  Field2D u_eps;
  Field2D v_eps;
  double step = 0.0;
  std::size_t steps = 0;
};

/// u_t = v_xx with (I - eps d_xx) v = phi(u), Neumann data; classical RK4
/// in the cosine basis of the grid.
[[nodiscard]] EpsSolution solve_pseudoparabolic(std::span<const double> u0, double eps, const PhaseParams& params,
                                                const Grid& grid, const PseudoparabolicOptions& options = {});

}  // namespace fbp
