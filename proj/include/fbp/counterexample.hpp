#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbp/phase_model.hpp"
#include "fbp/solvers.hpp"
#include "fbp/spectral.hpp"

namespace fbp {

/// Two-phase, measure-valued, regular solution: u = (1-lam) beta_0(v) + lam beta_2(v)
/// with phase coefficients (lambda_0, lambda_1, lambda_2) = (1-lam, 0, lam).
///
/// Fields cover the whole grid; `t_bar` is the certified horizon and every
/// admissibility statement is about [0, L] x [0, t_bar] only.
struct SolutionTriple {
  Field2D u;
  Field2D v;
  Field2D lam;
  /// Analytic lambda_t from the construction (absent for manufactured triples).
  std::optional<Field2D> lam_t;
  /// m = v_xx - (beta_0(v))_t; equals the source for sourced triples.
  std::optional<Field2D> m;
  std::optional<CosineSeries> source;
  double t_bar = 0.0;
  std::string provenance;
  std::string horizon_diagnostic;

  [[nodiscard]] const Grid& grid() const { return u.grid(); }
  /// Number of time samples in [0, t_bar].
  [[nodiscard]] std::size_t horizon_samples() const;
  /// Copy restricted to [0, t_bar]; needs at least two samples.
  [[nodiscard]] SolutionTriple restricted() const;
};

/// lambda = (int_0^t m ds) / (beta_2(v) - beta_0(v)) with m = f, so the
/// numerator is t f(x). Where v > B the gap uses the affine continuation of
/// beta_0. Throws DomainError if v <= A, NearSingularError if the gap < 1e-9.
[[nodiscard]] Field2D build_lambda(const SourcedSolution& sol, const PhaseParams& params);

/// lambda_t = m/gap - gap_t (int_0^t m) / gap^2, gap_t = (1/alpha2 - sigma) v_t.
[[nodiscard]] Field2D lambda_time_derivative(const SourcedSolution& sol, const Field2D& lam,
                                             const PhaseParams& params);

enum class BranchDomain { strict, extended };

/// u = (1 - lam) beta_0(v) + lam beta_2(v). In strict mode lam must lie in
/// [0,1] and v in (A, B]; extended mode continues beta_0 affinely past B.
[[nodiscard]] Field2D assemble_state(const Field2D& v, const Field2D& lam, const PhaseParams& params,
                                     BranchDomain domain = BranchDomain::strict);

struct HorizonRules {
  /// Demand m >= delta. Waived for the baseline, whose lambda vanishes
  /// identically so lambda_t >= 0 needs no source margin.
  bool require_source_margin = true;
};

struct HorizonCertificate {
  double t_bar = 0.0;
  std::size_t samples = 1;
  std::string diagnostic;
};

/// Largest grid time T such that on [0,L] x [0,T]: gap(v) >= delta,
/// m >= delta, 0 <= lam <= 1 - delta, lam_t >= -tol and A + delta < v <= B.
[[nodiscard]] HorizonCertificate certify_horizon(const SolutionTriple& triple, const PhaseParams& params,
                                                 double delta, double tol, const HorizonRules& rules = {});

struct FamilyOptions {
  double delta = 0.05;
  double lambda_t_tol = 1e-8;
  /// Lower bound c2 every source must respect.
  double min_source = 0.5;
};

/// Baseline (u_bar, v_bar, 0) followed by one sourced triple per source, all
/// sharing the initial datum u_bar(., 0).
[[nodiscard]] std::vector<SolutionTriple> construct_family(const CosineSeries& g_final,
                                                           const std::vector<CosineSeries>& sources,
                                                           const PhaseParams& params, const Grid& grid,
                                                           const FamilyOptions& options = {});

/// Sourced member of a family, built from a computed backward solution.
[[nodiscard]] SolutionTriple construct_sourced_triple(const BackwardBranchSolution& baseline,
                                                      const CosineSeries& source, const PhaseParams& params,
                                                      const Grid& grid, const FamilyOptions& options = {});

[[nodiscard]] SolutionTriple construct_baseline_triple(const BackwardBranchSolution& baseline,
                                                       const PhaseParams& params, const FamilyOptions& options = {});

}  // namespace fbp
