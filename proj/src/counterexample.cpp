#include "fbp/counterexample.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "fbp/errors.hpp"

namespace fbp {

namespace {

constexpr double kSingularGap = 1e-9;

// Time samples, counted from t = 0, on which v stays far enough above A for
// the lambda formula to be defined.
std::size_t admissible_prefix(const Field2D& v, const PhaseParams& params) {
  const Grid& g = v.grid();
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double x = v.at(i, j);
      if (x <= params.A || branch_gap_extended(params, x) < kSingularGap) return j;
    }
  }
  return g.n_t;
}

}  // namespace

std::size_t SolutionTriple::horizon_samples() const {
  const Grid& g = grid();
  const double pos = t_bar / g.dt();
  return std::min(g.n_t, static_cast<std::size_t>(std::floor(pos + 1e-9)) + 1);
}

SolutionTriple SolutionTriple::restricted() const {
  const std::size_t n = horizon_samples();
  if (n < 2) {
    throw PreconditionError(fmt::format("triple '{}' has no certified horizon (T_bar = {})", provenance, t_bar));
  }
  SolutionTriple out;
  out.u = u.truncated(n);
  out.v = v.truncated(n);
  out.lam = lam.truncated(n);
  if (lam_t) out.lam_t = lam_t->truncated(n);
  if (m) out.m = m->truncated(n);
  out.source = source;
  out.t_bar = out.u.grid().t_end;
  out.provenance = provenance;
  out.horizon_diagnostic = horizon_diagnostic;
  return out;
}

Field2D build_lambda(const SourcedSolution& sol, const PhaseParams& params) {
  const Field2D& v = sol.v();
  const Grid& g = v.grid();
  const auto f = sol.source().synthesize(g.n_x);
  Field2D lam(g, "lambda");
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const double t = g.t(j);
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double vij = v.at(i, j);
      if (vij <= params.A) {
        throw DomainError(fmt::format("build_lambda: v={} <= A at x={}, t={}", vij, g.x(i), t));
      }
      const double gap = branch_gap_extended(params, vij);
      if (gap < kSingularGap) {
        throw NearSingularError(fmt::format("build_lambda: branch gap {} at x={}, t={}", gap, g.x(i), t));
      }
      lam.at(i, j) = t * f[i] / gap;
    }
  }
  return lam;
}

Field2D lambda_time_derivative(const SourcedSolution& sol, const Field2D& lam, const PhaseParams& params) {
  const Field2D& v = sol.v();
  const Grid& g = v.grid();
  if (!(lam.grid() == g)) throw ConfigurationError("lambda_time_derivative: lambda and v on different grids");
  const auto f = sol.source().synthesize(g.n_x);
  const double slope = branch_gap_slope(params);
  Field2D out(g, "lambda_t");
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const double t = g.t(j);
    const auto v_t = sol.rate_at(t).synthesize(g.n_x);
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double vij = v.at(i, j);
      if (vij <= params.A) throw DomainError(fmt::format("lambda_time_derivative: v={} <= A", vij));
      const double gap = branch_gap_extended(params, vij);
      if (gap < kSingularGap) throw NearSingularError("lambda_time_derivative: branch gap collapsed");
      const double gap_t = slope * v_t[i];
      out.at(i, j) = f[i] / gap - gap_t * t * f[i] / (gap * gap);
    }
  }
  return out;
}

Field2D assemble_state(const Field2D& v, const Field2D& lam, const PhaseParams& params, BranchDomain domain) {
  const Grid& g = v.grid();
  if (!(lam.grid() == g)) throw ConfigurationError("assemble_state: lambda and v on different grids");
  Field2D u(g, "u");
  for (std::size_t j = 0; j < g.n_t; ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double vij = v.at(i, j);
      const double l = lam.at(i, j);
      double lo = 0.0;
      double hi = 0.0;
      if (domain == BranchDomain::strict) {
        if (l < 0.0 || l > 1.0) {
          throw DomainError(fmt::format("assemble_state: lambda={} outside [0,1] at x={}, t={}", l, g.x(i), g.t(j)));
        }
        if (!(vij > params.A && vij <= params.B)) {
          throw DomainError(fmt::format("assemble_state: v={} outside (A,B] at x={}, t={}", vij, g.x(i), g.t(j)));
        }
        lo = eval_beta(params, Branch::unstable, vij);
        hi = eval_beta(params, Branch::upper, vij);
      } else {
        lo = eval_beta_extended(params, Branch::unstable, vij);
        hi = eval_beta_extended(params, Branch::upper, vij);
      }
      u.at(i, j) = (1.0 - l) * lo + l * hi;
    }
  }
  return u;
}

HorizonCertificate certify_horizon(const SolutionTriple& triple, const PhaseParams& params, double delta, double tol,
                                   const HorizonRules& rules) {
  const Grid& g = triple.grid();
  const Field2D lam_t = triple.lam_t ? *triple.lam_t : finite_difference_dt(triple.lam);
  Field2D m;
  if (triple.m) {
    m = *triple.m;
  } else {
    // m = v_xx - (beta_0(v))_t, from the sampled fields.
    Field2D b0(g, "beta0_v");
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (std::size_t i = 0; i < g.n_x; ++i) b0.at(i, j) = eval_beta_extended(params, Branch::unstable, triple.v.at(i, j));
    }
    const Field2D vxx = spectral_dxx(triple.v);
    const Field2D b0_t = finite_difference_dt(b0);
    m = Field2D(g, "m");
    for (std::size_t j = 0; j < g.n_t; ++j) {
      for (std::size_t i = 0; i < g.n_x; ++i) m.at(i, j) = vxx.at(i, j) - b0_t.at(i, j);
    }
  }

  auto failure = [&](std::size_t i, std::size_t j) -> std::string {
    const double v = triple.v.at(i, j);
    const double where_x = g.x(i);
    const double where_t = g.t(j);
    const auto at = fmt::format(" at x={:.4f}, t={:.4f}", where_x, where_t);
    if (branch_gap_extended(params, v) < delta) return "branch gap below c1" + at;
    if (rules.require_source_margin && m.at(i, j) < delta) return "m below c2" + at;
    const double l = triple.lam.at(i, j);
    if (l < 0.0 || l > 1.0 - delta) return fmt::format("lambda={:.6f} outside [0, 1-delta]", l) + at;
    if (lam_t.at(i, j) < -tol) return fmt::format("lambda_t={:.3e} negative", lam_t.at(i, j)) + at;
    if (!(v > params.A + delta)) return fmt::format("v={:.6f} not above A+delta", v) + at;
    if (v > params.B) return fmt::format("v={:.6f} above B", v) + at;
    return {};
  };

  HorizonCertificate cert;
  cert.samples = 0;
  for (std::size_t j = 0; j < g.n_t && cert.diagnostic.empty(); ++j) {
    for (std::size_t i = 0; i < g.n_x; ++i) {
      auto why = failure(i, j);
      if (!why.empty()) {
        cert.diagnostic = std::move(why);
        break;
      }
    }
    if (cert.diagnostic.empty()) cert.samples = j + 1;
  }
  if (cert.samples <= 1) {
    cert.t_bar = 0.0;
    if (cert.diagnostic.empty()) cert.diagnostic = "no positive time qualifies";
    return cert;
  }
  cert.t_bar = g.t(cert.samples - 1);
  if (cert.diagnostic.empty()) cert.diagnostic = "all conditions hold up to the end of the grid";
  return cert;
}

SolutionTriple construct_baseline_triple(const BackwardBranchSolution& baseline, const PhaseParams& params,
                                         const FamilyOptions& options) {
  const Grid& g = baseline.u_bar.grid();
  SolutionTriple t;
  t.u = baseline.u_bar;
  t.u.set_label("u");
  t.v = baseline.v_bar;
  t.v.set_label("v");
  t.lam = Field2D(g, "lambda");
  t.lam_t = Field2D(g, "lambda_t");
  t.m = Field2D(g, "m");
  t.provenance = "baseline";
  const auto cert = certify_horizon(t, params, options.delta, options.lambda_t_tol, {.require_source_margin = false});
  t.t_bar = cert.t_bar;
  t.horizon_diagnostic = cert.diagnostic;
  return t;
}

SolutionTriple construct_sourced_triple(const BackwardBranchSolution& baseline, const CosineSeries& source,
                                        const PhaseParams& params, const Grid& grid, const FamilyOptions& options) {
  const CosineSeries v0 = unstable_image(baseline.u0, params);
  const SourcedSolution full = solve_sourced(source, v0, params.sigma_abs(), grid);
  const std::size_t n_valid = admissible_prefix(full.v(), params);
  if (n_valid < 2) {
    throw DomainError("construct_sourced_triple: v reaches A immediately; lambda is undefined");
  }
  const SourcedSolution sol = n_valid == grid.n_t ? full : full.truncated(n_valid);
  const Grid& g = sol.v().grid();

  SolutionTriple t;
  t.v = sol.v();
  t.lam = build_lambda(sol, params);
  t.lam_t = lambda_time_derivative(sol, t.lam, params);
  t.u = assemble_state(t.v, t.lam, params, BranchDomain::extended);
  t.source = source;
  t.provenance = fmt::format("sourced(f = [{}])", fmt::join(source.coeffs, ", "));

  // m = v_xx + |sigma| v_t from the mode solution; equals f up to round-off.
  t.m = Field2D(g, "m");
  for (std::size_t j = 0; j < g.n_t; ++j) {
    const double time = g.t(j);
    const auto vxx = second_derivative(sol.coefficients_at(time)).synthesize(g.n_x);
    const auto vt = sol.rate_at(time).synthesize(g.n_x);
    for (std::size_t i = 0; i < g.n_x; ++i) t.m->at(i, j) = vxx[i] + sol.sigma_abs() * vt[i];
  }

  const auto cert = certify_horizon(t, params, options.delta, options.lambda_t_tol);
  t.t_bar = cert.t_bar;
  t.horizon_diagnostic = cert.diagnostic;
  return t;
}

std::vector<SolutionTriple> construct_family(const CosineSeries& g_final, const std::vector<CosineSeries>& sources,
                                             const PhaseParams& params, const Grid& grid,
                                             const FamilyOptions& options) {
  params.validate();
  grid.validate();
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto values = sources[s].synthesize(grid.n_x);
    const double lowest = *std::min_element(values.begin(), values.end());
    if (lowest < options.min_source) {
      throw DomainError(fmt::format("source #{} dips to {} below c2 = {}", s + 1, lowest, options.min_source));
    }
  }
  const BackwardBranchSolution baseline = solve_unstable_backward(g_final, params, grid);
  std::vector<SolutionTriple> family;
  family.reserve(sources.size() + 1);
  family.push_back(construct_baseline_triple(baseline, params, options));
  for (const auto& f : sources) family.push_back(construct_sourced_triple(baseline, f, params, grid, options));
  return family;
}

}  // namespace fbp
