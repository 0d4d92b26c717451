#include "fbp/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fbp/counterexample.hpp"
#include "fbp/errors.hpp"
#include "fbp/solvers.hpp"
#include "fbp/verifier.hpp"

namespace fbp {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& raw, const std::string& where) {
  const std::string text = trim(raw);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigurationError(fmt::format("{}: '{}' is not a finite number", where, raw));
  }
  return value;
}

std::size_t parse_count(const std::string& raw, const std::string& where) {
  const std::string text = trim(raw);
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw ConfigurationError(fmt::format("{}: '{}' is not a nonnegative integer", where, raw));
  }
  return value;
}

std::vector<double> parse_list(const std::string& raw, const std::string& where) {
  std::vector<double> out;
  if (trim(raw).empty()) return out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, where));
  return out;
}

using Setter = std::function<void(const std::string&, const std::string&)>;

void apply_section(const pt::ptree& body, const std::string& section, const std::map<std::string, Setter>& keys) {
  for (const auto& [key, node] : body) {
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigurationError(fmt::format("[{}]: unknown key '{}'", section, key));
    it->second(node.data(), fmt::format("[{}] {}", section, key));
  }
}

Setter real(double& target) {
  return [&target](const std::string& raw, const std::string& where) { target = parse_real(raw, where); };
}

Setter count(std::size_t& target) {
  return [&target](const std::string& raw, const std::string& where) { target = parse_count(raw, where); };
}

Setter list(std::vector<double>& target) {
  return [&target](const std::string& raw, const std::string& where) { target = parse_list(raw, where); };
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError(fmt::format("cannot write {}", path.string()));
  out << text;
}

template <class Fn>
void write_stream(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError(fmt::format("cannot write {}", path.string()));
  fn(out);
}

std::string format_list(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += fmt::format("{}{:.17g}", i ? ", " : "", values[i]);
  return out;
}

BatteryOptions battery_options(const Margins& m) {
  BatteryOptions b;
  b.weak_tol = m.weak_tol;
  b.entropy_tol = m.entropy_tol;
  b.certificate_tol = m.certificate_tol;
  b.monotonicity_tol = m.monotonicity_tol;
  b.structural.lambda_t = m.lambda_t_tol;
  return b;
}

std::vector<double> initial_profile(const ScenarioConfig& config) {
  if (config.u0_constant) return std::vector<double>(config.grid.n_x, *config.u0_constant);
  const auto backward = solve_unstable_backward(config.final_datum.series(config.grid.length), config.phase, config.grid);
  return backward.u0.synthesize(config.grid.n_x);
}

std::string triple_name(std::size_t k) { return k == 0 ? "baseline" : fmt::format("source_{}", k); }

}  // namespace

CosineSeries FinalDatum::series(double length) const {
  int top = 0;
  for (int m : modes) top = std::max(top, m);
  CosineSeries s = CosineSeries::zeros(length, static_cast<std::size_t>(top) + 1);
  s.coeffs[0] = offset;
  for (int m : modes) s.coeffs[static_cast<std::size_t>(m)] += amplitude;
  return s;
}

ScenarioConfig ScenarioConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError(fmt::format("cannot open config {}", path.string()));
  return parse(in);
}

ScenarioConfig ScenarioConfig::parse(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  // read_ini drops sections without keys; an empty [sources] still means "no sources".
  bool sources_header = false;
  {
    std::stringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) sources_header = sources_header || trim(line) == "[sources]";
  }
  pt::ptree tree;
  try {
    std::stringstream body(text);
    pt::read_ini(body, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigurationError(fmt::format("config: {}", e.message()));
  }

  ScenarioConfig c;
  if (sources_header) c.sources.clear();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigurationError(fmt::format("config: key '{}' outside any section", section));
    }
    if (section == "phase") {
      auto& p = c.phase;
      apply_section(body, section,
                    {{"b", real(p.b)}, {"c", real(p.c)}, {"A", real(p.A)}, {"B", real(p.B)},
                     {"alpha1", real(p.alpha1)}, {"alpha2", real(p.alpha2)}, {"gamma1", real(p.gamma1)},
                     {"gamma2", real(p.gamma2)}});
    } else if (section == "grid") {
      auto& g = c.grid;
      apply_section(body, section,
                    {{"L", real(g.length)}, {"T_end", real(g.t_end)}, {"n_x", count(g.n_x)}, {"n_t", count(g.n_t)},
                     {"n_modes", count(g.n_modes)}});
    } else if (section == "final_datum") {
      auto& f = c.final_datum;
      apply_section(body, section,
                    {{"amplitude", real(f.amplitude)},
                     {"offset", real(f.offset)},
                     {"modes", [&f](const std::string& raw, const std::string& where) {
                        f.modes.clear();
                        std::stringstream ss(raw);
                        std::string item;
                        while (std::getline(ss, item, ',')) f.modes.push_back(static_cast<int>(parse_count(item, where)));
                      }}});
    } else if (section == "sources") {
      c.sources.clear();
      for (const auto& [key, node] : body) {
        auto coeffs = parse_list(node.data(), fmt::format("[sources] {}", key));
        if (coeffs.empty()) throw ConfigurationError(fmt::format("[sources] {}: empty coefficient list", key));
        c.sources.push_back(std::move(coeffs));
      }
    } else if (section == "regularize") {
      apply_section(body, section,
                    {{"eps_list", list(c.eps_list)},
                     {"u0_constant", [&c](const std::string& raw, const std::string& where) {
                        c.u0_constant = parse_real(raw, where);
                      }}});
    } else if (section == "margins") {
      auto& m = c.margins;
      apply_section(body, section,
                    {{"delta", real(m.delta)},
                     {"c2", real(m.c2)},
                     {"lambda_t_tol", real(m.lambda_t_tol)},
                     {"weak_tol", real(m.weak_tol)},
                     {"entropy_tol", real(m.entropy_tol)},
                     {"certificate_tol", real(m.certificate_tol)},
                     {"monotonicity_tol", real(m.monotonicity_tol)},
                     {"distinct_tol", real(m.distinct_tol)},
                     {"conservation_tol", real(m.conservation_tol)},
                     {"roundtrip_tol", real(m.roundtrip_tol)}});
    } else if (section == "inverse") {
      auto& i = c.inverse;
      apply_section(body, section, {{"a", list(i.a)}, {"b", list(i.b)}, {"t_end", real(i.t_end)}});
    } else if (section == "output") {
      apply_section(body, section,
                    {{"dir", [&c](const std::string& raw, const std::string&) { c.output_dir = trim(raw); }}});
    } else {
      throw ConfigurationError(fmt::format("config: unknown section [{}]", section));
    }
  }
  return c;
}

void ScenarioConfig::validate() const {
  phase.validate();
  grid.validate();
  const auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw ConfigurationError(fmt::format("[margins] {} must be positive, got {}", name, x));
  };
  positive(margins.delta, "delta");
  positive(margins.c2, "c2");
  positive(margins.lambda_t_tol, "lambda_t_tol");
  positive(margins.weak_tol, "weak_tol");
  positive(margins.entropy_tol, "entropy_tol");
  positive(margins.certificate_tol, "certificate_tol");
  positive(margins.monotonicity_tol, "monotonicity_tol");
  positive(margins.distinct_tol, "distinct_tol");
  positive(margins.conservation_tol, "conservation_tol");
  positive(margins.roundtrip_tol, "roundtrip_tol");
  if (final_datum.modes.empty()) throw ConfigurationError("[final_datum] modes is empty");
  for (int m : final_datum.modes) {
    if (m < 0 || static_cast<std::size_t>(m) >= grid.n_modes) {
      throw ConfigurationError(fmt::format("[final_datum] mode {} outside [0, n_modes)", m));
    }
  }
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].empty() || sources[s].size() > grid.n_modes) {
      throw ConfigurationError(
          fmt::format("[sources] source #{} has {} coefficients, allowed 1..{}", s + 1, sources[s].size(), grid.n_modes));
    }
  }
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw ConfigurationError(fmt::format("[regularize] eps {} must be positive", eps));
  }
  if (output_dir.empty()) throw ConfigurationError("[output] dir is empty");
}

std::vector<CosineSeries> ScenarioConfig::source_series() const {
  std::vector<CosineSeries> out;
  out.reserve(sources.size());
  for (const auto& coeffs : sources) out.push_back({grid.length, coeffs});
  return out;
}

int cmd_counterexample(const ScenarioConfig& config, std::ostream& log) {
  config.validate();
  const fs::path out = config.output_dir;
  fs::create_directories(out);

  const Margins& m = config.margins;
  const FamilyOptions family_options{m.delta, m.lambda_t_tol, m.c2};
  const auto family = construct_family(config.final_datum.series(config.grid.length), config.source_series(),
                                       config.phase, config.grid, family_options);
  const auto u0_span = family.front().u.slice(0);
  const std::vector<double> u0(u0_span.begin(), u0_span.end());
  const BatteryOptions battery = battery_options(m);

  std::vector<VerificationReport> reports;
  std::vector<std::string> manifest{"summary.txt", "distinctness.csv"};
  std::string blocks;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const SolutionTriple& triple = family[k];
    const std::string name = triple_name(k);
    log << fmt::format("{}: {} certified on [0, {:.4f}] ({})\n", name, triple.provenance, triple.t_bar,
                       triple.horizon_diagnostic);

    VerificationReport report(triple.provenance);
    if (triple.horizon_samples() >= 2) {
      report = full_battery(triple.restricted(), u0, config.phase, battery);
    }
    report.add({"certified_horizon", triple.t_bar > 0.0, triple.t_bar, 0.0, 0.0, triple.t_bar,
                triple.horizon_diagnostic});
    reports.push_back(report);

    for (const auto* field : {&triple.u, &triple.v, &triple.lam}) {
      const std::string file = fmt::format("{}_{}.csv", name, field->label());
      field->write_csv(out / file);
      manifest.push_back(file);
    }
    write_stream(out / (name + "_report.txt"), [&](std::ostream& os) { report.write_text(os); });
    write_stream(out / (name + "_report.csv"), [&](std::ostream& os) { report.write_csv(os); });

    std::string meta = fmt::format("triple: {}\nprovenance: {}\n", name, triple.provenance);
    meta += fmt::format("equation: {}\n", k == 0 ? "(beta_0(v))_t = v_xx, final datum g, solved backward by exact modes"
                                                 : "|sigma| v_t + v_xx = f(x), exact modes from v(.,0) = phi(u0)");
    if (triple.source) meta += fmt::format("source_coefficients: {}\n", format_list(triple.source->coeffs));
    const Grid& g = triple.grid();
    meta += fmt::format("grid: L={:.17g} T={:.17g} n_x={} n_t={}\n", g.length, g.t_end, g.n_x, g.n_t);
    meta += fmt::format("t_bar: {:.17g}\nhorizon: {}\n", triple.t_bar, triple.horizon_diagnostic);
    meta += fmt::format("margins: delta={} c2={} lambda_t_tol={}\n", m.delta, m.c2, m.lambda_t_tol);
    meta += fmt::format("status: {}\n", report.passed() ? "pass" : "fail");
    for (const auto& c : report.checks()) {
      meta += fmt::format("residual {}: {:.6e} ({})\n", c.name, c.residual, c.passed ? "pass" : "fail");
    }
    write_file(out / (name + ".meta"), meta);
    manifest.insert(manifest.end(), {name + ".meta", name + "_report.txt", name + "_report.csv"});
    blocks += meta + "\n";
  }

  // Pairwise distinctness at half the common horizon.
  std::string csv = "a,b,t_probe,u_distance,v_distance,lambda_distance,distinct\n";
  std::vector<std::vector<bool>> distinct(family.size(), std::vector<bool>(family.size(), false));
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = a + 1; b < family.size(); ++b) {
      const double probe = 0.5 * std::min(family[a].t_bar, family[b].t_bar);
      if (probe <= 0.0) {
        csv += fmt::format("{},{},0,nan,nan,nan,no\n", triple_name(a), triple_name(b));
        continue;
      }
      const Distances d = distinctness(family[a], family[b], probe);
      distinct[a][b] = distinct[b][a] = d.max() > m.distinct_tol;
      csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", triple_name(a), triple_name(b), probe, d.u, d.v,
                         d.lam, distinct[a][b] ? "yes" : "no");
    }
  }
  write_file(out / "distinctness.csv", csv);

  std::vector<std::size_t> passing;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (reports[k].passed()) passing.push_back(k);
  }
  bool pairwise = true;
  for (std::size_t a = 0; a < passing.size(); ++a) {
    for (std::size_t b = a + 1; b < passing.size(); ++b) pairwise = pairwise && distinct[passing[a]][passing[b]];
  }

  std::string summary = "non-uniqueness demonstration\n";
  summary += fmt::format("initial datum: u0 = backward solve from g = {} + {} * sum cos(m pi x/L), m in {{{}}}\n",
                         config.final_datum.offset, config.final_datum.amplitude,
                         fmt::join(config.final_datum.modes, ", "));
  summary += fmt::format("family size: {}\n\n", family.size());
  for (std::size_t k = 0; k < family.size(); ++k) {
    summary += fmt::format("{:<10} {:<32} T_bar={:.6f} {}\n", triple_name(k), family[k].provenance, family[k].t_bar,
                           reports[k].passed() ? "PASS" : "FAIL");
    for (const auto& c : reports[k].checks()) {
      summary += fmt::format("    {:<28} {} worst={:.4e}\n", c.name, c.passed ? "pass" : "FAIL", c.residual);
    }
  }
  summary += "\ndistinctness (spatial L2 at half the common horizon)\n" + csv + "\n";

  int status = 0;
  if (family.size() == 1) {
    summary += "no non-uniqueness demonstrated (family size 1)\n";
  } else if (passing.size() == family.size() && pairwise) {
    summary += fmt::format("SUCCESS: {} triples share u0, pass every check and are pairwise distinct\n",
                           family.size());
  } else if (passing.size() >= 2 && pairwise) {
    summary += fmt::format("FAILURE: {} of {} triples pass; every check must pass\n", passing.size(), family.size());
    status = static_cast<int>(ExitCode::verification_failure);
  } else {
    summary += fmt::format("FAILURE: {} passing triples, pairwise distinct: {}\n", passing.size(),
                           pairwise ? "yes" : "no");
    status = static_cast<int>(ExitCode::verification_failure);
  }
  write_file(out / "summary.txt", summary);

  std::string manifest_text = "files:\n";
  for (const auto& f : manifest) manifest_text += "  " + f + "\n";
  manifest_text += "\n" + blocks;
  write_file(out / "manifest.txt", manifest_text);

  log << summary;
  return status;
}

int cmd_regularize(const ScenarioConfig& config, std::ostream& log) {
  config.validate();
  if (config.eps_list.empty()) throw ConfigurationError("[regularize] eps_list is empty");
  const fs::path out = config.output_dir;
  fs::create_directories(out);

  const Grid& grid = config.grid;
  const Margins& m = config.margins;
  const auto u0 = initial_profile(config);
  const auto fluxes = builtin_fluxes();
  const auto tests = entropy_battery(grid.length, grid.t_end);

  std::string table = "eps,step,steps,mass_drift,min_entropy_residual,distance_to_previous,status\n";
  std::string text = fmt::format("{:<10} {:<12} {:<8} {:<12} {:<14} {:<14} {}\n", "eps", "step", "steps",
                                 "mass_drift", "min_entropy", "dist_prev", "status");
  bool all_pass = true;
  std::vector<double> previous;
  for (std::size_t k = 0; k < config.eps_list.size(); ++k) {
    const double eps = config.eps_list[k];
    const EpsSolution sol = solve_pseudoparabolic(u0, eps, config.phase, grid);

    const double mass0 = integrate_x(sol.u_eps.slice(0), grid.length);
    double scale = std::abs(mass0);
    {
      std::vector<double> magnitude(u0.size());
      std::transform(u0.begin(), u0.end(), magnitude.begin(), [](double x) { return std::abs(x); });
      scale = std::max(scale, integrate_x(magnitude, grid.length));
    }
    if (scale == 0.0) scale = 1.0;
    double drift = 0.0;
    for (std::size_t j = 0; j < grid.n_t; ++j) {
      drift = std::max(drift, std::abs(integrate_x(sol.u_eps.slice(j), grid.length) - mass0) / scale);
    }

    double min_entropy = std::numeric_limits<double>::infinity();
    for (const auto& g : fluxes) {
      for (double r : viscous_entropy_residuals(sol, config.phase, g, tests)) min_entropy = std::min(min_entropy, r);
    }

    double distance = std::numeric_limits<double>::quiet_NaN();
    const auto values = sol.u_eps.values();
    if (!previous.empty()) {
      distance = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) distance = std::max(distance, std::abs(values[i] - previous[i]));
    }
    previous.assign(values.begin(), values.end());

    const bool pass = drift <= m.conservation_tol && min_entropy >= -m.entropy_tol;
    all_pass = all_pass && pass;
    table += fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{}\n", eps, sol.step, sol.steps, drift,
                         min_entropy, distance, pass ? "pass" : "fail");
    text += fmt::format("{:<10.3g} {:<12.4e} {:<8} {:<12.3e} {:<14.4e} {:<14.4e} {}\n", eps, sol.step, sol.steps, drift,
                        min_entropy, distance, pass ? "PASS" : "FAIL");

    const std::string stem = fmt::format("eps_{}", k);
    sol.u_eps.write_csv(out / (stem + "_u.csv"));
    sol.v_eps.write_csv(out / (stem + "_v.csv"));
    write_file(out / (stem + ".meta"),
               fmt::format("equation: u_t = v_xx, (I - eps d_xx) v = phi(u), RK4 in the cosine basis\n"
                           "eps: {:.17g}\nstep: {:.17g}\nsteps: {}\nnoise_filter: {}\n"
                           "grid: L={:.17g} T={:.17g} n_x={} n_t={}\n",
                           eps, sol.step, sol.steps, PseudoparabolicOptions{}.noise_filter, grid.length, grid.t_end,
                           grid.n_x, grid.n_t));
  }
  write_file(out / "regularize_summary.csv", table);
  text += all_pass ? "all eps levels pass\n" : "FAILURE: some eps level failed\n";
  write_file(out / "regularize_summary.txt", text);
  log << text;
  return all_pass ? 0 : static_cast<int>(ExitCode::verification_failure);
}

int cmd_inverse(const ScenarioConfig& config, std::ostream& log) {
  config.validate();
  const InverseSpec& spec = config.inverse;
  if (spec.a.empty() || spec.a.size() != spec.b.size()) {
    throw ConfigurationError(fmt::format("[inverse] a and b need equal nonzero length, got {} and {}", spec.a.size(),
                                         spec.b.size()));
  }
  if (!(spec.t_end > 0.0)) throw ConfigurationError("[inverse] t_end must be positive");
  const fs::path out = config.output_dir;
  fs::create_directories(out);

  const double length = config.grid.length;
  const CosineSeries a{length, spec.a};
  const CosineSeries b{length, spec.b};
  const double sigma_abs = config.phase.sigma_abs();
  const CosineSeries f = inverse_source_from_endpoints(a, b, spec.t_end, sigma_abs);

  Grid grid = config.grid;
  grid.t_end = spec.t_end;
  const auto f_values = f.synthesize(grid.n_x);
  const double f_min = *std::min_element(f_values.begin(), f_values.end());

  const SourcedSolution sol = solve_sourced(f, a, sigma_abs, grid);
  const auto target = b.synthesize(grid.n_x);
  const auto reached = sol.v().slice(grid.n_t - 1);
  double err = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    err = std::max(err, std::abs(reached[i] - target[i]));
    scale = std::max(scale, std::abs(target[i]));
  }
  const double relative = err / scale;
  const bool pass = relative <= config.margins.roundtrip_tol;

  std::string coeffs = "k\tf_k\n";
  for (std::size_t k = 0; k < f.size(); ++k) coeffs += fmt::format("{}\t{:.17g}\n", k, f.coeffs[k]);
  write_file(out / "inverse_f_coefficients.csv", coeffs);
  std::string values = "x\tf\n";
  for (std::size_t i = 0; i < grid.n_x; ++i) values += fmt::format("{:.17g}\t{:.17g}\n", grid.x(i), f_values[i]);
  write_file(out / "inverse_f_values.csv", values);

  std::string text = fmt::format("inverse source, T = {}, |sigma| = {}, {} modes\n", spec.t_end, sigma_abs, f.size());
  text += fmt::format("f coefficients: {}\n", format_list(f.coeffs));
  text += fmt::format("min f = {:.6e}{}\n", f_min,
                      f_min < config.margins.c2 ? fmt::format(" (below c2 = {}; not an admissible source)", config.margins.c2)
                                                : "");
  text += fmt::format("round trip max error = {:.3e} (relative {:.3e}, tol {:.1e}) {}\n", err, relative,
                      config.margins.roundtrip_tol, pass ? "PASS" : "FAIL");
  write_file(out / "inverse_summary.txt", text);
  log << text;
  return pass ? 0 : static_cast<int>(ExitCode::verification_failure);
}

int cmd_seed_check(const ScenarioConfig& config, std::ostream& log) {
  config.validate();
  const fs::path out = config.output_dir;
  fs::create_directories(out);

  std::vector<CosineSeries> sources = config.source_series();
  if (sources.empty()) sources.push_back({config.grid.length, {config.phase.sigma_abs()}});
  sources.resize(1);
  const Margins& m = config.margins;
  const auto family = construct_family(config.final_datum.series(config.grid.length), sources, config.phase,
                                       config.grid, {m.delta, m.lambda_t_tol, m.c2});
  const SolutionTriple reference = family.at(1).restricted();
  const auto u0_span = family.front().u.slice(0);
  const std::vector<double> u0(u0_span.begin(), u0_span.end());
  const BatteryOptions battery = battery_options(m);

  std::string text = "negative controls\n";
  const VerificationReport clean = full_battery(reference, u0, config.phase, battery);
  text += fmt::format("reference {}: {}\n", reference.provenance, clean.passed() ? "passes every check" : "FAILS");
  bool ok = clean.passed();
  for (const auto& violator : manufactured_violators(reference, config.phase)) {
    const VerificationReport report = full_battery(violator.triple, u0, config.phase, battery);
    const Check& target = report.find(violator.target_check);
    ok = ok && !target.passed;
    text += fmt::format("  {:<24} check {:<22} {} (residual {:.3e}, tol {:.1e})\n", violator.name,
                        violator.target_check, target.passed ? "NOT REJECTED" : "rejected", target.residual,
                        target.tolerance);
  }
  text += ok ? "every check rejects its violator\n" : "FAILURE: a check accepted its violator\n";
  write_file(out / "seed_check.txt", text);
  log << text;
  return ok ? 0 : static_cast<int>(ExitCode::verification_failure);
}

}  // namespace fbp
