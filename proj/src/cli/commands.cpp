#include "psd/cli/commands.hpp"

#include "psd/axioms.hpp"
#include "psd/rivals.hpp"
#include "psd/serialize.hpp"
#include "psd/tau.hpp"

#include <sstream>

namespace psd::cli {

using psd::to_string;

namespace {

using nlohmann::json;

int exit_code_for(ErrorKind kind, bool stats_command) {
  switch (kind) {
    case ErrorKind::parse_error:
      return exit_code::parse_error;
    case ErrorKind::empty_sample:
    case ErrorKind::invalid_level:
    case ErrorKind::invalid_resample_count:
      return stats_command ? exit_code::stats_precondition : exit_code::contract_violation;
    default:
      return exit_code::contract_violation;
  }
}

template <class Fn>
CommandOutput guarded(bool stats_command, Fn&& fn) {
  try {
    return fn();
  } catch (const CommandError&) {
    throw;
  } catch (const Error& e) {
    throw CommandError(exit_code_for(e.kind(), stats_command), e.what());
  }
}

std::string order_name(OrderKind kind) {
  switch (kind) {
    case OrderKind::total: return "total";
    case OrderKind::product: return "product";
    case OrderKind::relation_file: return "relation";
    case OrderKind::automatic: return "automatic";
  }
  return "automatic";
}

template <Scalar T>
struct Loaded {
  DiscreteMeasure<T> mu;
  DiscreteMeasure<T> nu;
  std::optional<SampleSet<T>> x_samples;
  std::optional<SampleSet<T>> y_samples;
  std::optional<OrderRelation<T>> relation;  // only for relation files
  OrderKind order = OrderKind::total;
  json provenance;
};

template <Scalar T>
Loaded<T> load(const ComparisonSpec& spec) {
  Loaded<T> out;
  json inputs = json::object();
  std::vector<std::string> labels;
  if (spec.order_kind == OrderKind::relation_file) {
    if (spec.relation_path.empty()) throw CommandError(exit_code::contract_violation, "--order relation needs --relation FILE");
    const std::string text = read_file(spec.relation_path);
    out.relation = parse_relation<T>(text, spec.relation_path);
    labels = out.relation->labels();
    inputs["relation"] = {{"path", spec.relation_path}, {"sha256", sha256_hex(text)}};
  }
  auto load_one = [&](const std::string& path, std::optional<SampleSet<T>>& samples, const char* key) {
    const std::string text = read_file(path);
    const InputKind kind = spec.input_kind.value_or(infer_input_kind(path));
    inputs[key] = {{"path", path}, {"kind", to_string(kind)}, {"sha256", sha256_hex(text)}};
    if (kind == InputKind::atoms_json) {
      auto m = parse_atoms_json<T>(text, path, labels);
      require_probability(m, path.c_str());
      return m;
    }
    samples = parse_samples_csv<T>(text, path);
    return empirical(*samples);
  };
  out.mu = load_one(spec.input_x, out.x_samples, "x");
  out.nu = load_one(spec.input_y, out.y_samples, "y");
  if (out.mu.dimension() != out.nu.dimension()) {
    throw CommandError(exit_code::contract_violation, "inputs differ in dimension");
  }
  out.order = spec.order_kind;
  if (out.order == OrderKind::automatic) out.order = out.mu.dimension() == 1 ? OrderKind::total : OrderKind::product;
  if (out.order == OrderKind::total && out.mu.dimension() != 1) {
    throw CommandError(exit_code::contract_violation, "the total order needs one-dimensional inputs");
  }
  out.provenance = {{"version", kVersion}, {"arithmetic", ScalarTraits<T>::mode().name()}, {"inputs", inputs}};
  return out;
}

template <Scalar T>
OrderRelation<T> relation_for(const Loaded<T>& in) {
  if (in.relation) return *in.relation;
  return product_order(common_ground(in.mu, in.nu));  // total order when d = 1
}

template <Scalar T>
json labels_of(const OrderRelation<T>& rel, const std::vector<Point<T>>& points) {
  json out = json::array();
  for (const auto& p : points) out.push_back(rel.labels()[rel.require_index(p)]);
  return out;
}

template <Scalar T>
json certificates_json(const TauResult<T>& r, const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                       const OrderRelation<T>& rel) {
  json coupling = json::array();
  for (const auto& e : r.coupling.entries) {
    coupling.push_back({{"x", point_to_json(mu.points()[e.mu_index])},
                        {"y", point_to_json(nu.points()[e.nu_index])},
                        {"weight", scalar_to_json(e.weight)},
                        {"ordered", e.ordered}});
  }
  json dual = json::array();
  for (const auto& p : r.dual_points) dual.push_back(point_to_json(p));
  const auto [mu_part, nu_part] = extract_ordered_components(r, mu, nu, rel);
  const auto check = verify_certificate(r, mu, nu, rel);
  json out{{"coupling", coupling},
           {"dual_upper_set", dual},
           {"dual_gap", scalar_to_json(r.dual_gap_value)},
           {"ordered_component_mass", scalar_to_json(r.ordered_mass)},
           {"ordered_components", {{"mu", measure_to_json(mu_part)}, {"nu", measure_to_json(nu_part)}}},
           {"dual_from_oracle", r.dual_from_oracle},
           {"verified", check.ok()}};
  if (r.dual_threshold) out["dual_threshold"] = scalar_to_json(*r.dual_threshold);
  if (!rel.labels().empty()) out["dual_upper_set_labels"] = labels_of(rel, r.dual_points);
  return out;
}

template <Scalar T>
json cdf_table(const StepCDF<T>& F, const StepCDF<T>& G) {
  json rows = json::array();
  for (const auto& x : merged_jumps(F, G)) {
    rows.push_back({{"x", scalar_to_json(x)},
                    {"F", scalar_to_json(F(x))},
                    {"G", scalar_to_json(G(x))},
                    {"G_minus_F", scalar_to_json(T(G(x) - F(x)))}});
  }
  return rows;
}

template <Scalar T>
std::string show(const T& v) {
  if constexpr (ScalarTraits<T>::exact) {
    std::ostringstream s;
    s << to_string(v) << " (" << to_double(v) << ")";
    return s.str();
  } else {
    return to_string(v);
  }
}

struct TauComputation {
  json report;
  std::string summary;
};

template <Scalar T>
TauComputation compute_tau(const Loaded<T>& in, const ComparisonSpec& spec) {
  const auto rel = relation_for(in);
  TauResult<T> result = in.order == OrderKind::total ? tau_1d(in.mu, in.nu) : tau_flow(in.mu, in.nu, rel);
  json report{{"order", order_name(in.order)},
              {"method", in.order == OrderKind::total ? "closed-form" : "max-flow"},
              {"tau", scalar_to_json(result.tau_value)},
              {"certificates", certificates_json(result, in.mu, in.nu, rel)},
              {"provenance", in.provenance}};
  if (spec.emit_cdf_table && in.order == OrderKind::total) {
    report["cdf_table"] = cdf_table(step_cdf_from(in.mu), step_cdf_from(in.nu));
  }
  std::string summary = "tau = " + show(result.tau_value) + "\n";
  summary += "dual gap = " + show(result.dual_gap_value) + ", dual set size = " +
             std::to_string(result.dual_points.size()) + "\n";
  return {std::move(report), std::move(summary)};
}

template <Scalar T>
CommandOutput run_tau(const ComparisonSpec& spec) {
  const auto in = load<T>(spec);
  auto [report, summary] = compute_tau(in, spec);
  report["command"] = "tau";
  CommandOutput out;
  out.report = std::move(report);
  out.summary = std::move(summary);
  if (!out.report["certificates"]["verified"].get<bool>()) out.exit_code = exit_code::failed_check;
  return out;
}

template <Scalar T>
CommandOutput run_measures(const ComparisonSpec& spec) {
  const auto in = load<T>(spec);
  if (in.order != OrderKind::total) {
    throw CommandError(exit_code::contract_violation, "q, r and alpha need the total order on the line");
  }
  auto [report, summary] = compute_tau(in, spec);
  const auto F = step_cdf_from(in.mu);
  const auto G = step_cdf_from(in.nu);
  if (spec.grid_n == 0) throw CommandError(exit_code::contract_violation, "--grid-n must be at least 1");
  const auto grid = default_grid(F, G, spec.grid_n);
  const T q = q_measure(F, G, grid);

  std::optional<DomainInterval<T>> domain;
  if (spec.domain) {
    domain.emplace(parse_scalar<T>(spec.domain->first), parse_scalar<T>(spec.domain->second));
  } else {
    const T lo = std::min(F.jumps().front(), G.jumps().front());
    const T hi = std::max(F.jumps().back(), G.jumps().back());
    if (!(lo < hi)) {
      throw CommandError(exit_code::missing_domain, "r needs --domain a b: both inputs sit on a single point");
    }
    domain.emplace(lo, hi);
  }
  const T r = r_measure(F, G, *domain);
  const auto integrals = alpha_integrals(F, G);
  const T alpha = alpha_measure(F, G);

  json grid_json = json::array();
  for (const auto& x : grid.test_points) grid_json.push_back(scalar_to_json(x));
  report["command"] = "measures";
  report["q"] = scalar_to_json(q);
  report["q_grid"] = grid_json;
  report["q_note"] = "q depends on the grid: pooled quantiles i/(n+1), n = " + std::to_string(spec.grid_n);
  report["r"] = scalar_to_json(r);
  report["r_domain"] = {scalar_to_json(domain->a), scalar_to_json(domain->b)};
  report["r_domain_inferred"] = !spec.domain.has_value();
  report["alpha"] = scalar_to_json(alpha);
  report["alpha_integrals"] = {{"positive_part", scalar_to_json(integrals.positive)},
                               {"absolute", scalar_to_json(integrals.absolute)}};
  summary += "q = " + show(q) + "\nr = " + show(r) + "\nalpha = " + show(alpha) + "\n";

  CommandOutput out;
  out.report = std::move(report);
  out.summary = std::move(summary);
  if (!out.report["certificates"]["verified"].get<bool>()) out.exit_code = exit_code::failed_check;
  return out;
}

template <Scalar T>
CommandOutput run_test(const ComparisonSpec& spec) {
  const auto in = load<T>(spec);
  if (!in.x_samples || !in.y_samples) {
    throw CommandError(exit_code::stats_precondition, "test needs samples-csv inputs");
  }
  if (in.mu.dimension() != 1) {
    throw CommandError(exit_code::stats_precondition, "inference is only available for one-dimensional samples");
  }
  InferenceOptions opt;
  opt.level = spec.stats.level;
  opt.resamples = spec.stats.resamples;
  opt.seed = spec.stats.seed;
  opt.run_test = spec.stats.run_test;
  opt.ci_method = spec.stats.ci_method;
  opt.permutations = spec.stats.permutations;
  const auto inf = infer(*in.x_samples, *in.y_samples, opt);

  json inference{{"tau_hat", scalar_to_json(inf.tau_hat)},
                 {"ks_minus", scalar_to_json(inf.ks_minus)},
                 {"ci_low", scalar_to_json(*inf.ci_low)},
                 {"ci_high", scalar_to_json(*inf.ci_high)},
                 {"ci_method", to_string(*inf.ci_method)},
                 {"level", spec.stats.level},
                 {"n_x", inf.n_x},
                 {"n_y", inf.n_y},
                 {"seed", inf.seed},
                 {"note", "tau_hat is one minus the one-sided two-sample Smirnov statistic; the interval and test "
                          "are one defensible construction (percentile bootstrap or DKW band, asymptotic Smirnov "
                          "or permutation p-value)"}};
  if (inf.ci_method == CiMethod::bootstrap) inference["resamples"] = spec.stats.resamples;
  if (inf.p_value) {
    inference["p_value"] = *inf.p_value;
    inference["p_value_method"] = inf.p_value_method;
    inference["small_sample_warning"] = inf.small_sample_warning;
  }
  json report{{"command", "test"},
              {"order", "total"},
              {"tau", scalar_to_json(inf.tau_hat)},
              {"inference", inference},
              {"provenance", in.provenance}};
  if (spec.emit_cdf_table) report["cdf_table"] = cdf_table(step_cdf_from(in.mu), step_cdf_from(in.nu));

  CommandOutput out;
  out.report = std::move(report);
  out.summary = "tau_hat = " + show(inf.tau_hat) + "\n" + to_string(*inf.ci_method) + " interval = [" +
                show(*inf.ci_low) + ", " + show(*inf.ci_high) + "]\n";
  if (inf.p_value) out.summary += "p-value = " + to_string(*inf.p_value) + "\n";
  if (inf.small_sample_warning) out.summary += "warning: fewer than 20 observations, asymptotic p-value is rough\n";
  return out;
}

template <Scalar T>
CommandOutput run_axioms(std::uint64_t seed, std::size_t suite_size) {
  const auto suite = run_axiom_suite<T>(seed, suite_size);
  json verdicts = json::array();
  std::string summary;
  for (const auto& v : suite.verdicts) {
    verdicts.push_back(v.to_json());
    summary += v.measure + "  " + to_string(v.axiom_id) + "  " + (v.holds ? "holds" : "FAILS") + "  (" + v.note + ")\n";
  }
  CommandOutput out;
  out.report = {{"command", "axioms"},
                {"seed", seed},
                {"suite_size", suite_size},
                {"arithmetic", ScalarTraits<T>::mode().name()},
                {"version", kVersion},
                {"verdicts", verdicts},
                {"tau_passes_all", suite.tau_passes_all},
                {"rivals_fail_as_expected", suite.rivals_fail_as_expected}};
  out.summary = std::move(summary);
  out.exit_code = suite.ok() ? exit_code::ok : exit_code::failed_check;
  return out;
}

template <Scalar T>
Point<T> point_from_json(const json& j) {
  Point<T> p;
  for (const auto& c : j) p.push_back(scalar_from_json<T>(c));
  return p;
}

template <Scalar T>
std::size_t atom_index(const DiscreteMeasure<T>& m, const Point<T>& p) {
  auto it = std::lower_bound(m.points().begin(), m.points().end(), p);
  if (it == m.points().end() || *it != p) {
    throw CommandError(exit_code::failed_check, "certificate names a point outside the inputs: " + point_to_string(p));
  }
  return static_cast<std::size_t>(it - m.points().begin());
}

template <Scalar T>
CommandOutput run_verify(const json& report, ComparisonSpec spec) {
  const std::string order = report.value("order", "total");
  spec.order_kind = order == "product" ? OrderKind::product
                    : order == "relation" ? OrderKind::relation_file
                                          : OrderKind::total;
  const auto in = load<T>(spec);
  const auto rel = relation_for(in);
  const json& cert = report.at("certificates");

  TauResult<T> r;
  r.tau_value = scalar_from_json<T>(report.at("tau"));
  r.dual_gap_value = scalar_from_json<T>(cert.at("dual_gap"));
  r.ordered_mass = scalar_from_json<T>(cert.at("ordered_component_mass"));
  for (const auto& e : cert.at("coupling")) {
    r.coupling.entries.push_back({atom_index(in.mu, point_from_json<T>(e.at("x"))),
                                  atom_index(in.nu, point_from_json<T>(e.at("y"))),
                                  scalar_from_json<T>(e.at("weight")), e.at("ordered").get<bool>()});
  }
  r.dual_set.members.assign(rel.size(), false);
  for (const auto& p : cert.at("dual_upper_set")) {
    auto idx = rel.index_of(point_from_json<T>(p));
    if (!idx) throw CommandError(exit_code::failed_check, "dual set names a point outside the relation");
    r.dual_set.members[*idx] = true;
  }
  const auto check = verify_certificate(r, in.mu, in.nu, rel);
  const T fresh = in.order == OrderKind::total ? tau_1d(in.mu, in.nu).tau_value : tau_flow(in.mu, in.nu, rel).tau_value;
  const bool matches = approx_equal(fresh, r.tau_value);

  CommandOutput out;
  out.report = {{"command", "verify"},
                {"checks",
                 {{"nonnegative", check.nonnegative},
                  {"marginals", check.marginals},
                  {"ordered_flags", check.ordered_flags},
                  {"tau_equals_ordered_mass", check.tau_equals_ordered_mass},
                  {"upper_set_closed", check.upper_set_closed},
                  {"strong_duality", check.strong_duality},
                  {"in_range", check.in_range},
                  {"tau_matches_recomputation", matches}}},
                {"verified", check.ok() && matches}};
  out.summary = std::string("certificates ") + (check.ok() && matches ? "verified" : "FAILED") + "\n";
  out.exit_code = check.ok() && matches ? exit_code::ok : exit_code::failed_check;
  return out;
}

}  // namespace

CommandOutput cmd_tau(const ComparisonSpec& spec) {
  return guarded(false, [&] { return spec.arithmetic.is_exact() ? run_tau<Rational>(spec) : run_tau<double>(spec); });
}

CommandOutput cmd_measures(const ComparisonSpec& spec) {
  return guarded(false, [&] {
    return spec.arithmetic.is_exact() ? run_measures<Rational>(spec) : run_measures<double>(spec);
  });
}

CommandOutput cmd_test(const ComparisonSpec& spec) {
  return guarded(true, [&] { return spec.arithmetic.is_exact() ? run_test<Rational>(spec) : run_test<double>(spec); });
}

CommandOutput cmd_axioms(std::uint64_t seed, std::size_t suite_size, ArithmeticMode arithmetic) {
  return guarded(false, [&] {
    return arithmetic.is_exact() ? run_axioms<Rational>(seed, suite_size) : run_axioms<double>(seed, suite_size);
  });
}

CommandOutput cmd_verify(const nlohmann::json& report, const ComparisonSpec& spec) {
  return guarded(false, [&] {
    try {
      const bool exact = report.at("provenance").at("arithmetic").get<std::string>() == "exact-rational";
      return exact ? run_verify<Rational>(report, spec) : run_verify<double>(report, spec);
    } catch (const nlohmann::json::exception& e) {
      throw CommandError(exit_code::parse_error, std::string("malformed report: ") + e.what());
    }
  });
}

}  // namespace psd::cli
