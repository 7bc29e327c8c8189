#include "psd/stats.hpp"
#include "psd/random_instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace psd {

template <Scalar T>
SampleSet<T>::SampleSet(std::vector<Point<T>> obs, std::vector<T> w)
    : observations(std::move(obs)), weights(std::move(w)) {
  if (!weights.empty() && weights.size() != observations.size()) {
    throw Error(ErrorKind::length_mismatch, "sample weights do not match observations");
  }
  for (const auto& wt : weights)
    if (!(wt > 0)) throw Error(ErrorKind::negative_weight, "sample weights must be positive");
  for (const auto& p : observations)
    if (p.empty() || p.size() != observations.front().size()) {
      throw Error(ErrorKind::dimension_mismatch, "observations of different dimension");
    }
}

template <Scalar T>
SampleSet<T> SampleSet<T>::from_values(const std::vector<T>& values, std::vector<T> w) {
  std::vector<Point<T>> obs;
  obs.reserve(values.size());
  for (const auto& v : values) obs.push_back(Point<T>{v});
  return SampleSet(std::move(obs), std::move(w));
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over (seed, index).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

template <Scalar T>
void require_1d(const SampleSet<T>& s, const char* what) {
  if (s.size() == 0) throw Error(ErrorKind::empty_sample, std::string(what) + " is empty");
  if (s.dimension() != 1) {
    throw Error(ErrorKind::dimension_error, std::string(what) + " must be one-dimensional for this operation");
  }
}

template <Scalar T>
DiscreteMeasure<T> empirical_measure(const SampleSet<T>& s) {
  std::vector<T> w = s.weights;
  if (w.empty()) w.assign(s.size(), T(1));
  return normalized(make_discrete(s.observations, std::move(w)));
}

// Both samples mapped onto one sorted list of distinct values.
template <Scalar T>
struct PooledIndex {
  std::size_t distinct = 0;
  std::vector<std::size_t> x_slot;
  std::vector<std::size_t> y_slot;
};

template <Scalar T>
PooledIndex<T> pool(const SampleSet<T>& x, const SampleSet<T>& y) {
  std::vector<T> values;
  values.reserve(x.size() + y.size());
  for (const auto& p : x.observations) values.push_back(p[0]);
  for (const auto& p : y.observations) values.push_back(p[0]);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  PooledIndex<T> out;
  out.distinct = values.size();
  auto slot = [&](const T& v) { return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin()); };
  for (const auto& p : x.observations) out.x_slot.push_back(slot(p[0]));
  for (const auto& p : y.observations) out.y_slot.push_back(slot(p[0]));
  return out;
}

// Resampling draws by index, so fix an order first: results then do not
// depend on how the observations were listed.
template <Scalar T>
SampleSet<T> sorted_copy(const SampleSet<T>& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s.observations[a] != s.observations[b]) return s.observations[a] < s.observations[b];
    return s.weighted() && s.weights[a] < s.weights[b];
  });
  SampleSet<T> out;
  for (auto k : order) {
    out.observations.push_back(s.observations[k]);
    if (s.weighted()) out.weights.push_back(s.weights[k]);
  }
  return out;
}

// sup_x (G(x) - F(x)) from per-slot masses; never below 0 (x below all data).
template <Scalar T>
T ks_from_counts(const std::vector<std::int64_t>& cx, const std::vector<std::int64_t>& cy, std::int64_t total_x,
                 std::int64_t total_y) {
  std::int64_t run_x = 0, run_y = 0, best = 0;
  for (std::size_t k = 0; k < cx.size(); ++k) {
    run_x += cx[k];
    run_y += cy[k];
    best = std::max(best, run_y * total_x - run_x * total_y);
  }
  return T(best) / (T(total_x) * T(total_y));
}

template <Scalar T>
T ks_from_masses(const std::vector<T>& cx, const std::vector<T>& cy, const T& total_x, const T& total_y) {
  T run_x(0), run_y(0), best(0);
  for (std::size_t k = 0; k < cx.size(); ++k) {
    run_x += cx[k];
    run_y += cy[k];
    T d = run_y / total_y - run_x / total_x;
    if (d > best) best = d;
  }
  return best;
}

// Per-thread scratch for the count kernel.
template <Scalar T>
struct Scratch {
  std::vector<std::int64_t> cx, cy;
  std::vector<T> wx, wy;
  explicit Scratch(std::size_t n) : cx(n), cy(n), wx(n), wy(n) {}
};

// One bootstrap replicate through the pooled-slot count kernel.
template <Scalar T>
T bootstrap_kernel(const SampleSet<T>& x, const SampleSet<T>& y, const PooledIndex<T>& idx, std::uint64_t seed,
                   std::size_t b, Scratch<T>& s) {
  Rng rng(replicate_seed(seed, b));
  std::uniform_int_distribution<std::size_t> pick_x(0, x.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_y(0, y.size() - 1);
  const bool weighted = x.weighted() || y.weighted();
  if (!weighted) {
    std::fill(s.cx.begin(), s.cx.end(), 0);
    std::fill(s.cy.begin(), s.cy.end(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) ++s.cx[idx.x_slot[pick_x(rng)]];
    for (std::size_t i = 0; i < y.size(); ++i) ++s.cy[idx.y_slot[pick_y(rng)]];
    return T(1) - ks_from_counts<T>(s.cx, s.cy, static_cast<std::int64_t>(x.size()), static_cast<std::int64_t>(y.size()));
  }
  std::fill(s.wx.begin(), s.wx.end(), T(0));
  std::fill(s.wy.begin(), s.wy.end(), T(0));
  T tx(0), ty(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t k = pick_x(rng);
    const T w = x.weighted() ? x.weights[k] : T(1);
    s.wx[idx.x_slot[k]] += w;
    tx += w;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t k = pick_y(rng);
    const T w = y.weighted() ? y.weights[k] : T(1);
    s.wy[idx.y_slot[k]] += w;
    ty += w;
  }
  return T(1) - ks_from_masses(s.wx, s.wy, tx, ty);
}

template <Scalar T>
std::pair<T, T> percentile_interval(std::vector<T> reps, double level, const T& estimate) {
  std::sort(reps.begin(), reps.end());
  const double b = static_cast<double>(reps.size());
  auto rank = [&](double p) {
    // Nearest-rank: smallest index k with (k + 1) / B >= p.
    double k = std::ceil(p * b) - 1.0;
    return static_cast<std::size_t>(std::clamp(k, 0.0, b - 1.0));
  };
  T lo = reps[rank((1.0 - level) / 2.0)];
  T hi = reps[rank((1.0 + level) / 2.0)];
  if (estimate < lo) lo = estimate;
  if (estimate > hi) hi = estimate;
  return {lo, hi};
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::invalid_level, "level must lie in (0, 1)");
}

void check_resamples(std::size_t resamples) {
  if (resamples < kMinBootstrapResamples) {
    throw Error(ErrorKind::invalid_resample_count, "need at least " + std::to_string(kMinBootstrapResamples) +
                                                       " bootstrap resamples, got " + std::to_string(resamples));
  }
}

// Pooled samples split by a permutation of their indices: the first m go to x.
template <Scalar T>
T permuted_ks(const SampleSet<T>& x, const SampleSet<T>& y, const PooledIndex<T>& idx, std::uint64_t seed,
              std::size_t p, std::vector<std::size_t>& perm, Scratch<T>& s) {
  const std::size_t m = x.size();
  const std::size_t total = m + y.size();
  perm.resize(total);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(replicate_seed(seed, p));
  std::shuffle(perm.begin(), perm.end(), rng);
  const bool weighted = x.weighted() || y.weighted();
  auto slot = [&](std::size_t k) { return k < m ? idx.x_slot[k] : idx.y_slot[k - m]; };
  auto weight = [&](std::size_t k) {
    if (k < m) return x.weighted() ? x.weights[k] : T(1);
    return y.weighted() ? y.weights[k - m] : T(1);
  };
  if (!weighted) {
    std::fill(s.cx.begin(), s.cx.end(), 0);
    std::fill(s.cy.begin(), s.cy.end(), 0);
    for (std::size_t i = 0; i < total; ++i) ++(i < m ? s.cx : s.cy)[slot(perm[i])];
    return ks_from_counts<T>(s.cx, s.cy, static_cast<std::int64_t>(m), static_cast<std::int64_t>(y.size()));
  }
  std::fill(s.wx.begin(), s.wx.end(), T(0));
  std::fill(s.wy.begin(), s.wy.end(), T(0));
  T tx(0), ty(0);
  for (std::size_t i = 0; i < total; ++i) {
    const T w = weight(perm[i]);
    if (i < m) {
      s.wx[slot(perm[i])] += w;
      tx += w;
    } else {
      s.wy[slot(perm[i])] += w;
      ty += w;
    }
  }
  return ks_from_masses(s.wx, s.wy, tx, ty);
}

template <Scalar T>
DominanceTest permutation_result(const std::vector<T>& stats, const T& observed) {
  std::size_t at_least = 0;
  for (const auto& s : stats)
    if (s >= observed) ++at_least;
  DominanceTest out;
  out.statistic = to_double(observed);
  out.p_value = static_cast<double>(at_least + 1) / static_cast<double>(stats.size() + 1);
  out.method = "permutation (" + std::to_string(stats.size()) + " permutations)";
  return out;
}

}  // namespace

template <Scalar T>
StepCDF<T> ecdf(const SampleSet<T>& samples) {
  require_1d(samples, "sample");
  return step_cdf_from(empirical_measure(samples));
}

template <Scalar T>
InferenceReport<T> tau_hat(const SampleSet<T>& x, const SampleSet<T>& y) {
  require_1d(x, "x sample");
  require_1d(y, "y sample");
  const auto idx = pool(x, y);
  T ks;
  if (!x.weighted() && !y.weighted()) {
    std::vector<std::int64_t> cx(idx.distinct, 0), cy(idx.distinct, 0);
    for (auto s : idx.x_slot) ++cx[s];
    for (auto s : idx.y_slot) ++cy[s];
    ks = ks_from_counts<T>(cx, cy, static_cast<std::int64_t>(x.size()), static_cast<std::int64_t>(y.size()));
  } else {
    std::vector<T> wx(idx.distinct, T(0)), wy(idx.distinct, T(0));
    T tx(0), ty(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const T w = x.weighted() ? x.weights[i] : T(1);
      wx[idx.x_slot[i]] += w;
      tx += w;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      const T w = y.weighted() ? y.weights[i] : T(1);
      wy[idx.y_slot[i]] += w;
      ty += w;
    }
    ks = ks_from_masses(wx, wy, tx, ty);
  }
  InferenceReport<T> r;
  r.ks_minus = ks;
  r.tau_hat = T(1) - ks;
  r.n_x = x.size();
  r.n_y = y.size();
  return r;
}

template <Scalar T>
TauResult<T> tau_hat_nd(const SampleSet<T>& x, const SampleSet<T>& y) {
  if (x.size() == 0 || y.size() == 0) throw Error(ErrorKind::empty_sample, "empty sample");
  const auto mu = empirical_measure(x);
  const auto nu = empirical_measure(y);
  if (mu.dimension() != nu.dimension()) throw Error(ErrorKind::dimension_mismatch, "samples differ in dimension");
  return tau_flow(mu, nu, product_order(common_ground(mu, nu)));
}

template <Scalar T>
std::vector<T> bootstrap_replicates(const SampleSet<T>& x_in, const SampleSet<T>& y_in, std::size_t resamples,
                                    std::uint64_t seed) {
  require_1d(x_in, "x sample");
  require_1d(y_in, "y sample");
  const auto x = sorted_copy(x_in);
  const auto y = sorted_copy(y_in);
  const auto idx = pool(x, y);
  std::vector<T> out(resamples);
  const long count = static_cast<long>(resamples);
#pragma omp parallel
  {
    Scratch<T> scratch(idx.distinct);
#pragma omp for schedule(static)
    for (long b = 0; b < count; ++b) {
      out[static_cast<std::size_t>(b)] = bootstrap_kernel(x, y, idx, seed, static_cast<std::size_t>(b), scratch);
    }
  }
  return out;
}

template <Scalar T>
std::vector<T> bootstrap_replicates_serial(const SampleSet<T>& x_in, const SampleSet<T>& y_in, std::size_t resamples,
                                           std::uint64_t seed) {
  require_1d(x_in, "x sample");
  require_1d(y_in, "y sample");
  const auto x = sorted_copy(x_in);
  const auto y = sorted_copy(y_in);
  std::vector<T> out;
  out.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    Rng rng(replicate_seed(seed, b));
    std::uniform_int_distribution<std::size_t> pick_x(0, x.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_y(0, y.size() - 1);
    SampleSet<T> rx, ry;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t k = pick_x(rng);
      rx.observations.push_back(x.observations[k]);
      if (x.weighted()) rx.weights.push_back(x.weights[k]);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      const std::size_t k = pick_y(rng);
      ry.observations.push_back(y.observations[k]);
      if (y.weighted()) ry.weights.push_back(y.weights[k]);
    }
    out.push_back(tau_hat(rx, ry).tau_hat);
  }
  return out;
}

template <Scalar T>
std::pair<T, T> bootstrap_ci(const SampleSet<T>& x, const SampleSet<T>& y, double level, std::size_t resamples,
                             std::uint64_t seed) {
  check_level(level);
  check_resamples(resamples);
  return percentile_interval(bootstrap_replicates(x, y, resamples, seed), level, tau_hat(x, y).tau_hat);
}

template <Scalar T>
std::pair<T, T> bootstrap_ci_serial(const SampleSet<T>& x, const SampleSet<T>& y, double level,
                                    std::size_t resamples, std::uint64_t seed) {
  check_level(level);
  check_resamples(resamples);
  return percentile_interval(bootstrap_replicates_serial(x, y, resamples, seed), level, tau_hat(x, y).tau_hat);
}

double dkw_half_width(std::size_t m, std::size_t n, double level) {
  check_level(level);
  const double log_term = std::log(2.0 / (1.0 - level));
  return std::sqrt(log_term / (2.0 * static_cast<double>(m))) + std::sqrt(log_term / (2.0 * static_cast<double>(n)));
}

template <Scalar T>
std::pair<T, T> dkw_ci(const SampleSet<T>& x, const SampleSet<T>& y, double level) {
  const auto est = tau_hat(x, y);
  const T half = from_double<T>(dkw_half_width(x.size(), y.size(), level));
  T lo = est.tau_hat - half;
  T hi = est.tau_hat + half;
  if (lo < 0) lo = T(0);
  if (hi > 1) hi = T(1);
  return {lo, hi};
}

double smirnov_p_value(double ks_minus, std::size_t m, std::size_t n) {
  if (ks_minus <= 0.0) return 1.0;
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  return std::min(1.0, std::exp(-2.0 * ks_minus * ks_minus * md * nd / (md + nd)));
}

template <Scalar T>
DominanceTest dominance_test(const SampleSet<T>& x, const SampleSet<T>& y) {
  const auto est = tau_hat(x, y);
  DominanceTest out;
  out.statistic = to_double(est.ks_minus);
  out.p_value = smirnov_p_value(out.statistic, x.size(), y.size());
  out.small_sample_warning = x.size() < kAsymptoticMinSample || y.size() < kAsymptoticMinSample;
  out.method = "one-sided Smirnov asymptotic";
  return out;
}

template <Scalar T>
DominanceTest dominance_test_permutation(const SampleSet<T>& x_in, const SampleSet<T>& y_in, std::size_t permutations,
                                         std::uint64_t seed) {
  const T observed = tau_hat(x_in, y_in).ks_minus;
  const auto x = sorted_copy(x_in);
  const auto y = sorted_copy(y_in);
  const auto idx = pool(x, y);
  std::vector<T> stats(permutations);
  const long count = static_cast<long>(permutations);
#pragma omp parallel
  {
    Scratch<T> scratch(idx.distinct);
    std::vector<std::size_t> perm;
#pragma omp for schedule(static)
    for (long p = 0; p < count; ++p) {
      stats[static_cast<std::size_t>(p)] = permuted_ks(x, y, idx, seed, static_cast<std::size_t>(p), perm, scratch);
    }
  }
  return permutation_result(stats, observed);
}

template <Scalar T>
DominanceTest dominance_test_permutation_serial(const SampleSet<T>& x_in, const SampleSet<T>& y_in,
                                                std::size_t permutations, std::uint64_t seed) {
  const T observed = tau_hat(x_in, y_in).ks_minus;
  const auto x = sorted_copy(x_in);
  const auto y = sorted_copy(y_in);
  const std::size_t m = x.size();
  std::vector<T> stats;
  stats.reserve(permutations);
  for (std::size_t p = 0; p < permutations; ++p) {
    std::vector<std::size_t> perm(m + y.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(replicate_seed(seed, p));
    std::shuffle(perm.begin(), perm.end(), rng);
    SampleSet<T> px, py;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      const std::size_t k = perm[i];
      const auto& obs = k < m ? x.observations[k] : y.observations[k - m];
      auto& dest = i < m ? px : py;
      dest.observations.push_back(obs);
      if (x.weighted() || y.weighted()) {
        const T w = k < m ? (x.weighted() ? x.weights[k] : T(1)) : (y.weighted() ? y.weights[k - m] : T(1));
        dest.weights.push_back(w);
      }
    }
    stats.push_back(tau_hat(px, py).ks_minus);
  }
  return permutation_result(stats, observed);
}

template <Scalar T>
InferenceReport<T> infer(const SampleSet<T>& x, const SampleSet<T>& y, const InferenceOptions& options) {
  auto report = tau_hat(x, y);
  report.seed = options.seed;
  report.ci_method = options.ci_method;
  auto [lo, hi] = options.ci_method == CiMethod::bootstrap
                      ? bootstrap_ci(x, y, options.level, options.resamples, options.seed)
                      : dkw_ci(x, y, options.level);
  report.ci_low = lo;
  report.ci_high = hi;
  if (options.run_test) {
    const auto test = options.permutations > 0 ? dominance_test_permutation(x, y, options.permutations, options.seed)
                                               : dominance_test(x, y);
    report.p_value = test.p_value;
    report.p_value_method = test.method;
    report.small_sample_warning = test.small_sample_warning;
  }
  return report;
}

#define PSD_INSTANTIATE_STATS(T)                                                                               \
  template struct SampleSet<T>;                                                                                \
  template StepCDF<T> ecdf(const SampleSet<T>&);                                                               \
  template InferenceReport<T> tau_hat(const SampleSet<T>&, const SampleSet<T>&);                               \
  template TauResult<T> tau_hat_nd(const SampleSet<T>&, const SampleSet<T>&);                                  \
  template std::vector<T> bootstrap_replicates(const SampleSet<T>&, const SampleSet<T>&, std::size_t,          \
                                               std::uint64_t);                                                 \
  template std::vector<T> bootstrap_replicates_serial(const SampleSet<T>&, const SampleSet<T>&, std::size_t,   \
                                                      std::uint64_t);                                          \
  template std::pair<T, T> bootstrap_ci(const SampleSet<T>&, const SampleSet<T>&, double, std::size_t,         \
                                        std::uint64_t);                                                        \
  template std::pair<T, T> bootstrap_ci_serial(const SampleSet<T>&, const SampleSet<T>&, double, std::size_t,  \
                                               std::uint64_t);                                                 \
  template std::pair<T, T> dkw_ci(const SampleSet<T>&, const SampleSet<T>&, double);                           \
  template DominanceTest dominance_test(const SampleSet<T>&, const SampleSet<T>&);                             \
  template DominanceTest dominance_test_permutation(const SampleSet<T>&, const SampleSet<T>&, std::size_t,     \
                                                    std::uint64_t);                                            \
  template DominanceTest dominance_test_permutation_serial(const SampleSet<T>&, const SampleSet<T>&,           \
                                                           std::size_t, std::uint64_t);                        \
  template InferenceReport<T> infer(const SampleSet<T>&, const SampleSet<T>&, const InferenceOptions&);

PSD_INSTANTIATE_STATS(Rational)
PSD_INSTANTIATE_STATS(double)

}  // namespace psd
