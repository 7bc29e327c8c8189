#pragma once

// Estimation and inference for tau from two samples.
//
// On the line, tau(F_m, G_n) = 1 - D^-, where D^- = sup_x (G_n(x) - F_m(x))
// is the one-sided two-sample Smirnov statistic. Confidence intervals come from
// a percentile bootstrap or from DKW bands; the dominance test uses the
// asymptotic one-sided Smirnov p-value or a permutation test.
//
// Bootstrap and permutation replicates run in parallel with OpenMP. Replicate
// b always draws from its own generator seeded by (seed, b) and writes slot b,
// so the output does not depend on the thread count. The *_serial variants
// recompute every replicate through the plain ECDF path and are kept as the
// reference the parallel kernels are tested against.

#include "psd/errors.hpp"
#include "psd/measures.hpp"
#include "psd/tau.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace psd {

template <Scalar T>
struct SampleSet {
  std::vector<Point<T>> observations;
  std::vector<T> weights;  // empty means unweighted

  SampleSet() = default;
  SampleSet(std::vector<Point<T>> obs, std::vector<T> w = {});

  static SampleSet from_values(const std::vector<T>& values, std::vector<T> w = {});

  std::size_t size() const { return observations.size(); }
  std::size_t dimension() const { return observations.empty() ? 0 : observations.front().size(); }
  bool weighted() const { return !weights.empty(); }
};

enum class CiMethod { bootstrap, dkw };

inline std::string to_string(CiMethod m) { return m == CiMethod::bootstrap ? "bootstrap" : "dkw"; }

template <Scalar T>
struct InferenceReport {
  T tau_hat{1};
  T ks_minus{0};
  std::optional<T> ci_low;
  std::optional<T> ci_high;
  std::optional<CiMethod> ci_method;
  std::optional<double> p_value;
  std::string p_value_method;
  bool small_sample_warning = false;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  std::uint64_t seed = 0;
};

template <Scalar T>
StepCDF<T> ecdf(const SampleSet<T>& samples);

/// Point estimate: ks_minus = sup_x (G_n(x) - F_m(x)) and tau_hat = 1 - ks_minus.
template <Scalar T>
InferenceReport<T> tau_hat(const SampleSet<T>& x, const SampleSet<T>& y);

/// Multivariate samples: tau of the empirical measures under the product order.
template <Scalar T>
TauResult<T> tau_hat_nd(const SampleSet<T>& x, const SampleSet<T>& y);

inline constexpr std::size_t kMinBootstrapResamples = 100;

/// tau_hat of each of `resamples` bootstrap replicates, in replicate order.
template <Scalar T>
std::vector<T> bootstrap_replicates(const SampleSet<T>& x, const SampleSet<T>& y, std::size_t resamples,
                                    std::uint64_t seed);
template <Scalar T>
std::vector<T> bootstrap_replicates_serial(const SampleSet<T>& x, const SampleSet<T>& y, std::size_t resamples,
                                           std::uint64_t seed);

/// Percentile interval, widened if needed so that it contains tau_hat.
template <Scalar T>
std::pair<T, T> bootstrap_ci(const SampleSet<T>& x, const SampleSet<T>& y, double level, std::size_t resamples,
                             std::uint64_t seed);
template <Scalar T>
std::pair<T, T> bootstrap_ci_serial(const SampleSet<T>& x, const SampleSet<T>& y, double level,
                                    std::size_t resamples, std::uint64_t seed);

/// tau_hat -/+ (sqrt(ln(2/(1-level)) / 2m) + sqrt(ln(2/(1-level)) / 2n)), clipped to [0, 1].
template <Scalar T>
std::pair<T, T> dkw_ci(const SampleSet<T>& x, const SampleSet<T>& y, double level);

double dkw_half_width(std::size_t m, std::size_t n, double level);

struct DominanceTest {
  double statistic = 0.0;
  double p_value = 1.0;
  bool small_sample_warning = false;
  std::string method;
};

inline constexpr std::size_t kAsymptoticMinSample = 20;

/// H0: x's law is dominated by y's (tau = 1) against tau < 1, with the
/// asymptotic p = exp(-2 D^2 m n / (m + n)).
template <Scalar T>
DominanceTest dominance_test(const SampleSet<T>& x, const SampleSet<T>& y);

double smirnov_p_value(double ks_minus, std::size_t m, std::size_t n);

/// Same hypotheses, p = (1 + #{permuted D >= observed D}) / (permutations + 1).
template <Scalar T>
DominanceTest dominance_test_permutation(const SampleSet<T>& x, const SampleSet<T>& y, std::size_t permutations,
                                         std::uint64_t seed);
template <Scalar T>
DominanceTest dominance_test_permutation_serial(const SampleSet<T>& x, const SampleSet<T>& y,
                                                std::size_t permutations, std::uint64_t seed);

struct InferenceOptions {
  double level = 0.95;
  CiMethod ci_method = CiMethod::bootstrap;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  bool run_test = true;
  std::size_t permutations = 0;  // 0 selects the asymptotic test
};

/// Estimate, confidence interval and (optionally) p-value in one report.
template <Scalar T>
InferenceReport<T> infer(const SampleSet<T>& x, const SampleSet<T>& y, const InferenceOptions& options);

/// Seed of replicate `index` under master seed `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace psd
