#pragma once

// Command implementations behind the `psd` executable. Each command returns a
// JSON report plus a short human-readable summary; errors surface as
// CommandError carrying the process exit code.

#include "json.hpp"
#include "psd/cli/io.hpp"
#include "psd/scalar.hpp"
#include "psd/stats.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace psd::cli {

inline constexpr const char* kVersion = "0.1.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failed_check = 1;
inline constexpr int parse_error = 2;
inline constexpr int contract_violation = 3;
inline constexpr int missing_domain = 4;
inline constexpr int stats_precondition = 5;
}  // namespace exit_code

class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

enum class OrderKind { automatic, total, product, relation_file };

struct StatsOptions {
  double level = 0.95;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  bool run_test = true;
  CiMethod ci_method = CiMethod::bootstrap;
  std::size_t permutations = 0;
};

struct ComparisonSpec {
  std::string input_x;
  std::string input_y;
  std::optional<InputKind> input_kind;  // inferred from the extension when unset
  OrderKind order_kind = OrderKind::automatic;
  std::string relation_path;
  ArithmeticMode arithmetic = ArithmeticMode::exact();
  std::size_t grid_n = 5;
  std::optional<std::pair<std::string, std::string>> domain;
  StatsOptions stats;
  bool emit_cdf_table = false;
};

struct CommandOutput {
  int exit_code = exit_code::ok;
  nlohmann::json report;
  std::string summary;
};

CommandOutput cmd_tau(const ComparisonSpec& spec);
CommandOutput cmd_measures(const ComparisonSpec& spec);
CommandOutput cmd_test(const ComparisonSpec& spec);
CommandOutput cmd_axioms(std::uint64_t seed, std::size_t suite_size, ArithmeticMode arithmetic);

/// Re-loads the inputs named by `spec` and re-checks the certificates stored
/// in a `tau` or `measures` report: coupling marginals, ordered flags,
/// upward closure of the dual set and the duality equation.
CommandOutput cmd_verify(const nlohmann::json& report, const ComparisonSpec& spec);

}  // namespace psd::cli
