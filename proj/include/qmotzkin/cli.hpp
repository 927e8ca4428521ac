#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmotzkin/ascpoly.hpp"

namespace qmotzkin::cli {

enum class Format { Csv, Json };
enum class Regime { FixedQ, QToOne };

// Effective settings of one run. Keys accepted by apply_setting match the
// long flag names.
struct RunConfig {
  std::string subcommand;
  ascpoly::QModelParams model{0.5, 0.8, 0.3, 0.4};
  double c = 1.0;
  std::string weights = "q";  // q | unit
  std::size_t L = 6;
  int m = 0;
  int n = 0;
  std::vector<std::size_t> N{400, 2500, 10000};
  double t = 1.0;
  double x = 1.0;
  double y = 1.0;
  double u = 0.0;
  std::size_t K = 1;
  std::size_t count = 1000;
  std::size_t steps = 100;
  std::string fn = "k0";
  double rel_tol = 1e-12;
  double tail_tol = 1e-14;
  std::size_t height_cap = 0;
  std::uint64_t seed = 1;
  std::string out;
  Format format = Format::Csv;
  Regime regime = Regime::FixedQ;
  std::string fault;

  // DomainError on out-of-range parameters.
  void validate() const;
};

// Parses value for key into config. DomainError on unknown keys or
// malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

// Ordered key/value echo of the effective configuration.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& config);

using Cell = std::variant<long long, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool ok = true;  // false when a verify check failed
};

Table cmd_enumerate(const RunConfig& config);
Table cmd_sample(const RunConfig& config);
Table cmd_chain(const RunConfig& config);
Table cmd_verify(const RunConfig& config);
Table cmd_locallimit(const RunConfig& config);
Table cmd_specialfn(const RunConfig& config);

Table execute(const RunConfig& config);

// Shortest round-trip text with at most 17 significant digits, '.' decimal.
std::string format_double(double v);

// CSV with '#' config lines, or JSON {"config": ..., "rows": [...]}.
std::string render(const Table& table, const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitNumericGuard = 2;
inline constexpr int kExitInvalidConfig = 3;

// Full driver: parses args (without the program name), runs, writes the
// output to config.out or out, and returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmotzkin::cli
