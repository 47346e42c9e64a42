#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "covqec/linalg.hpp"

namespace covqec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitFailed = 2; // verification failure or sandwich violation
inline constexpr int kExitInfinite = 3;

struct QfiArgs {
  std::string channel;
  std::string ham = "sz";
  std::string kind = "sld-reg";
};

struct BoundArgs {
  std::optional<int> theorem;
  bool local = false;
  std::string single_error;
  bool multi_error = false;
  bool eastin_knill = false;
  std::string channel;
  std::string ham = "sz";
  std::string hl = "sz";
  int dl = 2;
  std::optional<double> dhl;
  double dh = 2.0;
  int n = 1;
  int t = 1;
  std::string q = "uniform";
  std::vector<int> dims;
};

struct CodeArgs {
  std::string code;
  std::string noise;
  double p = 1.0;
  std::uint64_t seed = kDefaultSeed;
  int starts = 50;
  std::string export_recovery;
};

struct SweepArgs {
  std::string family;
  std::vector<int> n;
  std::vector<int> m;
  std::vector<double> p;
  std::string out;
  int jobs = 1;
  std::uint64_t seed = kDefaultSeed;
  int starts = 50;
};

struct VerifyArgs {
  std::string filter;
  double tol_scale = 1.0;
  std::uint64_t seed = kDefaultSeed;
  bool verbose = false;
  bool list = false;
};

int cmd_qfi(const QfiArgs& a);
int cmd_bound(const BoundArgs& a);
int cmd_code(const CodeArgs& a);
int cmd_sweep(const SweepArgs& a);
int cmd_verify(const VerifyArgs& a);

// Runs a command, mapping input errors to exit 1 with a diagnostic on stderr.
int guarded(const std::function<int()>& body);

// One evaluated grid point. Thermo families fill the epsilon columns.
struct SweepRow {
  int n = 0;
  int m = 0;
  double p = 0.0;
  std::vector<double> values;
};

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
  std::vector<std::string> skipped; // reasons, in grid order
};

class SandwichViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Grid in lexicographic (n, m, p) order, evaluated on up to `jobs` threads.
// Throws SandwichViolation if any thermo row breaks lower <= choi <= upper.
SweepTable run_sweep(const SweepArgs& a);
// Throws SandwichViolation with a diagnostic naming the row.
void check_sandwich(const SweepRow& row, double lower, double choi, double upper);
std::string format_csv(const SweepTable& t, std::uint64_t seed);
// 12 significant digits, classic locale.
std::string format_number(double v);

} // namespace covqec::cli
