#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "covqec/qfi.hpp"

namespace covqec {

enum class BoundTheorem { T1, T2Worst, T2Choi, Local, SingleError, MultiError, EastinKnill };

std::string to_string(BoundTheorem t);

struct BoundReport {
  BoundTheorem theorem = BoundTheorem::T1;
  std::optional<QfiValue> qfi_used; // absent for the dimension-counting bound
  double argument_x = 0.0;          // +inf when the QFI vanishes
  double epsilon_lower = 0.0;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
};

inline constexpr const char* kFlagNoBound = "no bound";
inline constexpr const char* kFlagSaturated = "bound saturated at domain edge";

// epsilon(1 - epsilon) / (1 - 2 epsilon)^2 and its inverse on [0, 1/2).
double ell1_forward(double eps);
double ell1(double x);

// Proof-version maps: x = eps / ((1 - 3 eps + eps^2)(1 - c sqrt(2 eps))), with
// c = 6 for ell2 and c = 3 d_L (dH_L)^2 / (2 Tr H_L^2) for ell3.
struct EllValue {
  double value = 0.0;
  bool saturated = false;
};
double ell2_forward(double eps);
double ell3_forward(double eps, int d_l, double delta_hl, double tr_hl_sq);
double ell3_constant(int d_l, double delta_hl, double tr_hl_sq);
// Upper end of the epsilon interval, 1 / (2 c^2).
double ell_domain_edge(double c);
EllValue ell2_checked(double x);
EllValue ell3_checked(double x, int d_l, double delta_hl, double tr_hl_sq);
double ell2(double x);
double ell3(double x, int d_l, double delta_hl, double tr_hl_sq);

// Single-channel bound from an already computed QFI.
BoundReport theorem1_from_qfi(const QfiValue& qfi, double delta_hl);
BoundReport theorem1_bound(const Channel& ch, const Hamiltonian& h_s, double delta_hl);

struct Theorem2Assumptions {
  bool noise_commutes_with_symmetry = false;
  bool common_period = false;
};
std::pair<BoundReport, BoundReport> theorem2_bounds(const Channel& ch, const Hamiltonian& h_s,
                                                    const Hamiltonian& h_l,
                                                    Theorem2Assumptions assumptions = {});

BoundReport local_bound(const std::vector<Channel>& site_channels,
                        const std::vector<Hamiltonian>& site_hams, double delta_hl);

struct SiteError {
  double q = 0.0;
  Channel error;
};
enum class SingleErrorFlavor { Erasure, DepolarizingQubit, Generic };
std::string to_string(SingleErrorFlavor f);
SingleErrorFlavor single_error_flavor_from_string(const std::string& s);

BoundReport single_error_bound(const std::vector<SiteError>& site_errors,
                               const std::vector<Hamiltonian>& site_hams, double delta_hl,
                               SingleErrorFlavor flavor);

// delta * F(N(delta)) at delta in {1e-2, 1e-3, 1e-4}, extrapolated linearly to 0.
struct SingleErrorLimit {
  double value = 0.0;
  double residual = 0.0;
  std::vector<double> samples;
};
SingleErrorLimit single_error_site_limit(double q, const Channel& error, const Hamiltonian& h);

struct ErrorBlock {
  std::vector<int> sites;
  double q = 0.0;
  Channel error;
  Hamiltonian h;
};
struct MultiErrorResult {
  double value = 0.0;
  std::vector<double> per_block;
  std::vector<std::string> flags;
};
MultiErrorResult multi_error_qfi_upper(const std::vector<ErrorBlock>& blocks,
                                       bool hamiltonians_commute = true);
// l1 bound from the multi-error QFI upper bound.
BoundReport multi_error_bound(const std::vector<ErrorBlock>& blocks, double delta_hl,
                              bool hamiltonians_commute = true);
// Uniform t-erasure on n qubits with local generator h (2 x 2); every t-subset is
// one block whose error erases all of its sites.
std::vector<ErrorBlock> uniform_erasure_blocks(int n, int t, const Hamiltonian& local_h);
// Closed form 4 ||H||^2 n^2 with the literal operator norm.
double multi_error_erasure_closed_form(int n, const Hamiltonian& local_h);

struct EastinKnillResult {
  BoundReport report;       // literal evaluation
  double approx_x = 0.0;    // 1 / (4 n sum (ln d_k)^2)
  double approx_epsilon = 0.0;
};
EastinKnillResult eastin_knill_bound(int n, const std::vector<int>& site_dims, int d_l);

} // namespace covqec
