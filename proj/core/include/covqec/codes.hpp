#pragma once

#include <optional>
#include <vector>

#include "covqec/channels.hpp"

namespace covqec {

struct CovariantCode {
  ComplexMatrix isometry; // d_S x d_L
  Hamiltonian h_l;
  Hamiltonian h_s;
  std::optional<double> period;

  int d_l() const { return static_cast<int>(isometry.cols()); }
  int d_s() const { return static_cast<int>(isometry.rows()); }
};

// ||V H_L - (H_S - c) V|| minimized over the constant c. Both Hamiltonians are
// stored traceless, so c is whatever offset the code needs between them.
struct CovarianceCheck {
  double residual = 0.0;
  double shift = 0.0;
  double isometry_residual = 0.0; // ||V^dag V - I||
};
CovarianceCheck check_code(const CovariantCode& code);

// Validates and returns the code; throws std::invalid_argument when V is not an
// isometry (1e-10) or the covariance residual exceeds 1e-9 (1 + ||H_S||).
CovariantCode make_code(ComplexMatrix v, Hamiltonian h_l, Hamiltonian h_s,
                        std::optional<double> period = std::nullopt);

// Two-dimensional Dicke code |g_0> = |(+m)_n>, |g_1> = |(-m)_n>.
struct ThermoCodeSpec {
  int n = 0;
  int m = 0;

  ThermoCodeSpec(int n, int m); // throws on parity or range violations
  int up_count(int logical) const { return logical == 0 ? (n + m) / 2 : (n - m) / 2; }
  Hamiltonian h_l() const; // m Z
  // <g_i| A_k |g_j> and <g_i| A_k B_l |g_j> (k != l) without building 2^n vectors.
  Complex single_site(int i, int j, const ComplexMatrix& a) const;
  Complex two_site(int i, int j, const ComplexMatrix& a, const ComplexMatrix& b) const;
};

inline constexpr int kMaxDenseQubits = 20;

// Dense isometry with H_S = sum_k sigma_z on site k; requires n <= 20. The
// physical Hamiltonian is kept as a diagonal.
CovariantCode thermo_code(const ThermoCodeSpec& spec);
// Total sigma_z on n sites as a diagonal generator.
Hamiltonian total_sigma_z(int n);

// Repetition extension: |0_C> -> |0_L 0_A>, |1_C> -> |1_L 1_A> with |0_L>, |1_L> the top and
// bottom eigenvectors of H_L and A a qubit ancilla.
ComplexMatrix repetition_encoding(const Hamiltonian& h_l); // (d_L * 2) x 2
CovariantCode repetition_extension(const CovariantCode& code);
// Recovery L (x) A -> C written in the basis where |0>, |1> are the extremes.
Channel repetition_recovery(int d_l);
// Same recovery with L in the computational basis of h_l's matrix.
Channel repetition_recovery(const Hamiltonian& h_l);
// R_rep o (logical (x) 1_A) o E_rep for a logical channel on L.
Channel repetition_channel(const Channel& logical, const Hamiltonian& h_l);

// R o N o E for a dense code.
Channel effective_logical_channel(const CovariantCode& code, const Channel& noise,
                                  const Channel& recovery);

// Closest rotated dephasing channel: p and phi read from the off-diagonal
// damping, residual = Choi distance (operator norm) to D_{p,phi}.
struct DephasingFit {
  double p = 0.0;
  double phi = 0.0;
  double residual = 0.0;
};
DephasingFit fit_rotated_dephasing(const Channel& qubit_channel);

// Smallest period tau = 2 pi / g for which every charge lambda_L - h_S is an
// integer multiple of g up to a common offset. nullopt when no grain with
// denominator <= 64 fits.
std::optional<double> common_period(const RealVector& l_spectrum, const RealVector& s_spectrum);

// Exact finite average of U_L(theta) o rec o U_S(theta)^dag over one period,
// for a recovery S -> L. h_s and h_l must be diagonal.
Channel twirl_recovery(const Channel& rec, const Hamiltonian& h_l, const Hamiltonian& h_s,
                       double tau);
// max over thetas of ||Choi(U_L(theta)^dag o ch o U_S(theta)) - Choi(ch)||.
double channel_covariance_residual(const Channel& ch, const Hamiltonian& h_in,
                                   const Hamiltonian& h_out, const std::vector<double>& thetas);

// Recovery built from orthonormal syndrome families: family f contributes the
// Kraus operator sum_i |i><s_{f,i}|; the orthogonal complement of all syndromes is
// dumped into |dump>.
Channel syndrome_recovery(int input_dim, int d_l,
                          const std::vector<std::vector<ComplexVector>>& families, int dump = 0);

// Syndrome recovery for thermo codes under single-site erasure, acting on
// (C^3)^{(x) n} with index 2 as the vacuum; dense, so limited to n <= 6.
Channel thermo_erasure_recovery_dense(const ThermoCodeSpec& spec);

} // namespace covqec
