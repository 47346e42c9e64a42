#pragma once

#include <optional>
#include <vector>

#include "covqec/linalg.hpp"

namespace covqec {

// CPTP map stored as a Kraus list. Trace preservation is checked on construction.
class Channel {
public:
  static constexpr double kTpTolerance = 1e-9;

  explicit Channel(std::vector<ComplexMatrix> kraus);

  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  int d_in() const { return static_cast<int>(kraus_.front().cols()); }
  int d_out() const { return static_cast<int>(kraus_.front().rows()); }
  int rank() const { return static_cast<int>(kraus_.size()); }

  // ||sum K^dag K - I|| in operator norm.
  double tp_residual() const;

private:
  std::vector<ComplexMatrix> kraus_;
};

// Hermitian generator, shifted to be traceless. The removed multiple of the
// identity is kept in shift().
class Hamiltonian {
public:
  explicit Hamiltonian(const ComplexMatrix& m);
  static Hamiltonian diagonal(const std::vector<double>& eigenvalues);
  static Hamiltonian zero(int d);

  // Diagonal generators wider than kMaxDenseDiagonal keep no dense matrix;
  // matrix() then throws and callers use diagonal_values().
  static constexpr int kMaxDenseDiagonal = 2048;

  const ComplexMatrix& matrix() const;
  int dim() const { return dim_; }
  bool is_diagonal() const { return diagonal_; }
  // Shifted diagonal in basis order; only for diagonal generators.
  const RealVector& diagonal_values() const;
  const RealVector& eigenvalues() const { return eigenvalues_; }
  double delta() const { return delta_; }
  double opnorm() const { return opnorm_; }
  double trace_sq() const { return trace_sq_; }
  double shift() const { return shift_; }
  bool is_zero() const { return delta_ == 0.0; }

private:
  Hamiltonian() = default;
  void finish();

  int dim_ = 0;
  bool diagonal_ = false;
  bool dense_ = true;
  ComplexMatrix matrix_;
  RealVector diag_;
  RealVector eigenvalues_;
  double delta_ = 0.0;
  double opnorm_ = 0.0;
  double trace_sq_ = 0.0;
  double shift_ = 0.0;
};

// Kraus operators and their first derivative at theta = 0.
struct ChannelFamily {
  std::vector<ComplexMatrix> kraus;
  std::vector<ComplexMatrix> dkraus;
};

ComplexMatrix apply(const Channel& ch, const ComplexMatrix& rho);
// Unnormalized Choi matrix (N (x) 1)(|Gamma><Gamma|), output factor first.
ComplexMatrix choi(const Channel& ch);
// Recovers a minimal Kraus set from an unnormalized Choi matrix.
Channel channel_from_choi(const ComplexMatrix& choi, int d_in, int d_out);
// Same channel with the fewest Kraus operators.
Channel minimal_kraus(const Channel& ch);

Channel compose(const Channel& a, const Channel& b); // a after b
Channel tensor(const Channel& a, const Channel& b);
Channel identity_channel(int d);
Channel unitary_channel(const ComplexMatrix& u);
Channel isometry_channel(const ComplexMatrix& v);
// Convex combination sum_k w_k N_k of channels with equal shapes.
Channel mixture(const std::vector<double>& weights, const std::vector<Channel>& channels);

Channel erasure(int d, double p);
Channel depolarizing(int d, double p);
Channel rotated_dephasing(double p, double phi);
Channel dephasing(double p);

// Generalized Pauli (clock and shift) operators X^a Z^b, a, b in [0, d).
ComplexMatrix weyl_operator(int d, int a, int b);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

ChannelFamily hamiltonian_channel_family(const Channel& ch, const Hamiltonian& h);

// e^{-i H theta}
ComplexMatrix evolution(const Hamiltonian& h, double theta);

Channel random_channel(int d_in, int d_out, int rank, Rng& rng);

} // namespace covqec
