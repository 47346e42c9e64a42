#pragma once

#include <optional>
#include <vector>

#include "covqec/channels.hpp"

namespace covqec {

struct SdpSolution {
  double objective = 0.0; // 4 * lambda_max(D(h)^dag D(h))
  ComplexMatrix h;
  double primal_residual = 0.0; // ||K^dag h K - T||_F
  double dual_gap = 0.0;
  int newton_steps = 0;
  bool converged = false;
};

class QfiValue {
public:
  enum class Kind { Finite, Infinite };

  static QfiValue finite(double value, ComplexMatrix certificate,
                         std::optional<SdpSolution> sdp = std::nullopt);
  static QfiValue infinite(ComplexMatrix violation);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  // Throws for Infinite.
  double value() const;
  const ComplexMatrix& certificate() const { return certificate_; }
  const std::optional<SdpSolution>& sdp() const { return sdp_; }

private:
  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
  ComplexMatrix certificate_;
  std::optional<SdpSolution> sdp_;
};

// Result of a span-membership test. residual is the part of the target outside
// the span.
struct SpanCheck {
  bool satisfied = true;
  ComplexMatrix residual;
  double residual_norm = 0.0;
};

SpanCheck span_membership(const std::vector<ComplexMatrix>& spanning, const ComplexMatrix& target);

SpanCheck hks_check(const Channel& ch, const Hamiltonian& h);
// Condition (S) for a general family: i sum K^dag dK in span{K_i^dag K_j}.
SpanCheck s_condition(const std::vector<ComplexMatrix>& kraus, const std::vector<ComplexMatrix>& dkraus);
// Condition (R): span{dK_i} inside span{K_i}.
SpanCheck r_condition(const std::vector<ComplexMatrix>& kraus, const std::vector<ComplexMatrix>& dkraus);
SpanCheck r_condition(const Channel& ch, const Hamiltonian& h);

double sld_qfi_state(const ComplexMatrix& rho, const ComplexMatrix& drho);
QfiValue rld_qfi_state(const ComplexMatrix& rho, const Hamiltonian& h);

// min lambda_max(D^dag D), D_a = G_a + i sum_b h_ab K_b, over Hermitian h with
// K^dag h K = target. Reported objective is four times the minimum.
// Throws std::domain_error when the linear constraint has no solution.
SdpSolution minimize_alpha_norm(const std::vector<ComplexMatrix>& kraus,
                                const std::vector<ComplexMatrix>& offset,
                                const ComplexMatrix& target);

QfiValue sld_qfi_channel_regularized(const Channel& ch, const Hamiltonian& h);
QfiValue sld_qfi_generic_family(const std::vector<ComplexMatrix>& kraus,
                                const std::vector<ComplexMatrix>& dkraus);

QfiValue rld_qfi_channel(const Channel& ch, const Hamiltonian& h);
QfiValue rld_qfi_generic_family(const std::vector<ComplexMatrix>& kraus,
                                const std::vector<ComplexMatrix>& dkraus);

// Closed forms.
double erasure_sld_qfi(double p, double delta_h);
double qubit_depolarizing_sld_qfi(double p, double delta_h);
double rotated_dephasing_sld_qfi(double p, double dphi);
double depolarizing_rld_qfi(int d, double p, double delta_h, double trace_h_sq);
double sld_upper_bound_depolarizing(int d, double p, double delta_h);

} // namespace covqec
