#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "covqec/encoded.hpp"

namespace covqec {

// 1 - <gamma| (ch (x) 1)(|gamma><gamma|) |gamma> with |gamma> maximally entangled.
double choi_infidelity(const Channel& logical);

struct ChoiRecovery {
  Channel recovery;         // support -> L
  double choi_infidelity;   // 1 - f^2 of the returned recovery
  double lower_bound;       // 1 - Tr Y from the dual certificate
  double gap;               // barrier duality gap
  int lmi_blocks;
  int variables;
  bool symmetry_reduced;
  int newton_steps;
};

// max_R f^2_Choi(R o N o E, 1_L) as an SDP over the recovery's Choi matrix; solved
// through its dual min Tr Y s.t. 1_L (x) Y >= C. The support splits into
// orthogonal components, and into charge sectors when the encoding carries
// support energies and H_L is diagonal.
ChoiRecovery optimal_choi_recovery(const EncodedNoise& enc);
ChoiRecovery optimal_choi_recovery(const Channel& composite);

struct WorstCase {
  double infidelity = 0.0;
  double dispersion = 0.0; // spread of the per-start minima
  bool closed_form = false;
  int starts = 0;
};

// min over pure |psi> on L (x) R of <psi|(ch (x) 1)(|psi><psi|)|psi>, by multi-start
// descent on the sphere. Qubit rotated-dephasing channels use the closed form.
WorstCase worst_case_infidelity(const Channel& ch, std::uint64_t seed = kDefaultSeed,
                                int starts = 50);
// (1 - (1 - 2p) cos phi) / 2
double dephasing_worst_infidelity(double p, double phi);

// Approximate Knill-Laflamme data for a two-dimensional code:
// P K_i^dag K_j P = A_ij P + B_ij P (|g0><g0| - |g1><g1|) P.
struct BenyOreshkovBlocks {
  ComplexMatrix a;
  ComplexMatrix b;
  double cross_term = 0.0; // max |<g0|K_i^dag K_j|g1>|
};
// Kraus ordering is branch-major: index i * n + k for site Kraus i on site k,
// identity branch (if any) last.
BenyOreshkovBlocks beny_oreshkov_blocks(const ThermoCodeSpec& spec, const SingleSiteNoise& noise);
// Closed-form blocks for uniform single-site depolarizing with Kraus (1, X, Y, Z) / 2.
BenyOreshkovBlocks beny_oreshkov_depolarizing_blocks(int n, int m);
// 1 - f(A, A + B)^2; throws if the cross term exceeds 1e-10.
double beny_oreshkov_infidelity(const BenyOreshkovBlocks& blocks);

// Site channel with Kraus (1, X, Y, Z) / 2 in that order.
Channel pauli_ordered_depolarizing();

struct RecoveryCandidate {
  std::string label;
  double choi_infidelity = 0.0;
  double worst_infidelity = 0.0;
  double dispersion = 0.0;
  bool closed_form = false;
};

struct InfidelityEstimate {
  double choi_infidelity = 0.0; // best primal value: SDP recovery or any candidate
  double choi_lower_bound = 0.0;
  double worst_upper = 0.0;
  double worst_lower = 0.0;
  std::optional<Channel> recovery;
  std::string recovery_label;
  std::vector<RecoveryCandidate> candidates;
  std::vector<std::string> log;
};

struct MeasureOptions {
  std::uint64_t seed = kDefaultSeed;
  int starts = 50;
  bool twirl = true;
  std::optional<double> period;
  std::vector<std::pair<std::string, Channel>> explicit_recoveries; // act on the support
};

InfidelityEstimate measure_code(const EncodedNoise& enc, const MeasureOptions& options = {});

} // namespace covqec
