#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "covqec/codes.hpp"

namespace covqec {

// N o E restricted to the support of its output: Kraus operators A_a (s x d_L)
// written in an orthonormal basis of that support. When the support basis
// diagonalizes the physical Hamiltonian, h_support holds the energies.
struct EncodedNoise {
  std::vector<ComplexMatrix> kraus;
  Hamiltonian h_l;
  std::optional<RealVector> h_support;
  std::optional<ComplexMatrix> basis; // d_out x s, only when the output space is explicit

  int d_l() const { return static_cast<int>(kraus.front().cols()); }
  int support_dim() const { return static_cast<int>(kraus.front().rows()); }
  Channel channel() const { return Channel(kraus); }
  Hamiltonian support_hamiltonian() const; // requires h_support
};

// Wraps a plain logical-to-output channel (no reduction, no symmetry data).
EncodedNoise encoded_from_channel(const Channel& composite, const Hamiltonian& h_l);

// Dense reduction of noise o code. output_energies, when given, is the diagonal
// of the output Hamiltonian; the basis is then chosen energy by energy.
EncodedNoise encode_dense(const CovariantCode& code, const Channel& noise,
                          const std::optional<RealVector>& output_energies = std::nullopt);

// Single-site noise on n qubits: with probability q_k the site error acts on
// site k, with probability identity_weight nothing happens. The site error maps
// a qubit to C^{d_o}; output indices 0 and 1 are the qubit itself, higher ones
// are orthogonal flags such as the vacuum.
struct SingleSiteNoise {
  Channel site_error;
  std::vector<double> q;
  double identity_weight = 0.0;
  // Energies of the site output basis; defaults to (+1, -1, 0, ...).
  std::vector<double> output_energies;

  static SingleSiteNoise uniform(int n, const Channel& site_error, double identity_weight = 0.0);
  int sites() const { return static_cast<int>(q.size()); }
  std::vector<double> energies() const;
  void validate() const;
};

// Dense n-site composite; the output space is (C^{d_o})^{(x) n}.
EncodedNoise encode_single_site_dense(const CovariantCode& code, const SingleSiteNoise& noise);
// The full n-site noise channel (small n only), for cross-checks.
Channel single_site_noise_channel(const SingleSiteNoise& noise);

// Compressed builder for thermo codes. Output vectors are expanded over atoms
// |y>_k |D^{n-1}_v>_rest whose overlaps are closed-form binomial ratios.
class ThermoEncoding {
public:
  ThermoEncoding(ThermoCodeSpec spec, SingleSiteNoise noise);

  const ThermoCodeSpec& spec() const { return spec_; }
  const EncodedNoise& encoded() const { return encoded_; }
  int atom_count() const { return static_cast<int>(atoms_.size()); }
  // Support coordinates of |y>_k |D^{n-1}_v>; zero vector if the atom lies
  // outside the support.
  ComplexVector atom_coordinates(int k, int y, int v) const;

private:
  using Atom = std::tuple<int, int, int>; // site, site output, up count on the rest
  int atom_index(const Atom& a);
  double atom_overlap(const Atom& a, const Atom& b) const;

  ThermoCodeSpec spec_;
  SingleSiteNoise noise_;
  std::vector<Atom> atoms_;
  std::map<Atom, int> atom_lookup_;
  ComplexMatrix coords_; // s x atoms: <b_m | atom>
  EncodedNoise encoded_;
};

// Erasure syndrome recovery in the support coordinates of a thermo erasure encoding
// (site error output index 2 is the vacuum).
Channel thermo_erasure_recovery(const ThermoEncoding& enc);

// Composite logical channel R o (N o E) for a recovery acting on the support.
Channel effective_logical_channel(const EncodedNoise& enc, const Channel& recovery);

// A support recovery extended to the explicit output space: Kraus R_a B^dag plus
// |0><e_j| for an orthonormal basis e_j of the complement. Requires enc.basis.
Channel lift_recovery(const EncodedNoise& enc, const Channel& recovery);

} // namespace covqec
