#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace covqec;
using testing_support::basis;
using testing_support::ket_bra;
using testing_support::max_abs;

namespace {

// covqec::apply() through the Choi matrix: Tr_in[(1_out (x) rho^T) C].
ComplexMatrix apply_via_choi(const Channel& ch, const ComplexMatrix& rho) {
  ComplexMatrix c = choi(ch);
  ComplexMatrix prod = kron(ComplexMatrix::Identity(ch.d_out(), ch.d_out()), rho.transpose()) * c;
  return partial_trace(prod, {ch.d_out(), ch.d_in()}, {0});
}

} // namespace

TEST(Channels, RejectsNonTracePreservingKraus) {
  EXPECT_THROW(Channel({0.5 * ComplexMatrix::Identity(2, 2)}), std::invalid_argument);
  EXPECT_THROW(Channel(std::vector<ComplexMatrix>{}), std::invalid_argument);
  EXPECT_THROW(Channel({ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(3, 2)}), std::invalid_argument);
}

TEST(Channels, HamiltonianIsShiftedTraceless) {
  Hamiltonian h = Hamiltonian::diagonal({3.0, 1.0});
  EXPECT_NEAR(h.matrix().trace().real(), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(h.shift(), 2.0);
  EXPECT_DOUBLE_EQ(h.delta(), 2.0);
  EXPECT_DOUBLE_EQ(h.opnorm(), 1.0);
  EXPECT_DOUBLE_EQ(h.trace_sq(), 2.0);
  Hamiltonian c(ComplexMatrix::Identity(3, 3) * 5.0);
  EXPECT_TRUE(c.is_zero());
  EXPECT_LT(c.matrix().norm(), 1e-14);
  EXPECT_THROW(Hamiltonian(ComplexMatrix::Random(2, 2) + kI * ComplexMatrix::Identity(2, 2)),
               std::invalid_argument);
}

TEST(Channels, WideDiagonalHamiltonianKeepsNoDenseMatrix) {
  std::vector<double> e(4096);
  for (int i = 0; i < 4096; ++i) e[i] = i % 3;
  Hamiltonian h = Hamiltonian::diagonal(e);
  EXPECT_TRUE(h.is_diagonal());
  EXPECT_THROW(h.matrix(), std::length_error);
  EXPECT_DOUBLE_EQ(h.delta(), 2.0);
}

TEST(Channels, IdentityAndFullDepolarizingAction) {
  Rng rng(11);
  ComplexMatrix rho = random_density(2, rng);
  EXPECT_LT(max_abs(covqec::apply(identity_channel(2), rho), rho), 1e-14);
  ComplexMatrix zero = ket_bra(2, 0, 0);
  EXPECT_LT(max_abs(covqec::apply(depolarizing(2, 1.0), zero), ComplexMatrix::Identity(2, 2) / 2.0), 1e-14);
  ComplexMatrix r3 = random_density(3, rng);
  EXPECT_LT(max_abs(covqec::apply(depolarizing(3, 1.0), r3), ComplexMatrix::Identity(3, 3) / 3.0), 1e-13);
}

TEST(Channels, ErasureOutputOrdering) {
  ComplexMatrix out = covqec::apply(erasure(2, 0.3), ket_bra(2, 0, 0));
  ComplexMatrix want = 0.7 * ket_bra(3, 0, 0) + 0.3 * ket_bra(3, 2, 2);
  EXPECT_LT(max_abs(out, want), 1e-14);
  Rng rng(12);
  ComplexMatrix rho = random_density(2, rng);
  ComplexMatrix padded = ComplexMatrix::Zero(3, 3);
  padded.topLeftCorner(2, 2) = rho;
  EXPECT_LT(max_abs(covqec::apply(erasure(2, 0.0), rho), padded), 1e-14);
}

TEST(Channels, ChoiOfIdentityAndDepolarizing) {
  ComplexVector gamma = basis(4, 0) + basis(4, 3);
  EXPECT_LT(max_abs(choi(identity_channel(2)), gamma * gamma.adjoint()), 1e-14);
  EXPECT_LT(max_abs(choi(depolarizing(2, 1.0)), ComplexMatrix::Identity(4, 4) / 2.0), 1e-14);
}

TEST(Channels, DephasingChoiDampsOffDiagonals) {
  ComplexMatrix c = choi(dephasing(0.2));
  // |00><11| entry of the Choi matrix (output index first).
  EXPECT_NEAR(c(0, 3).real(), 0.6, 1e-14);
  EXPECT_NEAR(c(0, 0).real(), 1.0, 1e-14);
  ComplexMatrix r = choi(rotated_dephasing(0.1, 0.0));
  EXPECT_NEAR(r(0, 3).real(), 0.8, 1e-14);
}

TEST(Channels, ChoiTracesOutToIdentity) {
  Rng rng(13);
  for (int k = 0; k < 5; ++k) {
    Channel ch = random_channel(3, 2, 2 + k % 3, rng);
    ComplexMatrix t = partial_trace(choi(ch), {ch.d_out(), ch.d_in()}, {1});
    EXPECT_LT(max_abs(t, ComplexMatrix::Identity(3, 3)), 1e-12);
  }
}

TEST(Channels, ChoiKrausConsistency) {
  Rng rng(14);
  for (int k = 0; k < 10; ++k) {
    Channel ch = random_channel(2 + k % 2, 3, 1 + k % 4, rng);
    ComplexMatrix rho = random_density(ch.d_in(), rng);
    EXPECT_LT(max_abs(covqec::apply(ch, rho), apply_via_choi(ch, rho)), 1e-9);
  }
}

TEST(Channels, ChoiRoundTrip) {
  Rng rng(15);
  Channel ch = random_channel(2, 3, 3, rng);
  Channel back = channel_from_choi(choi(ch), 2, 3);
  EXPECT_LT(max_abs(choi(back), choi(ch)), 1e-12);
  EXPECT_LE(back.rank(), 3);
}

TEST(Channels, MinimalKrausKeepsChannelAndShrinksRank) {
  Rng rng(16);
  Channel a = random_channel(2, 2, 2, rng);
  Channel big = mixture({0.5, 0.5}, {a, a});
  Channel small = minimal_kraus(big);
  EXPECT_LE(small.rank(), 2);
  EXPECT_LT(max_abs(choi(small), choi(big)), 1e-12);
}

TEST(Channels, ComposeWithIdentity) {
  Rng rng(17);
  Channel ch = random_channel(2, 3, 2, rng);
  EXPECT_LT(max_abs(choi(compose(identity_channel(3), ch)), choi(ch)), 1e-13);
  EXPECT_LT(max_abs(choi(compose(ch, identity_channel(2))), choi(ch)), 1e-13);
  EXPECT_THROW(compose(ch, ch), std::invalid_argument);
}

TEST(Channels, ComposeAndTensorKrausCounts) {
  Channel e = erasure(2, 0.2);
  Channel d = depolarizing(3, 0.5);
  EXPECT_EQ(compose(d, e).rank(), d.rank() * e.rank());
  EXPECT_EQ(tensor(e, e).rank(), e.rank() * e.rank());
  EXPECT_LT(compose(d, e).tp_residual(), 1e-12);
}

TEST(Channels, TensorChoiIsPermutedKron) {
  Channel a = erasure(2, 0.2), b = erasure(2, 0.7);
  ComplexMatrix lhs = choi(tensor(a, b));
  // choi(a) (x) choi(b) has factors (out_a, in_a, out_b, in_b); tensor's Choi
  // has (out_a, out_b, in_a, in_b).
  ComplexMatrix rhs = permute_subsystems(kron(choi(a), choi(b)), {3, 2, 3, 2}, {0, 2, 1, 3});
  EXPECT_LT(max_abs(lhs, rhs), 1e-10);
}

TEST(Channels, RotatedDephasingFactorsIntoRotation) {
  for (double phi : {0.3, 1.1, -2.0}) {
    ComplexMatrix u = ComplexMatrix::Zero(2, 2);
    u(0, 0) = std::exp(-kI * phi / 2.0);
    u(1, 1) = std::exp(kI * phi / 2.0);
    Channel lhs = rotated_dephasing(0.15, phi);
    Channel rhs = compose(rotated_dephasing(0.15, 0.0), unitary_channel(u));
    EXPECT_LT(max_abs(choi(lhs), choi(rhs)), 1e-10);
  }
}

TEST(Channels, DepolarizingWeylBasisIsOrthogonal) {
  for (int d : {2, 3, 4}) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            Complex ip = (weyl_operator(d, a, b).adjoint() * weyl_operator(d, c, e)).trace();
            EXPECT_NEAR(std::abs(ip), (a == c && b == e) ? d : 0.0, 1e-12);
          }
  }
}

TEST(Channels, DepolarizingKrausWeights) {
  const int d = 3;
  const double p = 0.4;
  Channel ch = depolarizing(d, p);
  ASSERT_EQ(ch.rank(), d * d);
  EXPECT_NEAR(ch.kraus()[0](0, 0).real(), std::sqrt(1 - (d * d - 1) * p / (d * d)), 1e-14);
  Rng rng(18);
  ComplexMatrix rho = random_density(d, rng);
  ComplexMatrix want = (1 - p) * rho + p * ComplexMatrix::Identity(d, d) / double(d);
  EXPECT_LT(max_abs(covqec::apply(ch, rho), want), 1e-13);
}

TEST(Channels, HamiltonianFamilyDerivatives) {
  Hamiltonian h = testing_support::sz();
  ChannelFamily f = hamiltonian_channel_family(identity_channel(2), h);
  EXPECT_LT(max_abs(f.dkraus[0], -kI * h.matrix()), 1e-15);

  const double p = 0.3;
  ChannelFamily e = hamiltonian_channel_family(erasure(2, p), h);
  EXPECT_LT(max_abs(e.dkraus[0].topRows(2), -kI * std::sqrt(1 - p) * h.matrix()), 1e-14);
  for (size_t i = 1; i < e.kraus.size(); ++i) EXPECT_LT(max_abs(e.dkraus[i], -kI * e.kraus[i] * h.matrix()), 1e-15);

  ChannelFamily z = hamiltonian_channel_family(depolarizing(2, 0.5), Hamiltonian::zero(2));
  for (const auto& g : z.dkraus) EXPECT_EQ(g.norm(), 0.0);
  EXPECT_THROW(hamiltonian_channel_family(identity_channel(3), h), std::invalid_argument);
}

TEST(Channels, EvolutionMatchesExponential) {
  Hamiltonian h = testing_support::sz();
  ComplexMatrix u = evolution(h, 0.7);
  EXPECT_NEAR(std::abs(u(0, 0) - std::exp(-kI * 0.7)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(u(1, 1) - std::exp(kI * 0.7)), 0.0, 1e-14);
}

TEST(Channels, ApplyRejectsWrongDimension) {
  EXPECT_THROW(covqec::apply(identity_channel(2), ComplexMatrix::Identity(3, 3)), std::invalid_argument);
}
