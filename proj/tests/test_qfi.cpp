#include <cmath>

#include "oracles/oracle_values.hpp"
#include "support.hpp"

#include "covqec/qfi.hpp"

using namespace covqec;
using testing_support::max_abs;
using testing_support::sz;

namespace {

Channel amplitude_damping(double g) {
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2), k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1 - g);
  k1(0, 1) = std::sqrt(g);
  return Channel({k0, k1});
}

// 4 ||alpha(h)|| with alpha = sum_ab (dK_a + i h_ab K_b)^dag (dK_a + i h_ab K_b).
double alpha_objective(const std::vector<ComplexMatrix>& k, const std::vector<ComplexMatrix>& dk,
                       const ComplexMatrix& h) {
  ComplexMatrix alpha = ComplexMatrix::Zero(k[0].cols(), k[0].cols());
  for (size_t a = 0; a < k.size(); ++a) {
    ComplexMatrix d = dk[a];
    for (size_t b = 0; b < k.size(); ++b) d += kI * h(a, b) * k[b];
    alpha += d.adjoint() * d;
  }
  return 4 * operator_norm(alpha);
}

} // namespace

TEST(Hks, DephasingSpansOnlyZ) {
  Channel ch = dephasing(0.2);
  EXPECT_TRUE(hks_check(ch, sz()).satisfied);
  SpanCheck x = hks_check(ch, Hamiltonian(pauli_x()));
  EXPECT_FALSE(x.satisfied);
  EXPECT_GE(x.residual_norm, 1e-6 * pauli_x().norm());
}

TEST(Hks, ErasureSpansEverything) {
  Rng rng(21);
  for (int d : {2, 3}) {
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(hks_check(erasure(d, 0.2), Hamiltonian(random_hermitian(d, rng))).satisfied);
  }
}

TEST(StateQfi, PurePlusUnderZIsFour) {
  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  ComplexMatrix rho = plus * plus.adjoint();
  ComplexMatrix h = pauli_z();
  ComplexMatrix drho = -kI * (h * rho - rho * h);
  EXPECT_NEAR(sld_qfi_state(rho, drho), 4.0, 1e-10);
  EXPECT_EQ(sld_qfi_state(rho, ComplexMatrix::Zero(2, 2)), 0.0);
}

TEST(StateQfi, DiagonalCaseIsClassicalFisher) {
  // rho(t) = diag(0.3 + t, 0.7 - t): classical Fisher information 1/0.3 + 1/0.7.
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2), drho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 0.3;
  rho(1, 1) = 0.7;
  drho(0, 0) = 1.0;
  drho(1, 1) = -1.0;
  EXPECT_NEAR(sld_qfi_state(rho, drho), 1 / 0.3 + 1 / 0.7, 1e-12);
}

TEST(StateQfi, RldFiniteness) {
  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_FALSE(rld_qfi_state(plus * plus.adjoint(), sz()).is_finite());
  QfiValue mixed = rld_qfi_state(ComplexMatrix::Identity(2, 2) / 2.0, sz());
  ASSERT_TRUE(mixed.is_finite());
  EXPECT_NEAR(mixed.value(), 0.0, 1e-12);
}

TEST(StateQfi, RldAboveNearPureBound) {
  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  ComplexMatrix rho = 0.99 * plus * plus.adjoint() + 0.01 * ComplexMatrix::Identity(2, 2) / 2.0;
  QfiValue f = rld_qfi_state(rho, sz());
  ASSERT_TRUE(f.is_finite());
  EXPECT_GE(f.value(), sld_qfi_state(rho, -kI * (sz().matrix() * rho - rho * sz().matrix())) - 1e-9);
}

TEST(ChannelQfi, ErasureClosedForm) {
  for (double p : {0.1, 0.3, 0.5, 0.9}) {
    QfiValue q = sld_qfi_channel_regularized(erasure(2, p), sz());
    ASSERT_TRUE(q.is_finite());
    EXPECT_NEAR(q.value(), 4 * (1 - p) / p, 1e-5 * q.value());
    EXPECT_DOUBLE_EQ(erasure_sld_qfi(p, 2.0), 4 * (1 - p) / p);
  }
  EXPECT_NEAR(sld_qfi_channel_regularized(erasure(2, 0.5), sz()).value(), 4.0, 4e-5);
}

TEST(ChannelQfi, QubitDepolarizingClosedForm) {
  for (double p : {0.1, 0.3, 0.5, 0.9}) {
    double want = 4 * 2 * (1 - p) * (1 - p) / (p * (3 - 2 * p));
    QfiValue q = sld_qfi_channel_regularized(depolarizing(2, p), sz());
    ASSERT_TRUE(q.is_finite());
    EXPECT_NEAR(q.value(), want, 1e-5 * want);
    EXPECT_NEAR(qubit_depolarizing_sld_qfi(p, 2.0), want, 1e-12);
  }
}

TEST(ChannelQfi, AmplitudeDampingAgainstIndependentSdp) {
  QfiValue q = sld_qfi_channel_regularized(amplitude_damping(0.3), sz());
  ASSERT_TRUE(q.is_finite());
  EXPECT_NEAR(q.value(), oracle::kAmplitudeDampingQfi03, 1e-6 * oracle::kAmplitudeDampingQfi03);
}

TEST(ChannelQfi, CertificateReproducesObjective) {
  Rng rng(22);
  for (int k = 0; k < 5; ++k) {
    Channel ch = random_channel(2, 2, 3, rng);
    Hamiltonian h(random_hermitian(2, rng));
    QfiValue q = sld_qfi_channel_regularized(ch, h);
    ASSERT_TRUE(q.is_finite());
    ASSERT_TRUE(q.sdp().has_value());
    const SdpSolution& s = *q.sdp();
    EXPECT_LE(s.primal_residual, 1e-8);
    EXPECT_LE(s.dual_gap, 1e-6 * std::max(1.0, s.objective));
    // the solver works on the minimal Kraus set
    ChannelFamily f = hamiltonian_channel_family(minimal_kraus(ch), h);
    EXPECT_NEAR(alpha_objective(f.kraus, f.dkraus, s.h), s.objective, 1e-6 * std::max(1.0, s.objective));
  }
}

TEST(ChannelQfi, HksViolationIsInfinite) {
  QfiValue q = sld_qfi_channel_regularized(dephasing(0.2), Hamiltonian(pauli_x()));
  EXPECT_FALSE(q.is_finite());
  EXPECT_THROW(q.value(), std::logic_error);
  EXPECT_GT(q.certificate().norm(), 0.0);
}

TEST(ChannelQfi, HksAgreesWithSdpOnRandomInstances) {
  Rng rng(23);
  std::uniform_int_distribution<int> dim(2, 3), rank(1, 3);
  int infinite = 0;
  for (int k = 0; k < 100; ++k) {
    int d = dim(rng);
    Channel ch = random_channel(d, d, rank(rng), rng);
    Hamiltonian h(random_hermitian(d, rng));
    bool fin = sld_qfi_channel_regularized(ch, h).is_finite();
    EXPECT_EQ(hks_check(ch, h).satisfied, fin) << "instance " << k;
    infinite += fin ? 0 : 1;
  }
  EXPECT_GT(infinite, 0);
  EXPECT_LT(infinite, 100);
}

TEST(ChannelQfi, ZeroHamiltonianGivesZero) {
  EXPECT_NEAR(sld_qfi_channel_regularized(depolarizing(2, 0.3), Hamiltonian::zero(2)).value(), 0.0, 1e-9);
  EXPECT_NEAR(rld_qfi_channel(depolarizing(2, 0.3), Hamiltonian::zero(2)).value(), 0.0, 1e-9);
}

TEST(GenericFamily, RotatedDephasingAngleFamily) {
  const double p = 0.2;
  Channel ch = rotated_dephasing(p, 0.0);
  // d/dtheta of e^{-i theta Z/2} K at theta = 0.
  std::vector<ComplexMatrix> dk;
  for (const auto& k : ch.kraus()) dk.push_back(-kI * 0.5 * pauli_z() * k);
  QfiValue q = sld_qfi_generic_family(ch.kraus(), dk);
  ASSERT_TRUE(q.is_finite());
  EXPECT_NEAR(q.value(), oracle::kDephasingFamily02, 1e-6);
  EXPECT_NEAR(rotated_dephasing_sld_qfi(p, 1.0), oracle::kDephasingFamily02, 1e-14);
}

TEST(GenericFamily, HamiltonianFamilyMatchesChannelRoute) {
  Rng rng(24);
  for (int k = 0; k < 4; ++k) {
    Channel ch = random_channel(2, 3, 2, rng);
    Hamiltonian h(random_hermitian(2, rng));
    ChannelFamily f = hamiltonian_channel_family(ch, h);
    QfiValue a = sld_qfi_channel_regularized(ch, h);
    QfiValue b = sld_qfi_generic_family(f.kraus, f.dkraus);
    ASSERT_EQ(a.is_finite(), b.is_finite());
    if (a.is_finite()) EXPECT_NEAR(a.value(), b.value(), 1e-6 * std::max(1.0, a.value()));
  }
}

TEST(GenericFamily, ZeroDerivativesGiveZero) {
  Channel ch = depolarizing(2, 0.4);
  std::vector<ComplexMatrix> dk(ch.kraus().size(), ComplexMatrix::Zero(2, 2));
  EXPECT_NEAR(sld_qfi_generic_family(ch.kraus(), dk).value(), 0.0, 1e-9);
}

TEST(RldChannel, DepolarizingClosedForm) {
  QfiValue q = rld_qfi_channel(depolarizing(2, 0.5), sz());
  ASSERT_TRUE(q.is_finite());
  EXPECT_NEAR(q.value(), 2.4, 2.4e-6);
  QfiValue q3 = rld_qfi_channel(depolarizing(3, 0.3), sz(3));
  ASSERT_TRUE(q3.is_finite());
  EXPECT_NEAR(q3.value(), oracle::kRldDepolarizing3, 1e-6 * oracle::kRldDepolarizing3);
  EXPECT_NEAR(depolarizing_rld_qfi(3, 0.3, 4.0, 8.0), oracle::kRldDepolarizing3, 1e-10);
}

TEST(RldChannel, IdentityViolatesConditionR) {
  EXPECT_FALSE(rld_qfi_channel(identity_channel(2), sz()).is_finite());
  EXPECT_FALSE(r_condition(identity_channel(2), sz()).satisfied);
  EXPECT_TRUE(r_condition(depolarizing(2, 0.2), sz()).satisfied);
}

TEST(RldChannel, DominatesRegularizedSld) {
  Rng rng(25);
  int compared = 0;
  for (int k = 0; k < 15; ++k) {
    Channel ch = random_channel(2, 2, 4, rng);
    Hamiltonian h(random_hermitian(2, rng));
    QfiValue fr = rld_qfi_channel(ch, h), fs = sld_qfi_channel_regularized(ch, h);
    if (fr.is_finite() && fs.is_finite()) {
      EXPECT_GE(fr.value(), fs.value() - 1e-6);
      ++compared;
    }
  }
  EXPECT_GT(compared, 10);
}

TEST(Additivity, TensorProductOfTwoQubitChannels) {
  Rng rng(26);
  ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  for (int k = 0; k < 5; ++k) {
    Channel n = random_channel(2, 2, 2, rng), m = random_channel(2, 2, 3, rng);
    Hamiltonian hn(random_hermitian(2, rng)), hm(random_hermitian(2, rng));
    QfiValue fn = sld_qfi_channel_regularized(n, hn), fm = sld_qfi_channel_regularized(m, hm);
    ASSERT_TRUE(fn.is_finite() && fm.is_finite());
    Hamiltonian hnm(kron(hn.matrix(), id2) + kron(id2, hm.matrix()));
    QfiValue fnm = sld_qfi_channel_regularized(tensor(n, m), hnm);
    ASSERT_TRUE(fnm.is_finite());
    EXPECT_NEAR(fnm.value(), fn.value() + fm.value(), 1e-4 * (1 + fn.value() + fm.value()));
  }
}

TEST(DepolarizingBound, ClosedFormAndOrdering) {
  EXPECT_NEAR(sld_upper_bound_depolarizing(2, 0.5, 2.0), 2.0, 1e-14);
  EXPECT_NEAR(sld_upper_bound_depolarizing(3, 1.0, 2.0), 0.0, 1e-14);
  QfiValue q = sld_qfi_channel_regularized(depolarizing(4, 0.3), Hamiltonian::diagonal({1, -1, 1, -1}));
  ASSERT_TRUE(q.is_finite());
  EXPECT_LE(q.value(), sld_upper_bound_depolarizing(4, 0.3, 2.0) + 1e-6);
}
