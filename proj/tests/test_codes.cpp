#include <cmath>
#include <numbers>

#include "oracles/oracle_values.hpp"
#include "support.hpp"

#include "covqec/codes.hpp"
#include "covqec/dicke.hpp"
#include "covqec/encoded.hpp"
#include "covqec/recovery.hpp"

using namespace covqec;
using testing_support::max_abs;
using testing_support::sz;

namespace {

// a acting on site k of an n-qubit vector, site 0 most significant.
ComplexVector apply_site(const ComplexVector& v, int n, int k, const ComplexMatrix& a) {
  ComplexVector out = ComplexVector::Zero(v.size());
  const long stride = 1L << (n - 1 - k);
  for (long b = 0; b < v.size(); ++b) {
    int bit = static_cast<int>((b / stride) & 1);
    long base = b - bit * stride;
    for (int x = 0; x < 2; ++x) out[base + x * stride] += a(x, bit) * v[b];
  }
  return out;
}

ComplexVector dense_dicke(int n, int w) {
  ComplexVector v = ComplexVector::Zero(1L << n);
  for (long b = 0; b < v.size(); ++b) {
    int downs = __builtin_popcountl(static_cast<unsigned long>(b));
    if (n - downs == w) v[b] = 1.0;
  }
  return v / v.norm();
}

std::vector<ComplexMatrix> site_operators() {
  return {ComplexMatrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z(), testing_support::ket_bra(2, 0, 1),
          testing_support::ket_bra(2, 1, 1)};
}

Channel tilted_identity(double a) {
  ComplexMatrix u = (Complex(std::cos(a)) * ComplexMatrix::Identity(2, 2) - kI * std::sin(a) * pauli_x());
  return unitary_channel(u);
}

} // namespace

TEST(Dicke, BinomialsAndVectors) {
  EXPECT_NEAR(binomial(9, 6), 84.0, 1e-12);
  EXPECT_TRUE(std::isinf(log_binomial(3, 4)));
  for (int n = 1; n <= 8; ++n)
    for (int w = 0; w <= n; ++w) EXPECT_LE(max_abs(dicke_vector(n, w), dense_dicke(n, w)), 1e-14);
}

TEST(Dicke, SplitAmplitudes) {
  const int n = 6, w = 4;
  ComplexVector d = dicke_vector(n, w);
  // up on site 0: amplitude sqrt(C(5,3)/C(6,4))
  EXPECT_NEAR(dicke_split(n, w, 0), std::sqrt(10.0 / 15.0), 1e-15);
  EXPECT_NEAR(dicke_split(n, w, 0) * dicke_split(n, w, 0) + dicke_split(n, w, 1) * dicke_split(n, w, 1), 1.0,
              1e-15);
  EXPECT_NEAR(d.head(d.size() / 2).norm(), dicke_split(n, w, 0), 1e-14);
}

TEST(Dicke, SingleAndTwoSiteMatrixElementsExhaustive) {
  for (int n = 2; n <= 7; ++n)
    for (int w = 0; w <= n; ++w)
      for (int wp = std::max(0, w - 2); wp <= std::min(n, w + 2); ++wp) {
        ComplexVector bra = dicke_vector(n, w), ket = dicke_vector(n, wp);
        for (const auto& a : site_operators()) {
          Complex want = bra.dot(apply_site(ket, n, n / 2, a));
          EXPECT_NEAR(std::abs(dicke_single_site(n, w, wp, a) - want), 0.0, 1e-13);
          for (const auto& b : site_operators()) {
            Complex want2 = bra.dot(apply_site(apply_site(ket, n, n - 1, b), n, 0, a));
            EXPECT_NEAR(std::abs(dicke_two_site(n, w, wp, a, b) - want2), 0.0, 1e-13);
          }
        }
      }
}

TEST(ThermoSpec, ValidationAndCharges) {
  EXPECT_THROW(ThermoCodeSpec(4, 3), std::invalid_argument);
  EXPECT_THROW(ThermoCodeSpec(3, 5), std::invalid_argument);
  EXPECT_THROW(ThermoCodeSpec(3, 0), std::invalid_argument);
  ThermoCodeSpec s(9, 3);
  EXPECT_EQ(s.up_count(0), 6);
  EXPECT_EQ(s.up_count(1), 3);
  EXPECT_NEAR(s.h_l().delta(), 6.0, 1e-14);
}

TEST(ThermoSpec, CompressedMatrixElementsMatchDense) {
  for (int n = 4; n <= 12; ++n)
    for (int m = (n % 2 == 0 ? 4 : 3); m < n; m += 2) {
      ThermoCodeSpec spec(n, m);
      ComplexVector g[2] = {dense_dicke(n, spec.up_count(0)), dense_dicke(n, spec.up_count(1))};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (const auto& a : site_operators()) {
            Complex want = g[i].dot(apply_site(g[j], n, 0, a));
            EXPECT_NEAR(std::abs(spec.single_site(i, j, a) - want), 0.0, 1e-12) << n << "," << m;
            Complex want2 = g[i].dot(apply_site(apply_site(g[j], n, 1, pauli_x()), n, 0, a));
            EXPECT_NEAR(std::abs(spec.two_site(i, j, a, pauli_x()) - want2), 0.0, 1e-12);
          }
    }
}

TEST(ThermoSpec, MagnetizationPerSite) {
  for (auto [n, m] : {std::pair{9, 3}, {25, 3}, {8, 4}, {101, 7}}) {
    ThermoCodeSpec spec(n, m);
    EXPECT_NEAR(spec.single_site(0, 0, pauli_z()).real(), double(m) / n, 1e-13);
    EXPECT_NEAR(spec.single_site(1, 1, pauli_z()).real(), -double(m) / n, 1e-13);
    EXPECT_NEAR(std::abs(spec.single_site(0, 1, pauli_z())), 0.0, 1e-15);
  }
}

TEST(ThermoCode, DenseIsCovariant) {
  CovariantCode code = thermo_code(ThermoCodeSpec(5, 3));
  EXPECT_EQ(code.d_s(), 32);
  EXPECT_EQ(code.d_l(), 2);
  CovarianceCheck c = check_code(code);
  EXPECT_LE(c.residual, 1e-12);
  EXPECT_LE(c.isometry_residual, 1e-12);
  EXPECT_NEAR(total_sigma_z(5).delta(), 10.0, 1e-12);
  EXPECT_THROW(thermo_code(ThermoCodeSpec(kMaxDenseQubits + 1, 3)), std::invalid_argument);
}

TEST(ThermoCode, MakeCodeRejectsBadInput) {
  ComplexMatrix v = ComplexMatrix::Zero(2, 2);
  v(0, 0) = 1.0;
  v(1, 1) = 2.0;
  EXPECT_THROW(make_code(v, sz(), sz()), std::invalid_argument);
  EXPECT_THROW(make_code(ComplexMatrix::Identity(2, 2), sz(), Hamiltonian(pauli_x())), std::invalid_argument);
  EXPECT_NO_THROW(make_code(ComplexMatrix::Identity(2, 2), sz(), sz()));
}

TEST(Repetition, ExtensionIsCovariantAndExact) {
  Hamiltonian hl = Hamiltonian::diagonal({1, 0, -1});
  CovariantCode base = make_code(ComplexMatrix::Identity(3, 3), hl, hl);
  CovariantCode ext = repetition_extension(base);
  EXPECT_EQ(ext.d_l(), 2);
  EXPECT_LE(check_code(ext).residual, 1e-12);
  Channel rt = repetition_channel(identity_channel(3), hl);
  EXPECT_NEAR(choi_infidelity(rt), 0.0, 1e-12);
  ComplexMatrix enc = repetition_encoding(hl);
  EXPECT_EQ(enc.rows(), 6);
  EXPECT_LE(max_abs(enc.adjoint() * enc, ComplexMatrix::Identity(2, 2)), 1e-14);
}

TEST(Repetition, LogicalNoiseBecomesDephasing) {
  // Any logical channel on a qubit L reaches C as rotated dephasing.
  Rng rng(41);
  for (int k = 0; k < 5; ++k) {
    Channel ch = random_channel(2, 2, 3, rng);
    DephasingFit fit = fit_rotated_dephasing(repetition_channel(ch, sz()));
    EXPECT_LE(fit.residual, 1e-12);
  }
  EXPECT_THROW(repetition_channel(identity_channel(3), sz()), std::invalid_argument);
}

TEST(Repetition, RecoveryReadsAncilla) {
  Channel r = repetition_recovery(2);
  EXPECT_EQ(r.d_in(), 4);
  EXPECT_EQ(r.d_out(), 2);
  EXPECT_LE(r.tp_residual(), 1e-14);
  EXPECT_THROW(repetition_recovery(1), std::invalid_argument);
}

TEST(DephasingFit, RoundTrip) {
  for (double p : {0.0, 0.1, 0.4})
    for (double phi : {0.0, 0.3, -1.2}) {
      DephasingFit fit = fit_rotated_dephasing(rotated_dephasing(p, phi));
      EXPECT_NEAR(fit.p, p, 1e-13);
      if (p < 0.5) EXPECT_NEAR(std::remainder(fit.phi - phi, 2 * std::numbers::pi), 0.0, 1e-12);
      EXPECT_LE(fit.residual, 1e-12);
    }
  EXPECT_GT(fit_rotated_dephasing(depolarizing(2, 0.3)).residual, 1e-2);
}

TEST(Period, CommonPeriodOfCharges) {
  RealVector l(2), s(4), t(2);
  l << 1, -1;
  s << 3, 1, -1, -3;
  auto tau = common_period(l, s);
  ASSERT_TRUE(tau.has_value());
  EXPECT_NEAR(*tau, std::numbers::pi, 1e-12);
  t << 0.5, -0.5;
  EXPECT_NEAR(*common_period(t, t), 2 * std::numbers::pi, 1e-12);
  RealVector irr(2);
  irr << 0, std::sqrt(2.0);
  EXPECT_FALSE(common_period(t, irr).has_value());
}

TEST(Twirl, TiltedRecoveryBecomesCovariant) {
  Hamiltonian h = sz();
  RealVector spec = h.diagonal_values();
  double tau = *common_period(spec, spec);
  Channel tilted = tilted_identity(0.2);
  std::vector<double> thetas = {0.3, 1.1, 2.0, 2.9};
  EXPECT_GE(channel_covariance_residual(tilted, h, h, thetas), 1e-2);
  Channel tw = twirl_recovery(tilted, h, h, tau);
  EXPECT_LE(channel_covariance_residual(tw, h, h, thetas), 1e-9);
  EXPECT_LE(tw.tp_residual(), 1e-12);
}

TEST(Twirl, CovariantRecoveryIsFixed) {
  Hamiltonian h = sz();
  Channel deph = dephasing(0.3);
  Channel tw = twirl_recovery(deph, h, h, std::numbers::pi);
  EXPECT_LE(max_abs(choi(tw), choi(deph)), 1e-12);
}

TEST(Twirl, DoesNotWorsenChoiFidelityOfCovariantNoise) {
  // Noise and target are covariant, so the twirl keeps the Choi fidelity.
  Hamiltonian h = sz();
  Channel noise = dephasing(0.2);
  Channel rec = tilted_identity(0.15);
  double before = choi_infidelity(compose(rec, noise));
  double after = choi_infidelity(compose(twirl_recovery(rec, h, h, std::numbers::pi), noise));
  EXPECT_NEAR(after, before, 1e-12);
}

TEST(Twirl, RejectsMismatchedInput) {
  EXPECT_THROW(twirl_recovery(identity_channel(2), sz(3), sz(), 1.0), std::invalid_argument);
  EXPECT_THROW(twirl_recovery(identity_channel(2), sz(), sz(), 0.0), std::invalid_argument);
  Hamiltonian irr = Hamiltonian::diagonal({0.0, std::sqrt(2.0)});
  EXPECT_THROW(twirl_recovery(identity_channel(2), sz(), irr, std::numbers::pi), std::invalid_argument);
}

TEST(Syndrome, OrthonormalityAndDump) {
  std::vector<std::vector<ComplexVector>> fam = {{testing_support::basis(4, 0), testing_support::basis(4, 1)}};
  Channel r = syndrome_recovery(4, 2, fam, 1);
  EXPECT_LE(r.tp_residual(), 1e-14);
  ComplexMatrix out = covqec::apply(r, testing_support::ket_bra(4, 3, 3));
  EXPECT_NEAR(out(1, 1).real(), 1.0, 1e-14);
  std::vector<std::vector<ComplexVector>> bad = {{testing_support::basis(4, 0), testing_support::basis(4, 0)}};
  EXPECT_THROW(syndrome_recovery(4, 2, bad), std::invalid_argument);
  EXPECT_THROW(syndrome_recovery(4, 2, fam, 2), std::invalid_argument);
}

TEST(Syndrome, DenseAndCompressedErasureRecoveriesAgree) {
  const int n = 5, m = 3;
  ThermoCodeSpec spec(n, m);
  CovariantCode code = thermo_code(spec);
  SingleSiteNoise noise = SingleSiteNoise::uniform(n, erasure(2, 1.0));
  Channel dense = effective_logical_channel(code, single_site_noise_channel(noise),
                                            thermo_erasure_recovery_dense(spec));
  ThermoEncoding enc(spec, noise);
  Channel compressed = effective_logical_channel(enc.encoded(), thermo_erasure_recovery(enc));
  EXPECT_LE(max_abs(choi(dense), choi(compressed)), 1e-12);
  DephasingFit fit = fit_rotated_dephasing(dense);
  EXPECT_NEAR(fit.p, oracle::kThermoP5, 1e-12);
  EXPECT_LE(fit.residual, 1e-12);
  EXPECT_THROW(thermo_erasure_recovery_dense(ThermoCodeSpec(7, 3)), std::invalid_argument);
}

TEST(Syndrome, ErasureRecoveryGivesDephasingForLargeN) {
  for (auto [n, want] : {std::pair{9, oracle::kThermoP9}, {25, oracle::kThermoP25}}) {
    ThermoEncoding enc(ThermoCodeSpec(n, 3), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
    DephasingFit fit = fit_rotated_dephasing(effective_logical_channel(enc.encoded(), thermo_erasure_recovery(enc)));
    EXPECT_NEAR(fit.p, want, 1e-12);
    EXPECT_NEAR(fit.phi, 0.0, 1e-12);
    EXPECT_LE(fit.residual, 1e-10);
  }
}

TEST(Encoding, DenseAndCompressedSupportsAgree) {
  const int n = 5, m = 3;
  ThermoCodeSpec spec(n, m);
  for (const Channel& site : {erasure(2, 1.0), pauli_ordered_depolarizing()}) {
    SingleSiteNoise noise = SingleSiteNoise::uniform(n, site, 0.3);
    EncodedNoise dense = encode_single_site_dense(thermo_code(spec), noise);
    ThermoEncoding comp(spec, noise);
    ASSERT_EQ(dense.support_dim(), comp.encoded().support_dim());
    // The output state for a maximally mixed input is basis independent up to its spectrum.
    auto spectrum = [](const EncodedNoise& e) {
      ComplexMatrix out = ComplexMatrix::Zero(e.support_dim(), e.support_dim());
      for (const auto& a : e.kraus) out += a * a.adjoint() / double(e.d_l());
      return hermitian_eigensystem(out).values;
    };
    EXPECT_LE((spectrum(dense) - spectrum(comp.encoded())).cwiseAbs().maxCoeff(), 1e-12);
    double cd = optimal_choi_recovery(dense).choi_infidelity;
    double cc = optimal_choi_recovery(comp.encoded()).choi_infidelity;
    EXPECT_NEAR(cd, cc, 1e-7);
  }
}

TEST(Encoding, NoiseValidation) {
  SingleSiteNoise bad = SingleSiteNoise::uniform(3, erasure(2, 1.0));
  bad.q[0] = 0.9;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
