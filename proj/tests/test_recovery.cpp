#include <cmath>
#include <numbers>

#include "oracles/oracle_values.hpp"
#include "support.hpp"

#include "covqec/bounds.hpp"
#include "covqec/recovery.hpp"

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

// For a qubit channel, <psi|(N (x) 1)(psi)|psi> = sum_a |Tr(rho K_a)|^2 with rho
// the reduced state, so the worst case is a convex minimum over the Bloch ball.
// Grid search followed by pattern search refinement.
double bloch_ball_worst(const Channel& ch) {
  auto fid = [&](double x, double y, double z) {
    ComplexMatrix rho = 0.5 * (ComplexMatrix::Identity(2, 2) + x * pauli_x() + y * pauli_y() + z * pauli_z());
    double f = 0.0;
    for (const auto& k : ch.kraus()) f += std::norm((rho * k).trace());
    return f;
  };
  double best = 2.0, bx = 0, by = 0, bz = 0;
  const int g = 46; // 46^3 ~ 1e5 grid points
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) {
        double x = -1 + 2.0 * i / (g - 1), y = -1 + 2.0 * j / (g - 1), z = -1 + 2.0 * k / (g - 1);
        if (x * x + y * y + z * z > 1.0) continue;
        double f = fid(x, y, z);
        if (f < best) best = f, bx = x, by = y, bz = z;
      }
  for (double h = 0.05; h > 1e-10;) {
    bool moved = false;
    for (int axis = 0; axis < 3; ++axis)
      for (double s : {-h, h}) {
        double x = bx + (axis == 0 ? s : 0), y = by + (axis == 1 ? s : 0), z = bz + (axis == 2 ? s : 0);
        double r = std::sqrt(x * x + y * y + z * z);
        if (r > 1.0) x /= r, y /= r, z /= r;
        double f = fid(x, y, z);
        if (f < best - 1e-15) best = f, bx = x, by = y, bz = z, moved = true;
      }
    if (!moved) h /= 2;
  }
  return 1.0 - best;
}

} // namespace

TEST(ChoiInfidelity, SimpleChannels) {
  EXPECT_NEAR(choi_infidelity(identity_channel(3)), 0.0, 1e-14);
  EXPECT_NEAR(choi_infidelity(depolarizing(2, 0.4)), 0.3, 1e-14);
  EXPECT_NEAR(choi_infidelity(dephasing(0.2)), 0.2, 1e-14);
}

TEST(ChoiRecoverySdp, TrivialCases) {
  ChoiRecovery id = optimal_choi_recovery(identity_channel(2));
  EXPECT_NEAR(id.choi_infidelity, 0.0, 1e-9);
  ChoiRecovery full = optimal_choi_recovery(depolarizing(2, 1.0));
  EXPECT_NEAR(full.choi_infidelity, 0.75, 1e-6);
  EXPECT_LE(full.lower_bound, full.choi_infidelity + 1e-12);
}

TEST(ChoiRecoverySdp, AmplitudeDampingOracle) {
  ChoiRecovery r = optimal_choi_recovery(amplitude_damping(0.3));
  EXPECT_NEAR(r.choi_infidelity, oracle::kAmplitudeDampingChoiInfidelity03, 1e-7);
  EXPECT_NEAR(choi_infidelity(compose(r.recovery, amplitude_damping(0.3))), r.choi_infidelity, 1e-12);
  EXPECT_LE(r.lower_bound, r.choi_infidelity + 1e-12);
  EXPECT_GE(r.lower_bound, r.choi_infidelity - 1e-8);
}

TEST(ChoiRecoverySdp, ThermoErasureOracles) {
  for (auto [n, want] : {std::pair{5, oracle::kThermo5ErasureChoi}, {9, oracle::kThermo9ErasureChoi}}) {
    ThermoEncoding enc(ThermoCodeSpec(n, 3), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
    ChoiRecovery r = optimal_choi_recovery(enc.encoded());
    EXPECT_NEAR(r.choi_infidelity, want, 1e-7) << "n=" << n;
    EXPECT_TRUE(r.symmetry_reduced);
    EXPECT_GT(r.lmi_blocks, 1);
  }
}

TEST(ChoiRecoverySdp, ThermoDepolarizingOracle) {
  ThermoEncoding enc(ThermoCodeSpec(5, 3), SingleSiteNoise::uniform(5, pauli_ordered_depolarizing()));
  ChoiRecovery r = optimal_choi_recovery(enc.encoded());
  EXPECT_NEAR(r.choi_infidelity, oracle::kThermo5DepolarizingChoi, 1e-7);
}

TEST(ChoiRecoverySdp, NoUnitaryBeatsTheOptimumForDepolarizing) {
  Channel noise = depolarizing(2, 0.3);
  double opt = optimal_choi_recovery(noise).choi_infidelity;
  EXPECT_NEAR(opt, 0.3 * 0.75, 1e-7);
  Rng rng(51);
  double best = 1.0;
  for (int k = 0; k < 2000; ++k)
    best = std::min(best, choi_infidelity(compose(unitary_channel(random_unitary(2, rng)), noise)));
  EXPECT_GE(best, opt - 1e-9);
}

TEST(ChoiRecoverySdp, RandomChannelsBeatIdentityRecovery) {
  Rng rng(52);
  for (int k = 0; k < 5; ++k) {
    Channel ch = random_channel(2, 3, 2, rng);
    ChoiRecovery r = optimal_choi_recovery(ch);
    EXPECT_LE(r.recovery.tp_residual(), 1e-9);
    EXPECT_NEAR(choi_infidelity(compose(r.recovery, ch)), r.choi_infidelity, 1e-9);
    EXPECT_LE(r.choi_infidelity - r.lower_bound, 1e-7);
  }
}

TEST(WorstCase, DephasingClosedForm) {
  for (double p : {0.05, 0.2})
    for (double phi : {0.0, 0.4}) {
      WorstCase w = worst_case_infidelity(rotated_dephasing(p, phi));
      EXPECT_TRUE(w.closed_form);
      EXPECT_NEAR(w.infidelity, dephasing_worst_infidelity(p, phi), 1e-14);
      EXPECT_NEAR(w.infidelity, bloch_ball_worst(rotated_dephasing(p, phi)), 1e-8);
    }
  EXPECT_NEAR(dephasing_worst_infidelity(0.1, 0.0), 0.1, 1e-15);
}

TEST(WorstCase, MultiStartMatchesBlochBallOracle) {
  Rng rng(53);
  std::vector<Channel> chans = {amplitude_damping(0.3), depolarizing(2, 0.2)};
  for (int k = 0; k < 3; ++k) chans.push_back(random_channel(2, 2, 2, rng));
  for (const auto& ch : chans) {
    WorstCase w = worst_case_infidelity(ch, kDefaultSeed, 50);
    EXPECT_FALSE(w.closed_form);
    EXPECT_NEAR(w.infidelity, bloch_ball_worst(ch), 1e-4);
  }
}

TEST(WorstCase, DominatesChoiInfidelity) {
  Rng rng(54);
  for (int k = 0; k < 5; ++k) {
    Channel ch = random_channel(3, 3, 2, rng);
    EXPECT_GE(worst_case_infidelity(ch, 7, 20).infidelity, choi_infidelity(ch) - 1e-9);
  }
}

TEST(WorstCase, SeedDeterminism) {
  Channel ch = amplitude_damping(0.2);
  EXPECT_EQ(worst_case_infidelity(ch, 11, 10).infidelity, worst_case_infidelity(ch, 11, 10).infidelity);
}

TEST(BenyOreshkov, NumericBlocksMatchClosedForm) {
  for (auto [n, m] : {std::pair{5, 3}, {7, 3}, {9, 5}}) {
    ThermoCodeSpec spec(n, m);
    auto numeric = beny_oreshkov_blocks(spec, SingleSiteNoise::uniform(n, pauli_ordered_depolarizing()));
    auto closed = beny_oreshkov_depolarizing_blocks(n, m);
    EXPECT_LE(max_abs(numeric.a, closed.a), 1e-12);
    EXPECT_LE(max_abs(numeric.b, closed.b), 1e-12);
    EXPECT_LE(numeric.cross_term, 1e-12);
  }
}

TEST(BenyOreshkov, ApproachesLeadingOrder) {
  const int m = 3;
  double prev = 1.0;
  for (int n : {27, 81, 243}) {
    double v = beny_oreshkov_infidelity(beny_oreshkov_depolarizing_blocks(n, m));
    double ratio = v / (3.0 * m * m / (4.0 * n * n));
    EXPECT_LT(std::abs(ratio - 1), prev);
    prev = std::abs(ratio - 1);
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(BenyOreshkov, OrderedDepolarizingIsDepolarizing) {
  EXPECT_LE(max_abs(choi(pauli_ordered_depolarizing()), choi(depolarizing(2, 1.0))), 1e-15);
  EXPECT_EQ(pauli_ordered_depolarizing().rank(), 4);
}

TEST(MeasureCode, IdentityNoise) {
  EncodedNoise enc = encoded_from_channel(identity_channel(2), sz());
  InfidelityEstimate est = measure_code(enc);
  EXPECT_NEAR(est.choi_infidelity, 0.0, 1e-9);
  EXPECT_NEAR(est.worst_upper, 0.0, 1e-8);
  EXPECT_LE(est.worst_lower, est.worst_upper);
}

TEST(MeasureCode, ThermoErasureSandwich) {
  const int n = 9, m = 3;
  ThermoEncoding enc(ThermoCodeSpec(n, m), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
  MeasureOptions mo;
  mo.explicit_recoveries.emplace_back("syndrome", thermo_erasure_recovery(enc));
  InfidelityEstimate est = measure_code(enc.encoded(), mo);
  double lower = ell1(double(m * m) / (4.0 * n * n));
  EXPECT_LE(lower, est.choi_infidelity);
  EXPECT_LE(est.choi_lower_bound, est.choi_infidelity + 1e-12);
  EXPECT_LE(est.choi_infidelity, est.worst_upper + 1e-12);
  EXPECT_NEAR(est.choi_infidelity, oracle::kThermo9ErasureChoi, 1e-7);
  EXPECT_LE(est.worst_upper, oracle::kThermoP9 + 1e-9);
  EXPECT_TRUE(est.recovery.has_value());
  EXPECT_FALSE(est.candidates.empty());
}

TEST(MeasureCode, DepolarizingStaysBelowBenyOreshkov) {
  const int n = 7, m = 3;
  ThermoEncoding enc(ThermoCodeSpec(n, m), SingleSiteNoise::uniform(n, pauli_ordered_depolarizing()));
  InfidelityEstimate est = measure_code(enc.encoded());
  EXPECT_LE(est.worst_upper, beny_oreshkov_infidelity(beny_oreshkov_depolarizing_blocks(n, m)) + 1e-8);
  EXPECT_LE(ell1(3.0 * m * m / (8.0 * n * n)), est.choi_infidelity);
}

TEST(LiftRecovery, ReproducesSupportValue) {
  const int n = 5, m = 3;
  ThermoCodeSpec spec(n, m);
  CovariantCode code = thermo_code(spec);
  SingleSiteNoise noise = SingleSiteNoise::uniform(n, erasure(2, 1.0), 0.4);
  EncodedNoise enc = encode_single_site_dense(code, noise);
  ASSERT_TRUE(enc.basis.has_value());
  ChoiRecovery opt = optimal_choi_recovery(enc);
  Channel lifted = lift_recovery(enc, opt.recovery);
  EXPECT_LE(lifted.tp_residual(), 1e-9);
  EXPECT_EQ(lifted.d_in(), 243);
  Channel eff = effective_logical_channel(code, single_site_noise_channel(noise), lifted);
  EXPECT_NEAR(choi_infidelity(eff), opt.choi_infidelity, 1e-9);
  EXPECT_THROW(lift_recovery(encoded_from_channel(identity_channel(2), sz()), identity_channel(2)),
               std::invalid_argument);
}
