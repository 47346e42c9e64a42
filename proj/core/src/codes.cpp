#include "covqec/codes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "covqec/dicke.hpp"

namespace covqec {

namespace {

ComplexMatrix apply_ham(const Hamiltonian& h, const ComplexMatrix& v) {
  if (h.is_diagonal()) return h.diagonal_values().cast<Complex>().asDiagonal() * v;
  return h.matrix() * v;
}

// Operator norm of a tall matrix through its small Gram matrix.
double tall_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  ComplexMatrix g = m.adjoint() * m;
  double top = hermitian_eigensystem(g).values.maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

struct Extremes {
  ComplexMatrix basis; // columns: top, bottom, then the rest
};

// Eigenbasis of h_l ordered as (top, bottom, others). Ties go to the lowest index.
Extremes extremes(const Hamiltonian& h_l) {
  if (h_l.is_zero()) throw std::invalid_argument("repetition: H_L has no distinct extremes");
  const int d = h_l.dim();
  ComplexMatrix vecs;
  RealVector vals;
  if (h_l.is_diagonal()) {
    vecs = ComplexMatrix::Identity(d, d);
    vals = h_l.diagonal_values();
  } else {
    auto es = hermitian_eigensystem(h_l.matrix());
    vecs = es.vectors;
    vals = es.values;
  }
  const double tol = 1e-12 * std::max(1.0, h_l.opnorm());
  double top = vals.maxCoeff(), bottom = vals.minCoeff();
  int it = -1, ib = -1;
  for (int i = 0; i < d; ++i) {
    if (it < 0 && vals[i] >= top - tol) it = i;
    if (ib < 0 && vals[i] <= bottom + tol) ib = i;
  }
  Extremes e;
  e.basis.resize(d, d);
  e.basis.col(0) = vecs.col(it);
  e.basis.col(1) = vecs.col(ib);
  int c = 2;
  for (int i = 0; i < d; ++i)
    if (i != it && i != ib) e.basis.col(c++) = vecs.col(i);
  return e;
}

// Base-3 index of an n-bit qubit configuration (digits kept, 2 reserved for vac).
long ternary_of(long bits, int n) {
  long t = 0;
  for (int k = 0; k < n; ++k) {
    long digit = (bits >> (n - 1 - k)) & 1L;
    t = 3 * t + digit;
  }
  return t;
}

} // namespace

CovarianceCheck check_code(const CovariantCode& code) {
  const auto& v = code.isometry;
  if (code.h_l.dim() != code.d_l() || code.h_s.dim() != code.d_s())
    throw std::invalid_argument("code: Hamiltonian dimensions do not match the isometry");
  CovarianceCheck c;
  ComplexMatrix gram = v.adjoint() * v - ComplexMatrix::Identity(code.d_l(), code.d_l());
  c.isometry_residual = operator_norm(gram);
  ComplexMatrix diff = apply_ham(code.h_s, v) - v * code.h_l.matrix();
  c.shift = (v.adjoint() * diff).trace().real() / code.d_l();
  diff -= c.shift * v;
  c.residual = tall_norm(diff);
  return c;
}

CovariantCode make_code(ComplexMatrix v, Hamiltonian h_l, Hamiltonian h_s,
                        std::optional<double> period) {
  CovariantCode code{std::move(v), std::move(h_l), std::move(h_s), period};
  auto c = check_code(code);
  if (c.isometry_residual > 1e-10)
    throw std::invalid_argument("code: encoding is not an isometry (residual " +
                                std::to_string(c.isometry_residual) + ")");
  if (c.residual > 1e-9 * (1.0 + code.h_s.opnorm()))
    throw std::invalid_argument("code: encoding is not covariant (residual " +
                                std::to_string(c.residual) + ")");
  return code;
}

ThermoCodeSpec::ThermoCodeSpec(int n_, int m_) : n(n_), m(m_) {
  if (m < 3 || m >= n) throw std::invalid_argument("thermo code: need 3 <= m < n");
  if ((n + m) % 2 != 0) throw std::invalid_argument("thermo code: n + m must be even");
}

Hamiltonian ThermoCodeSpec::h_l() const { return Hamiltonian::diagonal({double(m), double(-m)}); }

Complex ThermoCodeSpec::single_site(int i, int j, const ComplexMatrix& a) const {
  return dicke_single_site(n, up_count(i), up_count(j), a);
}

Complex ThermoCodeSpec::two_site(int i, int j, const ComplexMatrix& a, const ComplexMatrix& b) const {
  return dicke_two_site(n, up_count(i), up_count(j), a, b);
}

Hamiltonian total_sigma_z(int n) {
  if (n < 1 || n > kMaxDenseQubits) throw std::invalid_argument("total_sigma_z: n out of range");
  const long dim = 1L << n;
  std::vector<double> d(static_cast<size_t>(dim));
  for (long j = 0; j < dim; ++j)
    d[static_cast<size_t>(j)] = n - 2.0 * __builtin_popcountl(static_cast<unsigned long>(j));
  return Hamiltonian::diagonal(d);
}

CovariantCode thermo_code(const ThermoCodeSpec& spec) {
  if (spec.n > kMaxDenseQubits)
    throw std::invalid_argument("thermo_code: dense mode is limited to n <= 20");
  ComplexMatrix v(1L << spec.n, 2);
  v.col(0) = dicke_vector(spec.n, spec.up_count(0));
  v.col(1) = dicke_vector(spec.n, spec.up_count(1));
  // Every charge has the parity of n, so theta = pi is a period up to a phase.
  return make_code(std::move(v), spec.h_l(), total_sigma_z(spec.n), std::numbers::pi);
}

ComplexMatrix repetition_encoding(const Hamiltonian& h_l) {
  auto e = extremes(h_l);
  const int d = h_l.dim();
  ComplexMatrix enc = ComplexMatrix::Zero(2 * d, 2);
  for (int l = 0; l < d; ++l) {
    enc(2 * l + 0, 0) = e.basis(l, 0);
    enc(2 * l + 1, 1) = e.basis(l, 1);
  }
  return enc;
}

CovariantCode repetition_extension(const CovariantCode& code) {
  auto e = extremes(code.h_l);
  const int ds = code.d_s();
  ComplexVector top = code.isometry * e.basis.col(0);
  ComplexVector bottom = code.isometry * e.basis.col(1);
  ComplexMatrix v = ComplexMatrix::Zero(2L * ds, 2);
  for (int s = 0; s < ds; ++s) {
    v(2 * s + 0, 0) = top[s];
    v(2 * s + 1, 1) = bottom[s];
  }
  double half = 0.5 * code.h_l.delta();
  Hamiltonian h_c = Hamiltonian::diagonal({half, -half});
  if (code.h_s.is_diagonal()) {
    const RealVector& hs = code.h_s.diagonal_values();
    std::vector<double> d(2 * static_cast<size_t>(ds));
    for (int s = 0; s < ds; ++s) d[2 * s] = d[2 * s + 1] = hs[s];
    return make_code(std::move(v), h_c, Hamiltonian::diagonal(d), code.period);
  }
  return make_code(std::move(v), h_c,
                   Hamiltonian(kron(code.h_s.matrix(), ComplexMatrix::Identity(2, 2))), code.period);
}

Channel repetition_recovery(int d_l) {
  if (d_l < 2) throw std::invalid_argument("repetition_recovery: d_L must be at least 2");
  auto idx = [](int l, int a) { return 2 * l + a; };
  std::vector<ComplexMatrix> ks;
  ComplexMatrix k = ComplexMatrix::Zero(2, 2 * d_l);
  k(0, idx(0, 0)) = 1.0;
  k(1, idx(1, 1)) = 1.0;
  ks.push_back(k);
  k.setZero();
  // a flipped L is still read out through the ancilla
  k(0, idx(1, 0)) = 1.0;
  k(1, idx(0, 1)) = 1.0;
  ks.push_back(k);
  for (int i = 2; i < d_l; ++i) {
    k.setZero();
    k(0, idx(i, 0)) = 1.0;
    k(1, idx(i, 1)) = 1.0;
    ks.push_back(k);
  }
  return Channel(std::move(ks));
}

Channel repetition_recovery(const Hamiltonian& h_l) {
  auto e = extremes(h_l);
  ComplexMatrix change = kron(e.basis.adjoint(), ComplexMatrix::Identity(2, 2));
  const Channel base = repetition_recovery(h_l.dim());
  std::vector<ComplexMatrix> ks;
  for (const auto& k : base.kraus()) ks.push_back(k * change);
  return Channel(std::move(ks));
}

Channel repetition_channel(const Channel& logical, const Hamiltonian& h_l) {
  if (logical.d_in() != h_l.dim() || logical.d_out() != h_l.dim())
    throw std::invalid_argument("repetition_channel: logical channel does not act on L");
  Channel enc = isometry_channel(repetition_encoding(h_l));
  Channel mid = compose(tensor(logical, identity_channel(2)), enc);
  return minimal_kraus(compose(repetition_recovery(h_l), mid));
}

Channel effective_logical_channel(const CovariantCode& code, const Channel& noise,
                                  const Channel& recovery) {
  if (noise.d_in() != code.d_s() || recovery.d_in() != noise.d_out() ||
      recovery.d_out() != code.d_l())
    throw std::invalid_argument("effective_logical_channel: dimension chain does not match");
  Channel enc = isometry_channel(code.isometry);
  return minimal_kraus(compose(recovery, compose(noise, enc)));
}

DephasingFit fit_rotated_dephasing(const Channel& ch) {
  if (ch.d_in() != 2 || ch.d_out() != 2)
    throw std::invalid_argument("fit_rotated_dephasing: needs a qubit channel");
  ComplexMatrix e01 = ComplexMatrix::Zero(2, 2);
  e01(0, 1) = 1.0;
  Complex c = covqec::apply(ch, e01)(0, 1);
  DephasingFit fit;
  fit.p = std::clamp((1.0 - std::abs(c)) / 2.0, 0.0, 1.0);
  fit.phi = std::abs(c) > 0.0 ? -std::arg(c) : 0.0;
  fit.residual = operator_norm(choi(ch) - choi(rotated_dephasing(fit.p, fit.phi)));
  return fit;
}

std::optional<double> common_period(const RealVector& l_spectrum, const RealVector& s_spectrum) {
  std::vector<double> diffs;
  double scale = 1.0;
  for (const RealVector* v : {&l_spectrum, &s_spectrum}) {
    if (v->size() == 0) continue;
    RealVector u = *v;
    std::sort(u.begin(), u.end());
    scale = std::max(scale, u.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 1; i < u.size(); ++i) {
      double d = u[i] - u[0];
      if (d > 1e-12 * scale && (diffs.empty() || std::abs(d - diffs.back()) > 1e-12 * scale))
        diffs.push_back(d);
    }
  }
  if (diffs.empty()) return 2.0 * std::numbers::pi;
  double dmin = *std::min_element(diffs.begin(), diffs.end());
  for (int k = 1; k <= 64; ++k) {
    double g = dmin / k;
    bool ok = true;
    for (double d : diffs) {
      double r = d / g;
      if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
        ok = false;
        break;
      }
    }
    if (ok) return 2.0 * std::numbers::pi / g;
  }
  return std::nullopt;
}

Channel twirl_recovery(const Channel& rec, const Hamiltonian& h_l, const Hamiltonian& h_s,
                       double tau) {
  if (rec.d_in() != h_s.dim() || rec.d_out() != h_l.dim())
    throw std::invalid_argument("twirl_recovery: Hamiltonians do not match the recovery");
  if (!h_l.is_diagonal() || !h_s.is_diagonal())
    throw std::invalid_argument("twirl_recovery: Hamiltonians must be diagonal");
  if (!(tau > 0.0)) throw std::invalid_argument("twirl_recovery: period must be positive");
  const double g = 2.0 * std::numbers::pi / tau;
  const RealVector& dl = h_l.diagonal_values();
  const RealVector& ds = h_s.diagonal_values();
  double cmin = dl.minCoeff() - ds.maxCoeff();
  double cmax = dl.maxCoeff() - ds.minCoeff();
  for (Eigen::Index l = 0; l < dl.size(); ++l)
    for (Eigen::Index x = 0; x < ds.size(); ++x) {
      double r = (dl[l] - ds[x] - cmin) / g;
      if (std::abs(r - std::round(r)) > 1e-8 * std::max(1.0, r))
        throw std::invalid_argument("twirl_recovery: no common period");
    }
  const int n_phi = static_cast<int>(std::lround((cmax - cmin) / g)) + 1;

  ComplexMatrix acc = ComplexMatrix::Zero(rec.d_out() * rec.d_in(), rec.d_out() * rec.d_in());
  for (int j = 0; j < n_phi; ++j) {
    double theta = tau * j / n_phi;
    ComplexMatrix ul = evolution(h_l, theta);
    ComplexMatrix us_dag = evolution(h_s, -theta);
    std::vector<ComplexMatrix> ks;
    for (const auto& k : rec.kraus()) ks.push_back(ul * k * us_dag);
    acc += choi(Channel(std::move(ks)));
  }
  acc /= static_cast<double>(n_phi);
  return channel_from_choi(hermitian_part(acc), rec.d_in(), rec.d_out());
}

double channel_covariance_residual(const Channel& ch, const Hamiltonian& h_in,
                                   const Hamiltonian& h_out, const std::vector<double>& thetas) {
  ComplexMatrix base = choi(ch);
  double worst = 0.0;
  for (double theta : thetas) {
    ComplexMatrix uo = evolution(h_out, -theta);
    ComplexMatrix ui = evolution(h_in, theta);
    std::vector<ComplexMatrix> ks;
    for (const auto& k : ch.kraus()) ks.push_back(uo * k * ui);
    worst = std::max(worst, operator_norm(choi(Channel(std::move(ks))) - base));
  }
  return worst;
}

Channel syndrome_recovery(int input_dim, int d_l,
                          const std::vector<std::vector<ComplexVector>>& families, int dump) {
  if (dump < 0 || dump >= d_l) throw std::invalid_argument("syndrome_recovery: bad dump state");
  std::vector<ComplexVector> all;
  std::vector<ComplexMatrix> ks;
  for (const auto& fam : families) {
    if (static_cast<int>(fam.size()) > d_l)
      throw std::invalid_argument("syndrome_recovery: family larger than the logical space");
    ComplexMatrix k = ComplexMatrix::Zero(d_l, input_dim);
    for (size_t i = 0; i < fam.size(); ++i) {
      if (fam[i].size() != input_dim) throw std::invalid_argument("syndrome_recovery: bad vector size");
      k.row(static_cast<Eigen::Index>(i)) = fam[i].adjoint();
      all.push_back(fam[i]);
    }
    ks.push_back(std::move(k));
  }
  ComplexMatrix s(input_dim, static_cast<Eigen::Index>(all.size()));
  for (size_t i = 0; i < all.size(); ++i) s.col(static_cast<Eigen::Index>(i)) = all[i];
  ComplexMatrix gram = s.adjoint() * s;
  if (operator_norm(gram - ComplexMatrix::Identity(gram.rows(), gram.cols())) > 1e-10)
    throw std::invalid_argument("syndrome_recovery: syndrome states are not orthonormal");
  ComplexMatrix rest = ComplexMatrix::Identity(input_dim, input_dim) - s * s.adjoint();
  auto es = hermitian_eigensystem(hermitian_part(rest));
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values[i] < 0.5) continue;
    ComplexMatrix k = ComplexMatrix::Zero(d_l, input_dim);
    k.row(dump) = es.vectors.col(i).adjoint();
    ks.push_back(std::move(k));
  }
  return Channel(std::move(ks));
}

Channel thermo_erasure_recovery_dense(const ThermoCodeSpec& spec) {
  const int n = spec.n;
  if (n > 6) throw std::invalid_argument("thermo_erasure_recovery_dense: limited to n <= 6");
  long dim = 1;
  for (int k = 0; k < n; ++k) dim *= 3;
  long pow3_site = 1; // 3^{n-1-k}, updated per k
  std::vector<std::vector<ComplexVector>> families;
  // no-error syndrome: the code space itself
  {
    std::vector<ComplexVector> fam;
    for (int i = 0; i < 2; ++i) {
      ComplexVector g = dicke_vector(n, spec.up_count(i));
      ComplexVector v = ComplexVector::Zero(dim);
      for (long b = 0; b < g.size(); ++b) v[ternary_of(b, n)] = g[b];
      fam.push_back(std::move(v));
    }
    families.push_back(std::move(fam));
  }
  for (int k = 0; k < n; ++k) {
    pow3_site = 1;
    for (int t = 0; t < n - 1 - k; ++t) pow3_site *= 3;
    for (int j : {+1, -1}) {
      std::vector<ComplexVector> fam;
      for (int i = 0; i < 2; ++i) {
        int mag = (i == 0 ? spec.m : -spec.m) + j;
        int ups = (n - 1 + mag) / 2;
        ComplexVector rest = dicke_vector(n - 1, ups);
        ComplexVector v = ComplexVector::Zero(dim);
        for (long b = 0; b < rest.size(); ++b) {
          if (rest[b] == 0.0) continue;
          // insert the vacuum digit at site k
          long low = ternary_of(b & ((1L << (n - 1 - k)) - 1), n - 1 - k);
          long high = ternary_of(b >> (n - 1 - k), k);
          long idx = (high * 3 + 2) * pow3_site + low;
          v[idx] = rest[b];
        }
        fam.push_back(std::move(v));
      }
      families.push_back(std::move(fam));
    }
  }
  return syndrome_recovery(static_cast<int>(dim), 2, families, 0);
}

} // namespace covqec
