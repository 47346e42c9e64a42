#include "covqec/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace covqec {

Channel::Channel(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw std::invalid_argument("Channel: empty Kraus list");
  for (const auto& k : kraus_)
    if (k.rows() != kraus_.front().rows() || k.cols() != kraus_.front().cols())
      throw std::invalid_argument("Channel: Kraus operators have different shapes");
  if (tp_residual() > kTpTolerance)
    throw std::invalid_argument("Channel: not trace preserving (residual " +
                                std::to_string(tp_residual()) + ")");
}

double Channel::tp_residual() const {
  ComplexMatrix s = ComplexMatrix::Zero(d_in(), d_in());
  for (const auto& k : kraus_) s.noalias() += k.adjoint() * k;
  s -= ComplexMatrix::Identity(d_in(), d_in());
  return operator_norm(s);
}

Hamiltonian::Hamiltonian(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("Hamiltonian: matrix must be square and non-empty");
  if (!is_hermitian(m, 1e-12))
    throw std::invalid_argument("Hamiltonian: matrix is not Hermitian");
  dim_ = static_cast<int>(m.rows());
  shift_ = m.trace().real() / static_cast<double>(dim_);
  matrix_ = hermitian_part(m) - shift_ * ComplexMatrix::Identity(dim_, dim_);
  ComplexMatrix off = matrix_;
  off.diagonal().setZero();
  diagonal_ = off.cwiseAbs().maxCoeff() == 0.0;
  if (diagonal_) {
    diag_ = matrix_.diagonal().real();
    eigenvalues_ = diag_;
    std::sort(eigenvalues_.begin(), eigenvalues_.end());
  } else {
    eigenvalues_ = hermitian_eigensystem(matrix_).values;
  }
  finish();
}

void Hamiltonian::finish() {
  delta_ = eigenvalues_.maxCoeff() - eigenvalues_.minCoeff();
  double scale = std::max(1.0, std::abs(shift_));
  if (delta_ <= 1e-12 * scale) {
    if (dense_) matrix_.setZero();
    if (diagonal_) diag_.setZero();
    eigenvalues_.setZero();
    delta_ = 0.0;
  }
  opnorm_ = eigenvalues_.cwiseAbs().maxCoeff();
  trace_sq_ = eigenvalues_.squaredNorm();
}

const ComplexMatrix& Hamiltonian::matrix() const {
  if (!dense_)
    throw std::length_error("Hamiltonian: dimension " + std::to_string(dim_) +
                            " is stored as a diagonal only");
  return matrix_;
}

const RealVector& Hamiltonian::diagonal_values() const {
  if (!diagonal_) throw std::logic_error("Hamiltonian: generator is not diagonal");
  return diag_;
}

Hamiltonian Hamiltonian::diagonal(const std::vector<double>& eigenvalues) {
  if (eigenvalues.empty()) throw std::invalid_argument("Hamiltonian: empty diagonal");
  RealVector v = Eigen::Map<const RealVector>(eigenvalues.data(),
                                              static_cast<Eigen::Index>(eigenvalues.size()));
  if (v.size() <= kMaxDenseDiagonal) return Hamiltonian(v.cast<Complex>().asDiagonal().toDenseMatrix());
  Hamiltonian h;
  h.dim_ = static_cast<int>(v.size());
  h.diagonal_ = true;
  h.dense_ = false;
  h.shift_ = v.mean();
  h.diag_ = v.array() - h.shift_;
  h.eigenvalues_ = h.diag_;
  std::sort(h.eigenvalues_.begin(), h.eigenvalues_.end());
  h.finish();
  return h;
}

Hamiltonian Hamiltonian::zero(int d) { return Hamiltonian(ComplexMatrix::Zero(d, d)); }

ComplexMatrix apply(const Channel& ch, const ComplexMatrix& rho) {
  if (rho.rows() != ch.d_in() || rho.cols() != ch.d_in())
    throw std::invalid_argument("apply: state dimension does not match channel input");
  ComplexMatrix out = ComplexMatrix::Zero(ch.d_out(), ch.d_out());
  for (const auto& k : ch.kraus()) out.noalias() += k * rho * k.adjoint();
  return out;
}

namespace {

// |K>> with index (o, i) -> o * d_in + i.
ComplexVector kraus_vec(const ComplexMatrix& k) {
  ComplexVector v(k.size());
  for (Eigen::Index o = 0; o < k.rows(); ++o)
    for (Eigen::Index i = 0; i < k.cols(); ++i) v(o * k.cols() + i) = k(o, i);
  return v;
}

} // namespace

ComplexMatrix choi(const Channel& ch) {
  const int n = ch.d_in() * ch.d_out();
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (const auto& k : ch.kraus()) {
    ComplexVector v = kraus_vec(k);
    c.noalias() += v * v.adjoint();
  }
  return c;
}

Channel channel_from_choi(const ComplexMatrix& c, int d_in, int d_out) {
  if (c.rows() != d_in * d_out) throw std::invalid_argument("channel_from_choi: dimension mismatch");
  auto es = hermitian_eigensystem(c);
  double lmax = es.values.maxCoeff();
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index j = es.values.size() - 1; j >= 0; --j) {
    if (es.values[j] <= spectral_cutoff() * lmax) break;
    ComplexMatrix k(d_out, d_in);
    for (int o = 0; o < d_out; ++o)
      for (int i = 0; i < d_in; ++i) k(o, i) = std::sqrt(es.values[j]) * es.vectors(o * d_in + i, j);
    kraus.push_back(std::move(k));
  }
  return Channel(std::move(kraus));
}

Channel minimal_kraus(const Channel& ch) {
  if (ch.rank() == 1) return ch;
  const int r = ch.rank();
  const Eigen::Index dim = static_cast<Eigen::Index>(ch.d_out()) * ch.d_in();
  ComplexMatrix m(dim, r);
  for (int a = 0; a < r; ++a) m.col(a) = flatten(ch.kraus()[a]);
  std::vector<ComplexMatrix> out;
  if (r > dim) {
    // more Kraus operators than Choi dimensions: diagonalize M M^dag instead
    auto es = hermitian_eigensystem(m * m.adjoint());
    double lmax = es.values.maxCoeff();
    for (Eigen::Index j = dim - 1; j >= 0; --j) {
      if (es.values[j] <= spectral_cutoff() * lmax) break;
      out.push_back(std::sqrt(es.values[j]) * unflatten(es.vectors.col(j), ch.d_out(), ch.d_in()));
    }
    return Channel(std::move(out));
  }
  // Gram matrix of the Kraus vectors gives the canonical combination directly.
  auto es = hermitian_eigensystem(m.adjoint() * m);
  double lmax = es.values.maxCoeff();
  for (Eigen::Index j = r - 1; j >= 0; --j) {
    if (es.values[j] <= spectral_cutoff() * lmax) break;
    out.push_back(unflatten(m * es.vectors.col(j), ch.d_out(), ch.d_in()));
  }
  return Channel(std::move(out));
}

Channel compose(const Channel& a, const Channel& b) {
  if (a.d_in() != b.d_out()) throw std::invalid_argument("compose: dimension mismatch");
  std::vector<ComplexMatrix> k;
  k.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) k.push_back(ka * kb);
  return Channel(std::move(k));
}

Channel tensor(const Channel& a, const Channel& b) {
  std::vector<ComplexMatrix> k;
  k.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) k.push_back(kron(ka, kb));
  return Channel(std::move(k));
}

Channel identity_channel(int d) { return Channel({ComplexMatrix::Identity(d, d)}); }

Channel unitary_channel(const ComplexMatrix& u) { return Channel({u}); }

Channel isometry_channel(const ComplexMatrix& v) { return Channel({v}); }

Channel mixture(const std::vector<double>& weights, const std::vector<Channel>& channels) {
  if (weights.size() != channels.size() || channels.empty())
    throw std::invalid_argument("mixture: weights and channels differ in length");
  std::vector<ComplexMatrix> k;
  for (size_t c = 0; c < channels.size(); ++c) {
    if (weights[c] < 0.0) throw std::invalid_argument("mixture: negative weight");
    if (weights[c] == 0.0) continue;
    for (const auto& kc : channels[c].kraus()) k.push_back(std::sqrt(weights[c]) * kc);
  }
  return Channel(std::move(k));
}

Channel erasure(int d, double p) {
  if (d < 1 || p < 0.0 || p > 1.0) throw std::invalid_argument("erasure: need d >= 1, p in [0,1]");
  std::vector<ComplexMatrix> k;
  ComplexMatrix k0 = ComplexMatrix::Zero(d + 1, d);
  k0.topRows(d) = std::sqrt(1.0 - p) * ComplexMatrix::Identity(d, d);
  k.push_back(k0);
  for (int i = 0; i < d; ++i) {
    ComplexMatrix ki = ComplexMatrix::Zero(d + 1, d);
    ki(d, i) = std::sqrt(p);
    k.push_back(ki);
  }
  return Channel(std::move(k));
}

ComplexMatrix weyl_operator(int d, int a, int b) {
  const double two_pi = 2.0 * std::numbers::pi;
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  // X^a Z^b |j> = w^{bj} |j + a>
  for (int j = 0; j < d; ++j)
    m((j + a) % d, j) = std::polar(1.0, two_pi * static_cast<double>(b * j % d) / d);
  return m;
}

Channel depolarizing(int d, double p) {
  if (d < 1 || p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing: need d >= 1, p in [0,1]");
  const double dd = static_cast<double>(d) * d;
  const double x = 1.0 - (dd - 1.0) * p / dd;
  const double y = p / dd;
  std::vector<ComplexMatrix> k;
  k.push_back(std::sqrt(x) * ComplexMatrix::Identity(d, d));
  if (y > 0.0) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (a != 0 || b != 0) k.push_back(std::sqrt(y) * weyl_operator(d, a, b));
  }
  return Channel(std::move(k));
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Channel rotated_dephasing(double p, double phi) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("rotated_dephasing: p must lie in [0,1]");
  ComplexMatrix r = ComplexMatrix::Zero(2, 2);
  r(0, 0) = std::polar(1.0, -phi / 2.0);
  r(1, 1) = std::polar(1.0, phi / 2.0);
  std::vector<ComplexMatrix> k{std::sqrt(1.0 - p) * r};
  if (p > 0.0) k.push_back(std::sqrt(p) * r * pauli_z());
  return Channel(std::move(k));
}

Channel dephasing(double p) { return rotated_dephasing(p, 0.0); }

ChannelFamily hamiltonian_channel_family(const Channel& ch, const Hamiltonian& h) {
  if (h.dim() != ch.d_in())
    throw std::invalid_argument("hamiltonian_channel_family: Hamiltonian dimension mismatch");
  ChannelFamily fam;
  fam.kraus = ch.kraus();
  for (const auto& k : ch.kraus()) fam.dkraus.push_back(-kI * k * h.matrix());
  return fam;
}

ComplexMatrix evolution(const Hamiltonian& h, double theta) {
  if (h.is_diagonal()) {
    const RealVector& d = h.diagonal_values();
    ComplexVector ph(d.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, -theta * d(i));
    return ph.asDiagonal();
  }
  auto es = hermitian_eigensystem(h.matrix());
  ComplexVector ph(es.values.size());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, -theta * es.values(i));
  return es.vectors * ph.asDiagonal() * es.vectors.adjoint();
}

Channel random_channel(int d_in, int d_out, int rank, Rng& rng) {
  // Random Stinespring isometry sliced into Kraus blocks.
  ComplexMatrix g = random_ginibre(d_out * rank, d_in, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix v = qr.householderQ() * ComplexMatrix::Identity(d_out * rank, d_in);
  std::vector<ComplexMatrix> k;
  for (int a = 0; a < rank; ++a) k.push_back(v.block(a * d_out, 0, d_out, d_in));
  return Channel(std::move(k));
}

} // namespace covqec
