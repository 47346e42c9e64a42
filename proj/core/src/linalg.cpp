#include <limits>
#include "covqec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace covqec {

namespace {

double read_cutoff_env() {
  const char* s = std::getenv("COVQEC_TOL");
  if (s == nullptr || *s == '\0') return kDefaultSpectralCutoff;
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || !(v > 0.0) || !(v < 1.0)) return kDefaultSpectralCutoff;
  return v;
}

int product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

} // namespace

double spectral_cutoff() {
  static const double value = read_cutoff_env();
  return value;
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

Eigensystem hermitian_eigensystem(const ComplexMatrix& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("hermitian_eigensystem: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigensystem: no convergence");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

// Applies f to the clamped spectrum of a PSD matrix.
template <class F>
ComplexMatrix psd_function(const ComplexMatrix& m, F f, const char* who) {
  auto es = hermitian_eigensystem(m);
  double scale = std::max(es.values.cwiseAbs().maxCoeff(), 0.0);
  RealVector lam = es.values;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -kClampWindow * std::max(1.0, scale))
      throw std::invalid_argument(std::string(who) + ": matrix has a negative eigenvalue " +
                                  std::to_string(lam[i]));
    lam[i] = f(std::max(lam[i], 0.0), scale);
  }
  return es.vectors * lam.asDiagonal() * es.vectors.adjoint();
}

} // namespace

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  return psd_function(m, [](double x, double) { return std::sqrt(x); }, "psd_sqrt");
}

ComplexMatrix psd_inv_sqrt(const ComplexMatrix& m, double cutoff) {
  return psd_function(
      m, [cutoff](double x, double s) { return x > cutoff * s ? 1.0 / std::sqrt(x) : 0.0; },
      "psd_inv_sqrt");
}

double matrix_fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Work on the support of a: square roots of round-off eigenvalues in a large
  // kernel would otherwise add up to a visible bias.
  Eigensystem ea = hermitian_eigensystem(a);
  const double amax = ea.values.size() ? std::max(ea.values.maxCoeff(), 0.0) : 0.0;
  if (amax == 0.0) return 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ea.values.size(); ++i)
    if (ea.values[i] > spectral_cutoff() * amax) keep.push_back(i);
  ComplexMatrix w(a.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k)
    w.col(static_cast<Eigen::Index>(k)) = ea.vectors.col(keep[k]) * std::sqrt(ea.values[keep[k]]);
  ComplexMatrix inner = hermitian_part(w.adjoint() * b * w);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(inner, Eigen::EigenvaluesOnly);
  const auto& mu = es.eigenvalues();
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(mu.size()) *
                       std::max(mu.size() ? mu.maxCoeff() : 0.0, 0.0);
  double f = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (mu[i] > floor) f += std::sqrt(mu[i]);
  return f;
}

double state_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  for (const auto* m : {&rho, &sigma}) {
    if (std::abs(m->trace() - Complex(1.0)) > 1e-6)
      throw std::invalid_argument("state_fidelity: state does not have unit trace");
  }
  return std::clamp(matrix_fidelity(rho, sigma), 0.0, 1.0);
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  const int total = product(dims);
  if (m.rows() != total || m.cols() != total)
    throw std::invalid_argument("partial_trace: dims do not match matrix size");
  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: keep index out of range");
    kept[k] = true;
  }
  int dk = 1;
  for (int i = 0; i < n; ++i)
    if (kept[i]) dk *= dims[i];
  const int dt = total / dk;

  // Split each full index into (kept part, traced part), first factor most significant.
  std::vector<int> kidx(total), tidx(total);
  std::vector<int> digit(n, 0);
  for (int full = 0; full < total; ++full) {
    int a = 0, b = 0;
    for (int i = 0; i < n; ++i) {
      if (kept[i]) a = a * dims[i] + digit[i];
      else b = b * dims[i] + digit[i];
    }
    kidx[full] = a;
    tidx[full] = b;
    for (int i = n - 1; i >= 0; --i) {
      if (++digit[i] < dims[i]) break;
      digit[i] = 0;
    }
  }
  std::vector<std::vector<int>> groups(dt, std::vector<int>(dk));
  for (int full = 0; full < total; ++full) groups[tidx[full]][kidx[full]] = full;

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (const auto& g : groups)
    for (int j = 0; j < dk; ++j)
      for (int i = 0; i < dk; ++i) out(i, j) += m(g[i], g[j]);
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, const std::vector<int>& dims,
                                 const std::vector<int>& perm) {
  const int total = product(dims);
  const int n = static_cast<int>(dims.size());
  if (m.rows() != total || m.cols() != total || static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permute_subsystems: dimension mismatch");
  std::vector<int> out_dims(n);
  for (int k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];
  std::vector<int> map(total);
  std::vector<int> digit(n, 0);
  for (int full = 0; full < total; ++full) {
    int o = 0;
    for (int k = 0; k < n; ++k) o = o * out_dims[k] + digit[perm[k]];
    map[full] = o;
    for (int i = n - 1; i >= 0; --i) {
      if (++digit[i] < dims[i]) break;
      digit[i] = 0;
    }
  }
  ComplexMatrix out(total, total);
  for (int j = 0; j < total; ++j)
    for (int i = 0; i < total; ++i) out(map[i], map[j]) = m(i, j);
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

ComplexMatrix support_pseudo_inverse(const ComplexMatrix& m, double cutoff) {
  auto es = hermitian_eigensystem(m);
  double lmax = es.values.cwiseAbs().maxCoeff();
  RealVector inv = RealVector::Zero(es.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    if (es.values[i] > cutoff * lmax) inv[i] = 1.0 / es.values[i];
  return es.vectors * inv.asDiagonal() * es.vectors.adjoint();
}

bool support_contains(const ComplexMatrix& a, const ComplexMatrix& b, double cutoff) {
  if (a.rows() != b.rows()) throw std::invalid_argument("support_contains: dimension mismatch");
  auto ea = hermitian_eigensystem(a);
  double amax = ea.values.cwiseAbs().maxCoeff();
  // Kernel of a.
  std::vector<Eigen::Index> ker;
  for (Eigen::Index i = 0; i < ea.values.size(); ++i)
    if (ea.values[i] <= cutoff * amax) ker.push_back(i);
  if (ker.empty()) return true;
  ComplexMatrix kv(a.rows(), static_cast<Eigen::Index>(ker.size()));
  for (size_t k = 0; k < ker.size(); ++k) kv.col(static_cast<Eigen::Index>(k)) = ea.vectors.col(ker[k]);
  double bmax = operator_norm(b);
  if (bmax == 0.0) return true;
  // b restricted to ker(a) must vanish; for PSD b this is the range test.
  double leak = operator_norm(kv.adjoint() * b * kv);
  return leak <= cutoff * bmax;
}

ComplexMatrix orthonormal_range(const ComplexMatrix& cols, double cutoff) {
  if (cols.cols() == 0) return ComplexMatrix(cols.rows(), 0);
  Eigen::BDCSVD<ComplexMatrix> svd(cols, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return ComplexMatrix(cols.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

ComplexVector flatten(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unflatten(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix random_ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng)) / std::sqrt(2.0);
  return m;
}

ComplexMatrix random_unitary(int d, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_ginibre(d, d, rng));
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

ComplexMatrix random_hermitian(int d, Rng& rng) {
  ComplexMatrix g = random_ginibre(d, d, rng);
  return hermitian_part(g);
}

ComplexMatrix random_density(int d, Rng& rng) {
  ComplexMatrix g = random_ginibre(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

ComplexVector haar_state(int d, Rng& rng) {
  ComplexVector v = random_ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

} // namespace covqec
