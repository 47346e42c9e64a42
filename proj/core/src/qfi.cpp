#include "covqec/qfi.hpp"

#include <cmath>
#include <stdexcept>

#include "covqec/sdp.hpp"

namespace covqec {

QfiValue QfiValue::finite(double value, ComplexMatrix certificate, std::optional<SdpSolution> sdp) {
  if (!(value >= 0.0)) {
    // Round-off can leave a tiny negative number at a zero optimum.
    if (value > -1e-9) value = 0.0;
    else throw std::invalid_argument("QfiValue: finite value must be non-negative");
  }
  QfiValue q;
  q.kind_ = Kind::Finite;
  q.value_ = value;
  q.certificate_ = std::move(certificate);
  q.sdp_ = std::move(sdp);
  return q;
}

QfiValue QfiValue::infinite(ComplexMatrix violation) {
  QfiValue q;
  q.kind_ = Kind::Infinite;
  q.certificate_ = std::move(violation);
  return q;
}

double QfiValue::value() const {
  if (kind_ != Kind::Finite) throw std::logic_error("QfiValue: value() on an infinite QFI");
  return value_;
}

SpanCheck span_membership(const std::vector<ComplexMatrix>& spanning, const ComplexMatrix& target) {
  SpanCheck out;
  const Eigen::Index n = target.size();
  ComplexMatrix cols(n, static_cast<Eigen::Index>(spanning.size()));
  for (size_t k = 0; k < spanning.size(); ++k) {
    if (spanning[k].size() != n) throw std::invalid_argument("span_membership: shape mismatch");
    cols.col(static_cast<Eigen::Index>(k)) = flatten(spanning[k]);
  }
  ComplexMatrix q = orthonormal_range(cols);
  ComplexVector v = flatten(target);
  ComplexVector r = v - q * (q.adjoint() * v);
  out.residual = unflatten(r, target.rows(), target.cols());
  out.residual_norm = r.norm();
  out.satisfied = out.residual_norm <= 100.0 * spectral_cutoff() * std::max(1.0, v.norm());
  return out;
}

SpanCheck hks_check(const Channel& ch, const Hamiltonian& h) {
  if (h.dim() != ch.d_in()) throw std::invalid_argument("hks_check: dimension mismatch");
  std::vector<ComplexMatrix> span;
  for (const auto& a : ch.kraus())
    for (const auto& b : ch.kraus()) span.push_back(a.adjoint() * b);
  return span_membership(span, h.matrix());
}

namespace {

ComplexMatrix s_target(const std::vector<ComplexMatrix>& kraus, const std::vector<ComplexMatrix>& dkraus) {
  if (kraus.empty() || kraus.size() != dkraus.size())
    throw std::invalid_argument("Kraus and derivative lists differ in length");
  ComplexMatrix t = ComplexMatrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (size_t a = 0; a < kraus.size(); ++a) {
    if (dkraus[a].rows() != kraus[a].rows() || dkraus[a].cols() != kraus[a].cols())
      throw std::invalid_argument("Kraus derivative shape mismatch");
    t += kI * kraus[a].adjoint() * dkraus[a];
  }
  if (!is_hermitian(t, 1e-8))
    throw std::invalid_argument("family derivative does not preserve the trace");
  return hermitian_part(t);
}

} // namespace

SpanCheck s_condition(const std::vector<ComplexMatrix>& kraus, const std::vector<ComplexMatrix>& dkraus) {
  ComplexMatrix t = s_target(kraus, dkraus);
  std::vector<ComplexMatrix> span;
  for (const auto& a : kraus)
    for (const auto& b : kraus) span.push_back(a.adjoint() * b);
  return span_membership(span, t);
}

SpanCheck r_condition(const std::vector<ComplexMatrix>& kraus, const std::vector<ComplexMatrix>& dkraus) {
  SpanCheck worst;
  worst.residual = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().cols());
  for (const auto& dk : dkraus) {
    SpanCheck c = span_membership(kraus, dk);
    if (c.residual_norm > worst.residual_norm || (!c.satisfied && worst.satisfied)) {
      bool sat = worst.satisfied && c.satisfied;
      worst = c;
      worst.satisfied = sat;
    } else {
      worst.satisfied = worst.satisfied && c.satisfied;
    }
  }
  return worst;
}

SpanCheck r_condition(const Channel& ch, const Hamiltonian& h) {
  auto fam = hamiltonian_channel_family(ch, h);
  return r_condition(fam.kraus, fam.dkraus);
}

double sld_qfi_state(const ComplexMatrix& rho, const ComplexMatrix& drho) {
  auto es = hermitian_eigensystem(rho);
  ComplexMatrix d = es.vectors.adjoint() * drho * es.vectors;
  double lmax = std::max(es.values.maxCoeff(), 0.0);
  double f = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      double s = std::max(es.values[i], 0.0) + std::max(es.values[j], 0.0);
      if (s > spectral_cutoff() * lmax) f += 2.0 * std::norm(d(i, j)) / s;
    }
  return f;
}

QfiValue rld_qfi_state(const ComplexMatrix& rho, const Hamiltonian& h) {
  if (h.dim() != rho.rows()) throw std::invalid_argument("rld_qfi_state: dimension mismatch");
  const ComplexMatrix& hm = h.matrix();
  ComplexMatrix hrh = hm * rho * hm;
  if (!support_contains(rho, hermitian_part(hrh))) {
    // Witness: the part of H rho H outside supp(rho).
    ComplexMatrix pinv = support_pseudo_inverse(rho);
    ComplexMatrix proj = rho * pinv;
    ComplexMatrix ker = ComplexMatrix::Identity(rho.rows(), rho.cols()) - proj;
    return QfiValue::infinite(ker * hrh * ker);
  }
  ComplexMatrix pinv = support_pseudo_inverse(rho);
  double v = (hm * rho * rho * hm * pinv).trace().real() - (rho * hm * hm).trace().real();
  return QfiValue::finite(std::max(v, 0.0), pinv);
}

namespace {

// The alpha-norm SDP after eliminating K^dag h K = T.
class AlphaNormLmi : public LmiProblem {
public:
  AlphaNormLmi(const std::vector<ComplexMatrix>& kraus, const std::vector<ComplexMatrix>& offset,
               const ComplexMatrix& target)
      : r_(static_cast<int>(kraus.size())),
        din_(static_cast<int>(kraus.front().cols())),
        dout_(static_cast<int>(kraus.front().rows())),
        kraus_(kraus),
        coords_(r_) {
    kstack_.resize(r_ * dout_, din_);
    gstack_.resize(r_ * dout_, din_);
    for (int a = 0; a < r_; ++a) {
      kstack_.middleRows(a * dout_, dout_) = kraus[static_cast<size_t>(a)];
      gstack_.middleRows(a * dout_, dout_) = offset[static_cast<size_t>(a)];
    }
    // Linear map x -> K^dag h(x) K in real Hermitian coordinates.
    HermitianCoords out(din_);
    const int nx = coords_.size();
    RealMatrix l(out.size(), nx);
    for (int k = 0; k < nx; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(din_, din_);
      for (const auto& t : coords_.terms[static_cast<size_t>(k)]) {
        int a = t.index / r_, b = t.index % r_;
        m += t.coef * kraus[static_cast<size_t>(a)].adjoint() * kraus[static_cast<size_t>(b)];
      }
      l.col(k) = out.from_matrix(m);
    }
    RealVector tau = out.from_matrix(target);
    Eigen::JacobiSVD<RealMatrix> svd(l, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    double smax = s.size() > 0 ? s(0) : 0.0;
    while (rank < s.size() && s(rank) > spectral_cutoff() * smax) ++rank;
    x0_ = RealVector::Zero(nx);
    for (int i = 0; i < rank; ++i)
      x0_ += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(tau) / s(i));
    ls_residual_ = (l * x0_ - tau).norm() / std::max(1.0, tau.norm());
    // Newton steps stay on the affine solution set: V_rank^T x is held fixed.
    eq_ = RealMatrix::Zero(rank, 1 + nx);
    eq_.rightCols(nx) = svd.matrixV().leftCols(rank).transpose();
    c_ = RealVector::Zero(1 + nx);
    c_[0] = 1.0;
  }

  double ls_residual() const { return ls_residual_; }
  int num_vars() const override { return static_cast<int>(c_.size()); }
  const RealVector& objective() const override { return c_; }

  const RealMatrix* equality_constraints() const override { return &eq_; }

  ComplexMatrix h_of(const RealVector& y) const { return coords_.to_matrix(y.tail(y.size() - 1)); }

  ComplexMatrix d_of(const ComplexMatrix& h) const {
    ComplexMatrix d = gstack_;
    for (int a = 0; a < r_; ++a)
      for (int b = 0; b < r_; ++b)
        if (h(a, b) != Complex(0.0))
          d.middleRows(a * dout_, dout_) += kI * h(a, b) * kraus_[static_cast<size_t>(b)];
    return d;
  }

  std::vector<ComplexMatrix> assemble(const RealVector& y) const override {
    ComplexMatrix d = d_of(h_of(y));
    const int n = din_ + r_ * dout_;
    ComplexMatrix f = ComplexMatrix::Zero(n, n);
    f.topLeftCorner(din_, din_) = y[0] * ComplexMatrix::Identity(din_, din_);
    f.bottomLeftCorner(r_ * dout_, din_) = d;
    f.topRightCorner(din_, r_ * dout_) = d.adjoint();
    f.bottomRightCorner(r_ * dout_, r_ * dout_) = ComplexMatrix::Identity(r_ * dout_, r_ * dout_);
    return {f};
  }

  void derivatives(const std::vector<ComplexMatrix>& wv, RealVector& grad,
                   RealMatrix& hess) const override {
    const ComplexMatrix& w = wv.front();
    const int rd = r_ * dout_;
    const int rr = r_ * r_;
    ComplexMatrix w11 = w.topLeftCorner(din_, din_);
    ComplexMatrix w12 = w.topRightCorner(din_, rd);
    ComplexMatrix w22 = w.bottomRightCorner(rd, rd);
    ComplexMatrix m12 = w11 * w12;

    ComplexVector gc(rr), gt(rr);
    ComplexMatrix rrow(rr, din_ * din_), rtrow(rr, din_ * din_);
    for (int a = 0; a < r_; ++a) {
      auto wa = w12.middleCols(a * dout_, dout_);
      auto ma = m12.middleCols(a * dout_, dout_);
      for (int b = 0; b < r_; ++b) {
        const auto& kb = kraus_[static_cast<size_t>(b)];
        ComplexMatrix rab = wa * kb;
        gc[a * r_ + b] = kI * rab.trace();
        gt[a * r_ + b] = kI * (ma * kb).trace();
        rrow.row(a * r_ + b) = flatten(rab).transpose();
        ComplexMatrix rt = rab.transpose();
        rtrow.row(a * r_ + b) = flatten(rt).transpose();
      }
    }
    ComplexMatrix s = -(rrow * rtrow.transpose());

    ComplexMatrix qrow(rr, dout_ * dout_), wrow(rr, dout_ * dout_);
    for (int bp = 0; bp < r_; ++bp)
      for (int b = 0; b < r_; ++b) {
        ComplexMatrix q = kraus_[static_cast<size_t>(bp)] * w11 * kraus_[static_cast<size_t>(b)].adjoint();
        qrow.row(bp * r_ + b) = flatten(q).transpose();
      }
    for (int a = 0; a < r_; ++a)
      for (int ap = 0; ap < r_; ++ap) {
        ComplexMatrix blk = w22.block(a * dout_, ap * dout_, dout_, dout_).transpose();
        wrow.row(a * r_ + ap) = flatten(blk).transpose();
      }
    ComplexMatrix p = wrow * qrow.transpose(); // p[(a,a'),(b',b)]
    ComplexMatrix t(rr, rr);
    for (int a = 0; a < r_; ++a)
      for (int b = 0; b < r_; ++b)
        for (int ap = 0; ap < r_; ++ap)
          for (int bp = 0; bp < r_; ++bp) t(a * r_ + b, ap * r_ + bp) = p(a * r_ + ap, bp * r_ + b);

    RealMatrix hx = 2.0 * coords_.pull_back_bilinear(s) + 2.0 * coords_.pull_back_sesquilinear(t);
    RealVector gx = coords_.pull_back_linear(2.0 * gc);
    RealVector cx = coords_.pull_back_linear(2.0 * gt);

    const Eigen::Index nx = hx.rows();
    grad.resize(1 + nx);
    hess.resize(1 + nx, 1 + nx);
    grad[0] = w11.trace().real();
    grad.tail(nx) = gx;
    hess(0, 0) = (w11 * w11).trace().real();
    hess.block(1, 0, nx, 1) = cx;
    hess.block(0, 1, 1, nx) = cx.transpose();
    hess.bottomRightCorner(nx, nx) = hx;
  }

  RealVector start() const {
    RealVector y = RealVector::Zero(num_vars());
    y.tail(x0_.size()) = x0_;
    ComplexMatrix d = d_of(h_of(y));
    double lmax = operator_norm(d);
    lmax *= lmax;
    y[0] = lmax + std::max(1.0, lmax);
    return y;
  }

private:
  int r_, din_, dout_;
  std::vector<ComplexMatrix> kraus_;
  HermitianCoords coords_;
  ComplexMatrix kstack_, gstack_;
  RealVector x0_;
  RealMatrix eq_;
  RealVector c_;
  double ls_residual_ = 0.0;
};

} // namespace

SdpSolution minimize_alpha_norm(const std::vector<ComplexMatrix>& kraus,
                                const std::vector<ComplexMatrix>& offset,
                                const ComplexMatrix& target) {
  if (kraus.empty() || kraus.size() != offset.size())
    throw std::invalid_argument("minimize_alpha_norm: Kraus and offset lists differ");
  AlphaNormLmi lmi(kraus, offset, target);
  if (lmi.ls_residual() > 100.0 * spectral_cutoff())
    throw std::domain_error("minimize_alpha_norm: K^dag h K = T has no Hermitian solution");

  BarrierResult br = solve_lmi(lmi, lmi.start());
  SdpSolution sol;
  sol.h = lmi.h_of(br.y);
  ComplexMatrix d = lmi.d_of(sol.h);
  double s = operator_norm(d);
  sol.objective = 4.0 * s * s;
  ComplexMatrix beta = -target;
  const int r = static_cast<int>(kraus.size());
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      beta += sol.h(a, b) * kraus[static_cast<size_t>(a)].adjoint() * kraus[static_cast<size_t>(b)];
  sol.primal_residual = beta.norm();
  sol.dual_gap = 4.0 * br.gap;
  sol.newton_steps = br.newton_steps;
  sol.converged = br.converged;
  return sol;
}

QfiValue sld_qfi_channel_regularized(const Channel& ch, const Hamiltonian& h) {
  if (h.dim() != ch.d_in())
    throw std::invalid_argument("sld_qfi_channel_regularized: dimension mismatch");
  if (h.is_zero()) return QfiValue::finite(0.0, ComplexMatrix::Zero(ch.rank(), ch.rank()));
  Channel k = minimal_kraus(ch);
  SpanCheck hks = hks_check(k, h);
  if (!hks.satisfied) return QfiValue::infinite(hks.residual);
  auto fam = hamiltonian_channel_family(k, h);
  SdpSolution sol;
  try {
    sol = minimize_alpha_norm(fam.kraus, fam.dkraus, h.matrix());
  } catch (const std::domain_error&) {
    throw std::logic_error("sld_qfi_channel_regularized: HKS holds but beta = 0 is infeasible");
  }
  double v = sol.objective;
  ComplexMatrix cert = sol.h;
  return QfiValue::finite(v, std::move(cert), std::move(sol));
}

QfiValue sld_qfi_generic_family(const std::vector<ComplexMatrix>& kraus,
                                const std::vector<ComplexMatrix>& dkraus) {
  ComplexMatrix t = s_target(kraus, dkraus);
  bool zero = true;
  for (const auto& dk : dkraus) zero = zero && dk.norm() == 0.0;
  const int r = static_cast<int>(kraus.size());
  if (zero) return QfiValue::finite(0.0, ComplexMatrix::Zero(r, r));
  SpanCheck s = s_condition(kraus, dkraus);
  if (!s.satisfied) return QfiValue::infinite(s.residual);
  SdpSolution sol;
  try {
    sol = minimize_alpha_norm(kraus, dkraus, t);
  } catch (const std::domain_error&) {
    throw std::logic_error("sld_qfi_generic_family: condition (S) holds but beta = 0 is infeasible");
  }
  double v = sol.objective;
  ComplexMatrix cert = sol.h;
  return QfiValue::finite(v, std::move(cert), std::move(sol));
}

QfiValue rld_qfi_generic_family(const std::vector<ComplexMatrix>& kraus,
                                const std::vector<ComplexMatrix>& dkraus) {
  if (kraus.empty() || kraus.size() != dkraus.size())
    throw std::invalid_argument("rld_qfi_generic_family: list lengths differ");
  SpanCheck r = r_condition(kraus, dkraus);
  if (!r.satisfied) return QfiValue::infinite(r.residual);
  const int din = static_cast<int>(kraus.front().cols());
  const int dout = static_cast<int>(kraus.front().rows());
  const int n = din * dout;
  auto vec = [&](const ComplexMatrix& k) {
    ComplexVector v(n);
    for (int o = 0; o < dout; ++o)
      for (int i = 0; i < din; ++i) v(o * din + i) = k(o, i);
    return v;
  };
  ComplexMatrix gamma = ComplexMatrix::Zero(n, n), dgamma = ComplexMatrix::Zero(n, n);
  for (size_t a = 0; a < kraus.size(); ++a) {
    ComplexVector k = vec(kraus[a]), dk = vec(dkraus[a]);
    gamma += k * k.adjoint();
    dgamma += dk * k.adjoint() + k * dk.adjoint();
  }
  ComplexMatrix inner = dgamma * support_pseudo_inverse(gamma) * dgamma;
  ComplexMatrix reduced = partial_trace(hermitian_part(inner), {dout, din}, {1});
  return QfiValue::finite(operator_norm(reduced), reduced);
}

QfiValue rld_qfi_channel(const Channel& ch, const Hamiltonian& h) {
  if (h.dim() != ch.d_in()) throw std::invalid_argument("rld_qfi_channel: dimension mismatch");
  if (h.is_zero()) return QfiValue::finite(0.0, ComplexMatrix::Zero(ch.d_in(), ch.d_in()));
  auto fam = hamiltonian_channel_family(ch, h);
  return rld_qfi_generic_family(fam.kraus, fam.dkraus);
}

double erasure_sld_qfi(double p, double delta_h) { return (1.0 - p) / p * delta_h * delta_h; }

double qubit_depolarizing_sld_qfi(double p, double delta_h) {
  return delta_h * delta_h * 2.0 * (1.0 - p) * (1.0 - p) / (p * (3.0 - 2.0 * p));
}

double rotated_dephasing_sld_qfi(double p, double dphi) {
  return (1.0 - 2.0 * p) * (1.0 - 2.0 * p) * dphi * dphi / (4.0 * p * (1.0 - p));
}

double depolarizing_rld_qfi(int d, double p, double delta_h, double trace_h_sq) {
  const double dd = static_cast<double>(d) * d;
  return (1.0 - p) * (1.0 - p) / (4.0 * (1.0 - (dd - 1.0) * p / dd)) * delta_h * delta_h +
         d * (1.0 - p) * (1.0 - p) / p * trace_h_sq;
}

double sld_upper_bound_depolarizing(int d, double p, double delta_h) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 1.0) return 0.0;
    throw std::invalid_argument("sld_upper_bound_depolarizing: need 0 < p < 1");
  }
  const double dd = static_cast<double>(d) * d;
  return delta_h * delta_h * (1.0 - p) * (1.0 - p) / (p * (1.0 + 2.0 / dd - p));
}

} // namespace covqec
