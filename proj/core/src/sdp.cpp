#include "covqec/sdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace covqec {

namespace {

struct Factored {
  bool ok = false;
  double logdet = 0.0;
  std::vector<ComplexMatrix> inverse;
};

Factored factor(const std::vector<ComplexMatrix>& blocks, bool want_inverse) {
  Factored f;
  for (const auto& b : blocks) {
    Eigen::LLT<ComplexMatrix> llt(b);
    if (llt.info() != Eigen::Success) return f;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      double d = l(i, i).real();
      if (!(d > 0.0) || !std::isfinite(d)) return f;
      f.logdet += 2.0 * std::log(d);
    }
    if (want_inverse) {
      ComplexMatrix inv = llt.solve(ComplexMatrix::Identity(b.rows(), b.cols()));
      f.inverse.push_back(hermitian_part(inv));
    }
  }
  f.ok = true;
  return f;
}

Eigen::LLT<RealMatrix> factor_hessian(const RealMatrix& h) {
  Eigen::LLT<RealMatrix> llt(h);
  if (llt.info() == Eigen::Success) return llt;
  // Round-off can make a nearly singular Hessian indefinite; regularize lightly.
  double scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
  for (double jitter = 1e-14; jitter < 1e4; jitter *= 100.0) {
    RealMatrix hj = h;
    hj.diagonal().array() += jitter * scale;
    llt.compute(hj);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw std::runtime_error("solve_lmi: barrier Hessian could not be factored");
}

// Newton step for min g^T d + d^T H d / 2 subject to A d = 0.
RealVector newton_direction(const RealMatrix& h, const RealVector& g, const RealMatrix* a) {
  auto llt = factor_hessian(h);
  RealVector v = llt.solve(g);
  if (a == nullptr || a->rows() == 0) return -v;
  RealMatrix u = llt.solve(a->transpose());
  RealMatrix s = (*a) * u;
  RealVector lambda = -s.ldlt().solve((*a) * v);
  return -v - u * lambda;
}

} // namespace

BarrierResult solve_lmi(const LmiProblem& problem, const RealVector& y0,
                        const BarrierOptions& options) {
  const RealVector& c = problem.objective();
  if (y0.size() != problem.num_vars() || c.size() != problem.num_vars())
    throw std::invalid_argument("solve_lmi: starting point has the wrong size");

  BarrierResult res;
  RealVector y = y0;
  auto blocks = problem.assemble(y);
  double m = 0.0;
  for (const auto& b : blocks) m += static_cast<double>(b.rows());
  Factored cur = factor(blocks, true);
  if (!cur.ok) throw std::invalid_argument("solve_lmi: starting point is not strictly feasible");

  const RealMatrix* eq = problem.equality_constraints();
  RealVector eq_rhs;
  if (eq != nullptr && eq->rows() > 0) eq_rhs = (*eq) * y0;

  double t = options.t0 > 0.0 ? options.t0 : 1.0;
  RealVector gtr(problem.num_vars());
  RealMatrix hess(problem.num_vars(), problem.num_vars());

  for (;;) {
    // Centering at fixed t.
    for (int step = 0; step < options.max_centering_steps; ++step) {
      if (res.newton_steps >= options.max_newton_steps) break;
      problem.derivatives(cur.inverse, gtr, hess);
      RealVector g = t * c - gtr;
      RealVector dy = newton_direction(hess, g, eq);
      if (eq_rhs.size() > 0) {
        // The KKT solve loses accuracy as t grows; keep the step inside null(A).
        RealMatrix gram = (*eq) * eq->transpose();
        dy -= eq->transpose() * gram.ldlt().solve((*eq) * dy);
      }
      double dec = -g.dot(dy);
      ++res.newton_steps;
      if (!(dec > 1e-11)) break;

      double slope = g.dot(dy);
      double s = 1.0;
      bool accepted = false;
      while (s > 1e-14) {
        RealVector yn = y + s * dy;
        Factored next = factor(problem.assemble(yn), false);
        if (next.ok) {
          double dphi = t * s * c.dot(dy) - (next.logdet - cur.logdet);
          if (dphi <= 0.25 * s * slope) {
            y = std::move(yn);
            cur = factor(problem.assemble(y), true);
            accepted = true;
            break;
          }
        }
        s *= 0.5;
      }
      if (!accepted) break;
      if (dec < 1e-9) break;
    }

    double gap = m / t;
    double target = std::max(options.gap_tol, options.rel_gap_tol * std::abs(c.dot(y)));
    if (gap <= target) {
      res.converged = true;
      break;
    }
    if (res.newton_steps >= options.max_newton_steps) {
      res.message = "Newton step limit reached";
      break;
    }
    t *= options.mu;
  }

  res.y = y;
  res.objective = c.dot(y);
  res.gap = m / t;
  for (auto& w : cur.inverse) res.dual.push_back(w / t);
  if (res.converged) res.message = "ok";
  return res;
}

DenseLmi::DenseLmi(RealVector c, std::vector<ComplexMatrix> f0,
                   std::vector<std::vector<ComplexMatrix>> fi)
    : c_(std::move(c)), f0_(std::move(f0)), fi_(std::move(fi)) {
  if (static_cast<Eigen::Index>(fi_.size()) != c_.size())
    throw std::invalid_argument("DenseLmi: objective and constraint counts differ");
  for (const auto& f : fi_)
    if (f.size() != f0_.size()) throw std::invalid_argument("DenseLmi: block count mismatch");
}

std::vector<ComplexMatrix> DenseLmi::assemble(const RealVector& y) const {
  std::vector<ComplexMatrix> out = f0_;
  for (size_t i = 0; i < fi_.size(); ++i)
    for (size_t b = 0; b < out.size(); ++b) out[b] += y[static_cast<Eigen::Index>(i)] * fi_[i][b];
  return out;
}

void DenseLmi::derivatives(const std::vector<ComplexMatrix>& w, RealVector& grad,
                           RealMatrix& hess) const {
  const size_t n = fi_.size();
  grad.setZero(static_cast<Eigen::Index>(n));
  hess.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (size_t b = 0; b < w.size(); ++b) {
    std::vector<ComplexMatrix> p(n);
    for (size_t i = 0; i < n; ++i) {
      grad[static_cast<Eigen::Index>(i)] += (w[b].transpose().cwiseProduct(fi_[i][b])).sum().real();
      p[i] = w[b] * fi_[i][b] * w[b];
    }
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i; j < n; ++j) {
        double v = (p[i].transpose().cwiseProduct(fi_[j][b])).sum().real();
        hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v;
        if (i != j) hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += v;
      }
  }
}

HermitianCoords::HermitianCoords(int n_) : n(n_) {
  terms.reserve(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a) terms.push_back({{a * n + a, Complex(1.0)}});
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      terms.push_back({{a * n + b, Complex(1.0)}, {b * n + a, Complex(1.0)}});
      terms.push_back({{a * n + b, kI}, {b * n + a, -kI}});
    }
}

ComplexMatrix HermitianCoords::to_matrix(const RealVector& x) const {
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < size(); ++k)
    for (const auto& t : terms[static_cast<size_t>(k)]) h(t.index / n, t.index % n) += x[k] * t.coef;
  return h;
}

RealVector HermitianCoords::from_matrix(const ComplexMatrix& h) const {
  RealVector x(size());
  int k = 0;
  for (int a = 0; a < n; ++a) x[k++] = h(a, a).real();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Complex z = 0.5 * (h(a, b) + std::conj(h(b, a)));
      x[k++] = z.real();
      x[k++] = z.imag();
    }
  return x;
}

RealMatrix HermitianCoords::pull_back_bilinear(const ComplexMatrix& a) const {
  const int nn = size();
  ComplexMatrix aj = ComplexMatrix::Zero(nn, nn);
  for (int l = 0; l < nn; ++l)
    for (const auto& t : terms[static_cast<size_t>(l)]) aj.col(l) += t.coef * a.col(t.index);
  RealMatrix out = RealMatrix::Zero(nn, nn);
  for (int k = 0; k < nn; ++k) {
    ComplexVector row = ComplexVector::Zero(nn);
    for (const auto& t : terms[static_cast<size_t>(k)]) row += t.coef * aj.row(t.index).transpose();
    out.row(k) = row.real().transpose();
  }
  return out;
}

RealMatrix HermitianCoords::pull_back_sesquilinear(const ComplexMatrix& a) const {
  const int nn = size();
  ComplexMatrix aj = ComplexMatrix::Zero(nn, nn);
  for (int l = 0; l < nn; ++l)
    for (const auto& t : terms[static_cast<size_t>(l)]) aj.col(l) += t.coef * a.col(t.index);
  RealMatrix out = RealMatrix::Zero(nn, nn);
  for (int k = 0; k < nn; ++k) {
    ComplexVector row = ComplexVector::Zero(nn);
    for (const auto& t : terms[static_cast<size_t>(k)])
      row += std::conj(t.coef) * aj.row(t.index).transpose();
    out.row(k) = row.real().transpose();
  }
  return out;
}

RealVector HermitianCoords::pull_back_linear(const ComplexVector& v) const {
  RealVector out(size());
  for (int k = 0; k < size(); ++k) {
    Complex s = 0.0;
    for (const auto& t : terms[static_cast<size_t>(k)]) s += t.coef * v[t.index];
    out[k] = s.real();
  }
  return out;
}

} // namespace covqec
