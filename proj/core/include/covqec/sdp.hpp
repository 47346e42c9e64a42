#pragma once

#include <string>
#include <vector>

#include "covqec/linalg.hpp"

namespace covqec {

// minimize c^T y  subject to  F(y) = F0 + sum_i y_i F_i >= 0, with F block diagonal
// and Hermitian. Problems supply the blocks of F(y) and, given W = F(y)^{-1},
// the first and second derivative data of -log det F.
class LmiProblem {
public:
  virtual ~LmiProblem() = default;
  virtual int num_vars() const = 0;
  virtual const RealVector& objective() const = 0;
  virtual std::vector<ComplexMatrix> assemble(const RealVector& y) const = 0;
  // grad_i = Tr(W F_i), hess_ij = Re Tr(W F_i W F_j).
  virtual void derivatives(const std::vector<ComplexMatrix>& w, RealVector& grad,
                           RealMatrix& hess) const = 0;
  // Optional rows A with A y held fixed at its starting value.
  virtual const RealMatrix* equality_constraints() const { return nullptr; }
};

struct BarrierOptions {
  double gap_tol = 1e-10; // absolute target for m / t
  double rel_gap_tol = 1e-11;
  double mu = 12.0;
  double t0 = 0.0; // 0 picks a value from the starting point
  int max_centering_steps = 60;
  int max_newton_steps = 1500;
};

struct BarrierResult {
  RealVector y;
  double objective = 0.0;
  double gap = 0.0;                // m / t at termination
  std::vector<ComplexMatrix> dual; // W / t, approximately dual feasible
  int newton_steps = 0;
  bool converged = false;
  std::string message;
};

// y0 must be strictly feasible.
BarrierResult solve_lmi(const LmiProblem& problem, const RealVector& y0,
                        const BarrierOptions& options = {});

// Dense reference implementation: each F_i given blockwise.
class DenseLmi : public LmiProblem {
public:
  DenseLmi(RealVector c, std::vector<ComplexMatrix> f0, std::vector<std::vector<ComplexMatrix>> fi);
  int num_vars() const override { return static_cast<int>(fi_.size()); }
  const RealVector& objective() const override { return c_; }
  std::vector<ComplexMatrix> assemble(const RealVector& y) const override;
  void derivatives(const std::vector<ComplexMatrix>& w, RealVector& grad,
                   RealMatrix& hess) const override;

private:
  RealVector c_;
  std::vector<ComplexMatrix> f0_;
  std::vector<std::vector<ComplexMatrix>> fi_;
};

// Real coordinates for Hermitian n x n matrices: diagonal entries, then the real
// and imaginary parts of each upper entry. Dimension n^2.
struct HermitianCoords {
  int n = 0;
  struct Term {
    int index; // row * n + col
    Complex coef;
  };
  std::vector<std::vector<Term>> terms; // terms[k] lists the entries touched by coordinate k

  explicit HermitianCoords(int n);
  int size() const { return n * n; }
  ComplexMatrix to_matrix(const RealVector& x) const;
  RealVector from_matrix(const ComplexMatrix& h) const;
  // Re(J^T A J) for a complex matrix A indexed by entry pairs.
  RealMatrix pull_back_bilinear(const ComplexMatrix& a) const;
  // Re(J^H A J)
  RealMatrix pull_back_sesquilinear(const ComplexMatrix& a) const;
  // Re(J^T v)
  RealVector pull_back_linear(const ComplexVector& v) const;
};

} // namespace covqec
