#pragma once

#include <gtest/gtest.h>

#include "covqec/channels.hpp"

namespace testing_support {

using namespace covqec;

inline double max_abs(const ComplexMatrix& a, const ComplexMatrix& b) {
  EXPECT_EQ(a.rows(), b.rows());
  EXPECT_EQ(a.cols(), b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

inline Hamiltonian sz(int d = 2) {
  std::vector<double> e(d);
  for (int i = 0; i < d; ++i) e[i] = d - 1 - 2.0 * i;
  return Hamiltonian::diagonal(e);
}

inline ComplexMatrix ket_bra(int d, int i, int j) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

inline ComplexVector basis(int d, int i) {
  ComplexVector v = ComplexVector::Zero(d);
  v(i) = 1.0;
  return v;
}

} // namespace testing_support
