#include "covqec/dicke.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace covqec {

double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial(int n, int k) { return std::exp(log_binomial(n, k)); }

ComplexVector dicke_vector(int n, int w) {
  if (n < 1 || n > 24) throw std::invalid_argument("dicke_vector: n out of range for a dense vector");
  if (w < 0 || w > n) throw std::invalid_argument("dicke_vector: weight out of range");
  const long dim = 1L << n;
  ComplexVector v = ComplexVector::Zero(dim);
  const double amp = std::exp(-0.5 * log_binomial(n, w));
  for (long j = 0; j < dim; ++j) {
    // bit value 0 is spin up
    int ups = n - __builtin_popcountl(static_cast<unsigned long>(j));
    if (ups == w) v[j] = amp;
  }
  return v;
}

double dicke_split(int n, int w, int x) {
  int rest = w - (x == 0 ? 1 : 0);
  double l = log_binomial(n - 1, rest) - log_binomial(n, w);
  return std::isfinite(l) ? std::exp(0.5 * l) : 0.0;
}

Complex dicke_single_site(int n, int w, int wp, const ComplexMatrix& a) {
  Complex s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int xp = 0; xp < 2; ++xp) {
      // the remaining n-1 sites must carry the same weight
      if (w - (x == 0) != wp - (xp == 0)) continue;
      s += a(x, xp) * dicke_split(n, w, x) * dicke_split(n, wp, xp);
    }
  return s;
}

Complex dicke_two_site(int n, int w, int wp, const ComplexMatrix& a, const ComplexMatrix& b) {
  if (n < 2) throw std::invalid_argument("dicke_two_site: needs at least two sites");
  Complex s = 0.0;
  const double lw = log_binomial(n, w), lwp = log_binomial(n, wp);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int xp = 0; xp < 2; ++xp)
        for (int yp = 0; yp < 2; ++yp) {
          int r = w - (x == 0) - (y == 0);
          if (r != wp - (xp == 0) - (yp == 0)) continue;
          double l = log_binomial(n - 2, r);
          if (!std::isfinite(l)) continue;
          double c = std::exp(l - 0.5 * (lw + lwp));
          s += a(x, xp) * b(y, yp) * c;
        }
  return s;
}

} // namespace covqec
