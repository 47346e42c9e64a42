#pragma once

#include "covqec/linalg.hpp"

namespace covqec {

// Site basis convention for spin chains: index 0 is spin up (sigma_z = +1),
// index 1 spin down; site 0 is the most significant tensor factor.

// log C(n, k); -inf outside 0 <= k <= n.
double log_binomial(int n, int k);
double binomial(int n, int k);

// Normalized Dicke state on n sites with w up spins.
ComplexVector dicke_vector(int n, int w);

// sqrt(C(n-1, w - [x is up]) / C(n, w)): amplitude of |x>_k |D^{n-1}_{w - [x up]}>
// in |D^n_w>.
double dicke_split(int n, int w, int x);

// <D^n_w| A_k |D^n_w'> for a 2 x 2 operator A on a single site.
Complex dicke_single_site(int n, int w, int wp, const ComplexMatrix& a);
// <D^n_w| A_k B_l |D^n_w'> for two distinct sites k != l.
Complex dicke_two_site(int n, int w, int wp, const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace covqec
