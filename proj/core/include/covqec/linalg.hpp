#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace covqec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Relative cutoff used for every rank and support decision. COVQEC_TOL in the
// environment replaces the default when the process starts.
inline constexpr double kDefaultSpectralCutoff = 1e-10;
double spectral_cutoff();

// Eigenvalues in (-kClampWindow, 0) are treated as round-off and clamped.
inline constexpr double kClampWindow = 1e-8;

struct Eigensystem {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns
};

bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-9);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

Eigensystem hermitian_eigensystem(const ComplexMatrix& m);

ComplexMatrix psd_sqrt(const ComplexMatrix& m);
// Inverse square root on the support, zero on the kernel.
ComplexMatrix psd_inv_sqrt(const ComplexMatrix& m, double cutoff = spectral_cutoff());

double state_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);
// Tr sqrt(a^{1/2} b a^{1/2}) for arbitrary PSD matrices, no trace check.
double matrix_fidelity(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);
// Reorders tensor factors: output factor k is input factor perm[k].
ComplexMatrix permute_subsystems(const ComplexMatrix& m, const std::vector<int>& dims,
                                 const std::vector<int>& perm);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors);

double operator_norm(const ComplexMatrix& m);
double trace_norm(const ComplexMatrix& m);

ComplexMatrix support_pseudo_inverse(const ComplexMatrix& m, double cutoff = spectral_cutoff());
// True when range(b) lies inside range(a); both Hermitian PSD.
bool support_contains(const ComplexMatrix& a, const ComplexMatrix& b,
                      double cutoff = spectral_cutoff());

// Orthonormal basis of the column span, singular values below cutoff*s_max dropped.
ComplexMatrix orthonormal_range(const ComplexMatrix& cols, double cutoff = spectral_cutoff());

// Helpers for treating matrices as vectors (column-major flattening).
ComplexVector flatten(const ComplexMatrix& m);
ComplexMatrix unflatten(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

// Random objects for tests and multi-start searches.
using Rng = std::mt19937_64;
inline constexpr std::uint64_t kDefaultSeed = 0xC0DEC0DEULL;

ComplexMatrix random_ginibre(int rows, int cols, Rng& rng);
ComplexMatrix random_unitary(int d, Rng& rng);
ComplexMatrix random_hermitian(int d, Rng& rng);
ComplexMatrix random_density(int d, Rng& rng);
ComplexVector haar_state(int d, Rng& rng);

} // namespace covqec
