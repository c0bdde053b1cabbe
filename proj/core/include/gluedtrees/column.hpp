#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gluedtrees {

// Restriction of H(s) to the column subspace: symmetric tridiagonal of
// dimension 2n+2. diag[0] = -(1-s) alpha, diag[2n+1] = -s alpha, zero
// elsewhere; off[j] = -s(1-s) except off[n] = -sqrt(2) s(1-s) at the glue.
struct TridiagonalHamiltonian {
  int n = 0;
  double alpha = 0;
  double s = 0;
  std::vector<double> diag;
  std::vector<double> off;  // off[j] couples columns j and j+1

  std::size_t dim() const { return diag.size(); }
  void apply(std::span<const double> x, std::span<double> y) const;
  void apply(std::span<const std::complex<double>> x,
             std::span<std::complex<double>> y) const;
};

TridiagonalHamiltonian column_hamiltonian(int n, double alpha, double s);

// |u>: the normalized all-vertices superposition seen from the column basis,
// amplitudes sqrt(N_j / N).
std::vector<double> uniform_state(int n);

// Unit vector on column j (j = 0 is ENTRANCE, j = 2n+1 is EXIT).
std::vector<double> basis_state(int n, int j);

// || H(s)|u> - G(s)|u> || with G(s) = -3 s(1-s)/sqrt(2): how far |u> is from
// an exact eigenvector. Only the two endpoint rows contribute.
double u_residual(int n, double alpha, double s);

}  // namespace gluedtrees
