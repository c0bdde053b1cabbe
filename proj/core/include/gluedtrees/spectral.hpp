#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gluedtrees/column.hpp"

namespace gluedtrees {

struct EigenPair {
  double value = 0;
  std::vector<double> vector;
};

// k lowest eigenpairs, ascending. Vectors are unit norm, mutually orthogonal
// and satisfy ||H v - lambda v|| <= 1e-10; the largest-magnitude component of
// each vector is made positive so results are sign-deterministic.
std::vector<EigenPair> eigen_low(const TridiagonalHamiltonian& h, int k);

// k lowest eigenvalues only, by Sturm-count bisection. Independent of
// eigen_low's backend and much cheaper; used in schedule construction and
// gap profiles.
std::vector<double> lowest_eigenvalues(const TridiagonalHamiltonian& h, int k);

// Number of eigenvalues strictly below x (Sturm count).
int eigenvalue_count_below(const TridiagonalHamiltonian& h, double x);

// Matching function of the rescaled eigenproblem,
//   f(p) = (sin((n+2)p) - theta sin((n+1)p)) / (sin((n+1)p) - theta sin(np)).
// Interior ansatz rows are satisfied identically; the two glue rows force
// f(p; alpha/s) * f(p; alpha/(1-s)) = 2. Throws std::domain_error when the
// denominator magnitude is 1e-14 or less (a pole; callers bracket around it).
double f_quant(double p, int n, double theta);

// Same with sin -> sinh (evanescent branch, lambda below the band). Scaled by
// e^{-(n+1)q} internally so large n q does not overflow.
double f_quant_hyperbolic(double q, int n, double theta);

enum class Branch { hyperbolic, goniometric };

struct QuantizationRoot {
  Branch branch = Branch::goniometric;
  double p = 0;         // momentum (goniometric) or decay rate q (hyperbolic)
  double lambda = 0;    // -2s(1-s) cos p, or -2s(1-s) cosh q
  double residual = 0;  // characteristic residual or relative root-location error, whichever is smaller
  int band_index = 0;   // nearest k of the p ~ k pi/(n+1) window (goniometric)
  double x = 0;         // (p (n+1)/pi - k)(n+1), the O(1/n) window coordinate
};

struct QuantizationOutcome {
  std::vector<QuantizationRoot> roots;  // sorted by lambda, ascending
  // Search windows where bracketing failed (root pair closer than resolution);
  // empty in normal operation away from the crossing.
  std::vector<std::pair<double, double>> failed_windows;
};

// Roots of the quantization condition at fixed (n, alpha, s), s in (0, 1).
// hyperbolic: all roots below the band edge -2s(1-s); goniometric: the lowest
// k_max in-band roots. Bisection on the pole-free cleared form
// P = N1 N2 - 2 D1 D2 of the two matching fractions; residual <= 1e-9 at
// every reported root.
QuantizationOutcome solve_quantization(int n, double alpha, double s, Branch branch,
                                       int k_max = 4);

// Eigenvector for a quantization root, built from the two-sided ansatz
//   u_j = sin((j+1)p) - (alpha/s) sin(jp)  (left), mirror with alpha/(1-s)
// (right), joined at the glue. The raw construction loses all digits when the
// growing exponential's coefficient is tiny, so the result is polished by
// inverse iteration against root.lambda whenever its residual warrants it.
// Unit norm, sign-normalized like eigen_low.
EigenPair ansatz_vector(const QuantizationRoot& root, int n, double alpha, double s);

// Entrance-bound branch energy -(1-s)(alpha + s^2/alpha); exact as n -> inf,
// valid while the bound state exists (s < alpha on the left half).
double analytic_F(double alpha, double s);

// |u> branch energy -3 s(1-s)/sqrt(2).
double analytic_G(double s);

// Crossing of F and G: s_x = alpha/sqrt(2).
double crossing_point(double alpha);

// Closed-form lowest gap (1-s)(alpha + s^2/alpha) - 3 s(1-s)/sqrt(2) on the
// left of the crossing, mirrored on the right; exact as n -> inf. Valid for
// min(s, 1-s) <= s_x; past the crossing it is only the envelope difference
// and a one-time warning is printed to stderr.
double analytic_gap10(double alpha, double s);

struct GapProfile {
  int n = 0;
  double alpha = 0;
  std::vector<double> s;
  std::vector<double> delta10;
  std::vector<double> delta21;
};
GapProfile gap_profile(int n, double alpha, std::span<const double> s_grid);

// Annealing stage boundaries: delta = kappa / n^3 around the two crossings,
//   s1 = s_x - delta, s2 = s_x + delta, s3 = 1 - s2, s4 = 1 - s1.
// Throws std::invalid_argument unless 0 < s1 < s2 < s3 < s4 < 1.
struct StageBoundaries {
  double delta = 0;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  int stage_of(double s) const;  // 1..5
};
StageBoundaries stage_boundaries(int n, double alpha, double kappa = 1.0);

}  // namespace gluedtrees
