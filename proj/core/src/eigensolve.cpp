#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gluedtrees/spectral.hpp"

namespace gluedtrees {

namespace {

// Sturm count: eigenvalues of the tridiagonal strictly below x, from the
// signs of the LDL^T pivots of H - xI. Zero pivots are nudged by pivmin, the
// standard bisection safeguard.
int sturm_count_below(const TridiagonalHamiltonian& h, double x) {
  const auto d = h.dim();
  double offmax = 0;
  for (const double e : h.off) offmax = std::max(offmax, std::abs(e));
  const double pivmin =
      std::numeric_limits<double>::min() * std::max(1.0, offmax * offmax);
  int count = 0;
  double piv = h.diag[0] - x;
  if (std::abs(piv) < pivmin) piv = -pivmin;
  if (piv < 0) ++count;
  for (std::size_t i = 1; i < d; ++i) {
    piv = h.diag[i] - x - h.off[i - 1] * h.off[i - 1] / piv;
    if (std::abs(piv) < pivmin) piv = -pivmin;
    if (piv < 0) ++count;
  }
  return count;
}

void gershgorin_bounds(const TridiagonalHamiltonian& h, double& lo, double& hi) {
  const auto d = h.dim();
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (std::size_t i = 0; i < d; ++i) {
    double r = 0;
    if (i > 0) r += std::abs(h.off[i - 1]);
    if (i + 1 < d) r += std::abs(h.off[i]);
    lo = std::min(lo, h.diag[i] - r);
    hi = std::max(hi, h.diag[i] + r);
  }
}

}  // namespace

int eigenvalue_count_below(const TridiagonalHamiltonian& h, double x) {
  return sturm_count_below(h, x);
}

std::vector<double> lowest_eigenvalues(const TridiagonalHamiltonian& h, int k) {
  const auto d = static_cast<int>(h.dim());
  if (k < 1 || k > d) throw std::invalid_argument("eigenvalue count out of range");
  double glo, ghi;
  gershgorin_bounds(h, glo, ghi);
  const double span_eps = 4 * std::numeric_limits<double>::epsilon();
  std::vector<double> out(k);
  for (int idx = 0; idx < k; ++idx) {
    double lo = glo, hi = ghi;
    // invariant: count(lo) <= idx < count(hi)
    while (hi - lo > span_eps * std::max({std::abs(lo), std::abs(hi), 1e-3})) {
      const double mid = 0.5 * (lo + hi);
      if (sturm_count_below(h, mid) > idx) hi = mid;
      else lo = mid;
    }
    out[idx] = 0.5 * (lo + hi);
  }
  return out;
}

std::vector<EigenPair> eigen_low(const TridiagonalHamiltonian& h, int k) {
  const auto d = static_cast<int>(h.dim());
  if (k < 1 || k > d) throw std::invalid_argument("eigenpair count out of range");

  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(h.diag.data(), d);
  Eigen::VectorXd off = Eigen::Map<const Eigen::VectorXd>(h.off.data(), d - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("tridiagonal eigensolve did not converge");

  std::vector<EigenPair> out(k);
  for (int idx = 0; idx < k; ++idx) {
    out[idx].value = solver.eigenvalues()(idx);
    out[idx].vector.resize(d);
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    // sign convention: largest-magnitude component positive
    int arg = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    if (v(arg) < 0) v = -v;
    Eigen::Map<Eigen::VectorXd>(out[idx].vector.data(), d) = v;
  }
  return out;
}

}  // namespace gluedtrees
