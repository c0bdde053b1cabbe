#include "gluedtrees/column.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gluedtrees/graph.hpp"
#include "gluedtrees/util.hpp"

namespace gluedtrees {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned max_threads) {
  unsigned workers = max_threads ? max_threads : std::thread::hardware_concurrency();
  if (workers < 1) workers = 1;
  if (workers > count) workers = static_cast<unsigned>(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

namespace {
template <typename Scalar>
void tridiag_apply(const TridiagonalHamiltonian& h, std::span<const Scalar> x,
                   std::span<Scalar> y) {
  const auto d = h.dim();
  if (x.size() != d || y.size() != d)
    throw std::invalid_argument("state dimension does not match Hamiltonian");
  for (std::size_t i = 0; i < d; ++i) {
    Scalar acc = h.diag[i] * x[i];
    if (i > 0) acc += h.off[i - 1] * x[i - 1];
    if (i + 1 < d) acc += h.off[i] * x[i + 1];
    y[i] = acc;
  }
}
}  // namespace

void TridiagonalHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  tridiag_apply(*this, x, y);
}
void TridiagonalHamiltonian::apply(std::span<const std::complex<double>> x,
                                   std::span<std::complex<double>> y) const {
  tridiag_apply(*this, x, y);
}

TridiagonalHamiltonian column_hamiltonian(int n, double alpha, double s) {
  if (n < 1) throw std::invalid_argument("tree depth must be positive");
  if (!(alpha > 0.0) || !(alpha < 0.5))
    throw std::invalid_argument("alpha must lie in (0, 1/2)");
  if (!(s >= 0.0) || !(s <= 1.0)) throw std::invalid_argument("s must lie in [0, 1]");
  TridiagonalHamiltonian h;
  h.n = n;
  h.alpha = alpha;
  h.s = s;
  const int d = 2 * n + 2;
  h.diag.assign(d, 0.0);
  h.diag[0] = -(1 - s) * alpha;
  h.diag[d - 1] = -s * alpha;
  h.off.assign(d - 1, -s * (1 - s));
  h.off[n] *= std::sqrt(2.0);  // doubled branching across the glue
  return h;
}

std::vector<double> uniform_state(int n) {
  const int d = 2 * n + 2;
  const double total = static_cast<double>((std::uint64_t{1} << (n + 2)) - 2);
  std::vector<double> u(d);
  for (int j = 0; j < d; ++j)
    u[j] = std::sqrt(static_cast<double>(column_size(n, j)) / total);
  return u;
}

std::vector<double> basis_state(int n, int j) {
  const int d = 2 * n + 2;
  if (j < 0 || j >= d) throw std::invalid_argument("column index out of range");
  std::vector<double> e(d, 0.0);
  e[j] = 1.0;
  return e;
}

double u_residual(int n, double alpha, double s) {
  const auto h = column_hamiltonian(n, alpha, s);
  const auto u = uniform_state(n);
  std::vector<double> hu(u.size());
  h.apply(u, hu);
  const double g = -3.0 * s * (1 - s) / std::sqrt(2.0);
  double acc = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = hu[j] - g * u[j];
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace gluedtrees
