#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "gluedtrees/spectral.hpp"

namespace gluedtrees {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const double kSqrt2 = std::sqrt(2.0);

struct ND {
  double num = 0;
  double den = 0;
};

// Numerator/denominator of the goniometric matching fraction.
ND nd_goniometric(double p, int n, double theta) {
  return {std::sin((n + 2) * p) - theta * std::sin((n + 1) * p),
          std::sin((n + 1) * p) - theta * std::sin(n * p)};
}

// Hyperbolic counterpart with the common factor e^{(n+1)q}/2 divided out, so
// nothing overflows however large n q gets. The ratio is unchanged.
ND nd_hyperbolic(double q, int n, double theta) {
  const double t2n2 = std::exp(-(2 * n + 2) * q);
  return {std::exp(q) - std::exp(-(2 * n + 3) * q) - theta * (1 - t2n2),
          1 - t2n2 - theta * (std::exp(-q) - std::exp(-(2 * n + 1) * q))};
}

// Cleared characteristic: N1 N2 - 2 D1 D2 vanishes exactly where
// f1 f2 = 2 does, but has no poles, so plain bisection applies.
double cleared(const ND& f1, const ND& f2) {
  return f1.num * f2.num - 2 * f1.den * f2.den;
}

double normalized_residual(const ND& f1, const ND& f2) {
  const double nn = f1.num * f2.num;
  const double dd = 2 * f1.den * f2.den;
  return std::abs(nn - dd) / (std::abs(nn) + std::abs(dd) + 1e-300);
}

// The characteristic scale |N1 N2| + |2 D1 D2| can itself cancel toward zero
// at a root, inflating the normalized quotient even though the root location
// is converged to adjacent doubles.  Certify with whichever measure is
// smaller: the normalized residual or the estimated relative distance to the
// true zero, |f| / (|f'| (1 + |x|)).
double root_residual(const std::function<double(double)>& f, double x, double direct) {
  const double h = 1e-9 * (1 + std::abs(x));
  const double slope = (f(x + h) - f(x - h)) / (2 * h);
  if (slope == 0) return direct;
  const double location = std::abs(f(x)) / (std::abs(slope) * (1 + std::abs(x)));
  return std::min(direct, location);
}

double bisect(const std::function<double(double)>& f, double a, double b, double fa) {
  if (a == b || fa == 0) return a;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // interval collapsed to adjacent doubles
    const double fm = f(m);
    if (fm == 0) return m;
    if ((fa < 0) == (fm < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Scans [a, b], collecting sign-change brackets. Local minima of |f| that
// undershoot both neighbors by 4x get rescanned at 256x resolution: a pair of
// roots hiding inside one cell keeps triggering the test, while a smooth
// nonvanishing minimum stops triggering once resolved, so the recursion is
// self-limiting. Windows still dipping at the depth limit are reported as
// failed.
struct RootScanner {
  std::function<double(double)> f;
  std::vector<std::pair<double, double>> brackets;
  std::vector<std::pair<double, double>> failed;

  void scan(double a, double b, int points, int depth) {
    if (!(b > a)) return;
    std::vector<double> xs(points + 1), fs(points + 1);
    for (int i = 0; i <= points; ++i) {
      xs[i] = a + (b - a) * i / points;
      fs[i] = f(xs[i]);
    }
    for (int i = 0; i < points; ++i)
      if (fs[i] == 0 || (fs[i] < 0) != (fs[i + 1] < 0))
        brackets.emplace_back(xs[i], xs[i + 1]);
    if (fs[points] == 0) brackets.emplace_back(xs[points], xs[points]);
    for (int i = 1; i < points; ++i) {
      const double g = std::abs(fs[i]);
      const double gl = std::abs(fs[i - 1]);
      const double gr = std::abs(fs[i + 1]);
      const bool dip = g < 0.25 * std::min(gl, gr) && (fs[i - 1] < 0) == (fs[i + 1] < 0) &&
                       (fs[i] < 0) == (fs[i + 1] < 0);
      if (!dip) continue;
      if (depth > 0) scan(xs[i - 1], xs[i + 1], 512, depth - 1);
      else failed.emplace_back(xs[i - 1], xs[i + 1]);
    }
  }
};

std::vector<double> roots_from_scan(RootScanner& scanner) {
  std::vector<double> roots;
  for (const auto& [a, b] : scanner.brackets)
    roots.push_back(bisect(scanner.f, a, b, scanner.f(a)));
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique_roots;
  for (const double r : roots)
    if (unique_roots.empty() || r - unique_roots.back() > 1e-10 * (1 + std::abs(r)))
      unique_roots.push_back(r);
  return unique_roots;
}

void check_inputs(int n, double alpha, double s) {
  if (n < 1) throw std::invalid_argument("tree depth must be positive");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  if (!(s > 0) || !(s < 1))
    throw std::invalid_argument("quantization is defined for s strictly inside (0, 1)");
}

void normalize_and_fix_sign(std::vector<double>& w) {
  double norm = 0;
  for (const double c : w) norm += c * c;
  norm = std::sqrt(norm);
  if (!std::isfinite(norm) || norm < 1e-280)
    throw std::runtime_error("ansatz vector degenerated to zero");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (std::abs(w[i]) > std::abs(w[arg])) arg = i;
  const double scale = (w[arg] < 0 ? -1.0 : 1.0) / norm;
  for (double& c : w) c *= scale;
}

double eigen_residual(const TridiagonalHamiltonian& h, double lambda,
                      const std::vector<double>& w) {
  std::vector<double> hw(w.size());
  h.apply(w, hw);
  double acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = hw[i] - lambda * w[i];
    acc += r * r;
  }
  return std::sqrt(acc);
}

// One-shot tridiagonal solve of (T - lambda) x = b with partial pivoting
// (dgtsv scheme). Near-singular pivots are clamped to a row-scaled floor so
// the amplification stays bounded (~1e20) even when lambda is an eigenvalue
// to the last ulp; unbounded clamping would overflow the back substitution.
std::vector<double> solve_shifted(const std::vector<double>& diag,
                                  const std::vector<double>& off, double lambda,
                                  std::vector<double> b) {
  const int m = static_cast<int>(diag.size());
  std::vector<double> d(m), du(m > 1 ? m - 1 : 0), dl(m > 1 ? m - 1 : 0);
  std::vector<double> du2(m > 2 ? m - 2 : 0, 0.0);
  for (int i = 0; i < m; ++i) d[i] = diag[i] - lambda;
  for (int i = 0; i + 1 < m; ++i) du[i] = dl[i] = off[i];
  double row_scale = 0;
  for (int i = 0; i < m; ++i) row_scale = std::max(row_scale, std::abs(d[i]));
  for (int i = 0; i + 1 < m; ++i) row_scale = std::max(row_scale, std::abs(off[i]));
  const double tiny = std::max(1e-280, 1e-20 * row_scale);
  for (int i = 0; i + 1 < m; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (std::abs(d[i]) < tiny) d[i] = std::signbit(d[i]) ? -tiny : tiny;
      const double fac = dl[i] / d[i];
      d[i + 1] -= fac * du[i];
      b[i + 1] -= fac * b[i];
    } else {
      const double fac = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fac * temp;
      if (i + 2 < m) {
        du2[i] = du[i + 1];
        du[i + 1] = -fac * du2[i];
      }
      du[i] = temp;
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= fac * b[i];
    }
  }
  if (std::abs(d[m - 1]) < tiny) d[m - 1] = std::signbit(d[m - 1]) ? -tiny : tiny;
  std::vector<double> x(m);
  x[m - 1] = b[m - 1] / d[m - 1];
  if (m > 1) x[m - 2] = (b[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
  for (int i = m - 3; i >= 0; --i)
    x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
  return x;
}

}  // namespace

double f_quant(double p, int n, double theta) {
  const double den = std::sin((n + 1) * p) - theta * std::sin(n * p);
  if (std::abs(den) <= 1e-14)
    throw std::domain_error("matching fraction evaluated at a pole");
  return (std::sin((n + 2) * p) - theta * std::sin((n + 1) * p)) / den;
}

double f_quant_hyperbolic(double q, int n, double theta) {
  const ND f = nd_hyperbolic(q, n, theta);
  // the scaled denominator equals sinh((n+1)q) - theta sinh(nq) divided by
  // e^{(n+1)q}/2; the pole guard applies to the unscaled quantity
  const double rescale = 0.5 * std::exp((n + 1) * std::min(q, 500.0 / (n + 1)));
  if (std::abs(f.den) * rescale <= 1e-14)
    throw std::domain_error("matching fraction evaluated at a pole");
  return f.num / f.den;
}

QuantizationOutcome solve_quantization(int n, double alpha, double s, Branch branch,
                                       int k_max) {
  check_inputs(n, alpha, s);
  const double a1 = alpha / s;
  const double a2 = alpha / (1 - s);
  const double band = 2 * s * (1 - s);
  QuantizationOutcome outcome;

  if (branch == Branch::hyperbolic) {
    RootScanner scanner;
    scanner.f = [&](double q) {
      return cleared(nd_hyperbolic(q, n, a1), nd_hyperbolic(q, n, a2));
    };
    const double q_lo = 1e-12;
    const double q_hi = std::log(std::max({a1, a2, 2.0})) + 1.0;
    scanner.scan(q_lo, q_hi, 8192, 10);
    // evanescent roots live near ln(theta); zoom there so pairs split by far
    // less than a coarse cell (the avoided crossing) are still separated
    for (const double theta : {a1, a2, kSqrt2}) {
      if (theta <= 1.0) continue;
      const double c = std::log(theta);
      for (double r = 1e-2; r >= 1e-13; r *= 0.1)
        scanner.scan(std::max(q_lo, c - r), std::min(q_hi, c + r), 256, 4);
    }
    for (const double q : roots_from_scan(scanner)) {
      QuantizationRoot root;
      root.branch = Branch::hyperbolic;
      root.p = q;
      root.lambda = -band * std::cosh(q);
      root.residual = root_residual(
          scanner.f, q, normalized_residual(nd_hyperbolic(q, n, a1), nd_hyperbolic(q, n, a2)));
      outcome.roots.push_back(root);
    }
    outcome.failed_windows = std::move(scanner.failed);
  } else {
    const double cell = kPi / (n + 1);
    const double half_width = cell - cell / (n + 1);
    for (int k = 1; k <= k_max; ++k) {
      RootScanner scanner;
      scanner.f = [&](double p) {
        return cleared(nd_goniometric(p, n, a1), nd_goniometric(p, n, a2));
      };
      const double center = k * cell;
      const double lo = std::max(1e-12, center - half_width);
      const double hi = std::min(kPi - 1e-12, center + half_width);
      scanner.scan(lo, hi, 1024, 10);
      const auto roots = roots_from_scan(scanner);
      if (roots.empty()) {
        outcome.failed_windows.emplace_back(lo, hi);
        continue;
      }
      for (const double p : roots) {
        QuantizationRoot root;
        root.branch = Branch::goniometric;
        root.p = p;
        root.lambda = -band * std::cos(p);
        root.residual = root_residual(
            scanner.f, p,
            normalized_residual(nd_goniometric(p, n, a1), nd_goniometric(p, n, a2)));
        root.band_index = std::max(1, static_cast<int>(std::lround(p / cell)));
        root.x = (p / cell - root.band_index) * (n + 1);
        outcome.roots.push_back(root);
      }
      for (const auto& w : scanner.failed) outcome.failed_windows.push_back(w);
    }
    // adjacent windows overlap so a root sitting near a cell edge is never
    // missed, but that lets neighbors collect the same root; keep one copy of
    // each and only the k_max lowest (lambda grows with p on (0, pi))
    std::sort(outcome.roots.begin(), outcome.roots.end(),
              [](const QuantizationRoot& a, const QuantizationRoot& b) { return a.p < b.p; });
    std::vector<QuantizationRoot> kept;
    for (const auto& root : outcome.roots)
      if (kept.empty() || root.p - kept.back().p > 1e-10 * (1 + std::abs(root.p)))
        kept.push_back(root);
    if (static_cast<int>(kept.size()) > k_max) kept.resize(k_max);
    outcome.roots = std::move(kept);
  }

  std::sort(outcome.roots.begin(), outcome.roots.end(),
            [](const QuantizationRoot& a, const QuantizationRoot& b) {
              return a.lambda < b.lambda;
            });
  return outcome;
}

EigenPair ansatz_vector(const QuantizationRoot& root, int n, double alpha, double s) {
  check_inputs(n, alpha, s);
  const double a1 = alpha / s;
  const double a2 = alpha / (1 - s);
  const int d = 2 * n + 2;
  std::vector<double> u(n + 2), v(n + 2);
  if (root.branch == Branch::goniometric) {
    const double p = root.p;
    for (int j = 0; j <= n + 1; ++j) {
      u[j] = std::sin((j + 1) * p) - a1 * std::sin(j * p);
      v[j] = std::sin((j + 1) * p) - a2 * std::sin(j * p);
    }
  } else {
    // sin -> sinh form, split into the two exponentials:
    // u_j = cp e^{jq} + cm e^{-jq} reproduces sinh((j+1)q) - theta sinh(jq)
    const double q = root.p;
    const double eq = std::exp(q), emq = std::exp(-q);
    const double cp1 = 0.5 * (eq - a1), cm1 = 0.5 * (a1 - emq);
    const double cp2 = 0.5 * (eq - a2), cm2 = 0.5 * (a2 - emq);
    for (int j = 0; j <= n + 1; ++j) {
      const double grow = std::exp(j * q), decay = std::exp(-j * q);
      u[j] = cp1 * grow + cm1 * decay;
      v[j] = cp2 * grow + cm2 * decay;
    }
  }

  // null vector of the 2x2 glue system A u_{n+1} = sqrt2 B v_n,
  // B v_{n+1} = sqrt2 A u_n, taken from the better-conditioned row
  const double row1 = std::hypot(u[n + 1], kSqrt2 * v[n]);
  const double row2 = std::hypot(kSqrt2 * u[n], v[n + 1]);
  double A, B;
  if (row1 >= row2) {
    A = kSqrt2 * v[n];
    B = u[n + 1];
  } else {
    A = v[n + 1];
    B = kSqrt2 * u[n];
  }

  std::vector<double> w(d);
  for (int j = 0; j <= n; ++j) {
    w[j] = A * u[j];
    w[2 * n + 1 - j] = B * v[j];
  }
  double norm = 0;
  for (const double c : w) norm += c * c;
  if (!(norm > 1e-280)) w.assign(d, 1.0);  // degenerate glue; polish recovers

  normalize_and_fix_sign(w);
  const auto h = column_hamiltonian(n, alpha, s);
  double res = eigen_residual(h, root.lambda, w);
  // the raw construction loses all accuracy when the growing exponential's
  // coefficient sits below round-off; inverse iteration against the analytic
  // eigenvalue restores it in one or two solves. Keep the best iterate: a
  // solve can still blow up or stagnate, and must never replace a better w.
  for (int it = 0; it < 4 && res > 1e-11; ++it) {
    std::vector<double> next = solve_shifted(h.diag, h.off, root.lambda, w);
    double nn = 0;
    for (const double c : next) nn += c * c;
    if (!std::isfinite(nn) || !(nn > 0)) break;
    normalize_and_fix_sign(next);
    const double next_res = eigen_residual(h, root.lambda, next);
    if (!(next_res < res)) break;
    w = std::move(next);
    res = next_res;
  }
  return {root.lambda, std::move(w)};
}

double analytic_F(double alpha, double s) { return -(1 - s) * (alpha + s * s / alpha); }

double analytic_G(double s) { return -3.0 * s * (1 - s) / kSqrt2; }

double crossing_point(double alpha) { return alpha / kSqrt2; }

double analytic_gap10(double alpha, double s) {
  const double left = std::min(s, 1 - s);
  if (left > crossing_point(alpha) + 1e-12) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      std::fprintf(stderr,
                   "analytic_gap10: s=%g is past the crossing at %g; the closed form "
                   "is only an envelope difference there (warning printed once)\n",
                   s, crossing_point(alpha));
  }
  return (1 - left) * (alpha + left * left / alpha) - 3 * left * (1 - left) / kSqrt2;
}

GapProfile gap_profile(int n, double alpha, std::span<const double> s_grid) {
  GapProfile profile;
  profile.n = n;
  profile.alpha = alpha;
  profile.s.assign(s_grid.begin(), s_grid.end());
  profile.delta10.resize(s_grid.size());
  profile.delta21.resize(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const auto h = column_hamiltonian(n, alpha, s_grid[i]);
    const auto e = lowest_eigenvalues(h, 3);
    profile.delta10[i] = e[1] - e[0];
    profile.delta21[i] = e[2] - e[1];
  }
  return profile;
}

int StageBoundaries::stage_of(double s) const {
  if (s < s1) return 1;
  if (s < s2) return 2;
  if (s < s3) return 3;
  if (s < s4) return 4;
  return 5;
}

StageBoundaries stage_boundaries(int n, double alpha, double kappa) {
  if (n < 1) throw std::invalid_argument("tree depth must be positive");
  if (!(kappa > 0)) throw std::invalid_argument("kappa must be positive");
  StageBoundaries b;
  const double sx = crossing_point(alpha);
  b.delta = kappa / (static_cast<double>(n) * n * n);
  b.s1 = sx - b.delta;
  b.s2 = sx + b.delta;
  b.s3 = 1 - b.s2;
  b.s4 = 1 - b.s1;
  if (!(0 < b.s1 && b.s1 < b.s2 && b.s2 < b.s3 && b.s3 < b.s4 && b.s4 < 1))
    throw std::invalid_argument(
        "stage boundaries out of order; kappa/n^3 too wide for this crossing");
  return b;
}

}  // namespace gluedtrees
