#include <cmath>
#include <vector>

#include "doctest.h"
#include "gluedtrees/column.hpp"
#include "gluedtrees/spectral.hpp"

using namespace gluedtrees;

namespace {
constexpr double kAlpha = 0.35355339059327373;  // 1/sqrt(8)
constexpr double kPi = 3.141592653589793;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double residual_norm(const TridiagonalHamiltonian& h, const EigenPair& e) {
  std::vector<double> hv(h.dim());
  h.apply(e.vector, hv);
  double r2 = 0;
  for (std::size_t i = 0; i < hv.size(); ++i) {
    double d = hv[i] - e.value * e.vector[i];
    r2 += d * d;
  }
  return std::sqrt(r2);
}
}  // namespace

TEST_CASE("eigen_low solves the diagonal s=0 case exactly") {
  auto h = column_hamiltonian(10, kAlpha, 0.0);
  auto pairs = eigen_low(h, 2);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].value == doctest::Approx(-kAlpha).epsilon(1e-13));
  CHECK(pairs[1].value == doctest::Approx(0.0).scale(1).epsilon(1e-13));
  CHECK(std::abs(pairs[0].vector[0]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pairs[0].vector[0] > 0);  // sign convention
}

TEST_CASE("eigen_low meets its residual and orthonormality contract") {
  for (double s : {0.1, 0.25, 0.5, 0.9}) {
    auto h = column_hamiltonian(12, kAlpha, s);
    auto pairs = eigen_low(h, 4);
    REQUIRE(pairs.size() == 4);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(residual_norm(h, pairs[i]) <= 1e-10);
      CHECK(dot(pairs[i].vector, pairs[i].vector) == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t j = 0; j < i; ++j) {
        CHECK(std::abs(dot(pairs[i].vector, pairs[j].vector)) <= 1e-10);
        CHECK(pairs[j].value <= pairs[i].value);
      }
    }
  }
}

TEST_CASE("full spectrum reproduces the trace") {
  auto h = column_hamiltonian(6, kAlpha, 0.37);
  int d = static_cast<int>(h.dim());
  auto pairs = eigen_low(h, d);
  double sum = 0, trace = 0;
  for (const auto& p : pairs) sum += p.value;
  for (auto v : h.diag) trace += v;
  CHECK(sum == doctest::Approx(trace).epsilon(1e-11));
}

TEST_CASE("two independent eigenvalue routes agree") {
  for (double s : {0.05, 0.2, 0.25, 0.4, 0.5, 0.75}) {
    auto h = column_hamiltonian(9, kAlpha, s);
    auto pairs = eigen_low(h, 3);
    auto values = lowest_eigenvalues(h, 3);
    REQUIRE(values.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(values[i] - pairs[i].value) <= 1e-10);
  }
}

TEST_CASE("eigen_low is deterministic and rejects bad k") {
  auto h = column_hamiltonian(7, kAlpha, 0.3);
  auto a = eigen_low(h, 3);
  auto b = eigen_low(h, 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].vector == b[i].vector);
  }
  CHECK_THROWS_AS(eigen_low(h, 0), std::invalid_argument);
  CHECK_THROWS_AS(eigen_low(h, 17), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenvalues(h, 0), std::invalid_argument);
}

TEST_CASE("eigenvalue_count_below separates bound states from the band") {
  auto h = column_hamiltonian(8, kAlpha, 0.15);
  double band_edge = -2 * 0.15 * 0.85;  // lambda = -2s(1-s) cos p needs |cos| <= 1
  CHECK(eigenvalue_count_below(h, band_edge) == 2);
  CHECK(eigenvalue_count_below(h, -1.0) == 0);
  CHECK(eigenvalue_count_below(h, 1.0) == static_cast<int>(h.dim()));
}

TEST_CASE("ground energy follows the bound-state form before the crossing") {
  auto h = column_hamiltonian(10, kAlpha, 0.1);
  auto pairs = eigen_low(h, 1);
  CHECK(std::abs(pairs[0].value - analytic_F(kAlpha, 0.1)) <= std::pow(2.0, -5));
}

TEST_CASE("third level at the middle matches the band closed form") {
  auto pairs = eigen_low(column_hamiltonian(10, kAlpha, 0.5), 3);
  CHECK(std::abs(pairs[2].value + 0.5 * std::cos(kPi / 11.0)) <= 0.02);
}

TEST_CASE("matching fraction closed-form point") {
  for (double theta : {0.3, 1.0, 2.5})
    CHECK(f_quant(kPi / 2, 2, theta) == doctest::Approx(-theta).epsilon(1e-12));
}

TEST_CASE("matching fraction signals its poles") {
  // pick theta so the denominator sin(4p) - theta sin(3p) vanishes at p=0.5
  double theta = std::sin(4 * 0.5) / std::sin(3 * 0.5);
  CHECK_THROWS_AS(f_quant(0.5, 3, theta), std::domain_error);
}

TEST_CASE("hyperbolic product at q=ln sqrt(2) approaches 2 from finite n") {
  double q1 = std::log(std::sqrt(2.0));
  double s = 0.2;
  double prev = 1.0;
  for (int n : {20, 30, 40}) {
    double ap = kAlpha / s, bp = kAlpha / (1 - s);
    double prod = f_quant_hyperbolic(q1, n, ap) * f_quant_hyperbolic(q1, n, bp);
    double err = std::abs(prod - 2.0);
    CHECK(err <= prev * 0.51);  // at least halves every 10 levels
    prev = err;
  }
  CHECK(prev <= 1e-5);
}

TEST_CASE("hyperbolic roots approach their asymptotic momenta") {
  double s = 0.15;
  auto out = solve_quantization(40, kAlpha, s, Branch::hyperbolic);
  REQUIRE(out.roots.size() >= 2);
  CHECK(out.failed_windows.empty());
  double q_bound = std::log(kAlpha / s);
  double q_u = std::log(std::sqrt(2.0));
  // deepest root is the entrance-bound state, next is the u-like level
  CHECK(std::abs(out.roots[0].p - q_bound) <= 1e-3);
  CHECK(std::abs(out.roots[1].p - q_u) <= 1e-3);
}

TEST_CASE("every reported root satisfies its own identity and residual bound") {
  for (double s : {0.1, 0.3, 0.5})
    for (auto branch : {Branch::hyperbolic, Branch::goniometric}) {
      auto out = solve_quantization(12, kAlpha, s, branch);
      for (const auto& r : out.roots) {
        CHECK(r.residual <= 1e-9);
        double lambda = (branch == Branch::goniometric)
                            ? -2 * s * (1 - s) * std::cos(r.p)
                            : -2 * s * (1 - s) * std::cosh(r.p);
        CHECK(r.lambda == doctest::Approx(lambda).epsilon(1e-14));
      }
    }
}

TEST_CASE("quantization roots cross-validate against the eigensolver") {
  // the n=16 bound-state pair at s=0.15, and in-band roots at s=0.5
  auto h = column_hamiltonian(16, kAlpha, 0.15);
  auto pairs = eigen_low(h, 2);
  auto out = solve_quantization(16, kAlpha, 0.15, Branch::hyperbolic);
  REQUIRE(out.roots.size() >= 2);
  CHECK(std::abs(out.roots[0].lambda - pairs[0].value) <= 1e-8);
  CHECK(std::abs(out.roots[1].lambda - pairs[1].value) <= 1e-8);

  // at s=1/2 the ground state is the lone evanescent root below the band
  // edge -2s(1-s); the in-band roots then line up with eigenvalues 1,2,3
  auto hg = column_hamiltonian(14, kAlpha, 0.5);
  auto pg = eigen_low(hg, 4);
  auto oh = solve_quantization(14, kAlpha, 0.5, Branch::hyperbolic);
  REQUIRE(oh.roots.size() == 1);
  CHECK(oh.roots[0].lambda < -2 * 0.5 * 0.5);
  CHECK(std::abs(oh.roots[0].lambda - pg[0].value) <= 1e-8);
  auto og = solve_quantization(14, kAlpha, 0.5, Branch::goniometric, 3);
  REQUIRE(og.roots.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(og.roots[i].lambda - pg[i + 1].value) <= 1e-8);
}

TEST_CASE("window coordinate of the lowest middle root matures toward -2.82") {
  auto root_x = [](int n) {
    auto out = solve_quantization(n, kAlpha, 0.5, Branch::goniometric, 1);
    REQUIRE(out.roots.size() >= 1);
    return out.roots[0].x;
  };
  CHECK(root_x(10) == doctest::Approx(-2.0257).epsilon(0.01));
  CHECK(root_x(48) == doctest::Approx(-2.6482).epsilon(0.01));
  CHECK(root_x(48) < root_x(20));  // drifts toward the asymptote
}

TEST_CASE("ansatz vectors polish to eigensolver quality") {
  for (double s : {0.12, 0.35})
    for (int n : {8, 14}) {
      auto h = column_hamiltonian(n, kAlpha, s);
      for (auto branch : {Branch::hyperbolic, Branch::goniometric}) {
        auto out = solve_quantization(n, kAlpha, s, branch, 2);
        for (const auto& r : out.roots) {
          auto v = ansatz_vector(r, n, kAlpha, s);
          CHECK(residual_norm(h, v) <= 1e-8);
          // match against the eigenpair of the same eigenvalue
          auto pairs = eigen_low(h, static_cast<int>(h.dim()));
          double best = 0;
          for (const auto& p : pairs)
            if (std::abs(p.value - r.lambda) <= 1e-7)
              best = std::max(best, std::abs(dot(p.vector, v.vector)));
          CHECK(best >= 1 - 1e-6);
        }
      }
    }
}

TEST_CASE("u-like ansatz converges to the uniform state") {
  double s = 0.2;
  auto out = solve_quantization(20, kAlpha, s, Branch::hyperbolic);
  REQUIRE(out.roots.size() >= 2);
  auto v = ansatz_vector(out.roots[1], 20, kAlpha, s);
  auto u = uniform_state(20);
  CHECK(std::abs(dot(v.vector, u)) >= 1 - std::pow(2.0, -20.0 / 2 + 2));
}

TEST_CASE("small-s ground ansatz collapses onto the entrance") {
  auto out = solve_quantization(10, kAlpha, 0.02, Branch::hyperbolic);
  REQUIRE(!out.roots.empty());
  auto v = ansatz_vector(out.roots[0], 10, kAlpha, 0.02);
  CHECK(std::abs(v.vector[0]) >= 0.995);
}

TEST_CASE("closed forms: F, G, the crossing, and the early gap") {
  CHECK(analytic_F(kAlpha, 0.0) == doctest::Approx(-kAlpha).epsilon(1e-15));
  CHECK(analytic_G(0.5) == doctest::Approx(-3.0 / (4 * std::sqrt(2.0))).epsilon(1e-15));
  double sx = crossing_point(kAlpha);
  CHECK(sx == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(crossing_point(0.2) == doctest::Approx(0.2 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(analytic_F(kAlpha, sx) == doctest::Approx(analytic_G(sx)).epsilon(1e-12));

  CHECK(analytic_gap10(kAlpha, 0.0) == doctest::Approx(kAlpha).epsilon(1e-14));
  CHECK(std::abs(analytic_gap10(kAlpha, sx)) <= 1e-14);
  auto pairs = eigen_low(column_hamiltonian(12, kAlpha, 0.1), 2);
  double numeric = pairs[1].value - pairs[0].value;
  CHECK(std::abs(analytic_gap10(kAlpha, 0.1) - numeric) <= std::pow(2.0, -6));
}

TEST_CASE("gap profile dips at the crossing and mirrors in s") {
  std::vector<double> grid;
  for (int i = 1; i < 100; ++i) grid.push_back(i / 100.0);
  auto prof = gap_profile(10, kAlpha, grid);
  REQUIRE(prof.delta10.size() == grid.size());
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(prof.delta10[i] >= 0);
    CHECK(prof.delta21[i] >= 0);
    if (prof.delta10[i] < prof.delta10[argmin]) argmin = i;
  }
  CHECK(std::abs(prof.s[argmin] - 0.25) <= 0.01);
  // delta21 near the middle is the c/n^3 scale
  CHECK(prof.delta21[49] == doctest::Approx(0.009).epsilon(0.34));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t m = grid.size() - 1 - i;
    CHECK(std::abs(prof.delta10[i] - prof.delta10[m]) <= 1e-9);
  }
}

TEST_CASE("first gap keeps the 1/n^3 floor outside the windows") {
  for (int n : {8, 16, 24, 40}) {
    auto b = stage_boundaries(n, kAlpha, 1.0);
    double n3 = std::pow(static_cast<double>(n), 3.0);
    for (int i = 0; i <= 50; ++i) {
      double s_lo = b.s1 * i / 50.0;
      double s_hi = b.s2 + (0.5 - b.s2) * i / 50.0;
      for (double s : {s_lo, s_hi}) {
        if (s <= 0.0) continue;
        auto v = lowest_eigenvalues(column_hamiltonian(n, kAlpha, s), 2);
        CHECK((v[1] - v[0]) * n3 >= 0.4);
      }
    }
  }
}

TEST_CASE("second gap at the middle scales no faster than (n+1)^-3") {
  for (int n = 8; n <= 64; n += 8) {
    auto v = lowest_eigenvalues(column_hamiltonian(n, kAlpha, 0.5), 3);
    double scaled = (v[2] - v[1]) * std::pow(n + 1.0, 3.0);
    CHECK(scaled >= 5.0);
  }
}

TEST_CASE("stage boundaries: values, identities, ordering, stages") {
  auto b = stage_boundaries(10, kAlpha, 1.0);
  CHECK(b.delta == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(b.s1 == doctest::Approx(0.249).epsilon(1e-12));
  CHECK(b.s2 == doctest::Approx(0.251).epsilon(1e-12));
  CHECK(b.s3 == doctest::Approx(0.749).epsilon(1e-12));
  CHECK(b.s4 == doctest::Approx(0.751).epsilon(1e-12));
  CHECK(b.s3 == doctest::Approx(1 - b.s2).epsilon(1e-15));
  CHECK(b.s4 == doctest::Approx(1 - b.s1).epsilon(1e-15));
  CHECK(0 < b.s1);
  CHECK(b.s1 < b.s2);
  CHECK(b.s2 <= 0.5);
  CHECK(b.s3 < b.s4);
  CHECK(b.s4 < 1);

  CHECK(b.stage_of(0.1) == 1);
  CHECK(b.stage_of(0.25) == 2);
  CHECK(b.stage_of(0.5) == 3);
  CHECK(b.stage_of(0.75) == 4);
  CHECK(b.stage_of(0.9) == 5);

  CHECK_THROWS_AS(stage_boundaries(2, kAlpha, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(stage_boundaries(10, kAlpha, 0.0), std::invalid_argument);
}

TEST_CASE("quantization avoids bogus windows away from the crossing") {
  auto out = solve_quantization(10, kAlpha, 0.15, Branch::hyperbolic);
  CHECK(out.failed_windows.empty());
  auto og = solve_quantization(10, kAlpha, 0.45, Branch::goniometric, 4);
  CHECK(og.failed_windows.empty());
  CHECK_THROWS_AS(solve_quantization(10, kAlpha, 0.0, Branch::hyperbolic),
                  std::invalid_argument);
}
