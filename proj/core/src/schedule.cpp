#include "gluedtrees/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gluedtrees/spectral.hpp"

namespace gluedtrees {

namespace {
std::size_t locate(const std::vector<double>& knots, double v) {
  // index of the interval [knots[i], knots[i+1]) holding v, clamped
  if (v <= knots.front()) return 0;
  if (v >= knots.back()) return knots.size() - 2;
  const auto it = std::upper_bound(knots.begin(), knots.end(), v);
  return static_cast<std::size_t>(it - knots.begin()) - 1;
}
}  // namespace

double Schedule::s_at(double t) const {
  const auto i = locate(knot_t, t);
  const double w = (t - knot_t[i]) / (knot_t[i + 1] - knot_t[i]);
  const double s = knot_s[i] + w * (knot_s[i + 1] - knot_s[i]);
  return std::clamp(s, std::min(knot_s.front(), knot_s.back()),
                    std::max(knot_s.front(), knot_s.back()));
}

double Schedule::rate_at(double t) const {
  const auto i = locate(knot_t, t);
  return (knot_s[i + 1] - knot_s[i]) / (knot_t[i + 1] - knot_t[i]);
}

double Schedule::time_of_s(double s) const {
  const auto i = locate(knot_s, s);
  const double w = (s - knot_s[i]) / (knot_s[i + 1] - knot_s[i]);
  const double t = knot_t[i] + w * (knot_t[i + 1] - knot_t[i]);
  return std::clamp(t, knot_t.front(), knot_t.back());
}

std::size_t Schedule::interval_of(double t) const { return locate(knot_t, t); }

Schedule make_linear_segment(double s0, double s1, double T) {
  if (!(T > 0)) throw std::invalid_argument("segment time must be positive");
  Schedule sched;
  sched.kind = ScheduleKind::linear;
  sched.T = T;
  sched.knot_t = {0.0, T};
  sched.knot_s = {s0, s1};
  return sched;
}

Schedule make_schedule(ScheduleKind kind, int n, double alpha, double epsilon,
                       std::optional<double> T_override, const GapAdaptedOptions& opts) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (n < 1) throw std::invalid_argument("tree depth must be positive");
  if (T_override && !(*T_override > 0))
    throw std::invalid_argument("total time override must be positive");

  if (kind == ScheduleKind::linear) {
    const double T = T_override ? *T_override : std::pow(static_cast<double>(n), 6) / epsilon;
    auto sched = make_linear_segment(0.0, 1.0, T);
    sched.epsilon = epsilon;
    return sched;
  }

  // gap-adapted: ds/dt = epsilon * max(Delta10(s), floor)^2. The s-grid is
  // uniform plus geometric refinement into both crossings, where the true gap
  // bottoms out exponentially small.
  const double floor_gap = opts.floor_coeff / (static_cast<double>(n) * n * n);
  const double sx = crossing_point(alpha);
  std::vector<double> grid;
  const int base = std::max(opts.min_knots, 1024);
  grid.reserve(base + 256);
  for (int i = 0; i <= base; ++i) grid.push_back(static_cast<double>(i) / base);
  for (const double c : {sx, 1 - sx})
    for (double r = 0.25; r > 1e-14; r *= 0.5) {
      if (c - r > 0) grid.push_back(c - r);
      if (c + r < 1) grid.push_back(c + r);
    }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> rate_integrand(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto h = column_hamiltonian(n, alpha, grid[i]);
    const auto e = lowest_eigenvalues(h, 2);
    const double gap = std::max(e[1] - e[0], floor_gap);
    rate_integrand[i] = 1.0 / (epsilon * gap * gap);
  }

  Schedule sched;
  sched.kind = ScheduleKind::gap_adapted;
  sched.epsilon = epsilon;
  sched.knot_s = std::move(grid);
  sched.knot_t.resize(sched.knot_s.size());
  sched.knot_t[0] = 0;
  for (std::size_t i = 1; i < sched.knot_s.size(); ++i)
    sched.knot_t[i] = sched.knot_t[i - 1] +
                      (sched.knot_s[i] - sched.knot_s[i - 1]) * 0.5 *
                          (rate_integrand[i - 1] + rate_integrand[i]);
  sched.T = sched.knot_t.back();
  if (!std::isfinite(sched.T))
    throw std::runtime_error("schedule duration overflows; epsilon is too small");
  if (T_override) {
    const double scale = *T_override / sched.T;
    for (double& t : sched.knot_t) t *= scale;
    sched.T = *T_override;
  }
  return sched;
}

}  // namespace gluedtrees
