#pragma once

#include <optional>
#include <vector>

namespace gluedtrees {

enum class ScheduleKind { linear, gap_adapted };

// Piecewise-linear annealing profile s(t) on [0, T]. make_schedule output has
// s(0) = 0, s(T) = 1 and strictly increasing knots in both coordinates.
struct Schedule {
  ScheduleKind kind = ScheduleKind::linear;
  double T = 0;
  double epsilon = 0;
  std::vector<double> knot_t;
  std::vector<double> knot_s;

  double s_at(double t) const;
  double rate_at(double t) const;    // ds/dt on the knot interval holding t
  double time_of_s(double s) const;  // inverse profile
  // Largest knot time <= t, as a knot index; steps must not straddle knots.
  std::size_t interval_of(double t) const;
};

struct GapAdaptedOptions {
  double kappa = 1.0;        // stage-boundary width parameter, delta = kappa/n^3
  double floor_coeff = 1.0;  // gap floor c/n^3 so the rate never fully stalls
  int min_knots = 512;
};

// linear: s = t/T with T = n^6/epsilon unless overridden.
// gap_adapted: ds/dt = epsilon * max(Delta10(s), floor)^2, integrated on an
// s-grid refined geometrically around both crossings; T comes out of the
// integration (T_override rescales the whole profile if given).
Schedule make_schedule(ScheduleKind kind, int n, double alpha, double epsilon,
                       std::optional<double> T_override = {},
                       const GapAdaptedOptions& opts = {});

// Two-knot segment sweeping s linearly from s0 to s1 over [0, T]; the piece
// transfer experiments evolve across.
Schedule make_linear_segment(double s0, double s1, double T);

}  // namespace gluedtrees
