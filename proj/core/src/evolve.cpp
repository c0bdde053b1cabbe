#include "gluedtrees/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "gluedtrees/column.hpp"
#include "gluedtrees/util.hpp"

namespace gluedtrees {

namespace {

using cvec = std::vector<std::complex<double>>;

// Hamiltonian frozen at an adjustable s, applied to complex states. The two
// instantiations share the stepping loop below.
class ColumnOperator {
 public:
  ColumnOperator(int n, double alpha) : h_(column_hamiltonian(n, alpha, 0.5)) {}
  std::size_t dim() const { return h_.dim(); }
  double norm_bound() const { return h_.alpha + std::sqrt(2.0) * 0.5; }
  void set_s(double s) {
    const double hop = -s * (1 - s);
    std::fill(h_.off.begin(), h_.off.end(), hop);
    h_.off[static_cast<std::size_t>(h_.n)] = hop * std::sqrt(2.0);
    h_.diag.front() = -(1 - s) * h_.alpha;
    h_.diag.back() = -s * h_.alpha;
    h_.s = s;
  }
  void apply(const cvec& x, cvec& y) const { h_.apply(x, std::span<std::complex<double>>(y)); }

 private:
  TridiagonalHamiltonian h_;
};

class VertexOperator {
 public:
  VertexOperator(const GluedTreesInstance& g, double alpha) : g_(&g), alpha_(alpha) {}
  std::size_t dim() const { return g_->vertex_count(); }
  double norm_bound() const { return alpha_ + 3.0 / std::sqrt(2.0) * 0.25; }
  void set_s(double s) {
    hop_ = -s * (1 - s) / std::sqrt(2.0);
    corner_in_ = -(1 - s) * alpha_;
    corner_out_ = -s * alpha_;
  }
  void apply(const cvec& x, cvec& y) const {
    const auto& adj = g_->adjacency;
    for (std::size_t v = 0; v < x.size(); ++v) {
      std::complex<double> acc = 0;
      for (const auto w : adj[v])
        if (w >= 0) acc += x[w];
      y[v] = hop_ * acc;
    }
    y[g_->entrance] += corner_in_ * x[g_->entrance];
    y[g_->exit] += corner_out_ * x[g_->exit];
  }

 private:
  const GluedTreesInstance* g_;
  double alpha_;
  double hop_ = 0, corner_in_ = 0, corner_out_ = 0;
};

double norm2(const cvec& x) {
  double acc = 0;
  for (const auto& c : x) acc += std::norm(c);
  return acc;
}

double diff_norm(const cvec& a, const cvec& b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

// out = exp(-i dt H(s_mid)) in, by Taylor series on the matvec. Terms stop
// once below round-off relative to a unit-norm state; dt is kept small enough
// by the caller (dt ||H|| <= 3) that no catastrophic cancellation occurs.
template <class Op>
void exp_step(Op& op, double s_mid, double dt, const cvec& in, cvec& out, cvec& term,
              cvec& scratch) {
  op.set_s(s_mid);
  out = in;
  term = in;
  for (int k = 1; k <= 80; ++k) {
    op.apply(term, scratch);
    const double c = dt / k;
    double tnorm2 = 0;
    for (std::size_t i = 0; i < term.size(); ++i) {
      // term <- (-i c) H term
      term[i] = {c * scratch[i].imag(), -c * scratch[i].real()};
      out[i] += term[i];
      tnorm2 += std::norm(term[i]);
    }
    if (tnorm2 <= 1e-36) return;
  }
  throw std::runtime_error("matrix exponential series failed to settle");
}

struct IntegrationStats {
  std::uint64_t steps = 0;
  std::uint64_t floor_steps = 0;
};

// Midpoint-frozen exponential stepping with an embedded step-halving error
// controller. Every probe_stride-th step (and the first step after each
// schedule knot, where the rate jumps) is recomputed as two half steps; the
// difference is held under tolerance * dt / T so the accumulated deviation
// over the run stays below tolerance. Steps land exactly on sample times and
// knots. on_sample fires at each sample time with the current state.
template <class Op>
IntegrationStats integrate(Op& op, const Schedule& sched, cvec& psi,
                           const std::vector<double>& sample_times,
                           const EvolveOptions& opt,
                           const std::function<void(double, const cvec&)>& on_sample) {
  const double T = sched.T;
  if (!(T > 0)) throw std::invalid_argument("schedule has no duration");

  std::vector<double> events = sample_times;
  events.insert(events.end(), sched.knot_t.begin(), sched.knot_t.end());
  events.push_back(T);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  std::erase_if(events, [T](double t) { return t <= 0 || t > T; });

  std::size_t next_sample = 0;
  while (next_sample < sample_times.size() && sample_times[next_sample] <= 0) {
    on_sample(0.0, psi);
    ++next_sample;
  }

  const double dt_cap = 3.0 / op.norm_bound();
  const double dt_min = T * 1e-13;
  double dt = opt.dt_init > 0 ? opt.dt_init : std::min(dt_cap * 0.1, T / 64);
  dt = std::min(dt * opt.dt_scale, dt_cap);

  cvec full(psi.size()), half(psi.size()), out(psi.size());
  cvec term(psi.size()), scratch(psi.size());

  IntegrationStats stats;
  std::uint32_t since_probe = opt.probe_stride;  // probe the very first step
  double t = 0;
  for (std::size_t ev = 0; ev < events.size();) {
    const double target = events[ev];
    bool arrived = false;
    const double gap_to_target = target - t;
    double dt_step = dt;
    if (gap_to_target <= dt * (1 + 1e-12)) {
      dt_step = gap_to_target;
      arrived = true;
    }

    if (since_probe >= opt.probe_stride) {
      exp_step(op, sched.s_at(t + 0.5 * dt_step), dt_step, psi, full, term, scratch);
      exp_step(op, sched.s_at(t + 0.25 * dt_step), 0.5 * dt_step, psi, out, term, scratch);
      exp_step(op, sched.s_at(t + 0.75 * dt_step), 0.5 * dt_step, out, half, term, scratch);
      const double err = diff_norm(full, half);
      // Tiny event-gap steps push tolerance*dt/T below round-off; the probe
      // difference is then pure floating-point noise and must not be judged.
      const double budget = std::max(opt.tolerance * dt_step / T, 1e-14);
      if (err > budget) {
        if (dt_step <= dt_min)
          throw std::runtime_error("step size underflow in the evolution controller");
        const double shrink =
            std::clamp(0.85 * std::sqrt(budget / std::max(err, 1e-300)), 0.1, 0.7);
        dt = std::max(dt_step * shrink, dt_min);
        continue;  // retry the same stretch with a smaller step
      }
      psi.swap(half);
      since_probe = 0;
      if (err < 0.02 * budget) dt = std::min(dt * 1.9, dt_cap);
    } else {
      exp_step(op, sched.s_at(t + 0.5 * dt_step), dt_step, psi, out, term, scratch);
      psi.swap(out);
      ++since_probe;
    }
    ++stats.steps;
    if (dt_step <= dt_min * 1.01) ++stats.floor_steps;

    if (arrived) {
      t = target;
      while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
        on_sample(t, psi);
        ++next_sample;
      }
      // crossing a knot bends s(t): re-probe immediately
      const auto& kt = sched.knot_t;
      if (std::binary_search(kt.begin(), kt.end(), target)) since_probe = opt.probe_stride;
      ++ev;
    } else {
      t += dt_step;
    }
  }
  return stats;
}

std::vector<double> sample_grid(double T, int sample_count,
                                const std::vector<double>& extra) {
  if (sample_count < 2) throw std::invalid_argument("need at least two samples");
  std::vector<double> ts(sample_count);
  for (int i = 0; i < sample_count; ++i)
    ts[i] = T * static_cast<double>(i) / (sample_count - 1);
  ts.back() = T;
  for (const double t : extra) ts.push_back(std::clamp(t, 0.0, T));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

cvec to_complex(const std::vector<double>& v) {
  cvec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

double overlap2(const std::vector<double>& phi, const cvec& psi) {
  std::complex<double> acc = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) acc += phi[i] * psi[i];
  return std::norm(acc);
}

}  // namespace

EvolutionResult evolve(int n, double alpha, const Schedule& schedule,
                       std::span<const std::complex<double>> initial, int sample_count,
                       const EvolveOptions& options) {
  const int d = 2 * n + 2;
  if (static_cast<int>(initial.size()) != d)
    throw std::invalid_argument("initial state dimension mismatch");

  EvolutionResult result;
  bool have_stages = true;
  try {
    result.stages = stage_boundaries(n, alpha, options.kappa);
  } catch (const std::invalid_argument&) {
    have_stages = false;  // boundaries undefined for this (n, alpha, kappa)
  }
  const auto u = uniform_state(n);
  const auto times = sample_grid(schedule.T, sample_count, options.extra_sample_times);

  ColumnOperator op(n, alpha);
  cvec psi(initial.begin(), initial.end());

  std::vector<double> prev_phi0, prev_phi1;
  const auto on_sample = [&](double t, const cvec& state) {
    const double s = schedule.s_at(t);
    auto pairs = eigen_low(column_hamiltonian(n, alpha, s), 2);
    // continuity-based sign alignment across samples
    for (int lvl = 0; lvl < 2; ++lvl) {
      auto& prev = lvl == 0 ? prev_phi0 : prev_phi1;
      auto& vec = pairs[lvl].vector;
      if (!prev.empty()) {
        double dot = 0;
        for (int i = 0; i < d; ++i) dot += prev[i] * vec[i];
        if (dot < 0)
          for (double& c : vec) c = -c;
      }
      prev = vec;
    }
    EvolveSample sample;
    sample.t = t;
    sample.s = s;
    sample.norm = std::sqrt(norm2(state));
    sample.p_phi0 = overlap2(pairs[0].vector, state);
    sample.p_phi1 = overlap2(pairs[1].vector, state);
    sample.p_u = overlap2(u, state);
    sample.p_entrance = std::norm(state.front());
    sample.p_exit = std::norm(state.back());
    sample.stage = have_stages ? result.stages.stage_of(s) : 0;
    result.samples.push_back(sample);
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(sample.norm - 1.0));
  };

  const auto stats = integrate(op, schedule, psi, times, options, on_sample);
  if (result.max_norm_drift > options.norm_tolerance)
    throw std::runtime_error("unitarity drift exceeded the norm tolerance");
  result.final_state = std::move(psi);
  result.step_count = stats.steps;
  result.smallest_dt_steps = stats.floor_steps;
  return result;
}

TransferMatrix transfer_matrix(int n, double alpha, const Schedule& segment,
                               const EvolveOptions& options) {
  const double s_start = segment.s_at(0);
  const double s_end = segment.s_at(segment.T);
  const auto start_pairs = eigen_low(column_hamiltonian(n, alpha, s_start), 2);
  const auto end_pairs = eigen_low(column_hamiltonian(n, alpha, s_end), 2);

  ColumnOperator op(n, alpha);
  TransferMatrix tm;
  for (int j = 0; j < 2; ++j) {
    cvec psi = to_complex(start_pairs[j].vector);
    integrate(op, segment, psi, {}, options, [](double, const cvec&) {});
    for (int i = 0; i < 2; ++i) tm.fid[i][j] = overlap2(end_pairs[i].vector, psi);
  }
  return tm;
}

double transfer_fidelity(int n, double alpha, double s_start, double s_end,
                         const Schedule& segment, const EvolveOptions& options) {
  if (std::abs(segment.s_at(0) - s_start) > 1e-12 ||
      std::abs(segment.s_at(segment.T) - s_end) > 1e-12)
    throw std::invalid_argument("segment endpoints disagree with s_start/s_end");
  const auto start_pairs = eigen_low(column_hamiltonian(n, alpha, s_start), 1);
  const auto end_pairs = eigen_low(column_hamiltonian(n, alpha, s_end), 2);
  ColumnOperator op(n, alpha);
  cvec psi = to_complex(start_pairs[0].vector);
  integrate(op, segment, psi, {}, options, [](double, const cvec&) {});
  return overlap2(end_pairs[1].vector, psi);
}

StagedRunResult staged_run(int n, double alpha, double epsilon, double kappa,
                           const EvolveOptions& options,
                           const GapAdaptedOptions& sched_opts) {
  StagedRunResult out;
  auto sched_opts_k = sched_opts;
  sched_opts_k.kappa = kappa;
  out.schedule =
      make_schedule(ScheduleKind::gap_adapted, n, alpha, epsilon, {}, sched_opts_k);
  const auto stages = stage_boundaries(n, alpha, kappa);

  auto opts = options;
  opts.kappa = kappa;
  const double t1 = out.schedule.time_of_s(stages.s1);
  const double t2 = out.schedule.time_of_s(stages.s2);
  const double t3 = out.schedule.time_of_s(stages.s3);
  const double t4 = out.schedule.time_of_s(stages.s4);
  opts.extra_sample_times.insert(opts.extra_sample_times.end(), {t1, t2, t3, t4});

  const auto initial = to_complex(basis_state(n, 0));
  out.evolution = evolve(n, alpha, out.schedule, initial, 65, opts);

  const auto sample_at = [&](double t) -> const EvolveSample& {
    const EvolveSample* best = &out.evolution.samples.front();
    for (const auto& smp : out.evolution.samples)
      if (std::abs(smp.t - t) < std::abs(best->t - t)) best = &smp;
    return *best;
  };
  out.report.v1_ground = sample_at(t1).p_phi0;
  out.report.v2_transfer = sample_at(t2).p_phi1;
  out.report.v3_excited = sample_at(t3).p_phi1;
  out.report.v4_transfer = sample_at(t4).p_phi0;
  out.report.v5_ground = out.evolution.samples.back().p_phi0;
  out.report.final_exit = out.evolution.samples.back().p_exit;
  return out;
}

RandomizedOutcome randomized_init_run(int n, double alpha, const Schedule& schedule,
                                      std::uint64_t seed, const EvolveOptions& options) {
  std::mt19937_64 rng(seed);
  RandomizedOutcome outcome;
  outcome.entrance_start = uniform_below(rng, 2) == 0;
  const auto initial =
      to_complex(outcome.entrance_start ? basis_state(n, 0) : uniform_state(n));
  const auto result = evolve(n, alpha, schedule, initial, 2, options);
  outcome.exit_overlap2 = result.samples.back().p_exit;
  outcome.success = outcome.exit_overlap2 >= 0.5;
  return outcome;
}

CrosscheckResult full_basis_crosscheck(const GluedTreesInstance& g, double alpha,
                                       const Schedule& schedule, int sample_count,
                                       const EvolveOptions& options) {
  if (g.n > 8)
    throw std::invalid_argument("full-basis crosscheck capped at n <= 8");
  CrosscheckResult out;
  const auto times = sample_grid(schedule.T, sample_count, {});

  {
    ColumnOperator op(g.n, alpha);
    cvec psi = to_complex(basis_state(g.n, 0));
    integrate(op, schedule, psi, times, options, [&](double t, const cvec& state) {
      out.t.push_back(t);
      out.s.push_back(schedule.s_at(t));
      out.p_exit_column.push_back(std::norm(state.back()));
    });
  }
  {
    VertexOperator op(g, alpha);
    cvec psi(g.vertex_count(), 0.0);
    psi[g.entrance] = 1.0;
    integrate(op, schedule, psi, times, options, [&](double, const cvec& state) {
      out.p_exit_full.push_back(std::norm(state[g.exit]));
    });
  }

  for (std::size_t i = 0; i < out.t.size(); ++i)
    out.max_abs_diff =
        std::max(out.max_abs_diff, std::abs(out.p_exit_column[i] - out.p_exit_full[i]));
  return out;
}

}  // namespace gluedtrees
