#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "gluedtrees/graph.hpp"
#include "gluedtrees/schedule.hpp"
#include "gluedtrees/spectral.hpp"

namespace gluedtrees {

struct EvolveOptions {
  // Richardson budget for the whole run: accumulated local step-halving error
  // is kept below tolerance * dt / T per step. Long scaling sweeps pass 1e-6.
  double tolerance = 1e-8;
  double norm_tolerance = 1e-9;  // max |norm - 1| across samples; exceeding it throws
  std::vector<double> extra_sample_times;  // e.g. stage boundaries
  double dt_init = 0;                      // 0: automatic from ||H||
  double dt_scale = 1.0;                   // global step shrink for refinement studies
  std::uint32_t probe_stride = 16;         // steps between step-halving probes
  double kappa = 1.0;                      // stage annotation width parameter
};

struct EvolveSample {
  double t = 0;
  double s = 0;
  double norm = 0;
  double p_phi0 = 0;      // overlap^2 with the instantaneous ground state
  double p_phi1 = 0;      // overlap^2 with the first excited state
  double p_u = 0;         // overlap^2 with |u>
  double p_entrance = 0;  // |psi_0|^2
  double p_exit = 0;      // |psi_{2n+1}|^2
  int stage = 0;          // 1..5; 0 when boundaries are undefined for (n, alpha, kappa)
};

struct EvolutionResult {
  std::vector<EvolveSample> samples;
  std::vector<std::complex<double>> final_state;
  StageBoundaries stages;
  double max_norm_drift = 0;
  std::uint64_t step_count = 0;
  std::uint64_t smallest_dt_steps = 0;  // steps taken at the controller minimum
};

// Integrates i d/dt psi = H(s(t)) psi in the column basis. Each step applies
// the exact exponential of H frozen at the step midpoint (Taylor series on
// the tridiagonal matvec, terms until below round-off), so the only step
// error is the H(t) variation within the step; an embedded step-halving
// controller holds that below options.tolerance for the whole run. The norm
// is never renormalized: its drift is reported as evidence. Sample times are
// the uniform sample_count grid plus options.extra_sample_times. Throws on
// step-size underflow (pathological schedule).
EvolutionResult evolve(int n, double alpha, const Schedule& schedule,
                       std::span<const std::complex<double>> initial, int sample_count,
                       const EvolveOptions& options = {});

// fid[i][j] = |<phi_i(s_end)| U |phi_j(s_start)>|^2 for the lowest two levels
// evolved across the segment schedule (s(0) = s_start, s(T) = s_end).
struct TransferMatrix {
  double fid[2][2] = {{0, 0}, {0, 0}};
};
TransferMatrix transfer_matrix(int n, double alpha, const Schedule& segment,
                               const EvolveOptions& options = {});

// Evolves phi_0(s_start) across the segment and projects on phi_1(s_end):
// how completely the sweep hands the ground state to the first excited one.
double transfer_fidelity(int n, double alpha, double s_start, double s_end,
                         const Schedule& segment, const EvolveOptions& options = {});

// Gap-adapted run from ENTRANCE annotated with the five-stage story:
// ground fidelity at s1, swap by s2, excited-state ride to s3, swap back by
// s4, ground fidelity at the end.
struct StageReport {
  double v1_ground = 0;    // p_phi0 at s1
  double v2_transfer = 0;  // p_phi1 at s2
  double v3_excited = 0;   // p_phi1 at s3
  double v4_transfer = 0;  // p_phi0 at s4
  double v5_ground = 0;    // p_phi0 at T
  double final_exit = 0;   // p_exit at T
};
struct StagedRunResult {
  EvolutionResult evolution;
  StageReport report;
  Schedule schedule;
};
StagedRunResult staged_run(int n, double alpha, double epsilon, double kappa = 1.0,
                           const EvolveOptions& options = {},
                           const GapAdaptedOptions& sched_opts = {});

// Fair-coin start (ENTRANCE or |u>) followed by the given schedule. success
// means final exit overlap^2 >= 1/2.
struct RandomizedOutcome {
  bool entrance_start = false;
  double exit_overlap2 = 0;
  bool success = false;
};
RandomizedOutcome randomized_init_run(int n, double alpha, const Schedule& schedule,
                                      std::uint64_t seed,
                                      const EvolveOptions& options = {});

// Same evolution in the full vertex basis vs the column basis, compared on
// the exit population trace. Capped at n <= 8 (quadratic in 2^n).
struct CrosscheckResult {
  std::vector<double> t, s, p_exit_column, p_exit_full;
  double max_abs_diff = 0;
};
CrosscheckResult full_basis_crosscheck(const GluedTreesInstance& g, double alpha,
                                       const Schedule& schedule, int sample_count,
                                       const EvolveOptions& options = {});

}  // namespace gluedtrees
