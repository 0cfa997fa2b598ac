#pragma once

#include "clup/clup.hpp"
#include "clup/model.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace clup {

struct TrialSettings {
    int n = 400;
    double alpha = 0.8;
    double snr_db = 12.0;
    ClupConfig config;
    int num_starts = 1;        // >1 switches to multistart
    std::uint64_t seed = 1;    // campaign seed; trial i uses derive(seed, i)
    bool run_polytope = false;
    bool run_ball = false;
    bool run_bit_flip = false;
    int bit_flip_restarts = 10;
};

struct TrialOutcome {
    std::uint64_t trial = 0;
    std::uint64_t instance_seed = 0;
    bool failed = false;          // inner solver infeasible or exception
    bool converged = false;
    int iterations = 0;
    double radius = 0.0;
    OverlapStats clup_stats;      // unnormalized final inner solution
    double clup_rounded_ber = 0.0;
    double delta_trace_violation = 0.0;  // worst decrease of sqrt(c2) along the trace
    double polytope_ber = -1.0;
    double ball_ber = -1.0;
    double bit_flip_ber = -1.0;
};

struct Aggregate {
    int trials = 0;
    int failed = 0;
    double mean_c2 = 0.0, stderr_c2 = 0.0;
    double mean_c1 = 0.0, stderr_c1 = 0.0;
    double ber = 0.0, ber_stderr = 0.0;   // binomial stderr over all simulated bits
    double rounded_ber = 0.0;
    std::uint64_t total_bits = 0;
    double median_iterations = 0.0;
    double polytope_ber = -1.0, ball_ber = -1.0, bit_flip_ber = -1.0;
};

// One CLuP trial: fresh instance from (seed, trial), full run, requested
// baselines on the same instance.
TrialOutcome run_trial(const TrialSettings& s, std::uint64_t trial);

// The two batch kernels share run_trial; the parallel one distributes trials
// over OpenMP threads and both write results by trial index, so outputs are
// identical for any worker count.
std::vector<TrialOutcome> run_trials_serial(const TrialSettings& s, int trials);
std::vector<TrialOutcome> run_trials_openmp(const TrialSettings& s, int trials, int workers);

// workers <= 1 uses the serial kernel
std::vector<TrialOutcome> run_trials(const TrialSettings& s, int trials, int workers);

// single-threaded fold over trial order
Aggregate aggregate(const std::vector<TrialOutcome>& outcomes, int n);

} // namespace clup
