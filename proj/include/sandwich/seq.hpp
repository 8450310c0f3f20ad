#pragma once

// Analytic and Monte Carlo models of sandwich co-inclusion under FCFS and
// PGA sequencer ordering, plus attacker strategy search (delay under FCFS,
// tip pair under PGA).
//
// Analytic co-inclusion is the product of three factors:
//   batch    max(0, 1 - delay/batch_window)
//   priority e^(-rate*delay) under FCFS;
//            E[1{tip_b < tip_v < tip_f} * (1 - G-mass of (tip_b, tip_f))^K]
//            under PGA (delay treated as 0)
//   arrival  exp(-delay^2 / (2*latency_std^2))
// The Monte Carlo estimator samples each factor from the same model:
// batch offsets and background arrivals/tips are simulated mechanically and
// the batch is ordered by the policy comparator; the arrival factor, which
// the model gives only as a Gaussian kernel, is realised as the event that
// the two legs' jitter radius exceeds the intended offset (an exact
// Bernoulli of the same probability).

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sandwich/errors.hpp"

namespace sandwich::seq {

using RandomEngine = std::mt19937_64;

enum class Policy { fcfs, pga };

const char* to_string(Policy p);

// Non-negative tip / size distribution usable both as background-tip model
// and victim-tip prior.
struct Distribution {
    enum class Kind { exponential, lognormal, histogram, point };

    Kind kind = Kind::exponential;
    double mean = 1.0;                  // exponential
    double log_mean = 0.0;              // lognormal, of log
    double log_std = 1.0;               // lognormal, of log
    double value = 0.0;                 // point mass
    std::vector<double> values;         // histogram atoms
    std::vector<double> weights;        // histogram masses (normalised on use)

    static Distribution exponential(double mean);
    static Distribution lognormal(double log_mean, double log_std);
    static Distribution histogram(std::vector<double> values, std::vector<double> weights);
    static Distribution point(double value);

    void validate() const;
    double cdf(double x) const;
    // P(a < X < b), open interval; distinct from cdf(b)-cdf(a) for atoms.
    double prob_open(double a, double b) const;
    double sample(RandomEngine& rng) const;
};

struct BatchSizeModel {
    enum class Kind { poisson, fixed };
    Kind kind = Kind::poisson;
    double mean = -1.0;  // poisson mean; < 0 means "use rate * batch_window"
    long fixed_k = 0;

    void validate() const;
};

struct SequencerConfig {
    Policy policy = Policy::fcfs;
    double block_time = 0.25;       // seconds; reported, not part of the formulas
    double batch_window = 0.5;      // seconds
    double latency_std = 0.05;      // seconds
    double background_rate = 4.0;   // transactions / second
    Distribution tip_distribution = Distribution::exponential(1.0);
    BatchSizeModel batch_size_model;

    void validate() const;
    double batch_mean() const;      // expected background count per batch
};

struct AttackerStrategy {
    double delay = 0.0;      // seconds between the two leg submissions
    double tip_front = 0.0;
    double tip_back = 0.0;
    Distribution victim_tip_prior = Distribution::lognormal(0.0, 1.0);

    void validate() const;
};

struct CoInclusionReport {
    double p_batch = 0.0;
    double p_priority = 0.0;
    double p_arrival = 0.0;
    double p_co_inclusion = 0.0;
    std::string method;            // "analytic" or "monte-carlo"
    double std_error = 0.0;        // binomial, monte-carlo only
    bool structurally_valid = true;  // false when tip_front <= tip_back under PGA
};

double p_batch(double delay, double batch_window);
double p_priority_fcfs(double rate, double delay);
double p_arrival(double delay, double latency_std);

struct PgaPriority {
    double probability = 0.0;
    bool structurally_valid = true;
};

// Victim-prior mass of the open tip interval times the no-interference
// expectation over the batch size model (closed form for Poisson).
PgaPriority p_priority_pga(const AttackerStrategy& strategy, const SequencerConfig& config);

// Series evaluation of E[(1-q)^K] truncated once the tail falls below tol;
// cross-check for the closed form.
double no_interference_expectation_truncated(const BatchSizeModel& model, double batch_mean,
                                             double interval_mass, double tol = 1e-10);

CoInclusionReport co_inclusion(const AttackerStrategy& strategy, const SequencerConfig& config);

// Deterministic for a fixed (seed, trials) pair regardless of threads:
// trials are partitioned into fixed chunks with per-chunk derived seeds.
CoInclusionReport simulate_co_inclusion(const AttackerStrategy& strategy,
                                        const SequencerConfig& config, long trials,
                                        std::uint64_t seed, int threads = 1);

struct DelayOptimum {
    double delay = 0.0;
    double probability = 0.0;
};

// Golden-section search of analytic co-inclusion over delay in
// [0, batch_window], to 1e-6 s.
DelayOptimum optimize_delay_fcfs(const SequencerConfig& config);

struct TipOptimum {
    double tip_front = 0.0;
    double tip_back = 0.0;
    double probability = 0.0;
};

// Exhaustive search over ordered grid pairs (tip_back < tip_front); ties go
// to the lower total tip.
TipOptimum optimize_tips_pga(const SequencerConfig& config, const Distribution& victim_tip_prior,
                             const std::vector<double>& tip_grid);

// One row of the documented parameter sweep across batch windows.
struct SweepRow {
    Policy policy = Policy::fcfs;
    double batch_window = 0.0;
    double background_rate = 0.0;
    double delay = 0.0;
    double tip_front = 0.0;
    double tip_back = 0.0;
    bool central = false;  // designated central configuration
    CoInclusionReport report;
};

// Default sweep used by the CLI and the acceptance checks. Central rows:
// FCFS with rate 4/s and delay 80 ms across all windows; PGA with rate 5/s,
// tips (0.3, 2.4) on exponential(1) background tips and lognormal(0, 0.5)
// victim prior, for windows >= 0.5 s. latency_std is 0.05 s throughout.
std::vector<SweepRow> central_parameter_sweep();

}  // namespace sandwich::seq
