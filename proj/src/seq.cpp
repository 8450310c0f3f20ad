#include "sandwich/seq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <utility>

namespace sandwich::seq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr long kChunkTrials = 4096;

double uniform01(RandomEngine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::pair<double, double> normal_pair(RandomEngine& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

long sample_poisson(RandomEngine& rng, double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 500.0) throw InvalidInput("poisson mean too large for exact sampling");
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(rng);
    } while (p > limit);
    return k - 1;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct BatchTx {
    double arrival = 0.0;
    double tip = 0.0;
    int id = 0;  // 0 = front, 1 = victim, 2 = back, >= 3 background
};

bool fcfs_before(const BatchTx& a, const BatchTx& b) {
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    if (a.tip != b.tip) return a.tip > b.tip;
    return a.id < b.id;
}

bool pga_before(const BatchTx& a, const BatchTx& b) {
    if (a.tip != b.tip) return a.tip > b.tip;
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    return a.id < b.id;
}

// True when front, victim, back appear consecutively in that order.
bool clean_sandwich(std::vector<BatchTx>& batch, Policy policy) {
    std::sort(batch.begin(), batch.end(), policy == Policy::fcfs ? fcfs_before : pga_before);
    for (size_t i = 0; i + 2 < batch.size(); ++i) {
        if (batch[i].id == 0) {
            return batch[i + 1].id == 1 && batch[i + 2].id == 2;
        }
    }
    return false;
}

struct TrialCounts {
    long batch = 0;
    long priority = 0;
    long arrival = 0;
    long success = 0;
};

}  // namespace

const char* to_string(Policy p) {
    return p == Policy::fcfs ? "fcfs" : "pga";
}

Distribution Distribution::exponential(double mean) {
    Distribution d;
    d.kind = Kind::exponential;
    d.mean = mean;
    return d;
}

Distribution Distribution::lognormal(double log_mean, double log_std) {
    Distribution d;
    d.kind = Kind::lognormal;
    d.log_mean = log_mean;
    d.log_std = log_std;
    return d;
}

Distribution Distribution::histogram(std::vector<double> values, std::vector<double> weights) {
    Distribution d;
    d.kind = Kind::histogram;
    d.values = std::move(values);
    d.weights = std::move(weights);
    return d;
}

Distribution Distribution::point(double value) {
    Distribution d;
    d.kind = Kind::point;
    d.value = value;
    return d;
}

void Distribution::validate() const {
    switch (kind) {
        case Kind::exponential:
            if (!std::isfinite(mean) || mean <= 0.0) {
                throw ValidationError("exponential mean must be positive");
            }
            return;
        case Kind::lognormal:
            if (!std::isfinite(log_mean) || !std::isfinite(log_std) || log_std <= 0.0) {
                throw ValidationError("lognormal needs finite log-mean and positive log-std");
            }
            return;
        case Kind::histogram: {
            if (values.empty() || values.size() != weights.size()) {
                throw ValidationError("histogram needs matching non-empty values and weights");
            }
            double total = 0.0;
            for (size_t i = 0; i < values.size(); ++i) {
                if (!std::isfinite(values[i]) || values[i] < 0.0 || !std::isfinite(weights[i]) ||
                    weights[i] < 0.0) {
                    throw ValidationError("histogram atoms must be non-negative and finite");
                }
                total += weights[i];
            }
            if (total <= 0.0) throw ValidationError("histogram weights must not all be zero");
            return;
        }
        case Kind::point:
            if (!std::isfinite(value) || value < 0.0) {
                throw ValidationError("point mass must be non-negative and finite");
            }
            return;
    }
}

double Distribution::cdf(double x) const {
    switch (kind) {
        case Kind::exponential:
            return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / mean);
        case Kind::lognormal:
            return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - log_mean) / log_std);
        case Kind::histogram: {
            double total = 0.0;
            double below = 0.0;
            for (size_t i = 0; i < values.size(); ++i) {
                total += weights[i];
                if (values[i] <= x) below += weights[i];
            }
            return below / total;
        }
        case Kind::point:
            return x >= value ? 1.0 : 0.0;
    }
    return 0.0;
}

double Distribution::prob_open(double a, double b) const {
    if (!(b > a)) return 0.0;
    switch (kind) {
        case Kind::exponential:
        case Kind::lognormal:
            return std::max(0.0, cdf(b) - cdf(a));
        case Kind::histogram: {
            double total = 0.0;
            double inside = 0.0;
            for (size_t i = 0; i < values.size(); ++i) {
                total += weights[i];
                if (values[i] > a && values[i] < b) inside += weights[i];
            }
            return inside / total;
        }
        case Kind::point:
            return (value > a && value < b) ? 1.0 : 0.0;
    }
    return 0.0;
}

double Distribution::sample(RandomEngine& rng) const {
    switch (kind) {
        case Kind::exponential:
            return -mean * std::log(1.0 - uniform01(rng));
        case Kind::lognormal:
            return std::exp(log_mean + log_std * normal_pair(rng).first);
        case Kind::histogram: {
            double total = 0.0;
            for (double w : weights) total += w;
            double u = uniform01(rng) * total;
            for (size_t i = 0; i < values.size(); ++i) {
                u -= weights[i];
                if (u < 0.0) return values[i];
            }
            return values.back();
        }
        case Kind::point:
            return value;
    }
    return 0.0;
}

void BatchSizeModel::validate() const {
    if (kind == Kind::poisson) {
        if (std::isnan(mean) || (mean >= 0.0 && !std::isfinite(mean))) {
            throw ValidationError("poisson batch mean must be finite");
        }
    } else if (fixed_k < 0) {
        throw ValidationError("fixed batch size must be non-negative");
    }
}

void SequencerConfig::validate() const {
    if (!std::isfinite(block_time) || block_time <= 0.0) {
        throw ValidationError("block_time must be positive");
    }
    if (!std::isfinite(batch_window) || batch_window <= 0.0) {
        throw ValidationError("batch_window must be positive");
    }
    if (!std::isfinite(latency_std) || latency_std <= 0.0) {
        throw ValidationError("latency_std must be positive");
    }
    if (!std::isfinite(background_rate) || background_rate < 0.0) {
        throw ValidationError("background_rate must be non-negative");
    }
    tip_distribution.validate();
    batch_size_model.validate();
}

double SequencerConfig::batch_mean() const {
    if (batch_size_model.kind == BatchSizeModel::Kind::poisson) {
        return batch_size_model.mean >= 0.0 ? batch_size_model.mean
                                            : background_rate * batch_window;
    }
    return static_cast<double>(batch_size_model.fixed_k);
}

void AttackerStrategy::validate() const {
    if (!std::isfinite(delay) || delay < 0.0) throw ValidationError("delay must be non-negative");
    if (!std::isfinite(tip_front) || tip_front < 0.0 || !std::isfinite(tip_back) || tip_back < 0.0) {
        throw ValidationError("tips must be non-negative");
    }
    victim_tip_prior.validate();
}

double p_batch(double delay, double batch_window) {
    if (!std::isfinite(batch_window) || batch_window <= 0.0) {
        throw InvalidInput("batch window must be positive");
    }
    if (!std::isfinite(delay) || delay < 0.0) throw InvalidInput("delay must be non-negative");
    return std::max(0.0, 1.0 - delay / batch_window);
}

double p_priority_fcfs(double rate, double delay) {
    if (!std::isfinite(rate) || rate < 0.0) throw InvalidInput("rate must be non-negative");
    if (!std::isfinite(delay) || delay < 0.0) throw InvalidInput("delay must be non-negative");
    return std::exp(-rate * delay);
}

double p_arrival(double delay, double latency_std) {
    if (!std::isfinite(latency_std) || latency_std <= 0.0) {
        throw InvalidInput("latency std must be positive");
    }
    if (!std::isfinite(delay) || delay < 0.0) throw InvalidInput("delay must be non-negative");
    return std::exp(-delay * delay / (2.0 * latency_std * latency_std));
}

double no_interference_expectation_truncated(const BatchSizeModel& model, double batch_mean,
                                             double interval_mass, double tol) {
    const double survive = 1.0 - interval_mass;
    if (model.kind == BatchSizeModel::Kind::fixed) {
        return std::pow(survive, static_cast<double>(model.fixed_k));
    }
    const double mean = batch_mean;
    double pmf = std::exp(-mean);
    double cumulative = pmf;
    double sum = pmf;  // k = 0 term
    double factor = survive;
    for (long k = 1; 1.0 - cumulative > tol && k < 100000; ++k) {
        pmf *= mean / static_cast<double>(k);
        cumulative += pmf;
        sum += pmf * factor;
        factor *= survive;
    }
    return sum;
}

PgaPriority p_priority_pga(const AttackerStrategy& strategy, const SequencerConfig& config) {
    strategy.validate();
    config.validate();
    if (!(strategy.tip_front > strategy.tip_back)) return {0.0, false};
    const double q =
        config.tip_distribution.prob_open(strategy.tip_back, strategy.tip_front);
    const double mass =
        strategy.victim_tip_prior.prob_open(strategy.tip_back, strategy.tip_front);
    double no_interference;
    if (config.batch_size_model.kind == BatchSizeModel::Kind::poisson) {
        no_interference = std::exp(-config.batch_mean() * q);
    } else {
        no_interference =
            std::pow(1.0 - q, static_cast<double>(config.batch_size_model.fixed_k));
    }
    return {mass * no_interference, true};
}

CoInclusionReport co_inclusion(const AttackerStrategy& strategy, const SequencerConfig& config) {
    strategy.validate();
    config.validate();
    CoInclusionReport report;
    report.method = "analytic";
    if (config.policy == Policy::fcfs) {
        report.p_batch = p_batch(strategy.delay, config.batch_window);
        report.p_priority = p_priority_fcfs(config.background_rate, strategy.delay);
        report.p_arrival = p_arrival(strategy.delay, config.latency_std);
    } else {
        // Attackers submit both legs at once under tip ordering: delay ~ 0.
        report.p_batch = 1.0;
        report.p_arrival = 1.0;
        const PgaPriority pga = p_priority_pga(strategy, config);
        report.p_priority = pga.probability;
        report.structurally_valid = pga.structurally_valid;
    }
    report.p_co_inclusion = report.p_batch * report.p_priority * report.p_arrival;
    return report;
}

namespace {

TrialCounts run_chunk_fcfs(const AttackerStrategy& st, const SequencerConfig& cfg, long trials,
                           RandomEngine rng) {
    TrialCounts counts;
    const double window = cfg.batch_window;
    const double delay = st.delay;
    std::vector<BatchTx> batch;
    for (long t = 0; t < trials; ++t) {
        const double front_at = uniform01(rng) * window;
        const double back_at = front_at + delay;
        const bool batch_ok = back_at < window;

        // Background process over a span covering the leg window.
        const double span = window + delay;
        const long n_bg = sample_poisson(rng, cfg.background_rate * span);
        batch.clear();
        long between = 0;
        for (long i = 0; i < n_bg; ++i) {
            const double at = uniform01(rng) * span;
            const double tip = cfg.tip_distribution.sample(rng);
            if (at > front_at && at < back_at) ++between;
            if (at < window) batch.push_back({at, tip, 3 + static_cast<int>(i)});
        }

        const double victim_at = front_at + uniform01(rng) * delay;
        const double victim_tip = st.victim_tip_prior.sample(rng);
        batch.push_back({front_at, st.tip_front, 0});
        batch.push_back({victim_at, victim_tip, 1});
        batch.push_back({back_at, st.tip_back, 2});

        // The analytic arrival factor is a Gaussian kernel in the intended
        // offset; its exact Bernoulli realisation is the event that the two
        // legs' jitter radius exceeds that offset.
        const auto [noise_front, noise_back] = normal_pair(rng);
        const double jitter_sq = cfg.latency_std * cfg.latency_std *
                                 (noise_front * noise_front + noise_back * noise_back);
        const bool arrival_ok = delay == 0.0 || jitter_sq > delay * delay;

        const bool priority_ok = between == 0;
        const bool ordered = batch_ok && clean_sandwich(batch, Policy::fcfs);
        if (batch_ok) ++counts.batch;
        if (priority_ok) ++counts.priority;
        if (arrival_ok) ++counts.arrival;
        if (ordered && arrival_ok) ++counts.success;
    }
    return counts;
}

TrialCounts run_chunk_pga(const AttackerStrategy& st, const SequencerConfig& cfg, long trials,
                          RandomEngine rng) {
    TrialCounts counts;
    std::vector<BatchTx> batch;
    for (long t = 0; t < trials; ++t) {
        long k;
        if (cfg.batch_size_model.kind == BatchSizeModel::Kind::poisson) {
            k = sample_poisson(rng, cfg.batch_mean());
        } else {
            k = cfg.batch_size_model.fixed_k;
        }
        batch.clear();
        for (long i = 0; i < k; ++i) {
            batch.push_back({3.0 + static_cast<double>(i), cfg.tip_distribution.sample(rng),
                             3 + static_cast<int>(i)});
        }
        const double victim_tip = st.victim_tip_prior.sample(rng);
        batch.push_back({0.0, st.tip_front, 0});
        batch.push_back({1.0, victim_tip, 1});
        batch.push_back({2.0, st.tip_back, 2});

        const bool ordered = clean_sandwich(batch, Policy::pga);
        ++counts.batch;
        ++counts.arrival;
        if (ordered) {
            ++counts.priority;
            ++counts.success;
        }
    }
    return counts;
}

}  // namespace

CoInclusionReport simulate_co_inclusion(const AttackerStrategy& strategy,
                                        const SequencerConfig& config, long trials,
                                        std::uint64_t seed, int threads) {
    strategy.validate();
    config.validate();
    if (trials < 1) throw InvalidInput("trial count must be at least 1");
    if (threads < 1) threads = 1;

    CoInclusionReport report;
    report.method = "monte-carlo";
    if (config.policy == Policy::pga && !(strategy.tip_front > strategy.tip_back)) {
        report.structurally_valid = false;
        report.p_batch = 1.0;
        report.p_arrival = 1.0;
        return report;
    }

    const long n_chunks = (trials + kChunkTrials - 1) / kChunkTrials;
    std::vector<TrialCounts> per_chunk(static_cast<size_t>(n_chunks));

    auto run_range = [&](long first_chunk, long stride) {
        for (long c = first_chunk; c < n_chunks; c += stride) {
            const long begin = c * kChunkTrials;
            const long count = std::min(kChunkTrials, trials - begin);
            RandomEngine rng(splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(c + 1))));
            per_chunk[static_cast<size_t>(c)] =
                config.policy == Policy::fcfs ? run_chunk_fcfs(strategy, config, count, rng)
                                              : run_chunk_pga(strategy, config, count, rng);
        }
    };

    if (threads == 1 || n_chunks == 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        const long stride = std::min<long>(threads, n_chunks);
        pool.reserve(static_cast<size_t>(stride));
        for (long t = 0; t < stride; ++t) pool.emplace_back(run_range, t, stride);
        for (auto& th : pool) th.join();
    }

    TrialCounts total;
    for (const TrialCounts& c : per_chunk) {
        total.batch += c.batch;
        total.priority += c.priority;
        total.arrival += c.arrival;
        total.success += c.success;
    }
    const double n = static_cast<double>(trials);
    report.p_batch = static_cast<double>(total.batch) / n;
    report.p_priority = static_cast<double>(total.priority) / n;
    report.p_arrival = static_cast<double>(total.arrival) / n;
    report.p_co_inclusion = static_cast<double>(total.success) / n;
    report.std_error = std::sqrt(report.p_co_inclusion * (1.0 - report.p_co_inclusion) / n);
    return report;
}

DelayOptimum optimize_delay_fcfs(const SequencerConfig& config) {
    config.validate();
    if (config.policy != Policy::fcfs) throw InvalidInput("delay optimisation applies to FCFS");
    auto objective = [&](double delay) {
        return p_batch(delay, config.batch_window) *
               p_priority_fcfs(config.background_rate, delay) *
               p_arrival(delay, config.latency_std);
    };
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = 0.0;
    double hi = config.batch_window;
    double a = hi - kInvPhi * (hi - lo);
    double b = lo + kInvPhi * (hi - lo);
    double fa = objective(a);
    double fb = objective(b);
    while (hi - lo > 1e-6) {
        if (fa >= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - kInvPhi * (hi - lo);
            fa = objective(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kInvPhi * (hi - lo);
            fb = objective(b);
        }
    }
    const double best = 0.5 * (lo + hi);
    // The endpoints can dominate the interior bracket on monotone objectives.
    double delay = best;
    double value = objective(best);
    if (objective(0.0) >= value) {
        delay = 0.0;
        value = objective(0.0);
    }
    return {delay, value};
}

TipOptimum optimize_tips_pga(const SequencerConfig& config, const Distribution& victim_tip_prior,
                             const std::vector<double>& tip_grid) {
    config.validate();
    victim_tip_prior.validate();
    if (config.policy != Policy::pga) throw InvalidInput("tip optimisation applies to PGA");
    for (double tip : tip_grid) {
        if (!std::isfinite(tip) || tip <= 0.0) {
            throw InvalidInput("tip grid entries must be positive and finite");
        }
    }

    bool found = false;
    TipOptimum best;
    for (double tip_back : tip_grid) {
        for (double tip_front : tip_grid) {
            if (!(tip_front > tip_back)) continue;
            AttackerStrategy st;
            st.tip_front = tip_front;
            st.tip_back = tip_back;
            st.victim_tip_prior = victim_tip_prior;
            const double p = p_priority_pga(st, config).probability;
            const double tie = 1e-12 * std::max(1.0, best.probability);
            const bool better = !found || p > best.probability + tie;
            const bool tied = found && std::abs(p - best.probability) <= tie &&
                              tip_front + tip_back < best.tip_front + best.tip_back;
            if (better || tied) {
                best = {tip_front, tip_back, p};
                found = true;
            }
        }
    }
    if (!found) throw InfeasibleError("tip grid admits no ordered pair");
    return best;
}

std::vector<SweepRow> central_parameter_sweep() {
    const std::vector<double> windows = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<SweepRow> rows;

    SequencerConfig fcfs;
    fcfs.policy = Policy::fcfs;
    fcfs.background_rate = 4.0;
    fcfs.latency_std = 0.05;
    AttackerStrategy fcfs_strategy;
    fcfs_strategy.delay = 0.08;
    fcfs_strategy.tip_front = 1.0;
    fcfs_strategy.tip_back = 0.5;
    fcfs_strategy.victim_tip_prior = Distribution::lognormal(0.0, 0.5);
    for (double w : windows) {
        fcfs.batch_window = w;
        SweepRow row;
        row.policy = Policy::fcfs;
        row.batch_window = w;
        row.background_rate = fcfs.background_rate;
        row.delay = fcfs_strategy.delay;
        row.tip_front = fcfs_strategy.tip_front;
        row.tip_back = fcfs_strategy.tip_back;
        row.central = true;
        row.report = co_inclusion(fcfs_strategy, fcfs);
        rows.push_back(row);
    }

    SequencerConfig pga;
    pga.policy = Policy::pga;
    pga.background_rate = 5.0;
    pga.latency_std = 0.05;
    pga.tip_distribution = Distribution::exponential(1.0);
    AttackerStrategy pga_strategy;
    pga_strategy.delay = 0.0;
    pga_strategy.tip_front = 2.4;
    pga_strategy.tip_back = 0.3;
    pga_strategy.victim_tip_prior = Distribution::lognormal(0.0, 0.5);
    for (double w : windows) {
        pga.batch_window = w;
        SweepRow row;
        row.policy = Policy::pga;
        row.batch_window = w;
        row.background_rate = pga.background_rate;
        row.delay = 0.0;
        row.tip_front = pga_strategy.tip_front;
        row.tip_back = pga_strategy.tip_back;
        row.central = w >= 0.5 - 1e-9;
        row.report = co_inclusion(pga_strategy, pga);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sandwich::seq
