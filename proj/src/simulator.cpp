#include "asynccpuc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "asynccpuc/errors.hpp"
#include "asynccpuc/solver.hpp"

namespace asynccpuc {

namespace {

// Sub-stream tags for per-trial randomness.
enum : std::uint64_t { kStreamArrival = 0, kStreamNoise = 1, kStreamTies = 2 };

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
    return split_seed(base, index);
}

} // namespace

int transmitted_symbol(const Codebook& cb, const Channel& ch, std::uint64_t message,
                       std::uint64_t sigma, std::uint64_t t) {
    const auto n = static_cast<std::uint64_t>(cb.spec.block_length);
    if (t < sigma || t >= sigma + n) return static_cast<int>(ch.star);
    return cb.codewords[message][t - sigma];
}

namespace {

TrialOutcome run_trial_impl(const Codebook& cb, const Channel& ch, std::uint64_t message,
                            std::uint64_t nu, std::uint64_t seed, const SimOptions& opts) {
    const std::uint64_t a = cb.spec.async_level();
    if (message >= cb.spec.num_messages()) {
        throw error(errc::invalid_argument, "message index out of range");
    }
    if (nu < 1 || nu > a) throw error(errc::nu_out_of_range, "arrival time outside [1, A]");

    const std::uint64_t sigma = start_time(opts.policy, nu, cb.spec);

    DecoderConfig cfg;
    cfg.threshold = opts.decoder_threshold;
    cfg.tie_seed = split_seed(seed, kStreamTies);
    cfg.allowed_starts = opts.allowed_starts;
    SequentialDecoder decoder(cb, ch, cfg);

    Rng noise(split_seed(seed, kStreamNoise));
    TrialOutcome out;
    out.message = message;
    out.nu = nu;
    out.sigma = sigma;
    out.seed = seed;
    out.cost = cb.costs[message];

    // Lazy symbol-by-symbol stream: noise outside [sigma, sigma+N-1], the
    // codeword inside; memory stays O(N) regardless of A.
    const std::uint64_t horizon = decoder.deadline();
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const int x = transmitted_symbol(cb, ch, message, sigma, t);
        const int y = static_cast<int>(noise.sample(ch.transition[static_cast<std::size_t>(x)]));
        const auto step = decoder.step(y);
        if (step.stopped) {
            out.tau = t;
            out.decoded = step.message;
            break;
        }
    }
    out.error = out.decoded != message;
    out.early_stop = out.tau < sigma; // window closed before any codeword symbol
    out.delay = static_cast<std::int64_t>(out.tau) - static_cast<std::int64_t>(nu);
    out.delay_from_sigma = static_cast<std::int64_t>(out.tau) - static_cast<std::int64_t>(sigma);
    return out;
}

} // namespace

TrialOutcome run_trial(const Codebook& cb, const Channel& ch, std::uint64_t message,
                       std::uint64_t seed, const SimOptions& opts) {
    Rng arrival_rng(split_seed(seed, kStreamArrival));
    const std::uint64_t a = cb.spec.async_level();
    std::uint64_t nu;
    if (opts.arrival != nullptr) {
        nu = opts.arrival->sample(arrival_rng);
    } else {
        nu = 1 + arrival_rng.below(a);
    }
    return run_trial_impl(cb, ch, message, nu, seed, opts);
}

TrialOutcome run_trial_at(const Codebook& cb, const Channel& ch, std::uint64_t message,
                          std::uint64_t nu, std::uint64_t seed, const SimOptions& opts) {
    return run_trial_impl(cb, ch, message, nu, seed, opts);
}

void wilson_interval(std::uint64_t successes, std::uint64_t trials, double& lo, double& hi) {
    if (trials == 0) {
        lo = 0.0;
        hi = 1.0;
        return;
    }
    constexpr double z = 1.959963984540054; // 95%
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double rad = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    lo = successes == 0 ? 0.0 : std::max(0.0, center - rad);
    hi = successes == trials ? 1.0 : std::min(1.0, center + rad);
}

namespace {

// Smallest d with empirical P(delay <= d) >= 1 - eps.
double delay_quantile_of(std::vector<std::int64_t>& delays, double eps) {
    std::sort(delays.begin(), delays.end());
    const auto n = delays.size();
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - eps) * static_cast<double>(n) - 1e-12));
    rank = std::min(std::max<std::size_t>(rank, 1), n);
    return static_cast<double>(delays[rank - 1]);
}

} // namespace

SimEstimate estimate(const Codebook& cb, const Channel& ch, std::uint64_t trials,
                     std::uint64_t seed, const SimOptions& opts) {
    if (trials < 1) throw error(errc::invalid_argument, "trials must be >= 1");
    const std::uint64_t m_count = cb.spec.num_messages();
    const std::uint64_t a = cb.spec.async_level();

    std::uint64_t per_message;
    std::uint64_t nus_per_message = 0;
    if (opts.exhaustive) {
        if (a > (std::uint64_t{1} << 14)) {
            throw error(errc::invalid_argument, "exhaustive arrival enumeration needs A <= 2^14");
        }
        nus_per_message = a;
        per_message = std::max<std::uint64_t>(1, trials / (m_count * a)) * a;
    } else {
        per_message = std::max<std::uint64_t>(1, trials / m_count);
    }

    std::vector<std::uint64_t> errors(m_count, 0);
    std::vector<std::vector<std::int64_t>> delays(m_count);
    std::vector<std::vector<std::int64_t>> delays_sigma(m_count);
    for (std::uint64_t m = 0; m < m_count; ++m) {
        delays[m].resize(per_message);
        delays_sigma[m].resize(per_message);
    }

    // Trial seeds depend only on (seed, message, repetition), so the result
    // is identical for every thread count; the reduction is per-message
    // counts in index order.
    auto run_message = [&](std::uint64_t m) {
        for (std::uint64_t j = 0; j < per_message; ++j) {
            const std::uint64_t ts = trial_seed(seed, m * per_message + j);
            TrialOutcome t;
            if (opts.exhaustive) {
                const std::uint64_t nu = 1 + (j % nus_per_message);
                t = run_trial_at(cb, ch, m, nu, ts, opts);
            } else {
                t = run_trial(cb, ch, m, ts, opts);
            }
            if (t.error) errors[m]++;
            delays[m][j] = t.delay;
            delays_sigma[m][j] = t.delay_from_sigma;
        }
    };

    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1 || m_count == 1) {
        for (std::uint64_t m = 0; m < m_count; ++m) run_message(m);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint64_t> next{0};
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::uint64_t m = next.fetch_add(1);
                    if (m >= m_count) return;
                    run_message(m);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    SimEstimate est;
    est.epsilon = opts.epsilon;
    est.trials_per_message = per_message;
    est.trials_total = per_message * m_count;
    est.per_message_error.resize(m_count);
    double err_sum = 0.0;
    for (std::uint64_t m = 0; m < m_count; ++m) {
        est.per_message_error[m] = static_cast<double>(errors[m]) / static_cast<double>(per_message);
        err_sum += est.per_message_error[m];
        if (est.per_message_error[m] > est.max_error) {
            est.max_error = est.per_message_error[m];
            est.worst_message = m;
        }
    }
    est.avg_error = err_sum / static_cast<double>(m_count);
    wilson_interval(errors[est.worst_message], per_message, est.err_ci_lo, est.err_ci_hi);

    double dq = -static_cast<double>(cb.spec.block_length);
    double dqs = dq;
    for (std::uint64_t m = 0; m < m_count; ++m) {
        dq = std::max(dq, delay_quantile_of(delays[m], opts.epsilon));
        dqs = std::max(dqs, delay_quantile_of(delays_sigma[m], opts.epsilon));
    }
    est.delay_quantile = dq;
    est.delay_quantile_from_sigma = dqs;
    est.rate_per_unit_cost = static_cast<double>(cb.spec.bits) / cb.max_cost;
    return est;
}

double implied_rho(const Channel& ch, const CodeSpec& spec) {
    const double bound = achievable_rate_bound(ch, spec.composition, spec.beta);
    if (!(bound > 0.0)) return std::numeric_limits<double>::infinity();
    return (static_cast<double>(spec.bits) / spec.block_length) / bound;
}

SweepRow make_sweep_row(const CodeSpec& spec, double rho, const SimEstimate& est) {
    SweepRow row;
    row.beta = spec.beta;
    row.bits = spec.bits;
    row.block_length = spec.block_length;
    row.rho = rho;
    row.trials = est.trials_total;
    row.max_err = est.max_error;
    row.err_ci_lo = est.err_ci_lo;
    row.err_ci_hi = est.err_ci_hi;
    row.delay_q = est.delay_quantile;
    row.rate_per_unit_cost = est.rate_per_unit_cost;
    return row;
}

std::vector<SweepRow> sweep_rate(const Channel& ch, double beta, int bits,
                                 const std::vector<double>& rate_fractions, std::uint64_t trials,
                                 std::uint64_t seed, const InputDistribution& composition,
                                 const SimOptions& opts) {
    for (double rho : rate_fractions) {
        if (!(rho > 0.0 && rho <= 2.0)) {
            throw error(errc::invalid_argument, "rate fractions must be in (0, 2]");
        }
    }
    const double bound = achievable_rate_bound(ch, composition, beta);
    if (!(bound > 0.0)) {
        throw error(errc::invalid_argument, "composition has no positive achievable rate");
    }

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < rate_fractions.size(); ++i) {
        const double rho = rate_fractions[i];
        CodeSpec spec;
        spec.bits = bits;
        spec.block_length =
            std::max<int>(2, static_cast<int>(std::llround(bits / (rho * bound))));
        spec.beta = beta;
        spec.composition = composition;
        spec.seed = split_seed(seed, 1000 + i);
        const Codebook cb = generate_codebook(spec, ch);
        const SimEstimate est = estimate(cb, ch, trials, split_seed(seed, 2000 + i), opts);
        rows.push_back(make_sweep_row(spec, rho, est));
    }
    return rows;
}

namespace {

std::string fmt_g(double v) {
    char buf[64];
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "beta,B,N,rho,trials,max_err,err_ci_lo,err_ci_hi,delay_q90,rate_per_unit_cost\n";
    for (const auto& r : rows) {
        out << fmt_g(r.beta) << ',' << r.bits << ',' << r.block_length << ',' << fmt_g(r.rho)
            << ',' << r.trials << ',' << fmt_g(r.max_err) << ',' << fmt_g(r.err_ci_lo) << ','
            << fmt_g(r.err_ci_hi) << ',' << fmt_g(r.delay_q) << ','
            << fmt_g(r.rate_per_unit_cost) << '\n';
    }
}

} // namespace asynccpuc
