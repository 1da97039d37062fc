#ifndef ASYNCCPUC_SIMULATOR_HPP
#define ASYNCCPUC_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "asynccpuc/arrival.hpp"
#include "asynccpuc/channel.hpp"
#include "asynccpuc/coding.hpp"

namespace asynccpuc {

/// One end-to-end transmission: arrival nu, start sigma, decode stop tau.
struct TrialOutcome {
    std::uint64_t message = 0; // 0-based message index
    std::uint64_t nu = 0;
    std::uint64_t sigma = 0;
    std::uint64_t tau = 0;
    std::uint64_t decoded = 0;
    bool error = false;
    bool early_stop = false; // decoder fired before sigma, on pure noise alone
    std::int64_t delay = 0;  // tau - nu: waiting time counts against the delay
    std::int64_t delay_from_sigma = 0;
    double cost = 0.0;
    std::uint64_t seed = 0;
};

struct SimOptions {
    StartPolicy policy = StartPolicy::immediate;
    double epsilon = 0.1;   // delay-quantile level
    unsigned threads = 1;
    bool exhaustive = false; // enumerate every arrival time (needs A <= 2^14)
    std::optional<double> decoder_threshold; // default: decoder's own rule
    const ArrivalModel* arrival = nullptr;              // default: uniform on {1..A}
    const std::vector<std::uint64_t>* allowed_starts = nullptr; // decoder restriction
};

/// Transmitted input symbol at stream time t given the start time.
int transmitted_symbol(const Codebook& cb, const Channel& ch, std::uint64_t message,
                       std::uint64_t sigma, std::uint64_t t);

/// Runs one trial with nu drawn from the arrival model (uniform by default).
/// Deterministic given (codebook, seed).
TrialOutcome run_trial(const Codebook& cb, const Channel& ch, std::uint64_t message,
                       std::uint64_t seed, const SimOptions& opts = {});

/// Same, with a forced arrival time (exhaustive mode and stream-law tests).
TrialOutcome run_trial_at(const Codebook& cb, const Channel& ch, std::uint64_t message,
                          std::uint64_t nu, std::uint64_t seed, const SimOptions& opts = {});

struct SimEstimate {
    std::vector<double> per_message_error;
    double max_error = 0.0;
    std::uint64_t worst_message = 0;
    double err_ci_lo = 0.0, err_ci_hi = 0.0; // Wilson 95% for the worst message
    double avg_error = 0.0;
    double delay_quantile = 0.0;            // d(eps) on tau - nu, max over messages
    double delay_quantile_from_sigma = 0.0; // same on tau - sigma
    double epsilon = 0.1;
    double rate_per_unit_cost = 0.0; // bits / max codeword cost
    std::uint64_t trials_total = 0;
    std::uint64_t trials_per_message = 0;
};

/// Monte Carlo estimate with trials stratified equally across messages.
/// (seed, spec) fully determines every trial; results are independent of
/// the thread count.
SimEstimate estimate(const Codebook& cb, const Channel& ch, std::uint64_t trials,
                     std::uint64_t seed, const SimOptions& opts = {});

struct SweepRow {
    double beta = 0.0;
    int bits = 0;
    int block_length = 0;
    double rho = 0.0;
    std::uint64_t trials = 0;
    double max_err = 0.0;
    double err_ci_lo = 0.0;
    double err_ci_hi = 0.0;
    double delay_q = 0.0;
    double rate_per_unit_cost = 0.0;
};

/// For each fraction rho in (0, 2], sets the block length from
/// rho * (achievability bound at the given composition) and measures the
/// empirical max error: the phase transition sits around rho = 1.
std::vector<SweepRow> sweep_rate(const Channel& ch, double beta, int bits,
                                 const std::vector<double>& rate_fractions, std::uint64_t trials,
                                 std::uint64_t seed, const InputDistribution& composition,
                                 const SimOptions& opts = {});

/// The implied fraction of the achievability bound for a given spec.
double implied_rho(const Channel& ch, const CodeSpec& spec);

SweepRow make_sweep_row(const CodeSpec& spec, double rho, const SimEstimate& est);

/// CSV with the simulator schema: beta,B,N,rho,trials,max_err,err_ci_lo,
/// err_ci_hi,delay_q90,rate_per_unit_cost.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// Wilson 95% score interval for successes/trials.
void wilson_interval(std::uint64_t successes, std::uint64_t trials, double& lo, double& hi);

} // namespace asynccpuc

#endif
