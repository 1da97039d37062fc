#ifndef ASYNCCPUC_SOLVER_HPP
#define ASYNCCPUC_SOLVER_HPP

#include "asynccpuc/channel.hpp"

namespace asynccpuc {

enum class BindingTerm { mutual_info_term, timing_term, both };

const char* binding_term_name(BindingTerm t);

struct CapacityResult {
    double value = 0.0;              // bits per unit cost, may be +inf
    InputDistribution optimizer;     // best distribution found (no uniqueness claim)
    BindingTerm binding_term = BindingTerm::mutual_info_term;
    int iterations = 0;
    double residual = 0.0;           // final bisection bracket width (0 for exact paths)
    int arg_symbol = -1;             // argmax input for the per-symbol forms, -1 otherwise
};

struct SolverOptions {
    double lambda_tol = 1e-9;    // bisection width, relative to max(1, value)
    int max_bisect_iters = 200;
    int inner_max_iters = 20000; // fixed-point iteration cap per scalarized solve
    double inner_gap_tol = 1e-12;
    int scalarization_evals = 60;
};

/// Synchronous capacity per unit cost: max over input distributions of
/// I(X;Y) / E[k(X)].
CapacityResult sync_cpuc(const Channel& ch, const SolverOptions& opts = {});

/// Per-symbol form of the synchronous capacity per unit cost, valid when the
/// idle symbol is usable at zero cost: max_x D(Y_x || Y*) / k(x).
CapacityResult sync_cpuc_zero_cost(const Channel& ch, const SolverOptions& opts = {});

/// Asynchronous capacity per unit cost at timing uncertainty beta and delay
/// exponent 0:
///   max over P of min{ I/E[k], (I + D(Y||Y*)) / (E[k](1+beta)) }.
CapacityResult async_cpuc(const Channel& ch, double beta, const SolverOptions& opts = {});

/// Per-symbol form under a usable zero-cost idle symbol:
///   (1/(1+beta)) max_x D(Y_x || Y*) / k(x).
CapacityResult async_cpuc_zero_cost(const Channel& ch, double beta, const SolverOptions& opts = {});

/// Capacity at delay exponent delta, 0 < delta < beta: equals async_cpuc at
/// beta - delta (the sole effect of the allowed delay).
CapacityResult async_cpuc_delay(const Channel& ch, double beta, double delta,
                                const SolverOptions& opts = {});

/// Gaussian channel with noise variance n0/2 and quadratic cost:
/// (1/(1+beta)) * log2(e) / n0.
double gaussian_cpuc(const GaussianChannel& ch, double beta);

/// Right side of the achievability condition on the bit-per-channel-use
/// rate: min{ I(P), (I(P) + D(PQ||Q*)) / (1+beta) }.
double achievable_rate_bound(const Channel& ch, const InputDistribution& p, double beta);

/// Composition maximizing achievable_rate_bound. Used to pick simulation
/// codebook compositions: the capacity-per-cost optimizer can sit arbitrarily
/// close to the zero-cost corner where the per-channel-use rate vanishes and
/// blocklengths would blow up.
InputDistribution best_rate_composition(const Channel& ch, double beta,
                                        const SolverOptions& opts = {});

} // namespace asynccpuc

#endif
