#ifndef ASYNCCPUC_ARRIVAL_HPP
#define ASYNCCPUC_ARRIVAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "asynccpuc/channel.hpp"
#include "asynccpuc/rng.hpp"
#include "asynccpuc/solver.hpp"

namespace asynccpuc {

/// Arrival-time distribution family for the message arrival nu, indexed by
/// the bit count B where the family scales with it. Covering-set sizes and
/// entropies use closed forms where supports are too large to enumerate.
struct ArrivalModel {
    enum class Family { uniform, geometric, spike_mixture, point_mass, explicit_list };

    Family family = Family::uniform;
    int bits = 1;                 // B context
    double beta = 0.0;            // uniform/spike scale: support ~ 2^(beta*B)
    std::uint64_t fixed_a = 0;    // uniform with explicit A (overrides beta when > 0)
    double q = 0.5;               // geometric success parameter
    std::uint64_t a_max = 1;      // geometric truncation point
    std::uint64_t t = 1;          // point-mass location
    std::vector<double> probs;    // explicit list over {1..n}

    static ArrivalModel uniform_beta(double beta, int bits = 1);
    static ArrivalModel uniform_fixed(std::uint64_t a);
    static ArrivalModel geometric(double q, std::uint64_t a_max);
    static ArrivalModel spike_mixture(double beta, int bits = 1);
    static ArrivalModel point_mass(std::uint64_t t);
    static ArrivalModel explicit_list(std::vector<double> probs);

    /// Same family re-indexed at a different bit count.
    ArrivalModel with_bits(int b) const;

    /// Largest support point (sampling stays in [1, support_max]).
    std::uint64_t support_max() const;

    /// Entropy of nu in bits (closed form per family).
    double entropy_bits() const;

    /// Draws an arrival time in [1, support_max].
    std::uint64_t sample(Rng& rng) const;

    void check() const; // parameter validation, throws
};

/// Size of the smallest support set with probability at least 1 - epsilon.
/// Greedy on descending point masses, which is exactly optimal for this
/// objective; closed forms for the scalable families.
std::uint64_t smallest_covering_set_size(const ArrivalModel& model, double epsilon);

/// The time indices of a greedy covering set (explicit/point/geometric/
/// small-uniform only; sizes must be enumerable).
std::vector<std::uint64_t> covering_set(const ArrivalModel& model, double epsilon);

struct BetaBarResult {
    double value = 0.0;            // inf over the schedule menu of the fitted limits
    double residual = 0.0;         // extrapolation residual of the reported schedule
    std::string schedule;          // which schedule attained the infimum
    std::vector<double> schedule_values;    // fitted limit per schedule
    std::vector<double> schedule_residuals; // successive-estimate gap per schedule
    std::vector<std::string> schedule_names;
};

/// Effective timing uncertainty: lim_B log2(S(eps_B)) / B, extrapolated
/// Richardson-style (linear in 1/B) along each schedule of a fixed menu
/// { 1/B, 2^(-sqrt(B)), log2(B)/B } and minimized over the menu. Throws
/// NonConvergentSequence when no schedule's successive estimates settle
/// within 0.05.
BetaBarResult beta_bar(const ArrivalModel& prototype, const std::vector<int>& bit_counts);

/// Capacity per unit cost at the model's effective timing uncertainty:
/// async_cpuc(channel, beta_bar). Propagates NonConvergentSequence.
CapacityResult effective_capacity(const Channel& ch, const ArrivalModel& prototype,
                                  const std::vector<int>& bit_counts,
                                  const SolverOptions& opts = {});

/// Parses the "arrival" JSON object (family plus parameters, unknown keys
/// rejected).
ArrivalModel parse_arrival_json(const std::string& text);

} // namespace asynccpuc

#endif
