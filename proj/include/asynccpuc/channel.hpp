#ifndef ASYNCCPUC_CHANNEL_HPP
#define ASYNCCPUC_CHANNEL_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace asynccpuc {

/// Stochasticity / distribution-sum tolerance. Solver tolerances (1e-7)
/// dominate, so exact-structure checks are pinned well below them.
inline constexpr double kProbTol = 1e-12;

/// Discrete memoryless channel with a designated idle symbol and per-symbol
/// input costs. The idle symbol is part of one unified input alphabet; the
/// usable_star flag says whether codewords may contain it. Costs may be
/// +infinity; such symbols are excluded from optimization support.
/// Immutable in practice: construct, validate once, then share read-only.
struct Channel {
    std::vector<std::string> inputs;       // input alphabet labels, idle symbol included
    std::vector<std::string> outputs;      // output alphabet labels
    std::size_t star = 0;                  // index of the idle symbol within inputs
    bool usable_star = false;              // may the idle symbol appear in codewords?
    std::vector<std::vector<double>> transition; // Q[x][y]
    std::vector<double> cost;              // k(x) >= 0, may be +inf

    std::size_t num_inputs() const { return inputs.size(); }
    std::size_t num_outputs() const { return outputs.size(); }
    const std::vector<double>& row(std::size_t x) const { return transition[x]; }
    const std::vector<double>& star_row() const { return transition[star]; }

    /// True for symbols that may appear in codewords and have finite cost.
    bool usable(std::size_t x) const {
        return (x != star || usable_star) && std::isfinite(cost[x]);
    }
    std::vector<std::size_t> usable_indices() const;
};

/// Scalar parameters of the Gaussian channel (noise variance n0/2,
/// quadratic cost). Only the closed-form capacity uses it.
struct GaussianChannel {
    double n0 = 1.0;
};

/// Point on the probability simplex over the channel input alphabet.
struct InputDistribution {
    std::vector<double> p;

    InputDistribution() = default;
    explicit InputDistribution(std::vector<double> probs) : p(std::move(probs)) {}

    std::size_t size() const { return p.size(); }
    double operator[](std::size_t i) const { return p[i]; }
    bool is_valid(double tol = kProbTol) const;
};

struct ValidationIssue {
    enum class Kind { non_stochastic_row, bad_entry, negative_cost, missing_star_row, size_mismatch };
    Kind kind;
    std::size_t row = 0;
    std::size_t col = 0;
    std::string detail;
};

/// Checks all structural invariants; returns the first violation or nullopt.
/// Idempotent and side-effect free.
std::optional<ValidationIssue> validate(const Channel& ch);

/// Throwing variant of validate() for call sites that require a valid channel.
void require_valid(const Channel& ch);

/// True iff at least two usable zero-cost symbols have distinct rows
/// (L1 > 1e-12): exactly the condition for an input with positive mutual
/// information at zero expected cost, which makes the capacity per unit
/// cost infinite.
bool detect_infinite_cpuc(const Channel& ch);

/// Parses a channel spec from JSON text. Keys: inputs, outputs, star,
/// usable_star, Q, cost, and optionally arrival. Unknown keys are rejected.
/// Cost entries may be numbers or the string "inf".
Channel parse_channel_json(const std::string& text);

/// Reads and parses a channel spec file.
Channel load_channel_file(const std::string& path);

/// Raw arrival-model block from a channel file, if present. Decoded by the
/// arrival module (keeps this module independent of it).
std::optional<std::string> channel_file_arrival_json(const std::string& path);

} // namespace asynccpuc

#endif
