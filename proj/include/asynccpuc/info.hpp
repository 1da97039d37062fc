#ifndef ASYNCCPUC_INFO_HPP
#define ASYNCCPUC_INFO_HPP

#include <cstdint>
#include <vector>

#include "asynccpuc/channel.hpp"

namespace asynccpuc {

// All information measures are in bits (base-2 logarithms throughout).

/// H(p) = -sum p_i log2 p_i, with 0 log 0 = 0.
double entropy(const std::vector<double>& p);

/// D(p||q) in bits. Returns +inf iff some p_i > 0 has q_i = 0; never throws.
/// Infinity is a value here: the solver treats such directions as
/// unboundedly informative.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

/// Output marginal (PQ)(y) = sum_x p(x) Q(y|x).
std::vector<double> output_marginal(const InputDistribution& p, const Channel& ch);

/// I(X;Y) = sum_x p(x) D(Q(.|x) || PQ).
double mutual_information(const InputDistribution& p, const Channel& ch);

/// D(XY || X,Y*) computed as sum_x p(x) D(Q(.|x) || Q(.|*)).
/// Contract: equals mutual_information(p, ch) + D(PQ || Q(.|*)) whenever
/// finite; the identity is exercised by tests, not assumed by callers.
double divergence_sum_identity(const InputDistribution& p, const Channel& ch);

/// Empirical joint distribution of an (input sequence, output sequence)
/// pair. Counts are kept as integers; frequencies are derived on demand so
/// typicality tests do not accumulate float drift.
struct JointType {
    std::vector<std::vector<std::uint32_t>> counts; // [x][y]
    std::uint32_t length = 0;

    double frequency(std::size_t x, std::size_t y) const {
        return static_cast<double>(counts[x][y]) / static_cast<double>(length);
    }
    /// Counts of the x-marginal; equals the type of the input sequence exactly.
    std::vector<std::uint32_t> x_marginal_counts() const;
    std::vector<std::uint32_t> y_marginal_counts() const;
};

/// Joint type of two equal-length symbol-index sequences over nx-by-ny cells.
/// Throws LengthMismatch on unequal or zero lengths.
JointType joint_type(const std::vector<int>& xs, const std::vector<int>& ys,
                     std::size_t nx, std::size_t ny);

/// L1 distance between the joint type and the product P(x)Q(y|x).
double typicality_distance(const JointType& j, const InputDistribution& p, const Channel& ch);

/// Strong-typicality test: distance <= threshold.
bool is_typical(const JointType& j, const InputDistribution& p, const Channel& ch, double threshold);

} // namespace asynccpuc

#endif
