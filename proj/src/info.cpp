#include "asynccpuc/info.hpp"

#include <cmath>
#include <limits>

#include "asynccpuc/errors.hpp"

namespace asynccpuc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            if (q[i] <= 0.0) return kInf;
            d += p[i] * std::log2(p[i] / q[i]);
        }
    }
    return d;
}

std::vector<double> output_marginal(const InputDistribution& p, const Channel& ch) {
    std::vector<double> out(ch.num_outputs(), 0.0);
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        if (p[x] == 0.0) continue;
        for (std::size_t y = 0; y < ch.num_outputs(); ++y) out[y] += p[x] * ch.transition[x][y];
    }
    return out;
}

double mutual_information(const InputDistribution& p, const Channel& ch) {
    const std::vector<double> py = output_marginal(p, ch);
    double info = 0.0;
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        if (p[x] > 0.0) info += p[x] * kl_divergence(ch.row(x), py);
    }
    return info;
}

double divergence_sum_identity(const InputDistribution& p, const Channel& ch) {
    double d = 0.0;
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        if (p[x] > 0.0) {
            const double term = kl_divergence(ch.row(x), ch.star_row());
            if (std::isinf(term)) return kInf;
            d += p[x] * term;
        }
    }
    return d;
}

std::vector<std::uint32_t> JointType::x_marginal_counts() const {
    std::vector<std::uint32_t> m(counts.size(), 0);
    for (std::size_t x = 0; x < counts.size(); ++x) {
        for (std::uint32_t c : counts[x]) m[x] += c;
    }
    return m;
}

std::vector<std::uint32_t> JointType::y_marginal_counts() const {
    if (counts.empty()) return {};
    std::vector<std::uint32_t> m(counts[0].size(), 0);
    for (const auto& row : counts) {
        for (std::size_t y = 0; y < row.size(); ++y) m[y] += row[y];
    }
    return m;
}

JointType joint_type(const std::vector<int>& xs, const std::vector<int>& ys,
                     std::size_t nx, std::size_t ny) {
    if (xs.size() != ys.size() || xs.empty()) {
        throw error(errc::length_mismatch, "joint_type needs two equal nonzero lengths");
    }
    JointType j;
    j.length = static_cast<std::uint32_t>(xs.size());
    j.counts.assign(nx, std::vector<std::uint32_t>(ny, 0));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        j.counts[static_cast<std::size_t>(xs[i])][static_cast<std::size_t>(ys[i])]++;
    }
    return j;
}

double typicality_distance(const JointType& j, const InputDistribution& p, const Channel& ch) {
    double d = 0.0;
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
            d += std::abs(j.frequency(x, y) - p[x] * ch.transition[x][y]);
        }
    }
    return d;
}

bool is_typical(const JointType& j, const InputDistribution& p, const Channel& ch, double threshold) {
    return typicality_distance(j, p, ch) <= threshold;
}

} // namespace asynccpuc
