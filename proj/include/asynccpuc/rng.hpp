#ifndef ASYNCCPUC_RNG_HPP
#define ASYNCCPUC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace asynccpuc {

/// Mixes (seed, stream) into an independent sub-seed. Used to derive
/// per-codeword, per-trial and per-purpose streams from one user seed so
/// that results are reproducible and reduction-order independent.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. Wraps std::mt19937_64 (bit-stable across
/// platforms) and hand-rolls the draws, because std::*_distribution output
/// is implementation-defined and would break byte-identical reproducibility.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    /// Samples an index from a probability vector by inverse CDF. Rounding
    /// overshoot falls back to the last positive-mass index, never to a
    /// zero-probability one.
    std::size_t sample(const std::vector<double>& p) {
        double u = next_unit();
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] <= 0.0) continue;
            last_positive = i;
            acc += p[i];
            if (u < acc) return i;
        }
        return last_positive;
    }

    /// Dirichlet(1) draw: uniform point on the simplex.
    std::vector<double> dirichlet1(std::size_t n) {
        std::vector<double> v(n);
        double total = 0.0;
        for (auto& x : v) {
            double u = next_unit();
            if (u < 1e-300) u = 1e-300;
            x = -std::log(u);
            total += x;
        }
        for (auto& x : v) x /= total;
        return v;
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace asynccpuc

#endif
