#ifndef ASYNCCPUC_CODING_HPP
#define ASYNCCPUC_CODING_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "asynccpuc/channel.hpp"
#include "asynccpuc/rng.hpp"

namespace asynccpuc {

/// Code parameters: M = 2^bits messages of block length N, timing
/// uncertainty A = round(2^(beta*bits)), start-policy wait quantum
/// W = round(2^(delta*bits)).
struct CodeSpec {
    int bits = 1;
    int block_length = 2;
    double beta = 0.0;
    double delta = 0.0;
    InputDistribution composition;
    std::uint64_t seed = 0;

    std::uint64_t num_messages() const { return std::uint64_t{1} << bits; }
    std::uint64_t async_level() const;  // A >= 1
    std::uint64_t wait_quantum() const; // W >= 1
    std::uint64_t deadline() const {
        return async_level() + static_cast<std::uint64_t>(block_length) - 1;
    }
};

/// Invariant checks for a spec against a channel (composition supported on
/// usable symbols, ranges). Throws on violation.
void validate_spec(const CodeSpec& spec, const Channel& ch);

/// Constant-composition acceptance radius: min(1 / log2(N), 2).
double composition_threshold(int block_length);

struct CodebookOptions {
    std::uint64_t max_resamples_per_codeword = 10000;
};

/// Random constant-composition codebook: each codeword is resampled i.i.d.
/// from the composition until its type lands within composition_threshold(N)
/// in L1. Deterministic given spec.seed.
struct Codebook {
    CodeSpec spec;
    std::vector<std::vector<int>> codewords; // symbol indices, length N
    std::vector<double> costs;               // per-codeword total cost
    double max_cost = 0.0;
    std::uint64_t total_resamples = 0;
};

Codebook generate_codebook(const CodeSpec& spec, const Channel& ch,
                           const CodebookOptions& opts = {});

/// Maximum over messages of the codeword cost.
double code_cost(const Codebook& cb);

enum class StartPolicy { immediate, wait_multiple };

/// Transmission start time sigma for an arrival at nu (1 <= nu <= A):
/// immediate starts at nu; wait_multiple at the smallest multiple of the
/// wait quantum >= nu, capped at A. Always nu <= sigma <= A.
std::uint64_t start_time(StartPolicy policy, std::uint64_t nu, const CodeSpec& spec);

struct DecoderConfig {
    std::optional<double> threshold;  // default 1/log2(N)
    std::uint64_t tie_seed = 1;       // separate stream from codebook generation
    // When set, typicality checks run only at times t whose window start
    // t-N+1 is in this sorted list (covering-set restriction of the search).
    const std::vector<std::uint64_t>* allowed_starts = nullptr;
};

/// Sliding-window sequential typicality decoder. Feed one output symbol per
/// step: once the window is full it computes every codeword's joint type
/// with the window and stops at the unique typical codeword (seeded uniform
/// choice among ties). At the deadline A+N-1 it stops unconditionally and
/// declares the (message, window) pair with the smallest L1 joint-type
/// distance seen so far. Decisions at time t depend only on outputs 1..t.
class SequentialDecoder {
  public:
    SequentialDecoder(const Codebook& cb, const Channel& ch, DecoderConfig cfg = {});

    struct Step {
        bool stopped = false;
        std::uint64_t message = 0; // valid when stopped
    };

    Step step(int y_symbol);

    std::uint64_t time() const { return t_; }
    std::uint64_t deadline() const { return deadline_; }
    bool window_full() const { return t_ >= static_cast<std::uint64_t>(n_); }
    double threshold() const { return threshold_; }

    /// Joint-type L1 distance of codeword m against the current window.
    double window_distance(std::uint64_t m) const;
    /// Closest codeword at the current window; equal distances keep the
    /// lowest message index.
    std::uint64_t closest_message() const;
    /// Closest codeword over every window examined so far (the deadline
    /// declaration); earliest window and lowest index win exact ties.
    std::uint64_t best_seen_message() const { return best_seen_message_; }

  private:
    void push_symbol(int y);

    const Codebook& cb_;
    const Channel& ch_;
    int n_;
    std::size_t nx_, ny_, words_;
    double threshold_;
    std::uint64_t deadline_;
    const std::vector<std::uint64_t>* allowed_starts_;
    Rng tie_rng_;
    std::uint64_t t_ = 0;
    double best_seen_dist_ = std::numeric_limits<double>::infinity();
    std::uint64_t best_seen_message_ = 0;
    std::vector<std::vector<std::uint64_t>> window_masks_; // [y][word]
    std::vector<std::vector<std::uint64_t>> code_masks_;   // [m*nx + x][word]
    std::vector<double> target_;                           // P(x) Q(y|x), row-major
    std::vector<std::uint64_t> ties_;                      // scratch
};

/// One row per codeword: message index, symbols space-separated, cost.
void write_codebook_csv(const Codebook& cb, const Channel& ch, std::ostream& out);

} // namespace asynccpuc

#endif
