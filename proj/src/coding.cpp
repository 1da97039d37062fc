#include "asynccpuc/coding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "asynccpuc/errors.hpp"

namespace asynccpuc {

namespace {

std::uint64_t pow2_rounded(double exponent) {
    if (exponent <= 0.0) return 1;
    if (exponent > 62.0) {
        throw error(errc::invalid_argument, "2^(exponent) exceeds the supported range");
    }
    return static_cast<std::uint64_t>(std::max<long long>(1, std::llround(std::exp2(exponent))));
}

} // namespace

std::uint64_t CodeSpec::async_level() const {
    return pow2_rounded(beta * static_cast<double>(bits));
}

std::uint64_t CodeSpec::wait_quantum() const {
    return pow2_rounded(delta * static_cast<double>(bits));
}

double composition_threshold(int block_length) {
    return std::min(1.0 / std::log2(static_cast<double>(block_length)), 2.0);
}

void validate_spec(const CodeSpec& spec, const Channel& ch) {
    if (spec.bits < 1 || spec.bits > 30) {
        throw error(errc::invalid_argument, "bits must be in [1, 30]");
    }
    if (spec.block_length < 2) {
        throw error(errc::invalid_argument, "block length must be >= 2");
    }
    if (!(spec.beta >= 0.0)) throw error(errc::invalid_argument, "beta must be >= 0");
    if (spec.delta != 0.0 && !(spec.delta > 0.0 && spec.delta < spec.beta)) {
        throw error(errc::delta_out_of_range, "delta must be 0 or in (0, beta)");
    }
    if (spec.composition.size() != ch.num_inputs() || !spec.composition.is_valid()) {
        throw error(errc::invalid_argument, "composition is not a distribution over the inputs");
    }
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        if (spec.composition[x] > 0.0 && !ch.usable(x)) {
            throw error(errc::invalid_argument,
                        "composition puts mass on a non-usable symbol: " + ch.inputs[x]);
        }
    }
    (void)spec.async_level(); // range check
}

Codebook generate_codebook(const CodeSpec& spec, const Channel& ch, const CodebookOptions& opts) {
    validate_spec(spec, ch);

    const int n = spec.block_length;
    const std::uint64_t m_count = spec.num_messages();
    const double radius = composition_threshold(n);
    const std::size_t nx = ch.num_inputs();

    Codebook cb;
    cb.spec = spec;
    cb.codewords.reserve(m_count);
    cb.costs.reserve(m_count);

    std::vector<int> word(n);
    std::vector<int> counts(nx);
    for (std::uint64_t m = 0; m < m_count; ++m) {
        Rng rng(split_seed(spec.seed, m));
        bool accepted = false;
        for (std::uint64_t attempt = 0; attempt <= opts.max_resamples_per_codeword; ++attempt) {
            std::fill(counts.begin(), counts.end(), 0);
            for (int i = 0; i < n; ++i) {
                const int x = static_cast<int>(rng.sample(spec.composition.p));
                word[i] = x;
                counts[static_cast<std::size_t>(x)]++;
            }
            double l1 = 0.0;
            for (std::size_t x = 0; x < nx; ++x) {
                l1 += std::abs(static_cast<double>(counts[x]) / n - spec.composition[x]);
            }
            if (l1 <= radius) {
                accepted = true;
                break;
            }
            cb.total_resamples++;
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "codeword " << m << " rejected " << opts.max_resamples_per_codeword
                << " times; block length too small for the composition";
            throw error(errc::rejection_budget_exceeded, msg.str());
        }
        double cost = 0.0;
        for (int x : word) cost += ch.cost[static_cast<std::size_t>(x)];
        cb.codewords.push_back(word);
        cb.costs.push_back(cost);
        cb.max_cost = std::max(cb.max_cost, cost);
    }
    return cb;
}

double code_cost(const Codebook& cb) {
    if (cb.codewords.empty()) throw error(errc::invalid_argument, "empty codebook");
    return cb.max_cost;
}

std::uint64_t start_time(StartPolicy policy, std::uint64_t nu, const CodeSpec& spec) {
    const std::uint64_t a = spec.async_level();
    if (nu < 1 || nu > a) {
        throw error(errc::nu_out_of_range, "arrival time outside [1, A]");
    }
    if (policy == StartPolicy::immediate) return nu;
    const std::uint64_t w = spec.wait_quantum();
    const std::uint64_t sigma = ((nu + w - 1) / w) * w;
    return std::min(sigma, a);
}

SequentialDecoder::SequentialDecoder(const Codebook& cb, const Channel& ch, DecoderConfig cfg)
    : cb_(cb),
      ch_(ch),
      n_(cb.spec.block_length),
      nx_(ch.num_inputs()),
      ny_(ch.num_outputs()),
      words_((static_cast<std::size_t>(cb.spec.block_length) + 63) / 64),
      threshold_(cfg.threshold.value_or(composition_threshold(cb.spec.block_length))),
      deadline_(cb.spec.deadline()),
      allowed_starts_(cfg.allowed_starts),
      tie_rng_(cfg.tie_seed) {
    if (threshold_ <= 0.0) throw error(errc::invalid_argument, "decoder threshold must be > 0");

    window_masks_.assign(ny_, std::vector<std::uint64_t>(words_, 0));
    code_masks_.assign(cb.codewords.size() * nx_, std::vector<std::uint64_t>(words_, 0));
    for (std::size_t m = 0; m < cb.codewords.size(); ++m) {
        for (int i = 0; i < n_; ++i) {
            const auto x = static_cast<std::size_t>(cb.codewords[m][static_cast<std::size_t>(i)]);
            code_masks_[m * nx_ + x][static_cast<std::size_t>(i) / 64] |=
                std::uint64_t{1} << (static_cast<std::size_t>(i) % 64);
        }
    }
    target_.assign(nx_ * ny_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x) {
        for (std::size_t y = 0; y < ny_; ++y) {
            target_[x * ny_ + y] = cb.spec.composition[x] * ch.transition[x][y];
        }
    }
}

void SequentialDecoder::push_symbol(int y) {
    // Slide every per-symbol mask one slot toward the oldest position and
    // insert the new symbol at slot N-1.
    for (auto& mask : window_masks_) {
        for (std::size_t w = 0; w + 1 < words_; ++w) {
            mask[w] = (mask[w] >> 1) | (mask[w + 1] << 63);
        }
        mask[words_ - 1] >>= 1;
    }
    const std::size_t slot = static_cast<std::size_t>(n_ - 1);
    window_masks_[static_cast<std::size_t>(y)][slot / 64] |= std::uint64_t{1} << (slot % 64);
    ++t_;
}

double SequentialDecoder::window_distance(std::uint64_t m) const {
    double dist = 0.0;
    for (std::size_t x = 0; x < nx_; ++x) {
        const auto& cm = code_masks_[m * nx_ + x];
        for (std::size_t y = 0; y < ny_; ++y) {
            const auto& wm = window_masks_[y];
            int count = 0;
            for (std::size_t w = 0; w < words_; ++w) count += std::popcount(cm[w] & wm[w]);
            dist += std::abs(static_cast<double>(count) / n_ - target_[x * ny_ + y]);
        }
    }
    return dist;
}

std::uint64_t SequentialDecoder::closest_message() const {
    std::uint64_t best = 0;
    double best_dist = window_distance(0);
    for (std::uint64_t m = 1; m < cb_.codewords.size(); ++m) {
        const double d = window_distance(m);
        if (d < best_dist) {
            best_dist = d;
            best = m;
        }
    }
    return best;
}

SequentialDecoder::Step SequentialDecoder::step(int y_symbol) {
    if (t_ >= deadline_) {
        throw error(errc::invalid_argument, "decoder stepped past its deadline");
    }
    push_symbol(y_symbol);
    if (!window_full()) return {};

    bool try_typical = true;
    if (allowed_starts_ != nullptr) {
        const std::uint64_t win_start = t_ - static_cast<std::uint64_t>(n_) + 1;
        try_typical = std::binary_search(allowed_starts_->begin(), allowed_starts_->end(), win_start);
    }

    if (try_typical) {
        ties_.clear();
        for (std::uint64_t m = 0; m < cb_.codewords.size(); ++m) {
            const double d = window_distance(m);
            if (d < best_seen_dist_) {
                best_seen_dist_ = d;
                best_seen_message_ = m;
            }
            if (d <= threshold_) ties_.push_back(m);
        }
        if (ties_.size() == 1) return {true, ties_[0]};
        if (ties_.size() > 1) {
            return {true, ties_[tie_rng_.below(ties_.size())]};
        }
    }
    if (t_ == deadline_) return {true, best_seen_message_};
    return {};
}

void write_codebook_csv(const Codebook& cb, const Channel& ch, std::ostream& out) {
    out << "message,codeword,cost\n";
    char buf[64];
    for (std::size_t m = 0; m < cb.codewords.size(); ++m) {
        out << m << ',';
        for (std::size_t i = 0; i < cb.codewords[m].size(); ++i) {
            if (i) out << ' ';
            out << ch.inputs[static_cast<std::size_t>(cb.codewords[m][i])];
        }
        std::snprintf(buf, sizeof(buf), "%.12g", cb.costs[m]);
        out << ',' << buf << '\n';
    }
}

} // namespace asynccpuc
