// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "asynccpuc/arrival.hpp"
#include "asynccpuc/channel.hpp"
#include "asynccpuc/coding.hpp"
#include "asynccpuc/info.hpp"
#include "asynccpuc/rng.hpp"
#include "asynccpuc/simulator.hpp"
#include "asynccpuc/solver.hpp"

using namespace asynccpuc;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

Channel bsc_star() {
    Channel ch;
    ch.inputs = {"*", "1"};
    ch.outputs = {"0", "1"};
    ch.star = 0;
    ch.usable_star = true;
    ch.transition = {{0.9, 0.1}, {0.1, 0.9}};
    ch.cost = {0.0, 1.0};
    return ch;
}

Channel bsc_unit_cost() {
    Channel ch = bsc_star();
    ch.cost = {1.0, 1.0};
    return ch;
}

// random channel with a usable zero-cost idle symbol, |X|,|Y| in [2,5]
Channel random_star_channel(Rng& rng) {
    Channel ch;
    const std::size_t nx = 2 + rng.below(4);
    const std::size_t ny = 2 + rng.below(4);
    for (std::size_t i = 0; i < nx; ++i) ch.inputs.push_back("x" + std::to_string(i));
    for (std::size_t i = 0; i < ny; ++i) ch.outputs.push_back("y" + std::to_string(i));
    ch.star = 0;
    ch.usable_star = true;
    for (std::size_t i = 0; i < nx; ++i) {
        std::vector<double> row = rng.dirichlet1(ny);
        double total = 0.0;
        for (auto& v : row) {
            v += 0.05;
            total += v;
        }
        for (auto& v : row) v /= total;
        ch.transition.push_back(row);
    }
    ch.cost.assign(nx, 0.0);
    for (std::size_t i = 1; i < nx; ++i) ch.cost[i] = 0.1 + 1.9 * rng.next_unit();
    return ch;
}

double eq2_objective(const Channel& ch, const InputDistribution& p, double beta) {
    double ek = 0.0;
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) ek += p[x] * ch.cost[x];
    if (!(ek > 0.0)) return 0.0;
    return std::min(mutual_information(p, ch) / ek,
                    divergence_sum_identity(p, ch) / ((1.0 + beta) * ek));
}

std::vector<Channel> three_input_channels() {
    std::vector<Channel> cs;
    Channel c;
    c.inputs = {"a", "b", "c"};
    c.outputs = {"0", "1", "2"};
    c.star = 0;
    c.usable_star = true;
    c.transition = {{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}};
    c.cost = {1.0, 1.5, 2.0};
    cs.push_back(c);
    c.transition = {{0.7, 0.2, 0.1}, {0.05, 0.9, 0.05}, {0.25, 0.25, 0.5}};
    c.cost = {0.5, 1.0, 1.7};
    cs.push_back(c);
    c.transition = {{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.1, 0.2, 0.7}};
    c.cost = {1.2, 0.8, 1.0};
    cs.push_back(c);
    return cs;
}

struct Line {
    bool pass;
    std::string detail;
};

// 1. General max-min solver vs the per-symbol closed form on random
// zero-cost-idle channels.
Line criterion1() {
    const double t0 = now_s();
    Rng rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Channel ch = random_star_channel(rng);
        for (double beta : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            const double general = async_cpuc(ch, beta).value;
            const double closed = async_cpuc_zero_cost(ch, beta).value;
            worst = std::max(worst, std::abs(general - closed));
        }
    }
    const double dt = now_s() - t0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max |general - closed| = %.3g (tol 1e-6), %.2fs (limit 60s)",
                  worst, dt);
    return {worst <= 1e-6 && dt < 60.0, buf};
}

// 2. beta = 0 reduces to the synchronous value; BSC(0.1) matches the grid.
Line criterion2() {
    Rng rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Channel ch = random_star_channel(rng);
        worst = std::max(worst, std::abs(async_cpuc(ch, 0.0).value - sync_cpuc(ch).value));
    }

    const Channel bsc = bsc_unit_cost();
    const double solver = sync_cpuc(bsc).value;
    double grid = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        grid = std::max(grid, eq2_objective(bsc, InputDistribution({i / 1e4, 1.0 - i / 1e4}), 0.0));
    }
    const double dev_grid = std::abs(solver - grid);
    const double dev_ref = std::abs(solver - 0.531004);
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "max |async(0) - sync| = %.3g (tol 1e-6); BSC(0.1): |solver-grid| = %.3g, "
                  "|solver-0.531004| = %.3g (tol 1e-4)",
                  worst, dev_grid, dev_ref);
    return {worst <= 1e-6 && dev_grid <= 1e-4 && dev_ref <= 1e-4, buf};
}

// 3. Divergence-sum identity, KL nonnegativity, mutual-information concavity.
Line criterion3() {
    Rng rng(7);
    double worst_identity = 0.0;
    double worst_kl = 0.0;
    double worst_concavity = 0.0;
    int finite_pairs = 0;
    for (int i = 0; i < 1000; ++i) {
        const Channel ch = random_star_channel(rng);
        const InputDistribution p(rng.dirichlet1(ch.num_inputs()));
        const double total = divergence_sum_identity(p, ch);
        if (std::isfinite(total)) {
            const double split = mutual_information(p, ch) +
                                 kl_divergence(output_marginal(p, ch), ch.star_row());
            worst_identity = std::max(worst_identity, std::abs(total - split));
            finite_pairs++;
        }
        const auto q1 = rng.dirichlet1(4);
        const auto q2 = rng.dirichlet1(4);
        worst_kl = std::max(worst_kl, -kl_divergence(q1, q2));

        const InputDistribution p2(rng.dirichlet1(ch.num_inputs()));
        const double lam = rng.next_unit();
        std::vector<double> mix(ch.num_inputs());
        for (std::size_t x = 0; x < mix.size(); ++x) mix[x] = lam * p[x] + (1 - lam) * p2[x];
        const double gap = lam * mutual_information(p, ch) +
                           (1 - lam) * mutual_information(p2, ch) -
                           mutual_information(InputDistribution(mix), ch);
        worst_concavity = std::max(worst_concavity, gap);
    }
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "identity dev %.3g on %d pairs (tol 1e-12); KL >= -%.3g; concavity gap %.3g "
                  "(tol 1e-9)",
                  worst_identity, finite_pairs, std::max(worst_kl, 0.0), worst_concavity);
    return {worst_identity <= 1e-12 && worst_kl <= 1e-12 && worst_concavity <= 1e-9, buf};
}

// 4. Delay exponent is a pure shift of beta.
Line criterion4() {
    const Channel ch = bsc_star();
    bool exact = true;
    for (double beta : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double delta = frac * beta;
            const CapacityResult a = async_cpuc_delay(ch, beta, delta);
            const CapacityResult b = async_cpuc(ch, beta - delta);
            exact = exact && a.value == b.value && a.optimizer.p == b.optimizer.p;
        }
    }
    return {exact, exact ? "5x5 (beta, delta) grid: bitwise equal to async(beta-delta)"
                         : "delegation mismatch"};
}

// 5. Gaussian closed form at machine precision.
Line criterion5() {
    const GaussianChannel g{2.0};
    const double base = gaussian_cpuc(g, 0.0);
    const double want = std::numbers::log2e / 2.0;
    double worst_scale = 0.0;
    for (double beta : {0.25, 0.5, 1.0, 2.0, 5.0, 9.0}) {
        worst_scale =
            std::max(worst_scale, std::abs(gaussian_cpuc(g, beta) * (1.0 + beta) - base));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "|C - log2(e)/2| = %.3g; scaling residual %.3g (tol 1e-15)",
                  std::abs(base - want), worst_scale);
    return {std::abs(base - want) <= 1e-15 && worst_scale <= 1e-15, buf};
}

// 6. Effective timing uncertainty of the example arrival families.
Line criterion6() {
    const double t0 = now_s();
    const std::vector<int> bits = {8, 10, 12, 14, 16, 18, 20};
    double worst_uniform = 0.0;
    for (double beta : {0.5, 1.0, 2.0}) {
        worst_uniform = std::max(
            worst_uniform, std::abs(beta_bar(ArrivalModel::uniform_beta(beta), bits).value - beta));
    }
    double worst_spike = 0.0;
    double worst_entropy = 0.0;
    for (double beta : {0.5, 1.0}) {
        const ArrivalModel spike = ArrivalModel::spike_mixture(beta);
        worst_spike = std::max(worst_spike, std::abs(beta_bar(spike, bits).value - beta));
        for (int b : bits) {
            const double hb = spike.with_bits(b).entropy_bits() / b;
            worst_entropy = std::max(worst_entropy, std::abs(hb - (beta / 2 + 1.0 / b)));
        }
    }
    const double dt = now_s() - t0;
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "uniform dev %.4f (tol 0.02); spike dev %.4f (tol 0.05); H/B closed-form dev "
                  "%.2g (tol 1e-12); %.2fs (limit 10s)",
                  worst_uniform, worst_spike, worst_entropy, dt);
    return {worst_uniform <= 0.02 && worst_spike <= 0.05 && worst_entropy <= 1e-12 && dt < 10.0,
            buf};
}

// 7. Phase-transition simulation at the pinned desk-scale parameters.
Line criterion7() {
    const double t0 = now_s();
    const Channel ch = bsc_star();
    const int bits = 8;
    const double beta = 0.25;
    const InputDistribution comp = best_rate_composition(ch, beta);

    SimOptions opts;
    opts.threads = 1; // the criterion is timed single-threaded
    const auto rows = sweep_rate(ch, beta, bits, {0.5, 1.5}, 10000, 424242, comp, opts);
    // supplementary diagnostic: the transition is visible once the block
    // length clears the finite-length floor of the L1-typicality decoder
    const auto diag = sweep_rate(ch, beta, bits, {0.25}, 10000, 424242, comp, opts);
    const double dt = now_s() - t0;

    const bool low_ok = rows[0].max_err < 0.1;
    const bool high_ok = rows[1].max_err > 0.3;
    const bool delay_ok = rows[0].delay_q <= 1.25 * rows[0].block_length &&
                          rows[1].delay_q <= 1.25 * rows[1].block_length;
    char buf[360];
    std::snprintf(buf, sizeof(buf),
                  "rho=0.5 (N=%d): max_err=%.3f (need <0.1)%s; rho=1.5 (N=%d): max_err=%.3f "
                  "(need >0.3); d(0.1)=%g (cap %.1f); diagnostic rho=0.25 (N=%d): max_err=%.4f; "
                  "%.0fs (limit 300s)",
                  rows[0].block_length, rows[0].max_err, low_ok ? "" : " [below the finite-length floor of joint-type decoding]",
                  rows[1].block_length, rows[1].max_err, rows[0].delay_q,
                  1.25 * rows[0].block_length, diag[0].block_length, diag[0].max_err, dt);
    return {low_ok && high_ok && delay_ok && dt < 300.0, buf};
}

// 8. Determinism: identical seeds reproduce everything; threads do not matter.
Line criterion8() {
    const Channel ch = bsc_star();
    CodeSpec spec;
    spec.bits = 6;
    spec.block_length = 24;
    spec.beta = 0.5;
    spec.composition = InputDistribution({0.5, 0.5});
    spec.seed = 99;

    const Codebook cb1 = generate_codebook(spec, ch);
    const Codebook cb2 = generate_codebook(spec, ch);
    std::ostringstream csv1, csv2;
    write_codebook_csv(cb1, ch, csv1);
    write_codebook_csv(cb2, ch, csv2);
    const bool books_equal = cb1.codewords == cb2.codewords && csv1.str() == csv2.str();

    auto trial_log = [&](const Codebook& cb) {
        std::ostringstream log;
        for (std::uint64_t m = 0; m < 8; ++m) {
            const TrialOutcome t = run_trial(cb, ch, m, 1000 + m);
            log << m << ',' << t.nu << ',' << t.sigma << ',' << t.tau << ',' << t.decoded << ','
                << t.error << ',' << t.cost << '\n';
        }
        return log.str();
    };
    const bool trials_equal = trial_log(cb1) == trial_log(cb2);

    SimOptions one, two;
    one.threads = 1;
    two.threads = 2;
    const auto rows1 = sweep_rate(ch, 0.5, 6, {0.4, 1.2}, 512, 5, spec.composition, one);
    const auto rows2 = sweep_rate(ch, 0.5, 6, {0.4, 1.2}, 512, 5, spec.composition, two);
    std::ostringstream s1, s2;
    write_sweep_csv(rows1, s1);
    write_sweep_csv(rows2, s2);
    const bool sweep_equal = s1.str() == s2.str();

    char buf[160];
    std::snprintf(buf, sizeof(buf), "codebooks %s, trial logs %s, sweep CSV across threads %s",
                  books_equal ? "identical" : "DIFFER", trials_equal ? "identical" : "DIFFER",
                  sweep_equal ? "identical" : "DIFFER");
    return {books_equal && trials_equal && sweep_equal, buf};
}

// 9. Brute-force equivalence: solver vs simplex grid; greedy vs exhaustive
// covering sets.
Line criterion9() {
    double worst_two_sided = 0.0;
    double worst_one_sided = 0.0;
    for (const Channel& ch : three_input_channels()) {
        auto grid_max = [&](double beta) {
            double grid = 0.0;
            for (int i = 0; i <= 100; ++i) {
                for (int j = 0; j + i <= 100; ++j) {
                    const InputDistribution p({i / 100.0, j / 100.0, 1.0 - (i + j) / 100.0});
                    grid = std::max(grid, eq2_objective(ch, p, beta));
                }
            }
            return grid;
        };
        // two-sided where the 0.01 grid resolves the optimum; the grid is a
        // lower bound at every beta
        for (double beta : {0.0, 0.5}) {
            worst_two_sided =
                std::max(worst_two_sided, std::abs(async_cpuc(ch, beta).value - grid_max(beta)));
        }
        for (double beta : {1.0, 2.0}) {
            worst_one_sided =
                std::max(worst_one_sided, grid_max(beta) - async_cpuc(ch, beta).value);
        }
    }

    Rng rng(55);
    bool greedy_ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.below(11);
        const auto probs = rng.dirichlet1(n);
        const ArrivalModel m = ArrivalModel::explicit_list(probs);
        for (double eps : {0.05, 0.2, 0.5}) {
            std::uint64_t best = n;
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
                double mass = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (mask & (std::uint64_t{1} << i)) mass += probs[i];
                }
                if (mass >= 1.0 - eps - 1e-15) {
                    best = std::min<std::uint64_t>(best,
                                                   (std::uint64_t)__builtin_popcountll(mask));
                }
            }
            greedy_ok = greedy_ok && smallest_covering_set_size(m, eps) == best;
        }
    }
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "solver vs 0.01-grid: %.3g two-sided (tol 1e-4), one-sided slack %.3g (tol "
                  "1e-9); greedy covering %s exhaustive",
                  worst_two_sided, worst_one_sided, greedy_ok ? "equals" : "DIFFERS FROM");
    return {worst_two_sided <= 1e-4 && worst_one_sided <= 1e-9 && greedy_ok, buf};
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Line (*fn)();
    };
    const Entry entries[] = {
        {1, "closed-form agreement (general solver vs per-symbol form)", criterion1},
        {2, "synchronous reduction at beta = 0", criterion2},
        {3, "identity suite (divergence sum, KL, concavity)", criterion3},
        {4, "delay exponent delegation", criterion4},
        {5, "Gaussian closed form", criterion5},
        {6, "effective timing uncertainty examples", criterion6},
        {7, "phase-transition simulation", criterion7},
        {8, "determinism and thread independence", criterion8},
        {9, "brute-force oracle equivalence", criterion9},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        Line line{false, "exception"};
        try {
            line = e.fn();
        } catch (const std::exception& ex) {
            line.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] criterion %d: %s -- %s\n", line.pass ? "PASS" : "FAIL", e.id, e.name,
                    line.detail.c_str());
        std::fflush(stdout);
        failures += line.pass ? 0 : 1;
    }
    if (failures) {
        std::printf("%d of 9 criteria failed\n", failures);
    } else {
        std::printf("all 9 criteria passed\n");
    }
    return failures == 0 ? 0 : 1;
}
