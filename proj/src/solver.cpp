#include "asynccpuc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "asynccpuc/errors.hpp"
#include "asynccpuc/info.hpp"

namespace asynccpuc {

const char* binding_term_name(BindingTerm t) {
    switch (t) {
        case BindingTerm::mutual_info_term: return "mutual_info";
        case BindingTerm::timing_term: return "timing";
        case BindingTerm::both: return "both";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Mass kept off the zero-cost corner in reported optimizers; the supremum
// itself is approached as this mass vanishes.
constexpr double kCornerMass = 1e-4;

// View of the channel restricted to usable symbols (finite cost, idle symbol
// only when flagged usable).
struct Reduced {
    std::vector<std::size_t> sym;          // original input indices
    std::vector<std::vector<double>> rows; // transition rows
    std::vector<double> k;                 // costs
    std::vector<double> f;                 // D(Q_x || Q_star)
    std::size_t ny = 0;

    std::size_t size() const { return sym.size(); }
};

Reduced reduce(const Channel& ch) {
    Reduced r;
    r.ny = ch.num_outputs();
    for (std::size_t x : ch.usable_indices()) {
        r.sym.push_back(x);
        r.rows.push_back(ch.row(x));
        r.k.push_back(ch.cost[x]);
        r.f.push_back(kl_divergence(ch.row(x), ch.star_row()));
    }
    return r;
}

InputDistribution expand(const Reduced& r, const std::vector<double>& p, std::size_t n_full) {
    std::vector<double> full(n_full, 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) full[r.sym[i]] = p[i];
    return InputDistribution(std::move(full));
}

double row_l1(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t y = 0; y < a.size(); ++y) d += std::abs(a[y] - b[y]);
    return d;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> marginal(const Reduced& r, const std::vector<double>& p) {
    std::vector<double> py(r.ny, 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (p[i] == 0.0) continue;
        for (std::size_t y = 0; y < r.ny; ++y) py[y] += p[i] * r.rows[i][y];
    }
    return py;
}

double mutual_info_reduced(const Reduced& r, const std::vector<double>& p) {
    const auto py = marginal(r, p);
    double info = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (p[i] > 0.0) info += p[i] * kl_divergence(r.rows[i], py);
    }
    return info;
}

std::vector<double> uniform_dist(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Inner solver: maximize W(p) = theta * I(p) + <b, p> over the simplex,
// theta > 0, b finite. Fixed-point (Blahut-Arimoto style) multiplicative
// updates; every iterate yields a lower bound and every output marginal a
// dual upper bound, so the returned bracket [lb, ub] is certified.
// ---------------------------------------------------------------------------

struct Inner {
    double lb = -kInf;
    double ub = kInf;
    std::vector<double> p; // iterate achieving lb
};

Inner maximize_scalarized(const Reduced& r, double theta, const std::vector<double>& b,
                          const SolverOptions& opts, const std::vector<double>& warm) {
    const std::size_t n = r.size();
    std::vector<double> p(n);
    // Revive every coordinate: multiplicative updates cannot re-enter a
    // zeroed symbol, and the warm start may have pruned a symbol this
    // scalarization needs.
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = (warm.size() == n ? 0.999 * warm[i] : 0.0) + 0.001 / static_cast<double>(n);
    }
    {
        double s = 0.0;
        for (double v : p) s += v;
        for (auto& v : p) v /= s;
    }

    // Dual bounds use a floor-mixed output distribution so rows whose support
    // escapes the current marginal still get a finite score.
    std::vector<double> row_mix(r.ny, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t y = 0; y < r.ny; ++y) row_mix[y] += r.rows[i][y] / static_cast<double>(n);
    }
    constexpr double kFloor = 1e-13;

    Inner best;
    best.p = p;
    std::vector<double> score(n), qmix(r.ny);

    for (int it = 0; it < opts.inner_max_iters; ++it) {
        const auto py = marginal(r, p);
        for (std::size_t y = 0; y < r.ny; ++y) qmix[y] = (1.0 - kFloor) * py[y] + kFloor * row_mix[y];

        double lb = 0.0;
        double ub = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double dual = theta * kl_divergence(r.rows[i], qmix) + b[i];
            ub = std::max(ub, dual);
            if (p[i] > 0.0) {
                const double d = kl_divergence(r.rows[i], py);
                lb += p[i] * (theta * d + b[i]);
                score[i] = d + b[i] / theta;
            }
        }
        if (lb > best.lb) {
            best.lb = lb;
            best.p = p;
        }
        best.ub = std::min(best.ub, ub);
        if (best.ub - best.lb <= opts.inner_gap_tol) break;

        double smax = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i] > 0.0) smax = std::max(smax, score[i]);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i] > 0.0) {
                p[i] *= std::exp2(std::max(score[i] - smax, -1000.0));
                norm += p[i];
            }
        }
        for (auto& v : p) v /= norm;

        if (it > 200) {
            // Dust pruning: lets boundary-supported optima converge instead of
            // decaying geometrically forever. A wrong prune cannot corrupt the
            // result; the dual bound stops the gap from closing.
            double s = 0.0;
            for (auto& v : p) {
                if (v < 1e-17) v = 0.0;
                s += v;
            }
            for (auto& v : p) v /= s;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Feasibility oracle for the bisection over candidate rates-per-unit-cost.
// Decides whether sup_P min{ I - lambda E[k],  E[f] - lambda(1+beta)E[k] } is
// strictly positive (with the second constraint present only when `timing`).
// By minimax the supremum equals min over theta in [0,1] of
//   phi(theta) = max_P [ theta I + <b_theta, p> ],
// which is convex in theta and evaluated with certified brackets, so the
// decision comes with certificates on both sides.
// ---------------------------------------------------------------------------

double constraint_min(const Reduced& r, const std::vector<double>& p, double lambda, double beta,
                      bool timing) {
    const double info = mutual_info_reduced(r, p);
    const double ek = dot(p, r.k);
    const double t1 = info - lambda * ek;
    if (!timing) return t1;
    const double t2 = dot(p, r.f) - lambda * (1.0 + beta) * ek;
    return std::min(t1, t2);
}

double min_ratio(const Reduced& r, const std::vector<double>& p, double beta, bool timing) {
    const double ek = dot(p, r.k);
    if (!(ek > 0.0)) return 0.0;
    const double r1 = mutual_info_reduced(r, p) / ek;
    if (!timing) return r1;
    const double r2 = dot(p, r.f) / ((1.0 + beta) * ek);
    return std::min(r1, r2);
}

struct FeasOutcome {
    bool feasible = false;
    std::vector<double> best_p; // highest true constraint-min witnessed
};

FeasOutcome feasibility(const Reduced& r, double lambda, double beta, bool timing,
                        const SolverOptions& opts, std::vector<double>& warm) {
    const std::size_t n = r.size();

    double g_lo = -kInf;
    double g_up = kInf;
    FeasOutcome out;
    out.best_p = warm.size() == n ? warm : uniform_dist(n);

    auto consider = [&](const std::vector<double>& p) {
        const double g = constraint_min(r, p, lambda, beta, timing);
        if (g > g_lo) {
            g_lo = g;
            out.best_p = p;
        }
    };

    auto make_b = [&](double theta) {
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = -theta * lambda * r.k[i] +
                   (timing ? (1.0 - theta) * (r.f[i] - lambda * (1.0 + beta) * r.k[i]) : 0.0);
        }
        return b;
    };

    // phi at one theta; updates both certificates and the warm start.
    auto eval = [&](double theta) -> double {
        if (theta <= 0.0) {
            const auto b = make_b(0.0);
            std::size_t arg = 0;
            double ub = -kInf;
            for (std::size_t i = 0; i < n; ++i) {
                if (b[i] > ub) {
                    ub = b[i];
                    arg = i;
                }
            }
            std::vector<double> vertex(n, 0.0);
            vertex[arg] = 1.0;
            consider(vertex);
            g_up = std::min(g_up, ub);
            return ub;
        }
        const Inner in = maximize_scalarized(r, theta, make_b(theta), opts, warm);
        warm = in.p;
        consider(in.p);
        g_up = std::min(g_up, in.ub);
        return in.ub;
    };

    auto decided = [&]() { return g_lo > 0.0 || g_up < 0.0; };

    eval(1.0);
    if (!timing || decided()) {
        out.feasible = g_lo > 0.0;
        return out;
    }
    eval(0.0);
    if (decided()) {
        out.feasible = g_lo > 0.0;
        return out;
    }

    // Golden-section minimization of the convex phi over theta.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, c = 1.0;
    double x1 = c - gr * (c - a);
    double x2 = a + gr * (c - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    for (int i = 0; i < opts.scalarization_evals && !decided(); ++i) {
        if (f1 <= f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - gr * (c - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (c - a);
            f2 = eval(x2);
        }
    }

    // Undecided -> infeasible: biases the bisection low by at most the
    // residual certificate gap, never high.
    out.feasible = g_lo > 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// General solve over positive-cost supports (bisection branch).
// ---------------------------------------------------------------------------

struct BisectOutcome {
    double lo = 0.0, hi = 0.0;
    int iters = 0;
    std::vector<double> best_p;
    double best_ratio = 0.0;
};

BisectOutcome bisect_cpuc(const Reduced& r, double beta, bool timing, const SolverOptions& opts) {
    const std::size_t n = r.size();
    double kmin = kInf;
    for (double v : r.k) kmin = std::min(kmin, v);

    BisectOutcome res;
    res.best_p = uniform_dist(n);
    res.best_ratio = min_ratio(r, res.best_p, beta, timing);

    std::vector<double> warm = res.best_p;
    auto probe = [&](double lambda) {
        FeasOutcome fo = feasibility(r, lambda, beta, timing, opts, warm);
        const double ratio = min_ratio(r, fo.best_p, beta, timing);
        if (ratio > res.best_ratio) {
            res.best_ratio = ratio;
            res.best_p = fo.best_p;
        }
        return fo.feasible;
    };

    // I <= log2(min(|X|,|Y|)) and E[k] >= kmin bound every ratio.
    const double anchor =
        std::log2(static_cast<double>(std::min(n, r.ny))) / kmin * 1.000001 + 1e-9;
    double lo = 0.0;
    double hi = anchor;
    int grow = 0;
    while (probe(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 8) {
            throw error(errc::non_convergence, "upper bound for the rate bisection keeps growing");
        }
    }

    while (hi - lo > opts.lambda_tol * std::max(1.0, lo) && res.iters < opts.max_bisect_iters) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
        lo = std::min(std::max(lo, res.best_ratio), hi);
        res.iters++;
    }
    if (hi - lo > opts.lambda_tol * std::max(1.0, lo) * 4.0) {
        throw error(errc::non_convergence, "rate bisection did not reach the requested width");
    }
    res.lo = lo;
    res.hi = hi;
    return res;
}

BindingTerm classify_binding(double r1, double r2, double value) {
    const double tol = 1e-7 * std::max(1.0, std::abs(value));
    const bool b1 = r1 <= value + tol;
    const bool b2 = r2 <= value + tol;
    if (b1 && b2) return BindingTerm::both;
    return b1 ? BindingTerm::mutual_info_term : BindingTerm::timing_term;
}

// ---------------------------------------------------------------------------
// Zero-cost branch. With a usable zero-cost symbol z (common row q0; distinct
// rows would make the capacity infinite), both objective ratios are
// nonincreasing in the mass moved off z, so the supremum lives on the s -> 0
// face where they reduce to ratios of linear functions of the conditional
// distribution R over positive-cost symbols:
//    min{ E_R[g],  E_R[f]/(1+beta) } / E_R[k],   g(x) = D(Q_x || q0).
// That max-min is attained at a vertex or on a two-point crossing, so it is
// solved exactly by candidate enumeration.
// ---------------------------------------------------------------------------

struct ZeroCostSolve {
    double value = 0.0;
    std::vector<double> direction; // over the positive-cost face
    int candidates = 0;
    int arg_symbol = -1; // original input index when a vertex wins
    double r1 = 0.0, r2 = 0.0;
};

ZeroCostSolve solve_zero_cost_face(const Reduced& r, const std::vector<std::size_t>& xp,
                                   const std::vector<double>& g, double beta, bool timing) {
    ZeroCostSolve zs;
    const std::size_t m = xp.size();
    zs.direction.assign(m, 0.0);
    double best = -kInf;

    auto keep = [&](double val, std::size_t i, std::size_t j, double t) {
        if (val > best) {
            best = val;
            std::fill(zs.direction.begin(), zs.direction.end(), 0.0);
            if (t < 0.0) {
                zs.direction[i] = 1.0;
                zs.arg_symbol = static_cast<int>(r.sym[xp[i]]);
            } else {
                zs.direction[i] = 1.0 - t;
                zs.direction[j] = t;
                zs.arg_symbol = -1;
            }
        }
    };

    for (std::size_t i = 0; i < m; ++i) {
        const double gi = g[xp[i]];
        const double fi = r.f[xp[i]];
        const double num = timing ? std::min(gi, fi / (1.0 + beta)) : gi;
        zs.candidates++;
        keep(num / r.k[xp[i]], i, i, -1.0);
    }
    if (timing) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double gi = g[xp[i]], gj = g[xp[j]];
                const double fi = r.f[xp[i]], fj = r.f[xp[j]];
                if (!std::isfinite(gi) || !std::isfinite(gj) || !std::isfinite(fi) ||
                    !std::isfinite(fj)) {
                    continue;
                }
                const double di = gi - fi / (1.0 + beta);
                const double dj = gj - fj / (1.0 + beta);
                if ((di > 0.0) == (dj > 0.0) || di == dj) continue;
                const double t = di / (di - dj);
                if (!(t > 0.0 && t < 1.0)) continue;
                const double num = (1.0 - t) * gi + t * gj;
                const double den = (1.0 - t) * r.k[xp[i]] + t * r.k[xp[j]];
                zs.candidates++;
                keep(num / den, i, j, t);
            }
        }
    }

    zs.value = std::max(best, 0.0);
    double eg = 0.0, ef = 0.0, ek = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (zs.direction[i] > 0.0) {
            eg += zs.direction[i] * g[xp[i]];
            ef += zs.direction[i] * r.f[xp[i]];
            ek += zs.direction[i] * r.k[xp[i]];
        }
    }
    if (ek > 0.0) {
        zs.r1 = eg / ek;
        zs.r2 = ef / ((1.0 + beta) * ek);
    }
    return zs;
}

// Reported optimizer for the zero-cost branch: nearly all mass on the
// zero-cost set, a kCornerMass sliver along the optimal direction.
InputDistribution corner_optimizer(const Reduced& r, const std::vector<std::size_t>& zset,
                                   const std::vector<std::size_t>& xp,
                                   const std::vector<double>& direction, std::size_t n_full) {
    std::vector<double> p(r.size(), 0.0);
    for (std::size_t z : zset) p[z] = (1.0 - kCornerMass) / static_cast<double>(zset.size());
    for (std::size_t i = 0; i < xp.size(); ++i) p[xp[i]] += kCornerMass * direction[i];
    return expand(r, p, n_full);
}

// ---------------------------------------------------------------------------
// Shared driver for sync (timing = false) and async (timing = true).
// ---------------------------------------------------------------------------

CapacityResult solve_cpuc(const Channel& ch, double beta, bool timing, const SolverOptions& opts) {
    require_valid(ch);
    if (timing && !(beta >= 0.0)) throw error(errc::invalid_argument, "beta must be >= 0");

    const Reduced r = reduce(ch);
    if (r.size() == 0) {
        throw error(errc::all_costs_infinite, "no usable symbol has finite cost");
    }

    CapacityResult res;

    if (detect_infinite_cpuc(ch)) {
        // Two usable zero-cost symbols with distinct rows: positive mutual
        // information at zero cost.
        std::vector<std::size_t> zc;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r.k[i] == 0.0) zc.push_back(i);
        }
        std::vector<double> p(r.size(), 0.0);
        bool placed = false;
        for (std::size_t a = 0; a + 1 < zc.size() && !placed; ++a) {
            for (std::size_t b = a + 1; b < zc.size() && !placed; ++b) {
                if (row_l1(r.rows[zc[a]], r.rows[zc[b]]) > kProbTol) {
                    p[zc[a]] = 0.5;
                    p[zc[b]] = 0.5;
                    placed = true;
                }
            }
        }
        res.value = kInf;
        res.optimizer = expand(r, p, ch.num_inputs());
        res.binding_term = BindingTerm::timing_term;
        return res;
    }

    bool all_rows_equal = true;
    for (std::size_t i = 1; i < r.size() && all_rows_equal; ++i) {
        all_rows_equal = row_l1(r.rows[i], r.rows[0]) <= kProbTol;
    }
    if (all_rows_equal) {
        // Zero-capacity channel: defined here as value 0.
        res.value = 0.0;
        res.optimizer = expand(r, uniform_dist(r.size()), ch.num_inputs());
        res.binding_term = BindingTerm::mutual_info_term;
        return res;
    }

    std::vector<std::size_t> zset, xp;
    for (std::size_t i = 0; i < r.size(); ++i) {
        (r.k[i] == 0.0 ? zset : xp).push_back(i);
    }

    if (!zset.empty()) {
        const std::vector<double>& q0 = r.rows[zset[0]];
        std::vector<double> g(r.size(), 0.0);
        for (std::size_t i : xp) g[i] = kl_divergence(r.rows[i], q0);

        const double fz = kl_divergence(q0, ch.star_row());
        // A zero-cost symbol distinguishable from noise resolves timing for
        // free, so the timing constraint is asymptotically slack and the
        // async value collapses to the sync value.
        const bool timing_active = timing && fz <= kProbTol;

        ZeroCostSolve zs = solve_zero_cost_face(r, xp, g, beta, timing_active);
        res.value = zs.value;
        res.optimizer = corner_optimizer(r, zset, xp, zs.direction, ch.num_inputs());
        res.iterations = zs.candidates;
        res.residual = 0.0;
        res.arg_symbol = zs.arg_symbol;
        res.binding_term = timing_active ? classify_binding(zs.r1, zs.r2, zs.value)
                                         : BindingTerm::mutual_info_term;
        return res;
    }

    // All usable costs positive.
    if (timing) {
        bool f_inf = false;
        std::size_t beacon = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (std::isinf(r.f[i])) {
                f_inf = true;
                beacon = i;
            }
        }
        if (f_inf) {
            // A symbol impossible under noise acts as a free synchronization
            // beacon: an o(1) fraction of it makes the timing term infinite
            // while the rate term tends to the sync optimum.
            CapacityResult sync = solve_cpuc(ch, 0.0, false, opts);
            std::vector<double> p(r.size(), 0.0);
            for (std::size_t i = 0; i < r.size(); ++i) {
                p[i] = (1.0 - kCornerMass) * sync.optimizer[r.sym[i]];
            }
            p[beacon] += kCornerMass;
            sync.optimizer = expand(r, p, ch.num_inputs());
            sync.binding_term = BindingTerm::mutual_info_term;
            return sync;
        }
    }

    BisectOutcome bo = bisect_cpuc(r, beta, timing, opts);
    res.value = 0.5 * (bo.lo + bo.hi);
    res.optimizer = expand(r, bo.best_p, ch.num_inputs());
    res.iterations = bo.iters;
    res.residual = bo.hi - bo.lo;
    if (timing) {
        const double ek = dot(bo.best_p, r.k);
        const double r1 = mutual_info_reduced(r, bo.best_p) / ek;
        const double r2 = dot(bo.best_p, r.f) / ((1.0 + beta) * ek);
        res.binding_term = classify_binding(r1, r2, res.value);
    } else {
        res.binding_term = BindingTerm::mutual_info_term;
    }
    return res;
}

// Per-symbol form shared by the two zero-cost-idle operations.
CapacityResult per_symbol_form(const Channel& ch, double beta, const SolverOptions&) {
    require_valid(ch);
    if (!ch.usable_star || ch.cost[ch.star] != 0.0) {
        throw error(errc::star_not_usable_or_costly,
                    "per-symbol form needs a usable zero-cost idle symbol");
    }
    if (!(beta >= 0.0)) throw error(errc::invalid_argument, "beta must be >= 0");

    double best = 0.0;
    int arg = -1;
    int candidates = 0;
    for (std::size_t x : ch.usable_indices()) {
        if (x == ch.star) continue;
        const double fx = kl_divergence(ch.row(x), ch.star_row());
        double ratio;
        if (ch.cost[x] == 0.0) {
            if (fx <= kProbTol) continue; // indistinguishable from idle, no information
            ratio = kInf;
        } else {
            ratio = fx / ch.cost[x];
        }
        candidates++;
        if (arg < 0 || ratio > best) { // strict: ties keep the lowest index
            best = ratio;
            arg = static_cast<int>(x);
        }
    }

    CapacityResult res;
    res.value = best / (1.0 + beta);
    res.iterations = candidates;
    res.arg_symbol = arg;
    std::vector<double> p(ch.num_inputs(), 0.0);
    p[ch.star] = 1.0;
    if (arg >= 0) {
        p[ch.star] = 1.0 - kCornerMass;
        p[static_cast<std::size_t>(arg)] = kCornerMass;
    }
    res.optimizer = InputDistribution(std::move(p));
    res.binding_term = beta > 0.0 ? BindingTerm::timing_term : BindingTerm::both;
    return res;
}

} // namespace

CapacityResult sync_cpuc(const Channel& ch, const SolverOptions& opts) {
    return solve_cpuc(ch, 0.0, false, opts);
}

CapacityResult sync_cpuc_zero_cost(const Channel& ch, const SolverOptions& opts) {
    CapacityResult res = per_symbol_form(ch, 0.0, opts);
    res.binding_term = BindingTerm::mutual_info_term;
    return res;
}

CapacityResult async_cpuc(const Channel& ch, double beta, const SolverOptions& opts) {
    return solve_cpuc(ch, beta, true, opts);
}

CapacityResult async_cpuc_zero_cost(const Channel& ch, double beta, const SolverOptions& opts) {
    return per_symbol_form(ch, beta, opts);
}

CapacityResult async_cpuc_delay(const Channel& ch, double beta, double delta,
                                const SolverOptions& opts) {
    if (!(delta > 0.0) || !(delta < beta)) {
        throw error(errc::delta_out_of_range, "delay exponent must satisfy 0 < delta < beta");
    }
    return async_cpuc(ch, beta - delta, opts);
}

double gaussian_cpuc(const GaussianChannel& ch, double beta) {
    if (!(ch.n0 > 0.0)) throw error(errc::invalid_argument, "n0 must be positive");
    if (!(beta >= 0.0)) throw error(errc::invalid_argument, "beta must be >= 0");
    return std::numbers::log2e / ch.n0 / (1.0 + beta);
}

double achievable_rate_bound(const Channel& ch, const InputDistribution& p, double beta) {
    const double info = mutual_information(p, ch);
    const double total = divergence_sum_identity(p, ch); // I + D(Y||Y*)
    return std::min(info, total / (1.0 + beta));
}

InputDistribution best_rate_composition(const Channel& ch, double beta,
                                        const SolverOptions& opts) {
    require_valid(ch);
    const Reduced r = reduce(ch);
    if (r.size() == 0) throw error(errc::all_costs_infinite, "no usable symbol has finite cost");
    if (r.size() == 1) {
        return expand(r, {1.0}, ch.num_inputs());
    }

    // Clamped copy of f for the scalarized solves; the exact bound at the
    // chosen composition is always evaluated with the true values.
    std::vector<double> fcap(r.size());
    const double cap = 4.0 * (std::log2(static_cast<double>(std::max(r.ny, r.size()))) + 1.0) *
                       (1.0 + beta);
    for (std::size_t i = 0; i < r.size(); ++i) fcap[i] = std::min(r.f[i], cap);

    std::vector<double> best_p = uniform_dist(r.size());
    auto bound_at = [&](const std::vector<double>& p) {
        const double info = mutual_info_reduced(r, p);
        const double ef = dot(p, r.f);
        return std::min(info, ef / (1.0 + beta));
    };
    double best_val = bound_at(best_p);

    std::vector<double> warm = best_p;
    auto eval = [&](double theta) -> double {
        std::vector<double> b(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) b[i] = (1.0 - theta) * fcap[i] / (1.0 + beta);
        if (theta <= 0.0) {
            std::size_t arg = 0;
            for (std::size_t i = 1; i < r.size(); ++i) {
                if (b[i] > b[arg]) arg = i;
            }
            std::vector<double> vertex(r.size(), 0.0);
            vertex[arg] = 1.0;
            const double v = bound_at(vertex);
            if (v > best_val) {
                best_val = v;
                best_p = vertex;
            }
            return b[arg];
        }
        const Inner in = maximize_scalarized(r, theta, b, opts, warm);
        warm = in.p;
        const double v = bound_at(in.p);
        if (v > best_val) {
            best_val = v;
            best_p = in.p;
        }
        return in.ub;
    };

    eval(1.0);
    eval(0.0);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, c = 1.0;
    double x1 = c - gr * (c - a);
    double x2 = a + gr * (c - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    for (int i = 0; i < opts.scalarization_evals; ++i) {
        if (f1 <= f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - gr * (c - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (c - a);
            f2 = eval(x2);
        }
    }
    return expand(r, best_p, ch.num_inputs());
}

} // namespace asynccpuc
