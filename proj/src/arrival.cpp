#include "asynccpuc/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "asynccpuc/errors.hpp"
#include "json.hpp"

namespace asynccpuc {

namespace {

std::uint64_t pow2_u64(double exponent) {
    if (exponent <= 0.0) return 1;
    if (exponent > 62.0) throw error(errc::invalid_argument, "arrival support exceeds 2^62");
    return static_cast<std::uint64_t>(std::max<long long>(1, std::llround(std::exp2(exponent))));
}

} // namespace

ArrivalModel ArrivalModel::uniform_beta(double beta, int bits) {
    ArrivalModel m;
    m.family = Family::uniform;
    m.beta = beta;
    m.bits = bits;
    m.check();
    return m;
}

ArrivalModel ArrivalModel::uniform_fixed(std::uint64_t a) {
    ArrivalModel m;
    m.family = Family::uniform;
    m.fixed_a = a;
    m.check();
    return m;
}

ArrivalModel ArrivalModel::geometric(double q, std::uint64_t a_max) {
    ArrivalModel m;
    m.family = Family::geometric;
    m.q = q;
    m.a_max = a_max;
    m.check();
    return m;
}

ArrivalModel ArrivalModel::spike_mixture(double beta, int bits) {
    ArrivalModel m;
    m.family = Family::spike_mixture;
    m.beta = beta;
    m.bits = bits;
    m.check();
    return m;
}

ArrivalModel ArrivalModel::point_mass(std::uint64_t t) {
    ArrivalModel m;
    m.family = Family::point_mass;
    m.t = t;
    m.check();
    return m;
}

ArrivalModel ArrivalModel::explicit_list(std::vector<double> probs) {
    ArrivalModel m;
    m.family = Family::explicit_list;
    m.probs = std::move(probs);
    m.check();
    return m;
}

ArrivalModel ArrivalModel::with_bits(int b) const {
    ArrivalModel m = *this;
    m.bits = b;
    return m;
}

void ArrivalModel::check() const {
    switch (family) {
        case Family::uniform:
            if (fixed_a == 0 && !(beta >= 0.0)) {
                throw error(errc::invalid_argument, "uniform arrival needs beta >= 0 or fixed A");
            }
            break;
        case Family::geometric:
            if (!(q > 0.0 && q < 1.0) || a_max < 1) {
                throw error(errc::invalid_argument, "geometric arrival needs 0 < q < 1, A_max >= 1");
            }
            break;
        case Family::spike_mixture:
            if (!(beta > 0.0)) throw error(errc::invalid_argument, "spike arrival needs beta > 0");
            break;
        case Family::point_mass:
            if (t < 1) throw error(errc::invalid_argument, "point mass must be at t >= 1");
            break;
        case Family::explicit_list: {
            if (probs.empty()) throw error(errc::invalid_argument, "explicit arrival list is empty");
            double total = 0.0;
            for (double p : probs) {
                if (!(p >= 0.0)) throw error(errc::invalid_argument, "negative arrival probability");
                total += p;
            }
            if (std::abs(total - 1.0) > kProbTol) {
                throw error(errc::invalid_argument, "arrival probabilities must sum to 1");
            }
            break;
        }
    }
    if (bits < 1) throw error(errc::invalid_argument, "bit context must be >= 1");
}

std::uint64_t ArrivalModel::support_max() const {
    switch (family) {
        case Family::uniform:
            return fixed_a > 0 ? fixed_a : pow2_u64(beta * bits);
        case Family::geometric:
            return a_max;
        case Family::spike_mixture:
            return pow2_u64(beta * bits) + 1;
        case Family::point_mass:
            return t;
        case Family::explicit_list:
            return probs.size();
    }
    return 1;
}

double ArrivalModel::entropy_bits() const {
    switch (family) {
        case Family::uniform:
            return std::log2(static_cast<double>(support_max()));
        case Family::geometric: {
            // Truncated geometric: p_i = c q (1-q)^(i-1), c = 1/(1-(1-q)^A).
            const double r = 1.0 - q;
            const double tail = std::exp(static_cast<double>(a_max) * std::log(r));
            const double c = 1.0 / (1.0 - tail);
            const double mean_im1 = r / q - static_cast<double>(a_max) * tail / (1.0 - tail);
            return -std::log2(c * q) - mean_im1 * std::log2(r);
        }
        case Family::spike_mixture:
            // 1/2 on the spike plus 2^(beta B) atoms of mass 2^-(beta B + 1).
            return 1.0 + beta * static_cast<double>(bits) / 2.0;
        case Family::point_mass:
            return 0.0;
        case Family::explicit_list: {
            double h = 0.0;
            for (double p : probs) {
                if (p > 0.0) h -= p * std::log2(p);
            }
            return h;
        }
    }
    return 0.0;
}

std::uint64_t ArrivalModel::sample(Rng& rng) const {
    switch (family) {
        case Family::uniform:
            return 1 + rng.below(support_max());
        case Family::geometric: {
            const double r = 1.0 - q;
            const double tail = std::exp(static_cast<double>(a_max) * std::log(r));
            const double u = rng.next_unit() * (1.0 - tail);
            const double i = std::ceil(std::log1p(-u) / std::log(r));
            const auto v = static_cast<std::uint64_t>(std::max(1.0, i));
            return std::min(v, a_max);
        }
        case Family::spike_mixture: {
            if (rng.next_unit() < 0.5) return 1;
            return 2 + rng.below(pow2_u64(beta * bits));
        }
        case Family::point_mass:
            return t;
        case Family::explicit_list:
            return 1 + rng.sample(probs);
    }
    return 1;
}

std::uint64_t smallest_covering_set_size(const ArrivalModel& model, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw error(errc::invalid_argument, "epsilon must be in [0, 1)");
    }
    switch (model.family) {
        case ArrivalModel::Family::uniform: {
            const auto a = model.support_max();
            // smallest S with S/A >= 1-eps
            const auto keep = static_cast<std::uint64_t>(
                std::ceil((1.0 - epsilon) * static_cast<double>(a) - 1e-12));
            return std::max<std::uint64_t>(1, std::min(keep, a));
        }
        case ArrivalModel::Family::geometric: {
            // Masses already descend with i; accumulate the prefix CDF.
            const double r = 1.0 - model.q;
            const double tail = std::exp(static_cast<double>(model.a_max) * std::log(r));
            const double need = (1.0 - epsilon) * (1.0 - tail);
            const double n = std::ceil(std::log1p(-need) / std::log(r) - 1e-12);
            const auto v = static_cast<std::uint64_t>(std::max(1.0, n));
            return std::min(v, model.a_max);
        }
        case ArrivalModel::Family::spike_mixture: {
            if (epsilon >= 0.5) return 1;
            const double atom = std::exp2(-(model.beta * model.bits)) / 2.0;
            const double extra = std::ceil((0.5 - epsilon) / atom - 1e-9);
            return 1 + static_cast<std::uint64_t>(std::max(0.0, extra));
        }
        case ArrivalModel::Family::point_mass:
            return 1;
        case ArrivalModel::Family::explicit_list: {
            std::vector<double> sorted = model.probs;
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            double acc = 0.0;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                acc += sorted[i];
                if (acc >= 1.0 - epsilon - 1e-15) return i + 1;
            }
            return sorted.size();
        }
    }
    return 1;
}

std::vector<std::uint64_t> covering_set(const ArrivalModel& model, double epsilon) {
    const std::uint64_t size = smallest_covering_set_size(model, epsilon);
    std::vector<std::uint64_t> set;
    switch (model.family) {
        case ArrivalModel::Family::uniform:
        case ArrivalModel::Family::geometric:
            // Uniform ties keep the earliest times; geometric masses descend.
            for (std::uint64_t i = 1; i <= size; ++i) set.push_back(i);
            return set;
        case ArrivalModel::Family::point_mass:
            return {model.t};
        case ArrivalModel::Family::spike_mixture: {
            set.push_back(1);
            for (std::uint64_t i = 2; set.size() < size; ++i) set.push_back(i);
            return set;
        }
        case ArrivalModel::Family::explicit_list: {
            std::vector<std::uint64_t> order(model.probs.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
                return model.probs[a] > model.probs[b];
            });
            for (std::uint64_t i = 0; i < size; ++i) set.push_back(order[i] + 1);
            std::sort(set.begin(), set.end());
            return set;
        }
    }
    return set;
}

namespace {

struct Schedule {
    std::string name;
    double (*eps)(int);
};

const Schedule kScheduleMenu[] = {
    {"1/B", [](int b) { return 1.0 / b; }},
    {"2^-sqrt(B)", [](int b) { return std::exp2(-std::sqrt(static_cast<double>(b))); }},
    {"log2(B)/B", [](int b) { return std::log2(static_cast<double>(b)) / b; }},
};

// Linear-in-1/B Richardson extrapolation from the last two points.
double extrapolate(const std::vector<int>& bs, const std::vector<double>& rs, std::size_t upto) {
    const double b1 = bs[upto - 1], b2 = bs[upto];
    const double r1 = rs[upto - 1], r2 = rs[upto];
    return (b2 * r2 - b1 * r1) / (b2 - b1);
}

} // namespace

BetaBarResult beta_bar(const ArrivalModel& prototype, const std::vector<int>& bit_counts) {
    if (bit_counts.size() < 3) {
        throw error(errc::invalid_argument, "need at least three increasing bit counts");
    }
    for (std::size_t i = 1; i < bit_counts.size(); ++i) {
        if (bit_counts[i] <= bit_counts[i - 1]) {
            throw error(errc::invalid_argument, "bit counts must be strictly increasing");
        }
    }

    BetaBarResult result;
    bool any_converged = false;
    double best = std::numeric_limits<double>::infinity();

    for (const Schedule& sched : kScheduleMenu) {
        std::vector<double> rates;
        for (int b : bit_counts) {
            const double eps = std::min(sched.eps(b), 0.999999);
            const auto s = smallest_covering_set_size(prototype.with_bits(b), eps);
            rates.push_back(std::log2(static_cast<double>(s)) / b);
        }
        const std::size_t last = bit_counts.size() - 1;
        const double fit = extrapolate(bit_counts, rates, last);
        const double prev_fit = extrapolate(bit_counts, rates, last - 1);
        const double residual = std::abs(fit - prev_fit);

        result.schedule_names.push_back(sched.name);
        result.schedule_values.push_back(fit);
        result.schedule_residuals.push_back(residual);

        if (residual <= 0.05 && fit < best) {
            best = fit;
            result.value = std::max(fit, 0.0);
            result.residual = residual;
            result.schedule = sched.name;
            any_converged = true;
        }
    }
    if (!any_converged) {
        throw error(errc::non_convergent_sequence,
                    "no epsilon schedule produced a stable limit (all residuals > 0.05)");
    }
    return result;
}

CapacityResult effective_capacity(const Channel& ch, const ArrivalModel& prototype,
                                  const std::vector<int>& bit_counts, const SolverOptions& opts) {
    const BetaBarResult bb = beta_bar(prototype, bit_counts);
    return async_cpuc(ch, bb.value, opts);
}

ArrivalModel parse_arrival_json(const std::string& text) {
    using nlohmann::json;
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw error(errc::parse_error, "arrival spec must be a JSON object");
    }
    if (!j.contains("family")) throw error(errc::parse_error, "arrival spec missing family");
    const std::string family = j.at("family").get<std::string>();

    auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool ok = it.key() == "family";
            for (const char* k : allowed) ok = ok || (it.key() == k);
            if (!ok) throw error(errc::parse_error, "unknown key in arrival spec: " + it.key());
        }
    };

    if (family == "uniform") {
        reject_unknown({"beta", "A"});
        if (j.contains("A")) return ArrivalModel::uniform_fixed(j.at("A").get<std::uint64_t>());
        return ArrivalModel::uniform_beta(j.at("beta").get<double>());
    }
    if (family == "geometric") {
        reject_unknown({"q", "A_max"});
        return ArrivalModel::geometric(j.at("q").get<double>(), j.at("A_max").get<std::uint64_t>());
    }
    if (family == "spike_mixture") {
        reject_unknown({"beta"});
        return ArrivalModel::spike_mixture(j.at("beta").get<double>());
    }
    if (family == "point_mass") {
        reject_unknown({"t"});
        return ArrivalModel::point_mass(j.at("t").get<std::uint64_t>());
    }
    if (family == "explicit") {
        reject_unknown({"p"});
        return ArrivalModel::explicit_list(j.at("p").get<std::vector<double>>());
    }
    throw error(errc::parse_error, "unknown arrival family: " + family);
}

} // namespace asynccpuc
