#include "asynccpuc/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "asynccpuc/errors.hpp"
#include "json.hpp"

namespace asynccpuc {

std::vector<std::size_t> Channel::usable_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t x = 0; x < inputs.size(); ++x) {
        if (usable(x)) idx.push_back(x);
    }
    return idx;
}

bool InputDistribution::is_valid(double tol) const {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) return false;
        total += v;
    }
    return std::abs(total - 1.0) <= tol;
}

std::optional<ValidationIssue> validate(const Channel& ch) {
    const std::size_t nx = ch.inputs.size();
    const std::size_t ny = ch.outputs.size();
    if (nx == 0 || ny == 0 || ch.transition.size() != nx || ch.cost.size() != nx) {
        return ValidationIssue{ValidationIssue::Kind::size_mismatch, 0, 0,
                               "alphabet, transition and cost sizes disagree"};
    }
    if (ch.star >= nx) {
        return ValidationIssue{ValidationIssue::Kind::missing_star_row, ch.star, 0,
                               "idle-symbol index outside the input alphabet"};
    }
    for (std::size_t x = 0; x < nx; ++x) {
        if (ch.transition[x].size() != ny) {
            return ValidationIssue{ValidationIssue::Kind::size_mismatch, x, 0, "row length != |outputs|"};
        }
        double total = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            const double q = ch.transition[x][y];
            if (!(q >= 0.0 && q <= 1.0) || !std::isfinite(q)) {
                return ValidationIssue{ValidationIssue::Kind::bad_entry, x, y, "entry outside [0,1]"};
            }
            total += q;
        }
        if (std::abs(total - 1.0) > kProbTol) {
            std::ostringstream msg;
            msg << "row sums to " << total;
            return ValidationIssue{ValidationIssue::Kind::non_stochastic_row, x, 0, msg.str()};
        }
    }
    for (std::size_t x = 0; x < nx; ++x) {
        const double k = ch.cost[x];
        if (std::isnan(k) || k < 0.0) {
            return ValidationIssue{ValidationIssue::Kind::negative_cost, x, 0, "cost is negative or NaN"};
        }
    }
    return std::nullopt;
}

void require_valid(const Channel& ch) {
    if (auto issue = validate(ch)) {
        errc code = errc::invalid_argument;
        switch (issue->kind) {
            case ValidationIssue::Kind::non_stochastic_row:
            case ValidationIssue::Kind::bad_entry: code = errc::non_stochastic_row; break;
            case ValidationIssue::Kind::negative_cost: code = errc::negative_cost; break;
            case ValidationIssue::Kind::missing_star_row: code = errc::missing_star_row; break;
            case ValidationIssue::Kind::size_mismatch: code = errc::invalid_argument; break;
        }
        std::ostringstream msg;
        msg << errc_name(code) << " at row " << issue->row << ": " << issue->detail;
        throw error(code, msg.str());
    }
}

namespace {

double row_l1(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t y = 0; y < a.size(); ++y) d += std::abs(a[y] - b[y]);
    return d;
}

} // namespace

bool detect_infinite_cpuc(const Channel& ch) {
    std::vector<std::size_t> zero_cost;
    for (std::size_t x : ch.usable_indices()) {
        if (ch.cost[x] == 0.0) zero_cost.push_back(x);
    }
    for (std::size_t i = 0; i + 1 < zero_cost.size(); ++i) {
        for (std::size_t j = i + 1; j < zero_cost.size(); ++j) {
            if (row_l1(ch.row(zero_cost[i]), ch.row(zero_cost[j])) > kProbTol) return true;
        }
    }
    return false;
}

namespace {

using nlohmann::json;

double parse_cost_entry(const json& v, std::size_t idx) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "Inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    }
    std::ostringstream msg;
    msg << "cost[" << idx << "] must be a number or \"inf\"";
    throw error(errc::parse_error, msg.str());
}

Channel channel_from_json(const json& j) {
    if (!j.is_object()) throw error(errc::parse_error, "channel spec must be a JSON object");

    static const char* known[] = {"inputs", "outputs", "star", "usable_star", "Q", "cost", "arrival"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || (it.key() == k);
        if (!ok) throw error(errc::parse_error, "unknown key in channel spec: " + it.key());
    }
    for (const char* k : {"inputs", "outputs", "star", "usable_star", "Q", "cost"}) {
        if (!j.contains(k)) throw error(errc::parse_error, std::string("missing key: ") + k);
    }

    Channel ch;
    for (const auto& v : j.at("inputs")) ch.inputs.push_back(v.get<std::string>());
    for (const auto& v : j.at("outputs")) ch.outputs.push_back(v.get<std::string>());

    const std::string star_label = j.at("star").get<std::string>();
    bool found = false;
    for (std::size_t x = 0; x < ch.inputs.size(); ++x) {
        if (ch.inputs[x] == star_label) {
            ch.star = x;
            found = true;
            break;
        }
    }
    if (!found) throw error(errc::missing_star_row, "star \"" + star_label + "\" is not an input symbol");

    ch.usable_star = j.at("usable_star").get<bool>();

    for (const auto& row : j.at("Q")) {
        ch.transition.emplace_back();
        for (const auto& v : row) ch.transition.back().push_back(v.get<double>());
    }
    std::size_t idx = 0;
    for (const auto& v : j.at("cost")) ch.cost.push_back(parse_cost_entry(v, idx++));

    require_valid(ch);
    return ch;
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw error(errc::parse_error, "malformed JSON");
    return j;
}

} // namespace

Channel parse_channel_json(const std::string& text) {
    return channel_from_json(parse_text(text));
}

Channel load_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open channel file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_channel_json(buf.str());
}

std::optional<std::string> channel_file_arrival_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open channel file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    json j = parse_text(buf.str());
    if (!j.is_object() || !j.contains("arrival")) return std::nullopt;
    return j.at("arrival").dump();
}

} // namespace asynccpuc
