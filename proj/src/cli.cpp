#include "asynccpuc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asynccpuc/arrival.hpp"
#include "asynccpuc/channel.hpp"
#include "asynccpuc/coding.hpp"
#include "asynccpuc/errors.hpp"
#include "asynccpuc/simulator.hpp"
#include "asynccpuc/solver.hpp"

namespace asynccpuc::cli {

namespace {

std::string fmt_g(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int exit_code_for(const error& e) {
    switch (e.code()) {
        case errc::non_convergence:
        case errc::non_convergent_sequence:
        case errc::rejection_budget_exceeded:
            return kExitNumeric;
        default:
            return kExitValidation;
    }
}

// Writes either to --out or to the provided stream.
class OutSink {
  public:
    OutSink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw error(errc::invalid_argument, "cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

  private:
    std::ofstream file_;
    std::ostream& fallback_;
};

ArrivalModel parse_arrival_spec(const std::string& spec) {
    if (!spec.empty() && spec.front() == '{') return parse_arrival_json(spec);
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw error(errc::parse_error, "empty arrival spec");
    const std::string& fam = parts[0];
    auto num = [&](std::size_t i) -> double {
        if (i >= parts.size()) throw error(errc::parse_error, "arrival spec missing parameter");
        return std::stod(parts[i]);
    };
    if (fam == "uniform") return ArrivalModel::uniform_beta(num(1));
    if (fam == "uniform_fixed") return ArrivalModel::uniform_fixed(static_cast<std::uint64_t>(num(1)));
    if (fam == "geometric") return ArrivalModel::geometric(num(1), static_cast<std::uint64_t>(num(2)));
    if (fam == "spike") return ArrivalModel::spike_mixture(num(1));
    if (fam == "point") return ArrivalModel::point_mass(static_cast<std::uint64_t>(num(1)));
    if (fam == "explicit") {
        if (parts.size() < 2) throw error(errc::parse_error, "explicit arrival needs probabilities");
        std::vector<double> probs;
        std::stringstream ps(parts[1]);
        std::string tok;
        while (std::getline(ps, tok, ',')) probs.push_back(std::stod(tok));
        return ArrivalModel::explicit_list(std::move(probs));
    }
    throw error(errc::parse_error, "unknown arrival family: " + fam);
}

void print_result(std::ostream& out, const Channel& ch, const CapacityResult& res,
                  const std::string& label) {
    out << label << ": " << fmt_g(res.value) << " bits per unit cost\n";
    out << "binding: " << binding_term_name(res.binding_term) << "\n";
    out << "optimizer:";
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        if (res.optimizer[x] > 0.0) out << ' ' << ch.inputs[x] << '=' << fmt_g(res.optimizer[x]);
    }
    out << "\n";
    if (res.arg_symbol >= 0) {
        out << "argmax symbol: " << ch.inputs[static_cast<std::size_t>(res.arg_symbol)] << "\n";
    }
    out << "iterations: " << res.iterations << "  residual: " << fmt_g(res.residual) << "\n";
}

struct CommonArgs {
    std::string channel_path;
    std::string out_path;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

int cmd_validate(const CommonArgs& args, std::ostream& out) {
    const Channel ch = load_channel_file(args.channel_path);
    // load already rejects invalid channels; report the full picture
    out << "channel: " << args.channel_path << "\n";
    out << "inputs: " << ch.num_inputs() << "  outputs: " << ch.num_outputs() << "\n";
    out << "star: " << ch.inputs[ch.star] << (ch.usable_star ? " (usable)" : " (not usable)")
        << "\n";
    out << "stochastic: yes\n";
    out << "infinite capacity per unit cost: " << (detect_infinite_cpuc(ch) ? "yes" : "no") << "\n";
    return kExitOk;
}

int cmd_capacity(const CommonArgs& args, double beta, double delta, bool has_delta,
                 std::ostream& os) {
    const Channel ch = load_channel_file(args.channel_path);
    OutSink sink(args.out_path, os);
    std::ostream& out = sink.stream();
    const CapacityResult sync = sync_cpuc(ch);
    print_result(out, ch, sync, "C_sync");
    const CapacityResult res = async_cpuc(ch, beta);
    print_result(out, ch, res, "C(beta=" + fmt_g(beta) + ")");
    if (has_delta) {
        const CapacityResult rd = async_cpuc_delay(ch, beta, delta);
        print_result(out, ch, rd,
                     "C(beta=" + fmt_g(beta) + ", delta=" + fmt_g(delta) + ")");
    }
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::vector<double>& betas, std::ostream& os) {
    const Channel ch = load_channel_file(args.channel_path);
    for (double b : betas) {
        if (!(b >= 0.0)) throw error(errc::invalid_argument, "beta must be >= 0");
    }
    OutSink sink(args.out_path, os);
    std::ostream& out = sink.stream();
    out << "beta,capacity,binding_term\n";

    std::vector<std::pair<double, double>> curve;
    for (double b : betas) {
        const CapacityResult res = async_cpuc(ch, b);
        out << fmt_g(b) << ',' << fmt_g(res.value) << ',' << binding_term_name(res.binding_term)
            << '\n';
        curve.emplace_back(b, res.value);
    }
    std::sort(curve.begin(), curve.end());
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].second > curve[i - 1].second + 1e-9) {
            throw error(errc::non_convergence, "capacity curve is not nonincreasing in beta");
        }
    }
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args, double beta, int bits, const std::vector<double>& rhos,
                 int block_length, std::uint64_t trials, double epsilon, const std::string& policy,
                 double delta, const std::string& arrival_spec, std::ostream& os) {
    const Channel ch = load_channel_file(args.channel_path);
    if (trials < 1) throw error(errc::invalid_argument, "trials must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw error(errc::invalid_argument, "epsilon must be in (0, 1)");
    }

    SimOptions opts;
    opts.threads = args.threads;
    opts.epsilon = epsilon;
    if (policy == "wait") {
        opts.policy = StartPolicy::wait_multiple;
    } else if (policy != "immediate") {
        throw error(errc::invalid_argument, "policy must be immediate or wait");
    }

    ArrivalModel arrival;
    bool has_arrival = false;
    if (!arrival_spec.empty()) {
        arrival = parse_arrival_spec(arrival_spec).with_bits(bits);
        has_arrival = true;
    } else if (auto text = channel_file_arrival_json(args.channel_path)) {
        arrival = parse_arrival_json(*text).with_bits(bits);
        has_arrival = true;
    }
    if (has_arrival) {
        CodeSpec probe;
        probe.bits = bits;
        probe.beta = beta;
        if (arrival.support_max() > probe.async_level()) {
            std::ostringstream msg;
            msg << "arrival support reaches " << arrival.support_max()
                << " but the timing window is A = " << probe.async_level()
                << "; raise --beta or --bits";
            throw error(errc::nu_out_of_range, msg.str());
        }
        opts.arrival = &arrival;
    }

    const InputDistribution composition = best_rate_composition(ch, beta);

    OutSink sink(args.out_path, os);
    std::ostream& out = sink.stream();
    std::vector<SweepRow> rows;
    if (!rhos.empty()) {
        rows = sweep_rate(ch, beta, bits, rhos, trials, args.seed, composition, opts);
    } else {
        if (block_length < 2) {
            throw error(errc::invalid_argument, "need --rho values or --block-length >= 2");
        }
        CodeSpec spec;
        spec.bits = bits;
        spec.block_length = block_length;
        spec.beta = beta;
        spec.delta = (opts.policy == StartPolicy::wait_multiple) ? delta : 0.0;
        spec.composition = composition;
        spec.seed = split_seed(args.seed, 1);
        const Codebook cb = generate_codebook(spec, ch);
        const SimEstimate est = estimate(cb, ch, trials, split_seed(args.seed, 2), opts);
        rows.push_back(make_sweep_row(spec, implied_rho(ch, spec), est));
    }
    write_sweep_csv(rows, out);
    return kExitOk;
}

int cmd_arrival(const CommonArgs& args, const std::string& arrival_spec,
                const std::vector<int>& bits_list, double epsilon, std::ostream& os) {
    ArrivalModel model;
    if (!arrival_spec.empty()) {
        model = parse_arrival_spec(arrival_spec);
    } else if (!args.channel_path.empty()) {
        auto text = channel_file_arrival_json(args.channel_path);
        if (!text) throw error(errc::parse_error, "channel file has no arrival block");
        model = parse_arrival_json(*text);
    } else {
        throw error(errc::invalid_argument, "need --arrival or a channel file with one");
    }

    OutSink sink(args.out_path, os);
    std::ostream& out = sink.stream();

    out << "B,H(nu)/B,S(1/B),log2(S)/B,S(eps)\n";
    for (int b : bits_list) {
        const ArrivalModel mb = model.with_bits(b);
        const auto s = smallest_covering_set_size(mb, 1.0 / b);
        out << b << ',' << fmt_g(mb.entropy_bits() / b) << ',' << s << ','
            << fmt_g(std::log2(static_cast<double>(s)) / b) << ','
            << smallest_covering_set_size(mb, epsilon) << '\n';
    }

    BetaBarResult bb;
    try {
        bb = beta_bar(model, bits_list);
    } catch (const error& e) {
        if (e.code() == errc::non_convergent_sequence) {
            sink.stream() << "beta_bar: did not converge (" << e.what()
                          << "); try a wider, larger range of B values\n";
        }
        throw;
    }
    for (std::size_t i = 0; i < bb.schedule_names.size(); ++i) {
        out << "schedule " << bb.schedule_names[i] << ": limit " << fmt_g(bb.schedule_values[i])
            << " residual " << fmt_g(bb.schedule_residuals[i]) << '\n';
    }
    out << "beta_bar: " << fmt_g(bb.value) << " (schedule " << bb.schedule << ", residual "
        << fmt_g(bb.residual) << ")\n";

    if (!args.channel_path.empty()) {
        const Channel ch = load_channel_file(args.channel_path);
        const CapacityResult res = async_cpuc(ch, bb.value);
        print_result(out, ch, res, "C(beta_bar)");
    }
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"asynchronous capacity per unit cost: solver and simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    double beta = 0.0;
    double delta = 0.0;
    int bits = 8;
    std::vector<double> betas;
    std::vector<double> rhos;
    int block_length = 0;
    std::uint64_t trials = 10000;
    double epsilon = 0.1;
    std::string policy = "immediate";
    std::string arrival_spec;
    std::vector<int> bits_list = {8, 10, 12, 14, 16, 18, 20};

    auto add_common = [&](CLI::App* cmd, bool channel_required) {
        auto* copt = cmd->add_option("--channel", args.channel_path, "channel spec JSON file");
        if (channel_required) copt->required();
        cmd->add_option("--out", args.out_path, "write the report/CSV to this file");
        cmd->add_option("--seed", args.seed, "random seed")->envname("ASYNCCPUC_SEED");
        cmd->add_option("--threads", args.threads, "worker threads (results are thread-count independent)");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check a channel file");
    add_common(validate_cmd, true);

    auto* capacity_cmd = app.add_subcommand("capacity", "capacity per unit cost at one beta");
    add_common(capacity_cmd, true);
    capacity_cmd->add_option("--beta", beta, "timing uncertainty per information bit")->required();
    auto* delta_opt = capacity_cmd->add_option("--delta", delta, "delay exponent (0 < delta < beta)");

    auto* sweep_cmd = app.add_subcommand("sweep", "capacity curve over beta values");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--beta", betas, "beta grid (repeatable)")->expected(-1);

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo error-probability estimates");
    add_common(sim_cmd, true);
    sim_cmd->add_option("--beta", beta, "timing uncertainty per information bit")->required();
    sim_cmd->add_option("--bits", bits, "message bits B");
    sim_cmd->add_option("--rho", rhos, "fractions of the achievable rate (repeatable)")->expected(-1);
    sim_cmd->add_option("--block-length", block_length, "explicit block length N");
    sim_cmd->add_option("--trials", trials, "Monte Carlo trials");
    sim_cmd->add_option("--epsilon", epsilon, "delay quantile level");
    sim_cmd->add_option("--policy", policy, "start policy: immediate or wait");
    sim_cmd->add_option("--delta", delta, "delay exponent for the wait policy");
    sim_cmd->add_option("--arrival", arrival_spec, "arrival model spec");

    auto* arrival_cmd = app.add_subcommand("arrival", "effective timing uncertainty of an arrival model");
    add_common(arrival_cmd, false);
    arrival_cmd->add_option("--arrival", arrival_spec,
                            "model: uniform:b | uniform_fixed:A | geometric:q:A | spike:b | "
                            "point:t | explicit:p1,p2,... | JSON object");
    arrival_cmd->add_option("--bits", bits_list, "bit counts for the limit fit")->expected(-1);
    arrival_cmd->add_option("--epsilon", epsilon, "covering-set epsilon for the table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(args, out);
        if (capacity_cmd->parsed()) {
            return cmd_capacity(args, beta, delta, delta_opt->count() > 0, out);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(args, betas, out);
        if (sim_cmd->parsed()) {
            return cmd_simulate(args, beta, bits, rhos, block_length, trials, epsilon, policy,
                                delta, arrival_spec, out);
        }
        if (arrival_cmd->parsed()) {
            return cmd_arrival(args, arrival_spec, bits_list, epsilon, out);
        }
    } catch (const error& e) {
        err << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

} // namespace asynccpuc::cli
