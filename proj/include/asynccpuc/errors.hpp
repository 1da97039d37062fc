#ifndef ASYNCCPUC_ERRORS_HPP
#define ASYNCCPUC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace asynccpuc {

enum class errc {
    non_stochastic_row,
    negative_cost,
    missing_star_row,
    length_mismatch,
    all_costs_infinite,
    non_convergence,
    star_not_usable_or_costly,
    delta_out_of_range,
    nu_out_of_range,
    rejection_budget_exceeded,
    non_convergent_sequence,
    parse_error,
    invalid_argument,
};

/// Library error carrying a machine-checkable code alongside the message.
class error : public std::runtime_error {
  public:
    error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::non_stochastic_row: return "NonStochasticRow";
        case errc::negative_cost: return "NegativeCost";
        case errc::missing_star_row: return "MissingStarRow";
        case errc::length_mismatch: return "LengthMismatch";
        case errc::all_costs_infinite: return "AllCostsInfinite";
        case errc::non_convergence: return "NonConvergence";
        case errc::star_not_usable_or_costly: return "StarNotUsableOrCostly";
        case errc::delta_out_of_range: return "DeltaOutOfRange";
        case errc::nu_out_of_range: return "NuOutOfRange";
        case errc::rejection_budget_exceeded: return "RejectionBudgetExceeded";
        case errc::non_convergent_sequence: return "NonConvergentSequence";
        case errc::parse_error: return "ParseError";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "UnknownError";
}

} // namespace asynccpuc

#endif
