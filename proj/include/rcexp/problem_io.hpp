#pragma once

#include <optional>
#include <string>
#include <variant>

#include "rcexp/channel_problem.hpp"
#include "rcexp/core.hpp"

namespace rcexp {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Optional a:b:step sweep range carried by a problem file.
struct SweepRange {
    double from;
    double to;
    double step;
};

/// A parsed problem file: either a source or a channel problem, plus any
/// default sweep ranges.
struct ProblemFile {
    std::variant<SourceProblem, ChannelProblem> problem;
    std::optional<SweepRange> rates;
    std::optional<SweepRange> thresholds;

    bool is_source() const { return std::holds_alternative<SourceProblem>(problem); }
    const SourceProblem& source() const { return std::get<SourceProblem>(problem); }
    const ChannelProblem& channel() const { return std::get<ChannelProblem>(problem); }
};

/// Parse a JSON problem document. Throws ParseError with the offending field
/// named in the message.
ProblemFile parse_problem(const std::string& json_text);
ProblemFile load_problem(const std::string& path);

}  // namespace rcexp
