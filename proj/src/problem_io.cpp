#include "rcexp/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rcexp {

namespace {

using nlohmann::json;

std::vector<double> parse_vector(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_array())
        throw ParseError("problem file: missing or non-array field '" + field + "'");
    std::vector<double> v;
    for (const auto& e : j[field]) {
        if (!e.is_number()) throw ParseError("problem file: non-numeric entry in '" + field + "'");
        v.push_back(e.get<double>());
    }
    return v;
}

std::vector<std::vector<double>> parse_matrix(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_array())
        throw ParseError("problem file: missing or non-array field '" + field + "'");
    std::vector<std::vector<double>> m;
    for (const auto& row : j[field]) {
        if (!row.is_array()) throw ParseError("problem file: '" + field + "' rows must be arrays");
        std::vector<double> r;
        for (const auto& e : row) {
            if (!e.is_number())
                throw ParseError("problem file: non-numeric entry in '" + field + "'");
            r.push_back(e.get<double>());
        }
        m.push_back(std::move(r));
    }
    return m;
}

Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational{std::stoll(s), 1};
        return Rational{std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
    } catch (const std::exception&) {
        throw ParseError("problem file: bad rational '" + s + "' in 'distortion_rational'");
    }
}

Distribution parse_distribution(const json& j, const std::string& field) {
    try {
        return Distribution(parse_vector(j, field));
    } catch (const std::invalid_argument& e) {
        throw ParseError("problem file: field '" + field + "': " + e.what());
    }
}

std::optional<SweepRange> parse_range(const json& j, const std::string& field) {
    if (!j.contains(field)) return std::nullopt;
    const auto v = parse_vector(j, field);
    if (v.size() != 3 || v[2] <= 0.0)
        throw ParseError("problem file: '" + field + "' must be [from, to, step] with step > 0");
    return SweepRange{v[0], v[1], v[2]};
}

double parse_threshold(const json& j) {
    if (!j.contains("D") || !j["D"].is_number())
        throw ParseError("problem file: missing numeric field 'D'");
    return j["D"].get<double>();
}

}  // namespace

ProblemFile parse_problem(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("problem file: invalid JSON: ") + e.what());
    }
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError("problem file: missing string field 'kind'");
    const std::string kind = j["kind"].get<std::string>();

    if (kind == "source") {
        auto values = parse_matrix(j, "distortion");
        std::optional<std::vector<std::vector<Rational>>> rational;
        if (j.contains("distortion_rational")) {
            std::vector<std::vector<Rational>> r;
            for (const auto& row : j["distortion_rational"]) {
                std::vector<Rational> rr;
                for (const auto& e : row) {
                    if (!e.is_string())
                        throw ParseError(
                            "problem file: 'distortion_rational' entries must be \"num/den\" strings");
                    rr.push_back(parse_rational(e.get<std::string>()));
                }
                r.push_back(std::move(rr));
            }
            rational = std::move(r);
        }
        try {
            DistortionSpec d = rational ? DistortionSpec(std::move(values), std::move(*rational))
                                        : DistortionSpec(std::move(values));
            SourceProblem sp(parse_distribution(j, "P"), parse_distribution(j, "Q"), std::move(d),
                             parse_threshold(j));
            return ProblemFile{std::move(sp), parse_range(j, "rates"), parse_range(j, "thresholds")};
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("problem file: ") + e.what());
        }
    }
    if (kind == "channel") {
        try {
            auto rows_raw = parse_matrix(j, "channel");
            std::vector<Distribution> rows;
            for (auto& r : rows_raw) rows.emplace_back(std::move(r));
            ChannelProblem cp(parse_distribution(j, "Q"),
                              ConditionalDistribution(std::move(rows)), parse_threshold(j));
            return ProblemFile{std::move(cp), parse_range(j, "rates"), parse_range(j, "thresholds")};
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("problem file: field 'channel': ") + e.what());
        }
    }
    throw ParseError("problem file: 'kind' must be \"source\" or \"channel\"");
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("problem file: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

}  // namespace rcexp
