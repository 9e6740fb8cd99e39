#include "rcexp/core.hpp"

#include <algorithm>
#include <cmath>

namespace rcexp {

Distribution::Distribution(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw std::invalid_argument("Distribution: empty weight vector");
    double sum = 0.0;
    for (double w : w_) {
        if (std::isnan(w) || w < 0.0)
            throw std::invalid_argument("Distribution: negative or NaN weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("Distribution: weights sum to " + std::to_string(sum));
}

Distribution Distribution::uniform(std::size_t n) {
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t i) {
    std::vector<double> w(n, 0.0);
    w.at(i) = 1.0;
    return Distribution(std::move(w));
}

std::vector<std::size_t> Distribution::support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (in_support(i)) s.push_back(i);
    return s;
}

ConditionalDistribution::ConditionalDistribution(std::vector<Distribution> rows)
    : rows_(std::move(rows)) {
    if (rows_.empty()) throw std::invalid_argument("ConditionalDistribution: no rows");
    for (const auto& r : rows_)
        if (r.size() != rows_[0].size())
            throw std::invalid_argument("ConditionalDistribution: ragged rows");
}

DistortionSpec::DistortionSpec(std::vector<std::vector<double>> values)
    : values_(std::move(values)) {
    if (values_.empty() || values_[0].empty())
        throw std::invalid_argument("DistortionSpec: empty matrix");
    for (const auto& row : values_) {
        if (row.size() != values_[0].size())
            throw std::invalid_argument("DistortionSpec: ragged matrix");
        for (double v : row)
            if (!std::isfinite(v)) throw std::invalid_argument("DistortionSpec: non-finite entry");
    }
}

DistortionSpec::DistortionSpec(std::vector<std::vector<double>> values,
                               std::vector<std::vector<Rational>> rational_values)
    : DistortionSpec(std::move(values)) {
    if (rational_values.size() != values_.size())
        throw std::invalid_argument("DistortionSpec: rational shape mismatch");
    for (std::size_t x = 0; x < values_.size(); ++x) {
        if (rational_values[x].size() != values_[x].size())
            throw std::invalid_argument("DistortionSpec: rational shape mismatch");
        for (std::size_t xh = 0; xh < values_[x].size(); ++xh) {
            const Rational& r = rational_values[x][xh];
            if (r.den <= 0) throw std::invalid_argument("DistortionSpec: nonpositive denominator");
            if (r.to_double() != values_[x][xh])
                throw std::invalid_argument("DistortionSpec: rational does not match real entry");
        }
    }
    rational_ = std::move(rational_values);
}

const std::vector<std::vector<Rational>>& DistortionSpec::rational_values() const {
    if (!rational_) throw std::logic_error("DistortionSpec: no rational representation");
    return *rational_;
}

double DistortionSpec::max_value() const {
    double m = -kInf;
    for (const auto& row : values_)
        for (double v : row) m = std::max(m, v);
    return m;
}

double DistortionSpec::min_value() const {
    double m = kInf;
    for (const auto& row : values_)
        for (double v : row) m = std::min(m, v);
    return m;
}

double DistortionSpec::max_row_min() const {
    double m = -kInf;
    for (const auto& row : values_)
        m = std::max(m, *std::min_element(row.begin(), row.end()));
    return m;
}

SourceProblem::SourceProblem(Distribution P_, Distribution Q_, DistortionSpec d_, double D_)
    : P(std::move(P_)), Q(std::move(Q_)), d(std::move(d_)), D(D_) {
    if (P.size() != d.num_source() || Q.size() != d.num_repro())
        throw std::invalid_argument("SourceProblem: dimension mismatch");
    if (!std::isfinite(D)) throw std::invalid_argument("SourceProblem: non-finite threshold");
}

ExtReal kl_divergence(const Distribution& T, const Distribution& P) {
    if (T.size() != P.size()) throw std::invalid_argument("kl_divergence: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (!T.in_support(i)) continue;
        if (!P.in_support(i)) return ExtReal::infinity();
        sum += T[i] * std::log(T[i] / P[i]);
    }
    return ExtReal(std::max(sum, 0.0));
}

double avg_distortion(const Distribution& T, const ConditionalDistribution& W,
                      const DistortionSpec& d) {
    if (T.size() != d.num_source() || W.num_rows() != d.num_source() ||
        W.num_cols() != d.num_repro())
        throw std::invalid_argument("avg_distortion: dimension mismatch");
    double sum = 0.0;
    for (std::size_t x = 0; x < T.size(); ++x) {
        if (!T.in_support(x)) continue;
        for (std::size_t xh = 0; xh < W.num_cols(); ++xh)
            sum += T[x] * W(x, xh) * d(x, xh);
    }
    return sum;
}

double min_achievable_distortion(const Distribution& T, const Distribution& Q,
                                 const DistortionSpec& d) {
    double sum = 0.0;
    for (std::size_t x = 0; x < T.size(); ++x) {
        if (!T.in_support(x)) continue;
        double row_min = kInf;
        for (std::size_t xh = 0; xh < Q.size(); ++xh)
            if (Q.in_support(xh)) row_min = std::min(row_min, d(x, xh));
        sum += T[x] * row_min;
    }
    return sum;
}

double log_sum_exp(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (std::isinf(m) && m < 0) return -kInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace rcexp
