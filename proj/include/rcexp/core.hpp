#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcexp {

/// Probabilities below this are treated as exact zeros when forming supports.
inline constexpr double kSupportEps = 1e-15;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Nonnegative extended real: a finite value or +inf. Never NaN.
/// +inf absorbs addition; min/max are the usual ones on [0, +inf].
class ExtReal {
public:
    ExtReal() : v_(0.0) {}
    ExtReal(double v) : v_(v) {
        if (std::isnan(v)) throw std::invalid_argument("ExtReal: NaN");
        if (v < 0.0) throw std::invalid_argument("ExtReal: negative value");
    }
    static ExtReal infinity() { return ExtReal(kInf); }

    bool is_inf() const { return std::isinf(v_); }
    bool is_finite() const { return !is_inf(); }
    double value() const { return v_; }

    friend ExtReal operator+(ExtReal a, ExtReal b) { return ExtReal(a.v_ + b.v_); }
    friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
    friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
    friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
    friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }
    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

    friend ExtReal min(ExtReal a, ExtReal b) { return a.v_ < b.v_ ? a : b; }
    friend ExtReal max(ExtReal a, ExtReal b) { return a.v_ > b.v_ ? a : b; }

private:
    double v_;
};

/// Probability vector on a finite alphabet.
class Distribution {
public:
    explicit Distribution(std::vector<double> weights);
    static Distribution uniform(std::size_t n);
    static Distribution point_mass(std::size_t n, std::size_t i);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& weights() const { return w_; }
    bool in_support(std::size_t i) const { return w_[i] > kSupportEps; }
    std::vector<std::size_t> support() const;

private:
    std::vector<double> w_;
};

/// One Distribution per conditioning symbol.
class ConditionalDistribution {
public:
    explicit ConditionalDistribution(std::vector<Distribution> rows);

    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_cols() const { return rows_.empty() ? 0 : rows_[0].size(); }
    const Distribution& row(std::size_t x) const { return rows_[x]; }
    double operator()(std::size_t x, std::size_t y) const { return rows_[x][y]; }

private:
    std::vector<Distribution> rows_;
};

/// Exact rational, used by the finite-n distortion DP.
struct Rational {
    long long num = 0;
    long long den = 1;
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// |X| x |Xhat| additive per-symbol distortion matrix, arbitrary sign.
/// An optional exact rational mirror enables the integer-scaled DP oracle.
class DistortionSpec {
public:
    explicit DistortionSpec(std::vector<std::vector<double>> values);
    DistortionSpec(std::vector<std::vector<double>> values,
                   std::vector<std::vector<Rational>> rational_values);

    std::size_t num_source() const { return values_.size(); }
    std::size_t num_repro() const { return values_.empty() ? 0 : values_[0].size(); }
    double operator()(std::size_t x, std::size_t xh) const { return values_[x][xh]; }
    const std::vector<std::vector<double>>& values() const { return values_; }

    bool has_rational() const { return rational_.has_value(); }
    const std::vector<std::vector<Rational>>& rational_values() const;

    double max_value() const;
    double min_value() const;
    /// max over x of min over xhat (full reproduction alphabet).
    double max_row_min() const;

private:
    std::vector<std::vector<double>> values_;
    std::optional<std::vector<std::vector<Rational>>> rational_;
};

/// Source P over X, codebook Q over Xhat, distortion d, threshold D.
struct SourceProblem {
    Distribution P;
    Distribution Q;
    DistortionSpec d;
    double D;

    SourceProblem(Distribution P_, Distribution Q_, DistortionSpec d_, double D_);
    SourceProblem with_threshold(double D_) const { return SourceProblem(P, Q, d, D_); }
};

/// KL divergence sum T ln(T/P) in nats, with 0 ln 0 = 0.
/// +inf iff T puts mass outside supp(P).
ExtReal kl_divergence(const Distribution& T, const Distribution& P);

/// d(T o W) = sum_{x,xh} T(x) W(xh|x) d(x,xh).
double avg_distortion(const Distribution& T, const ConditionalDistribution& W,
                      const DistortionSpec& d);

/// sum_x T(x) min_{xh in supp(Q)} d(x,xh); the distortion constraint set is
/// empty iff this exceeds D.
double min_achievable_distortion(const Distribution& T, const Distribution& Q,
                                 const DistortionSpec& d);

/// Stable log(sum exp(v_i)) with max shift; -inf for an empty span.
double log_sum_exp(const std::vector<double>& v);

}  // namespace rcexp
