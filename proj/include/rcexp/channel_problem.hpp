#pragma once

#include "rcexp/core.hpp"

namespace rcexp {

/// Input law Q over X, strictly positive channel P(y|x), LLR threshold D (nats).
struct ChannelProblem {
    Distribution Q;
    ConditionalDistribution channel;  // P(y|x)
    double D;

    ChannelProblem(Distribution Q_, ConditionalDistribution channel_, double D_)
        : Q(std::move(Q_)), channel(std::move(channel_)), D(D_) {
        if (Q.size() != channel.num_rows())
            throw std::invalid_argument("ChannelProblem: dimension mismatch");
        for (std::size_t x = 0; x < channel.num_rows(); ++x)
            for (std::size_t y = 0; y < channel.num_cols(); ++y)
                if (channel(x, y) <= 0.0)
                    throw std::invalid_argument("ChannelProblem: nonpositive channel entry");
    }

    std::size_t num_inputs() const { return Q.size(); }
    std::size_t num_outputs() const { return channel.num_cols(); }

    ChannelProblem with_threshold(double D_) const { return ChannelProblem(Q, channel, D_); }
};

/// Binary symmetric channel with crossover p.
inline ChannelProblem make_bsc(double p, Distribution Q, double D) {
    std::vector<Distribution> rows{Distribution({1.0 - p, p}), Distribution({p, 1.0 - p})};
    return ChannelProblem(std::move(Q), ConditionalDistribution(std::move(rows)), D);
}

}  // namespace rcexp
