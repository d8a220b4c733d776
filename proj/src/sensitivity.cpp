#include "chatq/sensitivity.hpp"

#include "chatq/errors.hpp"

#include <algorithm>
#include <cmath>

namespace chatq {

SensitivityProfile::SensitivityProfile(Interval support, RealFunction gamma_sq, std::vector<Interval> zero_zones,
                                       std::vector<double> breakpoints)
    : support_(support), gamma_sq_(std::move(gamma_sq)), zero_zones_(std::move(zero_zones)) {
    std::sort(zero_zones_.begin(), zero_zones_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    breakpoints_ = {support_.lo, support_.hi};
    for (const auto& z : zero_zones_) {
        breakpoints_.push_back(z.lo);
        breakpoints_.push_back(z.hi);
    }
    for (double b : breakpoints) {
        if (b > support_.lo && b < support_.hi) {
            breakpoints_.push_back(b);
        }
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

double SensitivityProfile::gamma_sq(double x) const {
    if (x < support_.lo || x > support_.hi) {
        return 0.0;
    }
    for (const auto& z : zero_zones_) {
        if (x >= z.lo && x < z.hi) {
            return 0.0;
        }
    }
    return std::max(0.0, gamma_sq_(x));
}

double SensitivityProfile::gamma(double x) const { return std::sqrt(gamma_sq(x)); }

SensitivityProfile MonteCarloProfile::profile(Interval support) const {
    GriddedFunction g(grid, estimate);
    return SensitivityProfile(support, [g](double x) { return g(x); });
}

MonteCarloProfile sensitivity_monte_carlo(const PartialDerivative& g_partial, const JointSampler& sampler,
                                          int sensors, int n, std::span<const double> grid,
                                          std::size_t samples_per_point, std::uint64_t seed) {
    if (n < 1 || n > sensors) {
        throw DomainError("sensor index out of range");
    }
    if (samples_per_point < 2) {
        throw DomainError("need at least two samples per grid point");
    }
    MonteCarloProfile out;
    out.grid.assign(grid.begin(), grid.end());
    out.estimate.resize(grid.size());
    out.std_error.resize(grid.size());
    std::vector<double> v(static_cast<std::size_t>(sensors));
    const double S = static_cast<double>(samples_per_point);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto rng = substream(seed, i);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t s = 0; s < samples_per_point; ++s) {
            sampler(rng, v);
            v[static_cast<std::size_t>(n - 1)] = grid[i];
            const double d = g_partial(v);
            const double d2 = d * d;
            sum += d2;
            sum_sq += d2 * d2;
        }
        const double mean = sum / S;
        const double var = std::max(0.0, (sum_sq - S * mean * mean) / (S - 1.0));
        out.estimate[i] = mean;
        out.std_error[i] = std::sqrt(var / S);
    }
    return out;
}

SensitivityProfile max_sensitivity(int N, const Pdf& source) {
    if (N < 1) {
        throw DomainError("max network needs N >= 1");
    }
    const double e = static_cast<double>(N - 1);
    if (source.is_uniform() && source.support() == Interval{0.0, 1.0}) {
        return SensitivityProfile({0.0, 1.0}, [e](double x) { return e == 0.0 ? 1.0 : std::pow(x, e); });
    }
    return SensitivityProfile(source.support(), [e, source](double x) {
        return e == 0.0 ? 1.0 : std::pow(source.cdf(x), e);
    }, {}, source.breakpoints());
}

SensitivityProfile max_conditional_sensitivity(int n, int N, double s_l, double s_u, const Pdf& source) {
    if (n < 2 || n > N) {
        throw DomainError("conditional max sensitivity needs 2 <= n <= N");
    }
    const Interval support = source.support();
    if (!(s_l < s_u) || s_l < support.lo || s_u > support.hi) {
        throw DomainError("conditional max sensitivity needs lo <= s_l < s_u <= hi");
    }
    const double a = static_cast<double>(n - 1);
    const double b = static_cast<double>(N - n);
    const double Fl = std::pow(source.cdf(s_l), a);
    const double Fu = std::pow(source.cdf(s_u), a);
    if (!(Fu > Fl)) {
        throw DomainError("zero-probability chatting message");
    }
    auto gamma_sq = [=](double x) {
        if (x < s_l) {
            return 0.0;
        }
        const double F = source.cdf(x);
        const double tail = b == 0.0 ? 1.0 : std::pow(F, b);
        if (x >= s_u) {
            return tail;
        }
        return (std::pow(F, a) - Fl) / (Fu - Fl) * tail;
    };
    std::vector<Interval> zones;
    if (s_l > support.lo) {
        zones.push_back({support.lo, s_l});
    }
    auto bp = source.breakpoints();
    bp.push_back(s_u);
    return SensitivityProfile(support, gamma_sq, std::move(zones), std::move(bp));
}

MessageDistribution serial_max_message_distribution(int n, std::span<const double> partition, const Pdf& source) {
    if (n < 2) {
        throw DomainError("message distribution needs n >= 2");
    }
    if (partition.size() < 2) {
        throw DomainError("partition needs at least one cell");
    }
    const double a = static_cast<double>(n - 1);
    MessageDistribution out;
    out.probabilities.resize(partition.size() - 1);
    double prev = std::pow(source.cdf(partition.front()), a);
    for (std::size_t k = 1; k < partition.size(); ++k) {
        if (!(partition[k] > partition[k - 1])) {
            throw DomainError("partition boundaries must be strictly increasing");
        }
        const double next = k + 1 == partition.size() ? 1.0 : std::pow(source.cdf(partition[k]), a);
        out.probabilities[k - 1] = next - prev;
        prev = next;
    }
    return out;
}

std::vector<double> uniform_partition(std::size_t cells) {
    if (cells < 1) {
        throw DomainError("partition needs at least one cell");
    }
    std::vector<double> t(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
        t[k] = static_cast<double>(k) / static_cast<double>(cells);
    }
    return t;
}

} // namespace chatq
