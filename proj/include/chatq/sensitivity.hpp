#pragma once

// Functional sensitivity profiles (γ² is the stored primitive), closed forms
// for the serial max network and chatting-message distributions.

#include "chatq/prob.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace chatq {

class SensitivityProfile {
public:
    SensitivityProfile() : SensitivityProfile(Interval{}, [](double) { return 1.0; }) {}
    SensitivityProfile(Interval support, RealFunction gamma_sq, std::vector<Interval> zero_zones = {},
                       std::vector<double> breakpoints = {});

    // γ²(x); exactly 0 on zero zones and outside the support.
    double gamma_sq(double x) const;
    double gamma(double x) const;

    Interval support() const { return support_; }
    const std::vector<Interval>& zero_zones() const { return zero_zones_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const RealFunction& function() const { return gamma_sq_; }

private:
    Interval support_;
    RealFunction gamma_sq_;
    std::vector<Interval> zero_zones_;
    std::vector<double> breakpoints_;
};

// Fills a length-N vector with one joint draw.
using JointSampler = std::function<void(std::mt19937_64&, std::span<double>)>;
// ∂g/∂x_n evaluated at a full argument vector.
using PartialDerivative = std::function<double(std::span<const double>)>;

struct MonteCarloProfile {
    std::vector<double> grid;
    std::vector<double> estimate;
    std::vector<double> std_error;

    SensitivityProfile profile(Interval support) const;
};

// E[|g_n(X)|² | X_n = x] on each grid point: coordinate n (1-based) of every
// joint draw is pinned to x. Grid point i uses substream(seed, i).
MonteCarloProfile sensitivity_monte_carlo(const PartialDerivative& g_partial, const JointSampler& sampler,
                                          int sensors, int n, std::span<const double> grid,
                                          std::size_t samples_per_point, std::uint64_t seed);

// γ²(x) = F(x)^{N-1} for the max of N iid sources with CDF F (x^{N-1} for
// the uniform source).
SensitivityProfile max_sensitivity(int N, const Pdf& source = Pdf{});

// Sensitivity of sensor n given that the max of sensors 1..n-1 lies in
// [s_l, s_u]; zero on [lo, s_l]. Throws DomainError for s_l >= s_u or n < 2.
SensitivityProfile max_conditional_sensitivity(int n, int N, double s_l, double s_u, const Pdf& source = Pdf{});

struct MessageDistribution {
    std::vector<double> probabilities;  // entry k-1 is message k

    double operator()(std::size_t k) const { return probabilities.at(k - 1); }
    std::size_t size() const { return probabilities.size(); }
};

// Distribution of the cell of max(X_1..X_{n-1}) over a partition
// t_0 < ... < t_K of the source support.
MessageDistribution serial_max_message_distribution(int n, std::span<const double> partition,
                                                    const Pdf& source = Pdf{});

// K+1 equally spaced boundaries of [0,1].
std::vector<double> uniform_partition(std::size_t cells);

} // namespace chatq
