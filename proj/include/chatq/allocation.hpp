#pragma once

// Cost allocation: minimize Σ w_i β_i 2^{-2 b_i / α_i} subject to
// Σ w_i b_i = C, b_i >= 0.

#include "chatq/distortion.hpp"
#include "chatq/network.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chatq {

struct AllocationResult {
    std::vector<double> shares;   // b_i
    std::vector<double> rates;    // b_i / α_i
    std::vector<double> weights;  // w_i (all 1 in the deterministic case)
    double objective = 0.0;       // Σ w β 2^{-2b/α}
};

double allocation_objective(std::span<const double> weights, std::span<const double> betas,
                            std::span<const double> alphas, std::span<const double> shares);

// KKT water-filling: b_i = max(0, (α_i/2) log2((β_i/α_i)/θ)) with the water
// level θ found by bisection.
AllocationResult waterfill_kkt(std::span<const double> betas, std::span<const double> alphas, double C);
AllocationResult waterfill_kkt(std::span<const double> weights, std::span<const double> betas,
                               std::span<const double> alphas, double C);

// Interior closed form with α̃ = Σ w_i α_i. nullopt when some share is not
// strictly positive, in which case the caller falls back to water-filling.
std::optional<AllocationResult> closed_form_allocation(std::span<const double> betas,
                                                       std::span<const double> alphas, double C);
std::optional<AllocationResult> closed_form_allocation(std::span<const double> weights,
                                                       std::span<const double> betas,
                                                       std::span<const double> alphas, double C);

// Message-dependent allocation. Tables are indexed [sensor][message]; the
// constraint is on the expected cost Σ_n Σ_m P_n(m) b_n(m) = C.
struct ProbabilisticAllocation {
    std::vector<std::vector<double>> shares;
    std::vector<std::vector<double>> rates;
    double objective = 0.0;
    bool interior = true;  // false when the water-filling fallback was used
};

ProbabilisticAllocation probabilistic_allocation(const std::vector<std::vector<double>>& betas,
                                                 const std::vector<std::vector<double>>& alphas,
                                                 const std::vector<std::vector<double>>& message_probs, double C);

// One row of a network allocation report. message is -1 for a
// message-independent (fixed-rate) link.
struct LinkAllocation {
    int sensor;
    long message;
    double probability;
    double alpha;
    double share;
    double rate;
};

struct NetworkAllocation {
    Regime regime = Regime::fixed_rate;
    double chat_cost = 0.0;      // Σ α_c R_c over chatting links
    double fusion_budget = 0.0;  // C' = C - chat_cost
    std::vector<LinkAllocation> links;
    // Fixed-rate: one rate per sensor. Entropy-constrained: per sensor, per
    // message.
    std::vector<double> sensor_rates;
    std::vector<std::vector<double>> message_rates;
    double predicted = 0.0;  // asymptotic objective at the allocated shares

    // Rows "link,message,alpha,b,rate".
    std::string to_csv() const;
};

// Allocates C' = budget - chat cost across the fusion links of `spec`.
// Fixed-rate uses β_n = (1/12) Σ_k P(k) E[γ²/λ²]; entropy-constrained uses one
// entry per (sensor, message) with the indicator cost and rate
// amplification folded into β and α. Throws InfeasibleError when C' < 0.
NetworkAllocation allocate_network(const ChatNetworkSpec& spec, const std::vector<SensorDesigns>& designs,
                                   double budget);
NetworkAllocation allocate_network(const ChatNetworkSpec& spec);

struct ChatSearchCandidate {
    double chat_rate;
    bool feasible;
    double predicted;  // +inf when infeasible
};

struct ChatSearchResult {
    double chat_rate = 0.0;
    ChatNetworkSpec spec;
    NetworkAllocation allocation;
    std::vector<ChatSearchCandidate> candidates;
};

// Spec with every chatting edge switched to a uniform partition of 2^{R_c}
// cells. R_c must be a nonnegative integer.
ChatNetworkSpec with_chat_rate(const ChatNetworkSpec& spec, double chat_rate);

// Brute-force search over chatting rates: each candidate pays its chatting
// cost, the rest goes to the fusion links. Throws InfeasibleError when no
// candidate leaves a positive budget.
ChatSearchResult chat_budget_search(const ChatNetworkSpec& spec, double C, std::span<const double> rc_grid);

// Integer codebook sizes for fixed-rate operation: round 2^{R_n} to the
// nearest integer (at least min_sizes[n]), then decrement the sensor whose
// decrement costs least, by `distortion(n, K)`, until Σ α_n log2 K_n <= C'.
std::vector<std::size_t> round_codebook_sizes(std::span<const double> rates, std::span<const double> alphas,
                                              double budget, std::span<const std::size_t> min_sizes,
                                              const std::function<double(std::size_t, std::size_t)>& distortion);

} // namespace chatq
