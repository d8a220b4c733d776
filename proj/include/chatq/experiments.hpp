#pragma once

// Designed networks end to end, plus the sweep and scenario studies.

#include "chatq/allocation.hpp"
#include "chatq/chatnet.hpp"
#include "chatq/csv.hpp"
#include "chatq/distortion.hpp"
#include "chatq/simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chatq {

// A spec with its designs, allocation and real quantizer banks.
struct NetworkDesign {
    ChatNetworkSpec spec;
    std::vector<SensorDesigns> designs;
    NetworkAllocation allocation;
    std::vector<std::vector<std::size_t>> codebook_sizes;  // [sensor][message]
    std::vector<QuantizerBank> banks;
    // Finite-codebook prediction for the banks: fixed-rate uses the integer
    // K_n and (K_n - L)²; entropy-constrained evaluates the allocated rates.
    double predicted = 0.0;
};

// Fixed-rate codebooks are rounded to integers within the fusion budget.
// Without `build_banks` only the codebook sizes and prediction are filled.
NetworkDesign design_network(const ChatNetworkSpec& spec, CodewordPlacement placement = CodewordPlacement::midpoint,
                             bool build_banks = true);

SimulationResult simulate_network(const NetworkDesign& design, const SimulationOptions& options);

struct RateSweep {
    int sensors = 4;
    double budget_per_sensor = 4.0;
    double chat_cost = 0.01;
    Regime regime = Regime::fixed_rate;
    std::vector<double> chat_rates{0, 1, 2, 3};
    std::size_t trials = 0;  // 0: no simulation
    std::uint64_t seed = 1;
    unsigned workers = 1;
    Decoder decoder = Decoder::plug_in;
};

// Rows: N, alpha_c, R_c, chat_cost, fusion_budget, feasible, predicted
// (asymptotic allocation objective), finite_prediction, empirical, std_error,
// best (1 on the search minimizer).
Table sweep_chatting_rate(const RateSweep& sweep);

struct PartitionSweep {
    std::vector<int> sensors{2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> boundaries;  // p1 values; default 0.01 ... 0.99
    double budget_per_sensor = 4.0;
    Regime regime = Regime::fixed_rate;
};

// Rows: N, p1, predicted, nochat, ratio (predicted / nochat), improvement
// (nochat / predicted). Chatting is free with one bit per link.
Table sweep_partition(const PartitionSweep& sweep);

// Asymptotic distortion of the free one-bit serial max network with
// boundary p1 and optimal allocation.
double partition_distortion(int N, double budget, double p1, Regime regime);

struct ScenarioParams {
    int sensors = 5;
    double budget = 25.0;
    Regime regime = Regime::fixed_rate;
    double grid_step = 0.01;
};

// Rows: regime, scenario (0 = no chatting), description, p1, distortion,
// improvement (nochat / distortion).
Table run_scenarios(const ScenarioParams& params);

// Rows: regime, sensor, message, probability, b, rate for both regimes.
Table allocation_report(int N, double C, double chat_rate, double chat_cost);

// Writes fig3.csv, fig5a-d.csv, fig6a-b.csv and fig7.csv into `dir`.
// trials > 0 adds simulated points to the fixed-rate chatting sweeps.
std::vector<std::string> write_figure_tables(const std::string& dir, std::size_t trials, std::uint64_t seed,
                                             unsigned workers);

} // namespace chatq
