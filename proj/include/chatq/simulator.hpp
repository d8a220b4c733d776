#pragma once

// Monte Carlo engine for chatting networks computing the max.

#include "chatq/chatnet.hpp"
#include "chatq/network.hpp"
#include "chatq/prob.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace chatq {

enum class Decoder { plug_in, conditional_expectation };
std::string to_string(Decoder d);

struct SimulationOptions {
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    Decoder decoder = Decoder::conditional_expectation;
    unsigned workers = 1;
    bool keep_trace = false;  // store every trial's estimate
};

struct SimulationResult {
    std::size_t trials = 0;
    Decoder decoder = Decoder::conditional_expectation;
    double fmse = 0.0;  // for the selected decoder
    double std_error = 0.0;
    double fmse_plug_in = 0.0;
    double std_error_plug_in = 0.0;
    double fmse_conditional = 0.0;
    double std_error_conditional = 0.0;
    // Per-sensor rate in bits: fixed-rate log2 K averaged over messages;
    // entropy-constrained Σ_m P(m) (H_B(P(A)) + P(A) H(index | A)).
    std::vector<double> rates;
    std::vector<std::vector<double>> message_rates;      // [sensor][message]
    std::vector<std::vector<double>> message_frequency;  // [sensor][message]
    std::size_t replay_mismatches = 0;
    double predicted_fmse = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> trace;
};

// Trials are split into blocks of 4096; block b draws from substream(seed,
// b) and block sums are reduced in block order, so the result does not
// depend on the worker count.
SimulationResult run_simulation(const ChatNetworkSpec& spec, const std::vector<QuantizerBank>& banks,
                                const SimulationOptions& options);

// E[max X_n | X_n in cells[n]] for independent sources; piecewise
// Gauss-Legendre on the product of conditional CDFs (exact for uniform
// sources up to 19 sensors).
double expected_max(std::span<const Interval> cells, const Pdf& pdf);

double decode(Decoder decoder, std::span<const Interval> cells, std::span<const double> codewords, const Pdf& pdf);

// E[g(X) | X_n in cells[n]] by nested adaptive quadrature; N <= 3.
double conditional_expectation_numeric(const std::function<double(std::span<const double>)>& g,
                                       std::span<const Interval> cells, const Pdf& pdf);

// Measured entropy-coded rates per sensor and incoming message.
std::vector<std::vector<double>> measure_entropy_rate(const ChatNetworkSpec& spec,
                                                      const std::vector<QuantizerBank>& banks, std::size_t trials,
                                                      std::uint64_t seed = 1);

} // namespace chatq
