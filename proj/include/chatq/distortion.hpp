#pragma once

// High-resolution distortion predictions and optimal point densities.

#include "chatq/network.hpp"
#include "chatq/prob.hpp"
#include "chatq/quantizer.hpp"
#include "chatq/sensitivity.hpp"

#include <span>
#include <string>
#include <vector>

namespace chatq {

// Design data for sensor `sensor` after receiving chatting message
// `message` (both 1-based; message 1 when nothing is received).
struct ConditionalDesign {
    int sensor = 1;
    std::size_t message = 1;
    double probability = 1.0;
    SensitivityProfile sensitivity;
    std::vector<Interval> dont_care;
    PointDensity density;
};

// Per-sensor list of conditional designs, indexed by message - 1.
using SensorDesigns = std::vector<ConditionalDesign>;

struct DistortionTerm {
    int sensor;
    long message;  // -1 for an aggregated row
    double value;
};

struct DistortionReport {
    Regime regime = Regime::fixed_rate;
    std::vector<double> per_sensor;
    std::vector<DistortionTerm> terms;
    double total = 0.0;

    // Rows "sensor,message,value": per-message terms, then per-sensor totals
    // with message -1.
    std::string to_csv() const;
};

// (1/(12K²)) E[λ^{-2}(X)]. Throws InvalidProfileError when λ vanishes where
// the source has mass.
double hr_mse(double K, const PointDensity& lambda, const Pdf& pdf);

// λ ∝ (γ² f)^{1/3}, zero on the zero zones of γ².
PointDensity optimal_density_fixed_rate(const SensitivityProfile& gamma_sq, const Pdf& pdf);
// λ ∝ γ, zero on the zero zones of γ².
PointDensity optimal_density_entropy(const SensitivityProfile& gamma_sq);

// E[γ²(X)/λ²(X)] under the source, over the granular region of λ.
double sensitivity_ratio_moment(const SensitivityProfile& gamma_sq, const PointDensity& lambda, const Pdf& pdf);

// Quantities entering the entropy-constrained term of one conditional
// design, all conditional on A (X outside the don't-care region).
struct EntropyConstants {
    double p_a = 1.0;           // P(A)
    double h_a = 0.0;           // h(X | A), bits
    double log_lambda = 0.0;    // E[log2 λ(X) | A]
    double ratio = 1.0;         // E[γ²/λ² | A]
    double indicator = 0.0;     // H_B(P(A))

    // Term at total rate R (indicator bits included). Throws
    // InfeasibleError if R < H_B(P(A)).
    double term(double R) const;
    // Coefficient β with term(R) = β 2^{-2R/P(A)}.
    double beta() const;
};

EntropyConstants entropy_constants(const ConditionalDesign& design, const Pdf& pdf);

// Fixed-rate chatting distortion with codebook sizes K_n = 2^{R_n}:
// Σ_n Σ_m P(m) E[γ²/λ²] / (12 (K_n - L_n(m))²).
DistortionReport hr_fmse_fixed_rate_chat(const Pdf& pdf, const std::vector<SensorDesigns>& designs,
                                         std::span<const double> rates);

// Entropy-constrained chatting distortion; rates[n][m] is the total rate of
// sensor n+1 after message m+1.
DistortionReport hr_fmse_entropy_chat(const Pdf& pdf, const std::vector<SensorDesigns>& designs,
                                      const std::vector<std::vector<double>>& rates);

// No-chat max network of N uniform sources with unit costs and equal rates.
double closed_form_max_nochat(int N, double C, Regime regime);

// Regime-appropriate designs for every message sensor n can receive.
SensorDesigns conditional_designs(const ChatNetworkSpec& spec, int n);
std::vector<SensorDesigns> network_designs(const ChatNetworkSpec& spec);

// (1/12) Σ_k P(M = k) E[γ²_{n|k}/λ²_{n|k}]; with optimal densities this is
// the message-weighted ‖γ² f‖_{1/3}.
double beta_fixed_rate(const SensorDesigns& designs, const Pdf& pdf);
double beta_fixed_rate(int n, const ChatNetworkSpec& spec);

} // namespace chatq
