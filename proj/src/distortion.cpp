#include "chatq/distortion.hpp"

#include "chatq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace chatq {

namespace {

constexpr QuadratureTolerance kTight{1e-13, 1e-10};

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

} // namespace

std::string DistortionReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "sensor,message,value\n";
    for (const auto& t : terms) {
        out << t.sensor << ',' << t.message << ',' << t.value << '\n';
    }
    for (std::size_t n = 0; n < per_sensor.size(); ++n) {
        out << n + 1 << ",-1," << per_sensor[n] << '\n';
    }
    return out.str();
}

double hr_mse(double K, const PointDensity& lambda, const Pdf& pdf) {
    if (!(K > 0.0)) {
        throw DomainError("codebook size must be positive");
    }
    const auto bp = merged(lambda.breakpoints(), pdf.breakpoints());
    const double moment = integrate(
        [&](double x) {
            const double f = pdf.density(x);
            if (f <= 0.0) {
                return 0.0;
            }
            const double l = lambda(x);
            if (l <= 0.0) {
                throw InvalidProfileError("point density vanishes where the source has mass");
            }
            return f / (l * l);
        },
        pdf.support(), bp, kTight);
    return moment / (12.0 * K * K);
}

PointDensity optimal_density_fixed_rate(const SensitivityProfile& gamma_sq, const Pdf& pdf) {
    return PointDensity(
        gamma_sq.support(), [gamma_sq, pdf](double x) { return std::cbrt(gamma_sq.gamma_sq(x) * pdf.density(x)); },
        gamma_sq.zero_zones(), merged(gamma_sq.breakpoints(), pdf.breakpoints()));
}

PointDensity optimal_density_entropy(const SensitivityProfile& gamma_sq) {
    return PointDensity(
        gamma_sq.support(), [gamma_sq](double x) { return gamma_sq.gamma(x); }, gamma_sq.zero_zones(),
        gamma_sq.breakpoints());
}

double sensitivity_ratio_moment(const SensitivityProfile& gamma_sq, const PointDensity& lambda, const Pdf& pdf) {
    const auto bp = merged(merged(lambda.breakpoints(), gamma_sq.breakpoints()), pdf.breakpoints());
    return integrate(
        [&](double x) {
            const double g = gamma_sq.gamma_sq(x) * pdf.density(x);
            if (g <= 0.0) {
                return 0.0;
            }
            const double l = lambda(x);
            if (l <= 0.0) {
                throw InvalidProfileError("point density vanishes where the sensitivity is positive");
            }
            return g / (l * l);
        },
        lambda.support(), bp, kTight);
}

double EntropyConstants::term(double R) const {
    if (R < indicator - 1e-12) {
        throw InfeasibleError("rate " + std::to_string(R) + " is below the indicator cost " +
                              std::to_string(indicator));
    }
    return p_a / 12.0 * std::exp2(2.0 * h_a + 2.0 * log_lambda) * ratio * std::exp2(-2.0 * (R - indicator) / p_a);
}

double EntropyConstants::beta() const {
    return p_a / 12.0 * std::exp2(2.0 * h_a + 2.0 * log_lambda) * ratio * std::exp2(2.0 * indicator / p_a);
}

EntropyConstants entropy_constants(const ConditionalDesign& design, const Pdf& pdf) {
    const auto parts = design.density.granular_components();
    const auto bp = merged(merged(design.density.breakpoints(), design.sensitivity.breakpoints()), pdf.breakpoints());
    EntropyConstants c;
    c.p_a = 0.0;
    for (const auto& part : parts) {
        c.p_a += pdf.mass(part);
    }
    if (!(c.p_a > 0.0)) {
        throw InfeasibleError("source has no mass outside the don't-care region");
    }
    const double P = c.p_a;
    double h = 0.0;
    double log_lambda = 0.0;
    double ratio = 0.0;
    for (const auto& part : parts) {
        h += integrate(
            [&](double x) {
                const double f = pdf.density(x) / P;
                return f > 0.0 ? -f * std::log2(f) : 0.0;
            },
            part, bp, kTight);
        log_lambda += integrate(
            [&](double x) {
                const double f = pdf.density(x) / P;
                const double l = design.density(x);
                return f > 0.0 && l > 0.0 ? f * std::log2(l) : 0.0;
            },
            part, bp, kTight);
        ratio += integrate(
            [&](double x) {
                const double g = design.sensitivity.gamma_sq(x) * pdf.density(x) / P;
                if (g <= 0.0) {
                    return 0.0;
                }
                const double l = design.density(x);
                if (l <= 0.0) {
                    throw InvalidProfileError("point density vanishes where the sensitivity is positive");
                }
                return g / (l * l);
            },
            part, bp, kTight);
    }
    c.h_a = h;
    c.log_lambda = log_lambda;
    c.ratio = ratio;
    c.indicator = binary_entropy(std::min(1.0, P));
    return c;
}

DistortionReport hr_fmse_fixed_rate_chat(const Pdf& pdf, const std::vector<SensorDesigns>& designs,
                                         std::span<const double> rates) {
    if (rates.size() != designs.size()) {
        throw ConfigError("one rate per sensor required");
    }
    DistortionReport report;
    report.regime = Regime::fixed_rate;
    report.per_sensor.assign(designs.size(), 0.0);
    for (std::size_t n = 0; n < designs.size(); ++n) {
        const double K = std::exp2(rates[n]);
        for (const auto& d : designs[n]) {
            const double L = static_cast<double>(d.dont_care.size());
            if (K - L < 1.0 - 1e-9) {
                throw InfeasibleError("sensor " + std::to_string(n + 1) + ": 2^R <= L for message " +
                                      std::to_string(d.message));
            }
            const double granular = K - L;
            const double value =
                d.probability * sensitivity_ratio_moment(d.sensitivity, d.density, pdf) / (12.0 * granular * granular);
            report.terms.push_back({d.sensor, static_cast<long>(d.message), value});
            report.per_sensor[n] += value;
        }
        report.total += report.per_sensor[n];
    }
    return report;
}

DistortionReport hr_fmse_entropy_chat(const Pdf& pdf, const std::vector<SensorDesigns>& designs,
                                      const std::vector<std::vector<double>>& rates) {
    if (rates.size() != designs.size()) {
        throw ConfigError("one rate table per sensor required");
    }
    DistortionReport report;
    report.regime = Regime::entropy_constrained;
    report.per_sensor.assign(designs.size(), 0.0);
    for (std::size_t n = 0; n < designs.size(); ++n) {
        if (rates[n].size() != designs[n].size()) {
            throw ConfigError("one rate per message required for sensor " + std::to_string(n + 1));
        }
        for (std::size_t m = 0; m < designs[n].size(); ++m) {
            const auto& d = designs[n][m];
            const double value = d.probability * entropy_constants(d, pdf).term(rates[n][m]);
            report.terms.push_back({d.sensor, static_cast<long>(d.message), value});
            report.per_sensor[n] += value;
        }
        report.total += report.per_sensor[n];
    }
    return report;
}

double closed_form_max_nochat(int N, double C, Regime regime) {
    if (N < 1 || C < 0.0) {
        throw DomainError("closed form needs N >= 1 and C >= 0");
    }
    const double n = static_cast<double>(N);
    const double constant =
        regime == Regime::fixed_rate ? std::pow(3.0 / (n + 2.0), 3.0) : std::exp(-n + 1.0);
    return n / 12.0 * constant * std::exp2(-2.0 * C / n);
}

SensorDesigns conditional_designs(const ChatNetworkSpec& spec, int n) {
    if (spec.computation != Computation::max) {
        throw ConfigError("only the max computation has conditional designs");
    }
    const int N = spec.sensors;
    auto density = [&](const SensitivityProfile& s) {
        return spec.regime == Regime::fixed_rate ? optimal_density_fixed_rate(s, spec.source)
                                                 : optimal_density_entropy(s);
    };
    const auto in = spec.incoming(n);
    SensorDesigns out;
    if (!in || spec.graph.edges[*in].cells() == 1) {
        auto s = max_sensitivity(N, spec.source);
        out.push_back({n, 1, 1.0, s, {}, density(s)});
        return out;
    }
    const auto& t = spec.graph.edges[*in].partition;
    const auto probs = serial_max_message_distribution(n, t, spec.source);
    for (std::size_t k = 1; k < t.size(); ++k) {
        auto s = max_conditional_sensitivity(n, N, t[k - 1], t[k], spec.source);
        out.push_back({n, k, probs(k), s, s.zero_zones(), density(s)});
    }
    return out;
}

std::vector<SensorDesigns> network_designs(const ChatNetworkSpec& spec) {
    std::vector<SensorDesigns> all;
    for (int n = 1; n <= spec.sensors; ++n) {
        all.push_back(conditional_designs(spec, n));
    }
    return all;
}

double beta_fixed_rate(const SensorDesigns& designs, const Pdf& pdf) {
    double beta = 0.0;
    for (const auto& d : designs) {
        beta += d.probability * sensitivity_ratio_moment(d.sensitivity, d.density, pdf);
    }
    return beta / 12.0;
}

double beta_fixed_rate(int n, const ChatNetworkSpec& spec) {
    ChatNetworkSpec fr = spec;
    fr.regime = Regime::fixed_rate;
    return beta_fixed_rate(conditional_designs(fr, n), spec.source);
}

} // namespace chatq
