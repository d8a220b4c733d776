#pragma once

// Companding scalar quantizers built from point densities.

#include "chatq/prob.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace chatq {

// Normalized nonnegative point density λ on a bounded support. The density
// is forced to zero on the zero zones; the remaining set is split into
// granular components where codewords are placed.
class PointDensity {
public:
    PointDensity() : PointDensity(Interval{}, [](double) { return 1.0; }) {}
    PointDensity(Interval support, RealFunction density, std::vector<Interval> zero_zones = {},
                 std::vector<double> breakpoints = {});

    static PointDensity uniform(Interval support = {});

    double operator()(double x) const;

    Interval support() const { return support_; }
    const std::vector<Interval>& zero_zones() const { return zero_zones_; }
    // Support minus zero zones, in increasing order.
    std::vector<Interval> granular_components() const;
    // Support ends, zero-zone edges and user breakpoints, sorted.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

private:
    Interval support_;
    RealFunction raw_;
    std::vector<Interval> zero_zones_;
    std::vector<double> breakpoints_;
    double scale_ = 1.0;
};

// c(x) = ∫ λ from the left support end. Tabulated on a fine grid with exact
// per-panel integrals; values inside a panel are integrated on demand.
class Compressor {
public:
    explicit Compressor(const PointDensity& lambda, std::size_t nodes = 4096);

    double operator()(double x) const;
    // Smallest x with c(x) = u (left end of a flat stretch).
    double inverse(double u) const;
    Interval support() const { return {nodes_.front(), nodes_.back()}; }

private:
    PointDensity lambda_;
    std::vector<double> nodes_;
    std::vector<double> cumulative_;
    double total_ = 1.0;

    double partial(std::size_t panel, double x) const;
};

Compressor compressor_from_density(const PointDensity& lambda);

enum class CodewordPlacement { midpoint, literal };

// Regular scalar quantizer. Cells are 0-based and left-open, right-closed:
// cell k is (p_k, p_{k+1}], except that the first cell also takes p_0 and
// inputs outside the support clamp to the end cells.
class Quantizer {
public:
    Quantizer() = default;
    Quantizer(std::vector<double> boundaries, std::vector<double> codewords,
              std::vector<std::size_t> dont_care = {});

    std::size_t size() const { return codewords_.size(); }
    std::size_t quantize(double x) const;
    double codeword(std::size_t k) const { return codewords_[k]; }
    Interval cell(std::size_t k) const { return {boundaries_[k], boundaries_[k + 1]}; }
    bool is_dont_care(std::size_t k) const;

    const std::vector<double>& boundaries() const { return boundaries_; }
    const std::vector<double>& codewords() const { return codewords_; }
    const std::vector<std::size_t>& dont_care_indices() const { return dont_care_; }

    // Three lines: boundaries, codewords, don't-care indices (17 digits).
    std::string serialize() const;
    static Quantizer parse(const std::string& text);

private:
    std::vector<double> boundaries_;
    std::vector<double> codewords_;
    std::vector<std::size_t> dont_care_;
};

// K cells: one per don't-care interval (codeword at its midpoint) and K - L
// granular cells from the compressor of λ. Granular cells are shared among
// the granular components by largest remainder of their λ mass, at least
// one each. Throws InfeasibleError when K <= L or there are fewer granular
// cells than components.
Quantizer build_fixed_rate_quantizer(const PointDensity& lambda, std::size_t K,
                                     const std::vector<Interval>& dont_care = {},
                                     CodewordPlacement placement = CodewordPlacement::midpoint);

Quantizer refine_codewords_conditional_mean(const Quantizer& q, const Pdf& pdf);

std::vector<double> cell_probabilities(const Quantizer& q, const Pdf& pdf);
double output_entropy(const Quantizer& q, const Pdf& pdf);

} // namespace chatq
