#pragma once

// Probability and numeric primitives shared by every other module:
// intervals, adaptive quadrature, densities with inverse-CDF sampling,
// L_{1/3} quasi-norms and entropies.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace chatq {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    double midpoint() const { return 0.5 * (lo + hi); }

    friend bool operator==(const Interval&, const Interval&) = default;
};

using RealFunction = std::function<double(double)>;

struct QuadratureTolerance {
    double absolute = 1e-9;
    double relative = 1e-6;
};

// Adaptive Gauss-Kronrod (7/15) quadrature of f over `range`. Breakpoints
// inside the range are used as forced panel edges, so kinks and
// zero-zone edges never sit inside a panel. f is never evaluated at panel
// endpoints, which keeps integrable endpoint singularities (log x, x^{-1/2})
// harmless. Throws InvalidProfileError on a non-finite integrand.
double integrate(const RealFunction& f, Interval range, std::span<const double> breakpoints = {},
                 QuadratureTolerance tol = {});

// Piecewise-linear function on a strictly increasing grid. Constant
// extrapolation outside the grid.
class GriddedFunction {
public:
    GriddedFunction() = default;
    GriddedFunction(std::vector<double> grid, std::vector<double> values);

    static GriddedFunction sample(const RealFunction& f, Interval range, std::size_t points = 4096);

    double operator()(double x) const;

    std::span<const double> grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    Interval domain() const { return {grid_.front(), grid_.back()}; }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

// Univariate source density on a bounded support. Analytic forms keep
// closed-form CDF/quantile; the gridded form interpolates the density
// linearly and integrates it exactly.
class Pdf {
public:
    enum class Form { analytic_piecewise, gridded };

    // Uniform on [0,1].
    Pdf();

    static Pdf uniform(double lo = 0.0, double hi = 1.0);
    // f(x) = (a+1) x^a on [0,1], a > -1. power(1) is the 2x density.
    static Pdf power(double exponent);
    // Normalizes the gridded density; values must be nonnegative.
    static Pdf gridded(GriddedFunction density);

    Interval support() const;
    Form form() const;

    double density(double x) const;
    double cdf(double x) const;
    double quantile(double u) const;
    double mass(Interval cell) const { return cdf(cell.hi) - cdf(cell.lo); }
    // E[X | X in cell]; midpoint for a zero-mass cell.
    double conditional_mean(Interval cell) const;

    // Points where the density is not smooth (support ends included).
    std::vector<double> breakpoints() const;

    // Text form used by the spec file: "uniform lo hi", "power a", "grid ...".
    std::string describe() const;

    bool is_uniform() const;

private:
    struct Uniform {
        double lo;
        double hi;
    };
    struct Power {
        double exponent;
    };
    struct Tabulated {
        std::vector<double> grid;
        std::vector<double> density;     // normalized, at grid nodes
        std::vector<double> cumulative;  // CDF at grid nodes
    };

    explicit Pdf(std::variant<Uniform, Power, Tabulated> model) : model_(std::move(model)) {}

    std::variant<Uniform, Power, Tabulated> model_;
};

// (∫ f^{1/3} dx)^3 over the support.
double quasi_norm_one_third(const RealFunction& f, Interval support,
                            std::span<const double> breakpoints = {});

// -∫ f log2 f, in bits.
double differential_entropy(const Pdf& pdf);

// H_B(p) in bits with 0 log 0 = 0. Throws DomainError outside [0,1].
double binary_entropy(double p);

// Shannon entropy (bits) of a probability vector; zero entries skipped.
double entropy_bits(std::span<const double> probabilities);

// Inverse-CDF draw; consumes exactly one canonical uniform from the stream.
double sample(const Pdf& pdf, std::mt19937_64& rng);

// Uniform in the open interval (0,1) from one 64-bit draw.
double open_uniform(std::mt19937_64& rng);

// Deterministic per-block stream derived from a master seed; used wherever
// Monte Carlo work is split into blocks so results do not depend on how the
// blocks are scheduled.
std::mt19937_64 substream(std::uint64_t master_seed, std::uint64_t block);

} // namespace chatq
