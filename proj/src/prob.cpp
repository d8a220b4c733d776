#include "chatq/prob.hpp"

#include "chatq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace chatq {

namespace {

struct Panel {
    double value;
    double error;
};

template <class F>
Panel kronrod_panel(const F& f, double a, double b) {
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0);
    const double coarse = boost::math::quadrature::gauss<double, 7>::integrate(f, a, b);
    return {value, std::abs(value - coarse)};
}

struct Piece {
    double a;
    double b;
    Panel panel;
    bool operator<(const Piece& o) const { return panel.error < o.panel.error; }
};

constexpr std::size_t kMaxPanels = 20000;

bool too_narrow(double a, double b) {
    return b - a <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

} // namespace

double integrate(const RealFunction& f, Interval range, std::span<const double> breakpoints, QuadratureTolerance tol) {
    if (!(range.hi > range.lo)) {
        return 0.0;
    }
    auto checked = [&f](double x) {
        const double y = f(x);
        if (!std::isfinite(y)) {
            std::ostringstream msg;
            msg << "non-finite integrand value at x = " << x;
            throw InvalidProfileError(msg.str());
        }
        return y;
    };

    std::vector<double> edges{range.lo, range.hi};
    for (double p : breakpoints) {
        if (p > range.lo && p < range.hi) {
            edges.push_back(p);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // Global adaptive bisection: always split the panel with the largest error.
    std::priority_queue<Piece> open;
    double value = 0.0;
    double error = 0.0;
    double frozen_value = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Piece p{edges[i], edges[i + 1], kronrod_panel(checked, edges[i], edges[i + 1])};
        value += p.panel.value;
        error += p.panel.error;
        open.push(p);
    }
    std::size_t panels = open.size();
    while (!open.empty() && error > std::max(tol.absolute, tol.relative * std::abs(value)) && panels < kMaxPanels) {
        const Piece p = open.top();
        open.pop();
        value -= p.panel.value;
        error -= p.panel.error;
        if (too_narrow(p.a, p.b)) {
            frozen_value += p.panel.value;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        for (const Piece q : {Piece{p.a, m, kronrod_panel(checked, p.a, m)}, Piece{m, p.b, kronrod_panel(checked, m, p.b)}}) {
            value += q.panel.value;
            error += q.panel.error;
            open.push(q);
        }
        ++panels;
    }
    double sum = frozen_value;
    for (; !open.empty(); open.pop()) {
        sum += open.top().panel.value;
    }
    return sum;
}

// ---------------------------------------------------------------------------

GriddedFunction::GriddedFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2 || grid_.size() != values_.size()) {
        throw DomainError("gridded function needs at least two points and one value per grid point");
    }
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        if (!(grid_[i + 1] > grid_[i])) {
            throw DomainError("gridded function grid must be strictly increasing");
        }
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("gridded function values must be finite");
        }
    }
}

GriddedFunction GriddedFunction::sample(const RealFunction& f, Interval range, std::size_t points) {
    std::vector<double> grid(points);
    std::vector<double> values(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = range.lo + range.length() * static_cast<double>(i) / static_cast<double>(points - 1);
        values[i] = f(grid[i]);
    }
    return {std::move(grid), std::move(values)};
}

double GriddedFunction::operator()(double x) const {
    if (x <= grid_.front()) {
        return values_.front();
    }
    if (x >= grid_.back()) {
        return values_.back();
    }
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

// ---------------------------------------------------------------------------

Pdf::Pdf() : model_(Uniform{0.0, 1.0}) {}

Pdf Pdf::uniform(double lo, double hi) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("uniform pdf needs a finite interval with lo < hi");
    }
    return Pdf(Uniform{lo, hi});
}

Pdf Pdf::power(double exponent) {
    if (!(exponent > -1.0) || !std::isfinite(exponent)) {
        throw DomainError("power pdf exponent must exceed -1");
    }
    return Pdf(Power{exponent});
}

Pdf Pdf::gridded(GriddedFunction density) {
    const auto grid = density.grid();
    const auto values = density.values();
    Tabulated t;
    t.grid.assign(grid.begin(), grid.end());
    t.density.assign(values.begin(), values.end());
    for (double v : t.density) {
        if (v < 0.0) {
            throw DomainError("gridded pdf values must be nonnegative");
        }
    }
    t.cumulative.assign(t.grid.size(), 0.0);
    for (std::size_t i = 1; i < t.grid.size(); ++i) {
        t.cumulative[i] = t.cumulative[i - 1] + 0.5 * (t.density[i] + t.density[i - 1]) * (t.grid[i] - t.grid[i - 1]);
    }
    const double total = t.cumulative.back();
    if (!(total > 0.0)) {
        throw DomainError("gridded pdf has zero mass");
    }
    for (auto& v : t.density) {
        v /= total;
    }
    for (auto& v : t.cumulative) {
        v /= total;
    }
    return Pdf(std::move(t));
}

Interval Pdf::support() const {
    struct {
        Interval operator()(const Uniform& u) const { return {u.lo, u.hi}; }
        Interval operator()(const Power&) const { return {0.0, 1.0}; }
        Interval operator()(const Tabulated& t) const { return {t.grid.front(), t.grid.back()}; }
    } visitor;
    return std::visit(visitor, model_);
}

Pdf::Form Pdf::form() const {
    return std::holds_alternative<Tabulated>(model_) ? Form::gridded : Form::analytic_piecewise;
}

bool Pdf::is_uniform() const { return std::holds_alternative<Uniform>(model_); }

double Pdf::density(double x) const {
    struct {
        double x;
        double operator()(const Uniform& u) const { return (x < u.lo || x > u.hi) ? 0.0 : 1.0 / (u.hi - u.lo); }
        double operator()(const Power& p) const {
            if (x < 0.0 || x > 1.0) {
                return 0.0;
            }
            if (x == 0.0) {
                return p.exponent == 0.0 ? 1.0 : (p.exponent > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            }
            return (p.exponent + 1.0) * std::pow(x, p.exponent);
        }
        double operator()(const Tabulated& t) const {
            if (x < t.grid.front() || x > t.grid.back()) {
                return 0.0;
            }
            const auto it = std::upper_bound(t.grid.begin(), t.grid.end(), x);
            if (it == t.grid.end()) {
                return t.density.back();
            }
            const std::size_t i = static_cast<std::size_t>(it - t.grid.begin()) - 1;
            const double s = (x - t.grid[i]) / (t.grid[i + 1] - t.grid[i]);
            return t.density[i] + s * (t.density[i + 1] - t.density[i]);
        }
    } visitor{x};
    return std::visit(visitor, model_);
}

double Pdf::cdf(double x) const {
    struct {
        double x;
        double operator()(const Uniform& u) const { return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0); }
        double operator()(const Power& p) const {
            if (x <= 0.0) {
                return 0.0;
            }
            if (x >= 1.0) {
                return 1.0;
            }
            return std::pow(x, p.exponent + 1.0);
        }
        double operator()(const Tabulated& t) const {
            if (x <= t.grid.front()) {
                return 0.0;
            }
            if (x >= t.grid.back()) {
                return 1.0;
            }
            const auto it = std::upper_bound(t.grid.begin(), t.grid.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - t.grid.begin()) - 1;
            const double h = t.grid[i + 1] - t.grid[i];
            const double dx = x - t.grid[i];
            const double slope = (t.density[i + 1] - t.density[i]) / h;
            return t.cumulative[i] + t.density[i] * dx + 0.5 * slope * dx * dx;
        }
    } visitor{x};
    return std::visit(visitor, model_);
}

double Pdf::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    struct {
        double u;
        double operator()(const Uniform& q) const { return q.lo + u * (q.hi - q.lo); }
        double operator()(const Power& p) const { return std::pow(u, 1.0 / (p.exponent + 1.0)); }
        double operator()(const Tabulated& t) const {
            auto it = std::upper_bound(t.cumulative.begin(), t.cumulative.end(), u);
            if (it == t.cumulative.end()) {
                return t.grid.back();
            }
            std::size_t i = static_cast<std::size_t>(it - t.cumulative.begin());
            i = i == 0 ? 0 : i - 1;
            const double h = t.grid[i + 1] - t.grid[i];
            const double slope = (t.density[i + 1] - t.density[i]) / h;
            const double r = u - t.cumulative[i];
            const double d = t.density[i];
            const double disc = std::max(0.0, d * d + 2.0 * slope * r);
            const double denom = d + std::sqrt(disc);
            const double dx = denom > 0.0 ? 2.0 * r / denom : 0.0;
            return std::clamp(t.grid[i] + dx, t.grid[i], t.grid[i + 1]);
        }
    } visitor{u};
    return std::visit(visitor, model_);
}

double Pdf::conditional_mean(Interval cell) const {
    const Interval s = support();
    const double lo = std::max(cell.lo, s.lo);
    const double hi = std::min(cell.hi, s.hi);
    if (!(hi > lo)) {
        return cell.midpoint();
    }
    if (const auto* u = std::get_if<Uniform>(&model_)) {
        (void)u;
        return 0.5 * (lo + hi);
    }
    if (const auto* p = std::get_if<Power>(&model_)) {
        const double a = p->exponent;
        const double m0 = std::pow(hi, a + 1.0) - std::pow(lo, a + 1.0);
        if (!(m0 > 0.0)) {
            return cell.midpoint();
        }
        const double m1 = (a + 1.0) / (a + 2.0) * (std::pow(hi, a + 2.0) - std::pow(lo, a + 2.0));
        return m1 / m0;
    }
    const double m0 = mass({lo, hi});
    if (!(m0 > 0.0)) {
        return cell.midpoint();
    }
    const auto bp = breakpoints();
    const double m1 = integrate([this](double x) { return x * density(x); }, {lo, hi}, bp, {1e-13, 1e-10});
    return m1 / m0;
}

std::vector<double> Pdf::breakpoints() const {
    if (const auto* t = std::get_if<Tabulated>(&model_)) {
        return t->grid;
    }
    const Interval s = support();
    return {s.lo, s.hi};
}

std::string Pdf::describe() const {
    std::ostringstream out;
    out.precision(17);
    if (const auto* u = std::get_if<Uniform>(&model_)) {
        out << "uniform " << u->lo << ' ' << u->hi;
    } else if (const auto* p = std::get_if<Power>(&model_)) {
        out << "power " << p->exponent;
    } else {
        const auto& t = std::get<Tabulated>(model_);
        out << "grid";
        for (std::size_t i = 0; i < t.grid.size(); ++i) {
            out << ' ' << t.grid[i] << ':' << t.density[i];
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------

double quasi_norm_one_third(const RealFunction& f, Interval support, std::span<const double> breakpoints) {
    auto root = [&f](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw InvalidProfileError("quasi-norm integrand is not finite");
        }
        if (v < 0.0) {
            if (v < -1e-12) {
                throw InvalidProfileError("quasi-norm integrand is negative");
            }
            return 0.0;
        }
        return std::cbrt(v);
    };
    const double s = integrate(root, support, breakpoints, {1e-12, 1e-9});
    return s * s * s;
}

double differential_entropy(const Pdf& pdf) {
    if (pdf.is_uniform()) {
        return std::log2(pdf.support().length());
    }
    const auto bp = pdf.breakpoints();
    return integrate(
        [&pdf](double x) {
            const double f = pdf.density(x);
            return f > 0.0 ? -f * std::log2(f) : 0.0;
        },
        pdf.support(), bp, {1e-12, 1e-9});
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("binary entropy argument must lie in [0,1]");
    }
    if (p == 0.0 || p == 1.0) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entropy_bits(std::span<const double> probabilities) {
    double h = 0.0;
    for (double p : probabilities) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

double open_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double sample(const Pdf& pdf, std::mt19937_64& rng) { return pdf.quantile(open_uniform(rng)); }

std::mt19937_64 substream(std::uint64_t master_seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

} // namespace chatq
