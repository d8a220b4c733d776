#include "chatq/quantizer.hpp"

#include "chatq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/tools/roots.hpp>

namespace chatq {

namespace {

bool in_zone(const std::vector<Interval>& zones, double x) {
    for (const auto& z : zones) {
        if (x >= z.lo && x <= z.hi) {
            return true;
        }
    }
    return false;
}

std::vector<Interval> sorted_zones(std::vector<Interval> zones, Interval support) {
    std::sort(zones.begin(), zones.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < zones.size(); ++i) {
        const auto& z = zones[i];
        if (!(z.hi > z.lo) || z.lo < support.lo || z.hi > support.hi) {
            throw DomainError("zero zones must be nondegenerate subintervals of the support");
        }
        if (i > 0 && z.lo < zones[i - 1].hi) {
            throw DomainError("zero zones must be disjoint");
        }
    }
    return zones;
}

std::vector<Interval> complement(Interval support, const std::vector<Interval>& zones) {
    std::vector<Interval> out;
    double cursor = support.lo;
    for (const auto& z : zones) {
        if (z.lo > cursor) {
            out.push_back({cursor, z.lo});
        }
        cursor = std::max(cursor, z.hi);
    }
    if (support.hi > cursor) {
        out.push_back({cursor, support.hi});
    }
    return out;
}

} // namespace

PointDensity::PointDensity(Interval support, RealFunction density, std::vector<Interval> zero_zones,
                           std::vector<double> breakpoints)
    : support_(support), raw_(std::move(density)), zero_zones_(sorted_zones(std::move(zero_zones), support)) {
    if (!(support_.hi > support_.lo)) {
        throw DomainError("point density support must have positive length");
    }
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

    double total = 0.0;
    for (const auto& part : granular_components()) {
        total += integrate(
            [this](double x) {
                const double v = raw_(x);
                if (v < 0.0) {
                    throw InvalidProfileError("point density is negative");
                }
                return v;
            },
            part, breakpoints_, {1e-13, 1e-10});
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw InvalidProfileError("point density has no mass outside its zero zones");
    }
    scale_ = 1.0 / total;
}

PointDensity PointDensity::uniform(Interval support) {
    return PointDensity(support, [](double) { return 1.0; });
}

double PointDensity::operator()(double x) const {
    if (x < support_.lo || x > support_.hi || in_zone(zero_zones_, x)) {
        return 0.0;
    }
    return scale_ * raw_(x);
}

std::vector<Interval> PointDensity::granular_components() const { return complement(support_, zero_zones_); }

// ---------------------------------------------------------------------------

Compressor::Compressor(const PointDensity& lambda, std::size_t nodes) : lambda_(lambda) {
    const Interval s = lambda.support();
    nodes_.reserve(nodes + lambda.breakpoints().size());
    for (std::size_t i = 0; i < nodes; ++i) {
        nodes_.push_back(s.lo + s.length() * static_cast<double>(i) / static_cast<double>(nodes - 1));
    }
    nodes_.back() = s.hi;
    nodes_.insert(nodes_.end(), lambda.breakpoints().begin(), lambda.breakpoints().end());
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());

    cumulative_.assign(nodes_.size(), 0.0);
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        cumulative_[i] = cumulative_[i - 1] + partial(i - 1, nodes_[i]);
    }
    // Remove the residual normalization error so c(sup) = 1 exactly.
    total_ = cumulative_.back();
    for (auto& v : cumulative_) {
        v /= total_;
    }
}

double Compressor::partial(std::size_t panel, double x) const {
    const double a = nodes_[panel];
    if (x <= a) {
        return 0.0;
    }
    const double mid = 0.5 * (a + x);
    if (in_zone(lambda_.zero_zones(), mid)) {
        return 0.0;
    }
    return integrate([this](double t) { return lambda_(t); }, {a, x}, {}, {1e-15, 1e-12});
}

double Compressor::operator()(double x) const {
    if (x <= nodes_.front()) {
        return 0.0;
    }
    if (x >= nodes_.back()) {
        return 1.0;
    }
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (x == nodes_[i]) {
        return cumulative_[i];
    }
    const double mass = cumulative_[i + 1] - cumulative_[i];
    if (mass <= 0.0) {
        return cumulative_[i];
    }
    return std::min(cumulative_[i + 1], cumulative_[i] + partial(i, x) / total_);
}

double Compressor::inverse(double u) const {
    if (u <= 0.0) {
        return nodes_.front();
    }
    if (u >= 1.0) {
        // Left end of any trailing flat stretch.
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), 1.0);
        return nodes_[static_cast<std::size_t>(it - cumulative_.begin())];
    }
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t j = static_cast<std::size_t>(it - cumulative_.begin());
    if (cumulative_[j] == u) {
        std::size_t k = j;
        while (k > 0 && cumulative_[k - 1] == u) {
            --k;
        }
        return nodes_[k];
    }
    const std::size_t i = j - 1;
    const double target = (u - cumulative_[i]) * total_;
    auto f = [&](double x) { return partial(i, x) - target; };
    boost::math::tools::eps_tolerance<double> tol(48);
    std::uintmax_t iterations = 200;
    const auto [lo, hi] =
        boost::math::tools::toms748_solve(f, nodes_[i], nodes_[i + 1], -target,
                                          partial(i, nodes_[i + 1]) - target, tol, iterations);
    return 0.5 * (lo + hi);
}

Compressor compressor_from_density(const PointDensity& lambda) { return Compressor(lambda); }

// ---------------------------------------------------------------------------

Quantizer::Quantizer(std::vector<double> boundaries, std::vector<double> codewords, std::vector<std::size_t> dont_care)
    : boundaries_(std::move(boundaries)), codewords_(std::move(codewords)), dont_care_(std::move(dont_care)) {
    if (codewords_.empty() || boundaries_.size() != codewords_.size() + 1) {
        throw DomainError("quantizer needs K >= 1 codewords and K + 1 boundaries");
    }
    for (std::size_t k = 0; k < codewords_.size(); ++k) {
        if (!(boundaries_[k + 1] > boundaries_[k])) {
            throw DomainError("quantizer boundaries must be strictly increasing");
        }
        if (codewords_[k] < boundaries_[k] || codewords_[k] > boundaries_[k + 1]) {
            throw DomainError("quantizer codeword outside its cell");
        }
    }
    std::sort(dont_care_.begin(), dont_care_.end());
    dont_care_.erase(std::unique(dont_care_.begin(), dont_care_.end()), dont_care_.end());
    if (!dont_care_.empty() && dont_care_.back() >= codewords_.size()) {
        throw DomainError("don't-care index out of range");
    }
}

std::size_t Quantizer::quantize(double x) const {
    const auto first = boundaries_.begin() + 1;
    const auto last = boundaries_.end() - 1;
    return static_cast<std::size_t>(std::lower_bound(first, last, x) - first);
}

bool Quantizer::is_dont_care(std::size_t k) const {
    return std::binary_search(dont_care_.begin(), dont_care_.end(), k);
}

std::string Quantizer::serialize() const {
    std::ostringstream out;
    out.precision(17);
    auto line = [&out](const auto& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << (i ? " " : "") << values[i];
        }
        out << '\n';
    };
    line(boundaries_);
    line(codewords_);
    line(dont_care_);
    return out.str();
}

Quantizer Quantizer::parse(const std::string& text) {
    std::istringstream in(text);
    std::string lines[3];
    for (auto& l : lines) {
        std::getline(in, l);
    }
    auto reals = [](const std::string& l) {
        std::istringstream s(l);
        std::vector<double> v;
        double x;
        while (s >> x) {
            v.push_back(x);
        }
        return v;
    };
    std::vector<std::size_t> dc;
    std::istringstream s(lines[2]);
    std::size_t k;
    while (s >> k) {
        dc.push_back(k);
    }
    return Quantizer(reals(lines[0]), reals(lines[1]), std::move(dc));
}

// ---------------------------------------------------------------------------

Quantizer build_fixed_rate_quantizer(const PointDensity& lambda, std::size_t K, const std::vector<Interval>& dont_care,
                                     CodewordPlacement placement) {
    const Interval support = lambda.support();
    const auto zones = sorted_zones(dont_care, support);
    const std::size_t L = zones.size();
    if (K <= L) {
        throw InfeasibleError("codebook size K = " + std::to_string(K) + " leaves no granular codeword with L = " +
                              std::to_string(L) + " don't-care intervals");
    }
    const auto components = complement(support, zones);
    const std::size_t granular = K - L;
    if (granular < components.size()) {
        throw InfeasibleError("fewer granular codewords than granular components");
    }

    const Compressor c(lambda);
    std::vector<double> start(components.size());
    std::vector<double> mass(components.size());
    for (std::size_t j = 0; j < components.size(); ++j) {
        start[j] = c(components[j].lo);
        mass[j] = std::max(0.0, c(components[j].hi) - start[j]);
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);

    std::vector<std::size_t> cells(components.size(), 1);
    std::vector<double> quota(components.size());
    for (std::size_t j = 0; j < components.size(); ++j) {
        quota[j] = total > 0.0 ? static_cast<double>(granular) * mass[j] / total : 0.0;
        cells[j] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(quota[j])));
    }
    std::size_t assigned = std::accumulate(cells.begin(), cells.end(), std::size_t{0});
    while (assigned < granular) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < cells.size(); ++j) {
            if (quota[j] - static_cast<double>(cells[j]) > quota[best] - static_cast<double>(cells[best])) {
                best = j;
            }
        }
        ++cells[best];
        ++assigned;
    }
    while (assigned > granular) {
        std::size_t best = cells.size();
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (cells[j] > 1 && (best == cells.size() || quota[j] - static_cast<double>(cells[j]) <
                                                             quota[best] - static_cast<double>(cells[best]))) {
                best = j;
            }
        }
        --cells[best];
        --assigned;
    }

    std::vector<double> boundaries{support.lo};
    std::vector<double> codewords;
    std::vector<std::size_t> dc_index;
    std::size_t zi = 0;
    std::size_t cj = 0;
    while (zi < zones.size() || cj < components.size()) {
        const bool take_zone = cj == components.size() || (zi < zones.size() && zones[zi].lo < components[cj].lo);
        if (take_zone) {
            dc_index.push_back(codewords.size());
            codewords.push_back(zones[zi].midpoint());
            boundaries.push_back(zones[zi].hi);
            ++zi;
            continue;
        }
        const Interval part = components[cj];
        const std::size_t n = cells[cj];
        auto at = [&](double fraction) {
            if (mass[cj] <= 0.0) {
                return part.lo + fraction * part.length();
            }
            return std::clamp(c.inverse(start[cj] + mass[cj] * fraction), part.lo, part.hi);
        };
        double left = part.lo;
        for (std::size_t i = 1; i <= n; ++i) {
            const double right = i == n ? part.hi : at(static_cast<double>(i) / static_cast<double>(n));
            if (!(right > left)) {
                throw InvalidProfileError("point density too concentrated to place distinct cells");
            }
            double cw = left;
            if (placement == CodewordPlacement::midpoint) {
                cw = std::clamp(at((2.0 * static_cast<double>(i) - 1.0) / (2.0 * static_cast<double>(n))), left, right);
            }
            codewords.push_back(cw);
            boundaries.push_back(right);
            left = right;
        }
        ++cj;
    }
    return Quantizer(std::move(boundaries), std::move(codewords), std::move(dc_index));
}

Quantizer refine_codewords_conditional_mean(const Quantizer& q, const Pdf& pdf) {
    std::vector<double> cw = q.codewords();
    for (std::size_t k = 0; k < q.size(); ++k) {
        const Interval cell = q.cell(k);
        if (pdf.mass(cell) > 0.0) {
            cw[k] = std::clamp(pdf.conditional_mean(cell), cell.lo, cell.hi);
        }
    }
    return Quantizer(q.boundaries(), std::move(cw), q.dont_care_indices());
}

std::vector<double> cell_probabilities(const Quantizer& q, const Pdf& pdf) {
    std::vector<double> p(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        p[k] = std::max(0.0, pdf.mass(q.cell(k)));
    }
    // Overload regions clamp into the end cells.
    p.front() += std::max(0.0, pdf.cdf(q.boundaries().front()));
    p.back() += std::max(0.0, 1.0 - pdf.cdf(q.boundaries().back()));
    return p;
}

double output_entropy(const Quantizer& q, const Pdf& pdf) {
    const auto p = cell_probabilities(q, pdf);
    return entropy_bits(p);
}

} // namespace chatq
