#include "chatq/simulator.hpp"

#include "chatq/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

namespace chatq {

namespace {

constexpr std::size_t kBlock = 4096;

struct BlockStats {
    double sum_plug = 0.0;
    double sumsq_plug = 0.0;
    double sum_ce = 0.0;
    double sumsq_ce = 0.0;
    std::size_t mismatches = 0;
    // counts[n][m][cell]
    std::vector<std::vector<std::vector<std::uint64_t>>> counts;
};

struct SensorLinks {
    const ChatEdge* in = nullptr;
    std::size_t in_index = 0;
    const ChatEdge* out = nullptr;
    std::size_t out_index = 0;
};

double mean_of(double sum, double n) { return sum / n; }

double std_error_of(double sum, double sumsq, double n) {
    if (n < 2.0) {
        return 0.0;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    return std::sqrt(var / n);
}

} // namespace

std::string to_string(Decoder d) { return d == Decoder::plug_in ? "plug-in" : "conditional-expectation"; }

double expected_max(std::span<const Interval> cells, const Pdf& pdf) {
    if (cells.empty()) {
        throw DomainError("expected_max needs at least one cell");
    }
    double top_lo = cells[0].lo;
    double top_hi = cells[0].hi;
    for (const auto& c : cells) {
        top_lo = std::max(top_lo, c.lo);
        top_hi = std::max(top_hi, c.hi);
    }
    if (!(top_hi > top_lo)) {
        return top_hi;
    }
    const bool uniform = pdf.is_uniform();
    // Breakpoints inside (top_lo, top_hi); at most 2N.
    double edges[64];
    std::size_t m = 0;
    edges[m++] = top_lo;
    for (const auto& c : cells) {
        if (m + 2 >= 64) {
            break;
        }
        if (c.lo > top_lo && c.lo < top_hi) {
            edges[m++] = c.lo;
        }
        if (c.hi > top_lo && c.hi < top_hi) {
            edges[m++] = c.hi;
        }
    }
    edges[m++] = top_hi;
    std::sort(edges, edges + m);

    auto product_cdf = [&](double t) {
        double p = 1.0;
        for (const auto& c : cells) {
            if (t >= c.hi) {
                continue;
            }
            if (t <= c.lo) {
                return 0.0;
            }
            if (uniform) {
                p *= (t - c.lo) / (c.hi - c.lo);
            } else {
                const double Fl = pdf.cdf(c.lo);
                const double mass = pdf.cdf(c.hi) - Fl;
                p *= mass > 0.0 ? (pdf.cdf(t) - Fl) / mass : (t - c.lo) / (c.hi - c.lo);
            }
        }
        return p;
    };
    double tail = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (edges[i + 1] > edges[i]) {
            tail += boost::math::quadrature::gauss<double, 10>::integrate(
                [&](double t) { return 1.0 - product_cdf(t); }, edges[i], edges[i + 1]);
        }
    }
    return top_lo + tail;
}

double decode(Decoder decoder, std::span<const Interval> cells, std::span<const double> codewords, const Pdf& pdf) {
    if (decoder == Decoder::plug_in) {
        return *std::max_element(codewords.begin(), codewords.end());
    }
    return expected_max(cells, pdf);
}

double conditional_expectation_numeric(const std::function<double(std::span<const double>)>& g,
                                       std::span<const Interval> cells, const Pdf& pdf) {
    const std::size_t N = cells.size();
    if (N < 1 || N > 3) {
        throw DomainError("numeric conditional expectation supports 1 to 3 sensors");
    }
    std::vector<double> x(N);
    std::vector<double> mass(N);
    for (std::size_t n = 0; n < N; ++n) {
        mass[n] = pdf.mass(cells[n]);
        if (!(mass[n] > 0.0)) {
            throw DomainError("zero-probability cell");
        }
    }
    const auto source_bp = pdf.breakpoints();
    const QuadratureTolerance tol{1e-12, 1e-10};
    std::function<double(std::size_t)> level = [&](std::size_t n) -> double {
        if (n == N) {
            return g(x);
        }
        // Outer coordinates are where max/min-type integrands kink.
        std::vector<double> bp(source_bp);
        bp.insert(bp.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        return integrate(
                   [&, n](double t) {
                       x[n] = t;
                       return pdf.density(t) * level(n + 1);
                   },
                   cells[n], bp, tol) /
               mass[n];
    };
    return level(0);
}

SimulationResult run_simulation(const ChatNetworkSpec& spec, const std::vector<QuantizerBank>& banks,
                                const SimulationOptions& options) {
    const auto N = static_cast<std::size_t>(spec.sensors);
    if (spec.computation != Computation::max) {
        throw ConfigError("the simulator computes the max only");
    }
    if (!spec.is_serial_chain()) {
        throw ConfigError("the simulator needs a serial chatting chain");
    }
    if (banks.size() != N) {
        throw ConfigError("one quantizer bank per sensor required");
    }
    if (options.trials < 1) {
        throw DomainError("need at least one trial");
    }
    std::vector<SensorLinks> links(N);
    for (std::size_t n = 0; n < N; ++n) {
        const int id = static_cast<int>(n) + 1;
        if (auto in = spec.incoming(id)) {
            links[n].in = &spec.graph.edges[*in];
            links[n].in_index = *in;
            if (banks[n].size() != links[n].in->cells()) {
                throw ConfigError("sensor " + std::to_string(id) + " needs one quantizer per incoming message");
            }
        } else if (banks[n].size() != 1) {
            throw ConfigError("sensor " + std::to_string(id) + " receives nothing but has several quantizers");
        }
        if (auto out = spec.outgoing(id)) {
            links[n].out = &spec.graph.edges[*out];
            links[n].out_index = *out;
        }
    }

    const std::size_t blocks = (options.trials + kBlock - 1) / kBlock;
    std::vector<BlockStats> stats(blocks);
    SimulationResult result;
    result.trials = options.trials;
    result.decoder = options.decoder;
    if (options.keep_trace) {
        result.trace.assign(options.trials, 0.0);
    }

    auto run_block = [&](std::size_t b) {
        BlockStats& s = stats[b];
        s.counts.resize(N);
        for (std::size_t n = 0; n < N; ++n) {
            s.counts[n].resize(banks[n].size());
            for (std::size_t m = 0; m < banks[n].size(); ++m) {
                s.counts[n][m].assign(banks[n][m].size(), 0);
            }
        }
        auto rng = substream(options.seed, b);
        std::vector<double> x(N);
        std::vector<double> cw(N);
        std::vector<Interval> cells(N);
        std::vector<std::size_t> index(N);
        std::vector<std::size_t> used(N);
        std::vector<std::size_t> sent(spec.graph.edges.size(), 0);
        const std::size_t begin = b * kBlock;
        const std::size_t end = std::min(options.trials, begin + kBlock);
        for (std::size_t t = begin; t < end; ++t) {
            double g = -std::numeric_limits<double>::infinity();
            for (std::size_t n = 0; n < N; ++n) {
                x[n] = sample(spec.source, rng);
                g = std::max(g, x[n]);
                const std::size_t k = links[n].in ? sent[links[n].in_index] : 1;
                const Quantizer& q = banks[n][k - 1];
                const std::size_t c = q.quantize(x[n]);
                index[n] = c;
                used[n] = k;
                cw[n] = q.codeword(c);
                cells[n] = q.cell(c);
                ++s.counts[n][k - 1][c];
                if (links[n].out) {
                    sent[links[n].out_index] = next_message(*links[n].out, links[n].in, links[n].in ? k : 0, cw[n]);
                }
            }
            const double plug = decode(Decoder::plug_in, cells, cw, spec.source);
            const double ce = decode(Decoder::conditional_expectation, cells, cw, spec.source);
            const double ep = (g - plug) * (g - plug);
            const double ec = (g - ce) * (g - ce);
            s.sum_plug += ep;
            s.sumsq_plug += ep * ep;
            s.sum_ce += ec;
            s.sumsq_ce += ec * ec;
            if (options.keep_trace) {
                result.trace[t] = options.decoder == Decoder::plug_in ? plug : ce;
            }
            if (replay_codebooks(spec, banks, index) != used) {
                ++s.mismatches;
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) {
            run_block(b);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < blocks; b = next++) {
                    run_block(b);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    BlockStats total;
    total.counts = stats.front().counts;
    for (auto& per_sensor : total.counts) {
        for (auto& per_message : per_sensor) {
            std::fill(per_message.begin(), per_message.end(), 0);
        }
    }
    for (const auto& s : stats) {
        total.sum_plug += s.sum_plug;
        total.sumsq_plug += s.sumsq_plug;
        total.sum_ce += s.sum_ce;
        total.sumsq_ce += s.sumsq_ce;
        total.mismatches += s.mismatches;
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t m = 0; m < s.counts[n].size(); ++m) {
                for (std::size_t c = 0; c < s.counts[n][m].size(); ++c) {
                    total.counts[n][m][c] += s.counts[n][m][c];
                }
            }
        }
    }

    const auto T = static_cast<double>(options.trials);
    result.fmse_plug_in = mean_of(total.sum_plug, T);
    result.std_error_plug_in = std_error_of(total.sum_plug, total.sumsq_plug, T);
    result.fmse_conditional = mean_of(total.sum_ce, T);
    result.std_error_conditional = std_error_of(total.sum_ce, total.sumsq_ce, T);
    result.fmse = options.decoder == Decoder::plug_in ? result.fmse_plug_in : result.fmse_conditional;
    result.std_error = options.decoder == Decoder::plug_in ? result.std_error_plug_in : result.std_error_conditional;
    result.replay_mismatches = total.mismatches;

    result.rates.assign(N, 0.0);
    result.message_rates.resize(N);
    result.message_frequency.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t m = 0; m < banks[n].size(); ++m) {
            const auto& counts = total.counts[n][m];
            double seen = 0.0;
            double in_a = 0.0;
            for (std::size_t c = 0; c < counts.size(); ++c) {
                seen += static_cast<double>(counts[c]);
                if (!banks[n][m].is_dont_care(c)) {
                    in_a += static_cast<double>(counts[c]);
                }
            }
            const double freq = seen / T;
            double rate = 0.0;
            if (spec.regime == Regime::fixed_rate) {
                rate = std::log2(static_cast<double>(banks[n][m].size()));
            } else if (seen > 0.0) {
                std::vector<double> p;
                for (std::size_t c = 0; c < counts.size(); ++c) {
                    if (!banks[n][m].is_dont_care(c) && in_a > 0.0) {
                        p.push_back(static_cast<double>(counts[c]) / in_a);
                    }
                }
                const double pa = in_a / seen;
                rate = binary_entropy(pa) + pa * entropy_bits(p);
            }
            result.message_frequency[n].push_back(freq);
            result.message_rates[n].push_back(rate);
            result.rates[n] += freq * rate;
        }
    }
    return result;
}

std::vector<std::vector<double>> measure_entropy_rate(const ChatNetworkSpec& spec,
                                                      const std::vector<QuantizerBank>& banks, std::size_t trials,
                                                      std::uint64_t seed) {
    ChatNetworkSpec ec = spec;
    ec.regime = Regime::entropy_constrained;
    SimulationOptions options;
    options.trials = trials;
    options.seed = seed;
    return run_simulation(ec, banks, options).message_rates;
}

} // namespace chatq
