#include "chatq/allocation.hpp"

#include "chatq/errors.hpp"
#include "chatq/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace chatq {

namespace {

void check_inputs(std::span<const double> weights, std::span<const double> betas, std::span<const double> alphas,
                  double C) {
    if (C < 0.0 || !std::isfinite(C)) {
        throw DomainError("budget must be finite and nonnegative");
    }
    if (betas.size() != alphas.size() || weights.size() != betas.size() || betas.empty()) {
        throw DomainError("allocation needs matching, nonempty beta/alpha/weight vectors");
    }
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0) || !(alphas[i] > 0.0) || weights[i] < 0.0) {
            throw DomainError("allocation needs beta > 0, alpha > 0 and weights >= 0");
        }
    }
}

AllocationResult finish(std::span<const double> weights, std::span<const double> betas, std::span<const double> alphas,
                        std::vector<double> shares) {
    AllocationResult r;
    r.rates.resize(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) {
        r.rates[i] = shares[i] / alphas[i];
    }
    r.weights.assign(weights.begin(), weights.end());
    r.objective = allocation_objective(weights, betas, alphas, shares);
    r.shares = std::move(shares);
    return r;
}

} // namespace

double allocation_objective(std::span<const double> weights, std::span<const double> betas,
                            std::span<const double> alphas, std::span<const double> shares) {
    double d = 0.0;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        d += weights[i] * betas[i] * std::exp2(-2.0 * shares[i] / alphas[i]);
    }
    return d;
}

AllocationResult waterfill_kkt(std::span<const double> betas, std::span<const double> alphas, double C) {
    const std::vector<double> ones(betas.size(), 1.0);
    return waterfill_kkt(ones, betas, alphas, C);
}

AllocationResult waterfill_kkt(std::span<const double> weights, std::span<const double> betas,
                               std::span<const double> alphas, double C) {
    check_inputs(weights, betas, alphas, C);
    const std::size_t n = betas.size();
    std::vector<double> log_ratio(n);
    double min_wa = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        log_ratio[i] = std::log2(betas[i] / alphas[i]);
        if (weights[i] > 0.0) {
            min_wa = std::min(min_wa, weights[i] * alphas[i]);
        }
    }
    if (!std::isfinite(min_wa)) {
        throw DomainError("allocation needs at least one positive weight");
    }
    auto shares_at = [&](double level) {
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = std::max(0.0, 0.5 * alphas[i] * (log_ratio[i] - level));
        }
        return b;
    };
    auto spent = [&](const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += weights[i] * b[i];
        }
        return s;
    };
    double hi = *std::max_element(log_ratio.begin(), log_ratio.end());
    double lo = *std::min_element(log_ratio.begin(), log_ratio.end()) - 2.0 * C / min_wa - 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (spent(shares_at(mid)) > C) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return finish(weights, betas, alphas, shares_at(hi));
}

std::optional<AllocationResult> closed_form_allocation(std::span<const double> betas,
                                                       std::span<const double> alphas, double C) {
    const std::vector<double> ones(betas.size(), 1.0);
    return closed_form_allocation(ones, betas, alphas, C);
}

std::optional<AllocationResult> closed_form_allocation(std::span<const double> weights,
                                                       std::span<const double> betas,
                                                       std::span<const double> alphas, double C) {
    check_inputs(weights, betas, alphas, C);
    const std::size_t n = betas.size();
    double alpha_tilde = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        alpha_tilde += weights[i] * alphas[i];
    }
    if (!(alpha_tilde > 0.0)) {
        return std::nullopt;
    }
    double log_geo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        log_geo += weights[i] * alphas[i] / alpha_tilde * std::log2(betas[i] / alphas[i]);
    }
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = alphas[i] * C / alpha_tilde + 0.5 * alphas[i] * (std::log2(betas[i] / alphas[i]) - log_geo);
        if (weights[i] > 0.0 && !(b[i] > 0.0)) {
            return std::nullopt;
        }
    }
    return finish(weights, betas, alphas, std::move(b));
}

ProbabilisticAllocation probabilistic_allocation(const std::vector<std::vector<double>>& betas,
                                                 const std::vector<std::vector<double>>& alphas,
                                                 const std::vector<std::vector<double>>& message_probs, double C) {
    if (betas.size() != alphas.size() || betas.size() != message_probs.size()) {
        throw DomainError("allocation tables must have one row per sensor");
    }
    std::vector<double> w;
    std::vector<double> b;
    std::vector<double> a;
    for (std::size_t n = 0; n < betas.size(); ++n) {
        if (betas[n].size() != alphas[n].size() || betas[n].size() != message_probs[n].size()) {
            throw DomainError("allocation table rows must match");
        }
        double total = 0.0;
        for (std::size_t m = 0; m < betas[n].size(); ++m) {
            w.push_back(message_probs[n][m]);
            b.push_back(betas[n][m]);
            a.push_back(alphas[n][m]);
            total += message_probs[n][m];
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw DomainError("message probabilities of sensor " + std::to_string(n + 1) + " do not sum to 1");
        }
    }
    ProbabilisticAllocation out;
    auto flat = closed_form_allocation(w, b, a, C);
    if (!flat) {
        flat = waterfill_kkt(w, b, a, C);
        out.interior = false;
    }
    out.objective = flat->objective;
    std::size_t i = 0;
    for (std::size_t n = 0; n < betas.size(); ++n) {
        out.shares.emplace_back();
        out.rates.emplace_back();
        for (std::size_t m = 0; m < betas[n].size(); ++m, ++i) {
            out.shares.back().push_back(flat->shares[i]);
            out.rates.back().push_back(flat->rates[i]);
        }
    }
    return out;
}

std::string NetworkAllocation::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "link,message,alpha,b,rate\n";
    for (const auto& l : links) {
        out << l.sensor << ',' << l.message << ',' << l.alpha << ',' << l.share << ',' << l.rate << '\n';
    }
    return out.str();
}

NetworkAllocation allocate_network(const ChatNetworkSpec& spec, const std::vector<SensorDesigns>& designs,
                                   double budget) {
    const auto N = static_cast<std::size_t>(spec.sensors);
    if (designs.size() != N || spec.fusion_costs.size() != N) {
        throw ConfigError("designs and fusion costs must cover every sensor");
    }
    NetworkAllocation out;
    out.regime = spec.regime;
    out.chat_cost = spec.chat_cost();
    out.fusion_budget = budget - out.chat_cost;
    if (out.fusion_budget < 0.0) {
        throw InfeasibleError("chatting cost " + std::to_string(out.chat_cost) + " exceeds the budget " +
                              std::to_string(budget));
    }
    const double C = out.fusion_budget;

    if (spec.regime == Regime::fixed_rate) {
        std::vector<double> betas(N);
        for (std::size_t n = 0; n < N; ++n) {
            betas[n] = beta_fixed_rate(designs[n], spec.source);
        }
        const std::vector<double> ones(N, 1.0);
        std::vector<double> shares;
        if (spec.rates) {
            for (std::size_t n = 0; n < N; ++n) {
                shares.push_back(spec.fusion_costs[n] * (*spec.rates)[n]);
            }
        } else {
            auto r = closed_form_allocation(betas, spec.fusion_costs, C);
            shares = r ? r->shares : waterfill_kkt(betas, spec.fusion_costs, C).shares;
        }
        out.predicted = allocation_objective(ones, betas, spec.fusion_costs, shares);
        for (std::size_t n = 0; n < N; ++n) {
            const double rate = shares[n] / spec.fusion_costs[n];
            out.sensor_rates.push_back(rate);
            out.message_rates.emplace_back(designs[n].size(), rate);
            out.links.push_back({static_cast<int>(n) + 1, -1, 1.0, spec.fusion_costs[n], shares[n], rate});
        }
        return out;
    }

    std::vector<std::vector<double>> betas(N);
    std::vector<std::vector<double>> alphas(N);
    std::vector<std::vector<double>> probs(N);
    for (std::size_t n = 0; n < N; ++n) {
        for (const auto& d : designs[n]) {
            const auto c = entropy_constants(d, spec.source);
            betas[n].push_back(c.beta());
            alphas[n].push_back(spec.fusion_costs[n] * c.p_a);
            probs[n].push_back(d.probability);
        }
    }
    std::vector<std::vector<double>> shares;
    if (spec.rates) {
        for (std::size_t n = 0; n < N; ++n) {
            shares.emplace_back(designs[n].size(), spec.fusion_costs[n] * (*spec.rates)[n]);
        }
    } else {
        shares = probabilistic_allocation(betas, alphas, probs, C).shares;
    }
    out.predicted = 0.0;
    out.message_rates.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        double mean_rate = 0.0;
        for (std::size_t m = 0; m < designs[n].size(); ++m) {
            const double rate = shares[n][m] / spec.fusion_costs[n];
            out.predicted += probs[n][m] * betas[n][m] * std::exp2(-2.0 * shares[n][m] / alphas[n][m]);
            out.message_rates[n].push_back(rate);
            mean_rate += probs[n][m] * rate;
            out.links.push_back({static_cast<int>(n) + 1, static_cast<long>(m) + 1, probs[n][m],
                                 spec.fusion_costs[n], shares[n][m], rate});
        }
        out.sensor_rates.push_back(mean_rate);
    }
    return out;
}

NetworkAllocation allocate_network(const ChatNetworkSpec& spec) {
    return allocate_network(spec, network_designs(spec), spec.budget);
}

ChatNetworkSpec with_chat_rate(const ChatNetworkSpec& spec, double chat_rate) {
    if (chat_rate < 0.0 || chat_rate > 20.0 || std::floor(chat_rate) != chat_rate) {
        throw DomainError("chatting rate must be an integer number of bits in [0, 20]");
    }
    const std::size_t cells = std::size_t{1} << static_cast<unsigned>(chat_rate);
    const Interval s = spec.source.support();
    std::vector<double> partition = uniform_partition(cells);
    for (auto& t : partition) {
        t = s.lo + s.length() * t;
    }
    ChatNetworkSpec out = spec;
    for (auto& e : out.graph.edges) {
        e.partition = partition;
    }
    return out;
}

ChatSearchResult chat_budget_search(const ChatNetworkSpec& spec, double C, std::span<const double> rc_grid) {
    ChatSearchResult best;
    double best_value = std::numeric_limits<double>::infinity();
    for (double rc : rc_grid) {
        ChatNetworkSpec candidate = with_chat_rate(spec, rc);
        candidate.budget = C;
        if (!(C - candidate.chat_cost() > 0.0)) {
            best.candidates.push_back({rc, false, std::numeric_limits<double>::infinity()});
            continue;
        }
        auto alloc = allocate_network(candidate, network_designs(candidate), C);
        best.candidates.push_back({rc, true, alloc.predicted});
        if (alloc.predicted < best_value) {
            best_value = alloc.predicted;
            best.chat_rate = rc;
            best.spec = candidate;
            best.allocation = std::move(alloc);
        }
    }
    if (!std::isfinite(best_value)) {
        throw InfeasibleError("every chatting rate exhausts the budget");
    }
    return best;
}

std::vector<std::size_t> round_codebook_sizes(std::span<const double> rates, std::span<const double> alphas,
                                              double budget, std::span<const std::size_t> min_sizes,
                                              const std::function<double(std::size_t, std::size_t)>& distortion) {
    const std::size_t n = rates.size();
    if (alphas.size() != n || min_sizes.size() != n) {
        throw DomainError("rounding needs one alpha and one minimum size per sensor");
    }
    std::vector<std::size_t> K(n);
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        K[i] = std::max(min_sizes[i], static_cast<std::size_t>(std::llround(std::exp2(rates[i]))));
        cost += alphas[i] * std::log2(static_cast<double>(K[i]));
    }
    while (cost > budget + 1e-9) {
        std::size_t pick = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (K[i] <= min_sizes[i] || K[i] <= 1) {
                continue;
            }
            const double saved = alphas[i] * std::log2(static_cast<double>(K[i]) / static_cast<double>(K[i] - 1));
            const double penalty = (distortion(i, K[i] - 1) - distortion(i, K[i])) / saved;
            if (penalty < best) {
                best = penalty;
                pick = i;
            }
        }
        if (pick == n) {
            throw InfeasibleError("no integer codebooks fit the budget");
        }
        cost -= alphas[pick] * std::log2(static_cast<double>(K[pick]) / static_cast<double>(K[pick] - 1));
        --K[pick];
    }
    return K;
}

} // namespace chatq
