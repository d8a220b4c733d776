#include "chatq/network.hpp"

#include "chatq/errors.hpp"

#include <cmath>

namespace chatq {

std::string to_string(Regime r) { return r == Regime::fixed_rate ? "fixed-rate" : "entropy-constrained"; }

std::string to_string(Computation) { return "max"; }

double ChatEdge::rate() const { return std::log2(static_cast<double>(cells())); }

std::optional<std::size_t> ChatNetworkSpec::incoming(int n) const {
    std::optional<std::size_t> found;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (graph.edges[e].to == n) {
            if (found) {
                throw ConfigError("sensor " + std::to_string(n) + " has more than one incoming chatting edge");
            }
            found = e;
        }
    }
    return found;
}

std::optional<std::size_t> ChatNetworkSpec::outgoing(int n) const {
    std::optional<std::size_t> found;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (graph.edges[e].from == n) {
            if (found) {
                throw ConfigError("sensor " + std::to_string(n) + " has more than one outgoing chatting edge");
            }
            found = e;
        }
    }
    return found;
}

bool ChatNetworkSpec::is_serial_chain() const {
    if (graph.edges.empty()) {
        return true;
    }
    if (static_cast<int>(graph.edges.size()) != sensors - 1 || schedule.size() != graph.edges.size()) {
        return false;
    }
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] >= graph.edges.size()) {
            return false;
        }
        const auto& e = graph.edges[schedule[i]];
        if (e.from != static_cast<int>(i) + 1 || e.to != static_cast<int>(i) + 2) {
            return false;
        }
    }
    return true;
}

bool ChatNetworkSpec::shared_partitions() const {
    for (const auto& e : graph.edges) {
        if (e.partition != graph.edges.front().partition) {
            return false;
        }
    }
    return true;
}

double ChatNetworkSpec::chat_cost() const {
    double total = 0.0;
    for (const auto& e : graph.edges) {
        total += e.total_cost();
    }
    return total;
}

ChatNetworkSpec serial_max_network(int N, std::vector<double> partition, double chat_cost, Regime regime,
                                   double budget, const Pdf& source) {
    if (N < 1) {
        throw DomainError("network needs at least one sensor");
    }
    if (partition.size() < 2) {
        throw DomainError("chatting partition needs at least one cell");
    }
    ChatNetworkSpec spec;
    spec.sensors = N;
    spec.source = source;
    spec.regime = regime;
    spec.graph.nodes = N;
    spec.fusion_costs.assign(static_cast<std::size_t>(N), 1.0);
    spec.budget = budget;
    for (int n = 1; n < N; ++n) {
        spec.graph.edges.push_back({n, n + 1, partition, chat_cost});
        spec.schedule.push_back(static_cast<std::size_t>(n - 1));
    }
    return spec;
}

} // namespace chatq
