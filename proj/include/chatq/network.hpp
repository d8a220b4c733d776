#pragma once

// Chatting-network description: graph, schedule, link costs, partitions.

#include "chatq/prob.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace chatq {

enum class Regime { fixed_rate, entropy_constrained };
enum class Computation { max };

std::string to_string(Regime r);
std::string to_string(Computation c);

// Directed chatting link i -> n (1-based sensors). The message is a cell
// index of `partition` (K_{i->n} = partition.size() - 1 cells); `cost` is
// the cost per chatted bit.
struct ChatEdge {
    int from = 1;
    int to = 2;
    std::vector<double> partition{0.0, 1.0};
    double cost = 0.0;

    std::size_t cells() const { return partition.size() - 1; }
    double rate() const;             // log2 K
    double total_cost() const { return cost * rate(); }
};

struct ChatGraph {
    int nodes = 1;
    std::vector<ChatEdge> edges;
};

// Transmission order as indices into ChatGraph::edges.
using Schedule = std::vector<std::size_t>;

struct ChatNetworkSpec {
    int sensors = 1;
    Computation computation = Computation::max;
    Pdf source;
    Regime regime = Regime::fixed_rate;
    ChatGraph graph;
    Schedule schedule;
    std::vector<double> fusion_costs{1.0};
    double budget = 0.0;
    // Fusion-link rates (bits, one per sensor) when fixed by the user.
    std::optional<std::vector<double>> rates;

    // Index of the unique incoming edge of sensor n, if any.
    std::optional<std::size_t> incoming(int n) const;
    // Index of the unique outgoing edge of sensor n, if any.
    std::optional<std::size_t> outgoing(int n) const;
    // 1 -> 2 -> ... -> N with edges scheduled in chain order.
    bool is_serial_chain() const;
    // Every edge carries the same partition.
    bool shared_partitions() const;
    double chat_cost() const;
};

// Serial max network with the same partition on every chain edge. A single
// cell partition ({lo, hi}) is rate-zero chatting.
ChatNetworkSpec serial_max_network(int N, std::vector<double> partition, double chat_cost, Regime regime,
                                   double budget, const Pdf& source = Pdf{});

} // namespace chatq
