#include "chatq/chatnet.hpp"

#include "chatq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace chatq {

std::string to_string(Condition c) {
    switch (c) {
    case Condition::C1:
        return "C1";
    case Condition::C2:
        return "C2";
    case Condition::C3:
        return "C3";
    case Condition::C4:
        return "C4";
    }
    return "?";
}

bool ValidationReport::has(Condition c) const {
    return std::any_of(violations.begin(), violations.end(), [c](const Violation& v) { return v.condition == c; });
}

std::string ValidationReport::to_text() const {
    if (violations.empty()) {
        return "codebook identifiable: C1-C4 satisfied\n";
    }
    std::ostringstream out;
    for (const auto& v : violations) {
        out << to_string(v.condition) << ": " << v.detail << '\n';
    }
    return out.str();
}

ValidationReport validate_identifiable(const ChatGraph& graph, const Schedule& schedule) {
    ValidationReport report;
    const int N = graph.nodes;
    bool endpoints_ok = true;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        if (edge.from < 1 || edge.from > N || edge.to < 1 || edge.to > N) {
            report.violations.push_back({Condition::C1, "edge " + std::to_string(e) + " has an endpoint outside 1.." +
                                                             std::to_string(N)});
            endpoints_ok = false;
        } else if (edge.from == edge.to) {
            report.violations.push_back({Condition::C1, "edge " + std::to_string(e) + " is a self-loop on sensor " +
                                                             std::to_string(edge.from)});
            endpoints_ok = false;
        }
    }

    if (endpoints_ok) {
        // Kahn's algorithm.
        std::vector<int> indegree(static_cast<std::size_t>(N) + 1, 0);
        std::vector<std::vector<int>> children(static_cast<std::size_t>(N) + 1);
        for (const auto& edge : graph.edges) {
            ++indegree[static_cast<std::size_t>(edge.to)];
            children[static_cast<std::size_t>(edge.from)].push_back(edge.to);
        }
        std::queue<int> ready;
        for (int n = 1; n <= N; ++n) {
            if (indegree[static_cast<std::size_t>(n)] == 0) {
                ready.push(n);
            }
        }
        int visited = 0;
        while (!ready.empty()) {
            const int n = ready.front();
            ready.pop();
            ++visited;
            for (int c : children[static_cast<std::size_t>(n)]) {
                if (--indegree[static_cast<std::size_t>(c)] == 0) {
                    ready.push(c);
                }
            }
        }
        if (visited != N) {
            std::ostringstream detail;
            detail << "chatting graph has a directed cycle through sensors";
            for (int n = 1; n <= N; ++n) {
                if (indegree[static_cast<std::size_t>(n)] > 0) {
                    detail << ' ' << n;
                }
            }
            report.violations.push_back({Condition::C1, detail.str()});
        }
    }

    std::vector<int> seen(graph.edges.size(), 0);
    for (std::size_t pos = 0; pos < schedule.size(); ++pos) {
        if (schedule[pos] >= graph.edges.size()) {
            report.violations.push_back(
                {Condition::C2, "schedule position " + std::to_string(pos) + " names a missing edge"});
            continue;
        }
        ++seen[schedule[pos]];
    }
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (seen[e] != 1) {
            report.violations.push_back({Condition::C2, "edge " + std::to_string(e) + " appears " +
                                                            std::to_string(seen[e]) + " times in the schedule"});
        }
    }
    if (endpoints_ok) {
        // A sensor may transmit only after every incoming edge has been sent.
        std::vector<std::size_t> position(graph.edges.size(), std::numeric_limits<std::size_t>::max());
        for (std::size_t pos = 0; pos < schedule.size(); ++pos) {
            if (schedule[pos] < graph.edges.size() && position[schedule[pos]] == std::numeric_limits<std::size_t>::max()) {
                position[schedule[pos]] = pos;
            }
        }
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            for (std::size_t f = 0; f < graph.edges.size(); ++f) {
                if (graph.edges[f].to == graph.edges[e].from && position[f] != std::numeric_limits<std::size_t>::max() &&
                    position[e] != std::numeric_limits<std::size_t>::max() && position[f] > position[e]) {
                    report.violations.push_back(
                        {Condition::C2, "edge " + std::to_string(graph.edges[e].from) + "->" +
                                            std::to_string(graph.edges[e].to) + " is scheduled before its input " +
                                            std::to_string(graph.edges[f].from) + "->" +
                                            std::to_string(graph.edges[f].to)});
                }
            }
        }
    }
    return report;
}

std::size_t partition_cell(std::span<const double> t, double x) {
    const auto first = t.begin() + 1;
    const auto last = t.end() - 1;
    return static_cast<std::size_t>(std::lower_bound(first, last, x) - first) + 1;
}

namespace {

// 1-based cell with lower-closed convention: boundaries equal to x belong to
// the upper cell.
std::size_t lower_closed_cell(std::span<const double> t, double x) {
    const auto first = t.begin() + 1;
    const auto last = t.end() - 1;
    return static_cast<std::size_t>(std::upper_bound(first, last, x) - first) + 1;
}

} // namespace

std::size_t next_message(const ChatEdge& out, const ChatEdge* in, std::size_t k_in, double value) {
    const std::size_t own = partition_cell(out.partition, value);
    if (in == nullptr || k_in == 0) {
        return own;
    }
    if (in->partition == out.partition) {
        return std::max(k_in, own);
    }
    return std::max(own, lower_closed_cell(out.partition, in->partition[k_in - 1]));
}

ChatState serial_max_chat_round(const ChatNetworkSpec& spec, std::span<const double> values) {
    if (!spec.is_serial_chain()) {
        throw ConfigError("serial max chatting needs a 1 -> 2 -> ... -> N chain");
    }
    const Interval support = spec.source.support();
    ChatState state;
    state.messages.assign(spec.graph.edges.size(), 0);
    state.received.assign(static_cast<std::size_t>(spec.sensors), 1);
    state.intervals.assign(static_cast<std::size_t>(spec.sensors), support);
    for (std::size_t e : spec.schedule) {
        const auto& edge = spec.graph.edges[e];
        const auto sender = static_cast<std::size_t>(edge.from - 1);
        if (sender >= values.size()) {
            throw ConfigError("missing value for sensor " + std::to_string(edge.from));
        }
        const auto in = spec.incoming(edge.from);
        const ChatEdge* in_edge = in ? &spec.graph.edges[*in] : nullptr;
        const std::size_t k_in = in ? state.messages[*in] : 0;
        const std::size_t k = next_message(edge, in_edge, k_in, values[sender]);
        state.messages[e] = k;
        const auto receiver = static_cast<std::size_t>(edge.to - 1);
        state.received[receiver] = k;
        state.intervals[receiver] = {edge.partition[k - 1], edge.partition[k]};
    }
    return state;
}

std::size_t entropy_codebook_size(const EntropyConstants& c, double R, std::size_t dont_care) {
    if (R < c.indicator - 1e-12) {
        throw InfeasibleError("rate below the indicator cost");
    }
    const double granular_rate = (R - c.indicator) / c.p_a;
    const double g = std::round(std::exp2(granular_rate - c.h_a - c.log_lambda));
    return dont_care + static_cast<std::size_t>(std::max(1.0, g));
}

QuantizerBank conditional_quantizer_bank(const SensorDesigns& designs, std::span<const std::size_t> sizes,
                                         CodewordPlacement placement) {
    if (sizes.size() != designs.size()) {
        throw ConfigError("one codebook size per message required");
    }
    QuantizerBank bank;
    for (std::size_t m = 0; m < designs.size(); ++m) {
        bank.push_back(build_fixed_rate_quantizer(designs[m].density, sizes[m], designs[m].dont_care, placement));
    }
    return bank;
}

std::vector<std::size_t> replay_codebooks(const ChatNetworkSpec& spec, const std::vector<QuantizerBank>& banks,
                                          std::span<const std::size_t> cells) {
    if (banks.size() != static_cast<std::size_t>(spec.sensors) || cells.size() != banks.size()) {
        throw ConfigError("bank/spec mismatch in replay");
    }
    std::vector<std::size_t> used(banks.size(), 1);
    std::vector<std::size_t> sent(spec.graph.edges.size(), 0);
    for (int n = 1; n <= spec.sensors; ++n) {
        const auto idx = static_cast<std::size_t>(n - 1);
        const auto in = spec.incoming(n);
        const std::size_t k = in ? sent[*in] : 1;
        if (k == 0) {
            throw ConfigError("replay needs sensors ordered along the chatting chain");
        }
        used[idx] = k;
        const auto out = spec.outgoing(n);
        if (out) {
            const double value = banks[idx].at(k - 1).codeword(cells[idx]);
            sent[*out] = next_message(spec.graph.edges[*out], in ? &spec.graph.edges[*in] : nullptr, in ? k : 0, value);
        }
    }
    return used;
}

} // namespace chatq
