#pragma once

// Chatting protocol: identifiability checks, the serial max chat round and
// per-message quantizer banks.

#include "chatq/distortion.hpp"
#include "chatq/network.hpp"
#include "chatq/quantizer.hpp"

#include <span>
#include <string>
#include <vector>

namespace chatq {

enum class Condition { C1, C2, C3, C4 };
std::string to_string(Condition c);

struct Violation {
    Condition condition;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(Condition c) const;
    std::string to_text() const;
};

// C1: the chatting graph is a DAG with valid endpoints and no self-loops.
// C2: the schedule lists every edge once and a sensor transmits only after
// all of its incoming messages. C3 and C4 hold by construction: banks are
// indexed by the incoming message only and outgoing messages are computed
// from the incoming message and the sensor's own reproduction value.
ValidationReport validate_identifiable(const ChatGraph& graph, const Schedule& schedule);

// 1-based cell of x in boundaries t_0 < ... < t_K; cells are left-open and
// right-closed, with clamping at both ends.
std::size_t partition_cell(std::span<const double> t, double x);

// Message sensor `from` sends on `out` given its value and the message k_in
// received on `in` (nullptr and 0 when nothing is received). With a shared
// partition this is max(k_in, cell(value)); otherwise the incoming lower
// bound is re-encoded lower-closed on the outgoing partition.
std::size_t next_message(const ChatEdge& out, const ChatEdge* in, std::size_t k_in, double value);

struct ChatState {
    std::vector<std::size_t> messages;  // per edge, 0 until transmitted
    std::vector<std::size_t> received;  // per sensor, 1 when nothing arrives
    std::vector<Interval> intervals;    // per sensor, range of the ancestor max
};

// Runs the whole schedule on raw values (values[n-1] for sensor n). Needs a
// serial chain.
ChatState serial_max_chat_round(const ChatNetworkSpec& spec, std::span<const double> values);

using QuantizerBank = std::vector<Quantizer>;  // indexed by message - 1

// Entropy-constrained codebook size for total rate R: the granular count
// 2^{(R - H_B)/P(A) - h(X|A) - E[log2 λ | A]} rounded, plus L.
std::size_t entropy_codebook_size(const EntropyConstants& c, double R, std::size_t dont_care);

QuantizerBank conditional_quantizer_bank(const SensorDesigns& designs, std::span<const std::size_t> sizes,
                                         CodewordPlacement placement = CodewordPlacement::midpoint);

// Fusion-center replay: the codebook (message) each sensor used, recovered
// from the fusion-link cell indices alone.
std::vector<std::size_t> replay_codebooks(const ChatNetworkSpec& spec, const std::vector<QuantizerBank>& banks,
                                          std::span<const std::size_t> cells);

} // namespace chatq
