#pragma once

// Plain-text network spec files.
//
//   # comment
//   N = 4
//   computation = max
//   regime = fixed-rate            (or entropy-constrained)
//   source = uniform 0 1           (or: power a)
//   budget = 16
//   fusion_cost = 1                (one value, or N values)
//   topology = serial              (or: custom, with edge lines)
//   chat_rate = 2                  (serial: uniform partition with 2^R cells)
//   partition = 0 0.3 1            (serial: explicit shared partition)
//   chat_cost = 0.01
//   edge = 1 2 cells=4 cost=0.01   (custom; optional partition=0,0.5,1)
//   schedule = 0 1 2               (edge indices; default is file order)
//   rates = 4 4 4 4                (optional fixed fusion rates)
//
// Errors are ParseError values naming the line and key.

#include "chatq/network.hpp"

#include <string>

namespace chatq {

ChatNetworkSpec parse_spec(const std::string& text);
ChatNetworkSpec load_spec(const std::string& path);
// Canonical text form; parse_spec(write_spec(s)) reproduces s.
std::string write_spec(const ChatNetworkSpec& spec);
// FNV-1a hash of the canonical text, 16 hex digits.
std::string spec_hash(const ChatNetworkSpec& spec);

} // namespace chatq
