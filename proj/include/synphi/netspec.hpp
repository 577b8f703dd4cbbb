#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace synphi {

// Bit i of a State is node i (node 0 = least significant bit).
using State = std::uint32_t;

inline constexpr int kMaxNodes = 16;

enum class GateKind { Threshold, Xor, Copy, Zero };

struct NodeSpec {
  GateKind kind = GateKind::Threshold;
  // Threshold gates only; nullopt means "inf" (always off).
  std::optional<int> threshold;
  std::vector<int> inputs;

  int evaluate(State s) const;
  bool operator==(const NodeSpec&) const = default;
};

struct NetworkSpec {
  std::string name;
  std::vector<NodeSpec> nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  bool operator==(const NetworkSpec&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Throws std::invalid_argument on a structurally broken spec.
void validate(const NetworkSpec& spec);

NetworkSpec parse_network(std::string_view text);
std::string render_network(const NetworkSpec& spec);

class TransitionModel {
 public:
  TransitionModel(int n, std::vector<State> successors);

  int nodes() const { return n_; }
  std::size_t state_count() const { return next_.size(); }
  State next(State s) const { return next_.at(s); }
  std::span<const State> table() const { return next_; }
  // Next value of a single node; used by causal marginalization.
  int node_next(int node, State s) const { return (next_[s] >> node) & 1U; }

 private:
  int n_;
  std::vector<State> next_;
};

TransitionModel build_tpm(const NetworkSpec& spec);

// Node 0 is the leftmost character.
std::string format_state(State s, int n);
std::optional<State> parse_state(std::string_view text, int n);

std::vector<NetworkSpec> builtin_battery();
std::optional<NetworkSpec> find_builtin(std::string_view name);

// Name or path; builtins win when both exist.
NetworkSpec load_network(const std::string& name_or_path);

}  // namespace synphi
