#include "synphi/netspec.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace synphi {

int NodeSpec::evaluate(State s) const {
  int on = 0;
  for (int i : inputs) on += static_cast<int>((s >> i) & 1U);
  switch (kind) {
    case GateKind::Threshold:
      return threshold && on >= *threshold ? 1 : 0;
    case GateKind::Xor:
      return on & 1;
    case GateKind::Copy:
      return on;
    case GateKind::Zero:
      return 0;
  }
  return 0;
}

ParseError::ParseError(int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

void validate(const NetworkSpec& spec) {
  const int n = spec.size();
  if (n < 1 || n > kMaxNodes) throw std::invalid_argument("network must have 1.." + std::to_string(kMaxNodes) + " nodes");
  for (int i = 0; i < n; ++i) {
    const auto& node = spec.nodes[i];
    std::vector<int> seen;
    for (int in : node.inputs) {
      if (in < 0 || in >= n) throw std::invalid_argument("node " + std::to_string(i) + ": unknown input " + std::to_string(in));
      if (std::find(seen.begin(), seen.end(), in) != seen.end())
        throw std::invalid_argument("node " + std::to_string(i) + ": duplicate input " + std::to_string(in));
      seen.push_back(in);
    }
    if (node.kind == GateKind::Threshold) {
      if (node.threshold && *node.threshold < 0) throw std::invalid_argument("node " + std::to_string(i) + ": negative threshold");
    } else if (node.threshold) {
      throw std::invalid_argument("node " + std::to_string(i) + ": t= only applies to threshold gates");
    }
    if (node.kind == GateKind::Copy && node.inputs.size() != 1)
      throw std::invalid_argument("node " + std::to_string(i) + ": copy needs exactly one input");
    if (node.kind == GateKind::Zero && !node.inputs.empty())
      throw std::invalid_argument("node " + std::to_string(i) + ": zero takes no inputs");
  }
}

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> split_ws(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

std::optional<long> to_int(std::string_view s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<GateKind> kind_from(std::string_view s) {
  if (s == "threshold") return GateKind::Threshold;
  if (s == "xor") return GateKind::Xor;
  if (s == "copy") return GateKind::Copy;
  if (s == "zero") return GateKind::Zero;
  return std::nullopt;
}

const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::Threshold: return "threshold";
    case GateKind::Xor: return "xor";
    case GateKind::Copy: return "copy";
    case GateKind::Zero: return "zero";
  }
  return "?";
}

}  // namespace

NetworkSpec parse_network(std::string_view text) {
  NetworkSpec spec;
  std::optional<int> declared;
  std::map<int, NodeSpec> nodes;
  int header_line = 0;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (toks[0].text == "network") {
      if (declared) throw ParseError(lineno, toks[0].column, "duplicate network header");
      if (toks.size() != 3) throw ParseError(lineno, toks[0].column, "expected 'network <name> <n>'");
      auto n = to_int(toks[2].text);
      if (!n) throw ParseError(lineno, toks[2].column, "node count must be an integer");
      if (*n < 1 || *n > kMaxNodes)
        throw ParseError(lineno, toks[2].column, "node count must be in 1.." + std::to_string(kMaxNodes));
      spec.name = std::string(toks[1].text);
      declared = static_cast<int>(*n);
      header_line = lineno;
      continue;
    }
    if (toks[0].text != "node") throw ParseError(lineno, toks[0].column, "unknown directive '" + std::string(toks[0].text) + "'");
    if (!declared) throw ParseError(lineno, toks[0].column, "node line before network header");
    if (toks.size() < 2) throw ParseError(lineno, toks[0].column, "missing node index");
    auto idx = to_int(toks[1].text);
    if (!idx || *idx < 0 || *idx >= *declared) throw ParseError(lineno, toks[1].column, "node index out of range");
    if (nodes.count(static_cast<int>(*idx))) throw ParseError(lineno, toks[1].column, "duplicate node index");

    NodeSpec node;
    bool have_kind = false, have_inputs = false;
    for (std::size_t t = 2; t < toks.size(); ++t) {
      auto tok = toks[t];
      auto eq = tok.text.find('=');
      if (eq == std::string_view::npos) throw ParseError(lineno, tok.column, "expected key=value");
      auto key = tok.text.substr(0, eq);
      auto val = tok.text.substr(eq + 1);
      int vcol = tok.column + static_cast<int>(eq) + 1;
      if (key == "kind") {
        auto k = kind_from(val);
        if (!k) throw ParseError(lineno, vcol, "unknown gate kind '" + std::string(val) + "'");
        node.kind = *k;
        have_kind = true;
      } else if (key == "t") {
        if (val == "inf") {
          node.threshold.reset();
        } else {
          auto v = to_int(val);
          if (!v) throw ParseError(lineno, vcol, "threshold must be an integer or inf");
          if (*v < 0) throw ParseError(lineno, vcol, "negative threshold");
          node.threshold = static_cast<int>(*v);
        }
        if (!have_kind || node.kind != GateKind::Threshold)
          throw ParseError(lineno, tok.column, "t= only applies to threshold gates");
      } else if (key == "inputs") {
        have_inputs = true;
        std::size_t p = 0;
        while (p < val.size()) {
          std::size_t c = val.find(',', p);
          if (c == std::string_view::npos) c = val.size();
          auto item = val.substr(p, c - p);
          int icol = vcol + static_cast<int>(p);
          auto v = to_int(item);
          if (!v) throw ParseError(lineno, icol, "bad input index '" + std::string(item) + "'");
          if (*v < 0 || *v >= *declared) throw ParseError(lineno, icol, "unknown node reference " + std::string(item));
          if (std::find(node.inputs.begin(), node.inputs.end(), *v) != node.inputs.end())
            throw ParseError(lineno, icol, "duplicate input " + std::string(item));
          node.inputs.push_back(static_cast<int>(*v));
          p = c + 1;
        }
      } else {
        throw ParseError(lineno, tok.column, "unknown key '" + std::string(key) + "'");
      }
    }
    if (!have_kind) throw ParseError(lineno, toks[0].column, "missing kind=");
    if (!have_inputs) throw ParseError(lineno, toks[0].column, "missing inputs=");
    if (node.kind == GateKind::Threshold) {
      bool has_t = false;
      for (auto& tk : toks)
        if (tk.text.substr(0, 2) == "t=") has_t = true;
      if (!has_t) throw ParseError(lineno, toks[0].column, "threshold gate needs t=");
    }
    if (node.kind == GateKind::Copy && node.inputs.size() != 1) throw ParseError(lineno, toks[0].column, "copy needs exactly one input");
    if (node.kind == GateKind::Zero && !node.inputs.empty()) throw ParseError(lineno, toks[0].column, "zero takes no inputs");
    nodes.emplace(static_cast<int>(*idx), std::move(node));
  }

  if (!declared) throw ParseError(lineno, 1, "missing network header");
  if (static_cast<int>(nodes.size()) != *declared)
    throw ParseError(header_line, 1, "expected " + std::to_string(*declared) + " node lines, found " + std::to_string(nodes.size()));
  for (auto& [i, node] : nodes) spec.nodes.push_back(std::move(node));
  return spec;
}

std::string render_network(const NetworkSpec& spec) {
  std::ostringstream out;
  out << "network " << spec.name << ' ' << spec.size() << '\n';
  for (int i = 0; i < spec.size(); ++i) {
    const auto& node = spec.nodes[i];
    out << "node " << i << " kind=" << kind_name(node.kind);
    if (node.kind == GateKind::Threshold) {
      out << " t=";
      if (node.threshold) out << *node.threshold; else out << "inf";
    }
    out << " inputs=";
    for (std::size_t j = 0; j < node.inputs.size(); ++j) out << (j ? "," : "") << node.inputs[j];
    out << '\n';
  }
  return out.str();
}

TransitionModel::TransitionModel(int n, std::vector<State> successors) : n_(n), next_(std::move(successors)) {
  if (n < 1 || n > kMaxNodes) throw std::invalid_argument("node count out of range");
  if (next_.size() != (std::size_t{1} << n)) throw std::invalid_argument("transition table must have 2^n rows");
  for (State s : next_)
    if (s >> n) throw std::invalid_argument("successor outside state space");
}

TransitionModel build_tpm(const NetworkSpec& spec) {
  validate(spec);
  const int n = spec.size();
  std::vector<State> next(std::size_t{1} << n);
  for (State s = 0; s < next.size(); ++s) {
    State out = 0;
    for (int i = 0; i < n; ++i) out |= static_cast<State>(spec.nodes[i].evaluate(s)) << i;
    next[s] = out;
  }
  return TransitionModel(n, std::move(next));
}

std::string format_state(State s, int n) {
  std::string out(n, '0');
  for (int i = 0; i < n; ++i)
    if ((s >> i) & 1U) out[i] = '1';
  return out;
}

std::optional<State> parse_state(std::string_view text, int n) {
  if (static_cast<int>(text.size()) != n) return std::nullopt;
  State s = 0;
  for (int i = 0; i < n; ++i) {
    if (text[i] == '1') s |= State{1} << i;
    else if (text[i] != '0') return std::nullopt;
  }
  return s;
}

namespace {

NodeSpec thr(std::optional<int> t, std::vector<int> in) { return {GateKind::Threshold, t, std::move(in)}; }
NodeSpec copy_of(int i) { return {GateKind::Copy, std::nullopt, {i}}; }

// Doublet gate vocabulary; `self` is the node being defined.
NodeSpec doublet_gate(std::string_view g, int self) {
  if (g == "ZERO") return thr(std::nullopt, {});
  if (g == "KEEP") return copy_of(self);
  if (g == "GET") return copy_of(1 - self);
  if (g == "AND") return thr(2, {0, 1});
  if (g == "XOR") return {GateKind::Xor, std::nullopt, {0, 1}};
  throw std::logic_error("unknown doublet gate");
}

NetworkSpec doublet(std::string_view a, std::string_view b) {
  return {std::string(a) + "-" + std::string(b), {doublet_gate(a, 0), doublet_gate(b, 1)}};
}

// Every node reads every node, itself included; digit i is node i's threshold.
NetworkSpec thresholds(const std::string& digits) {
  NetworkSpec spec{digits, {}};
  const int n = static_cast<int>(digits.size());
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  for (char c : digits) spec.nodes.push_back(thr(c - '0', all));
  return spec;
}

NetworkSpec cycle(int n) {
  NetworkSpec spec{"GET" + std::to_string(n), {}};
  for (int i = 0; i < n; ++i) spec.nodes.push_back(copy_of((i + n - 1) % n));
  return spec;
}

}  // namespace

std::vector<NetworkSpec> builtin_battery() {
  static const char* pairs[][2] = {
      {"ZERO", "ZERO"}, {"KEEP", "ZERO"}, {"KEEP", "KEEP"}, {"GET", "ZERO"}, {"GET", "KEEP"}, {"GET", "GET"},
      {"AND", "ZERO"},  {"AND", "KEEP"},  {"AND", "GET"},   {"AND", "AND"}, {"AND", "XOR"},  {"XOR", "ZERO"},
      {"XOR", "KEEP"},  {"XOR", "GET"},   {"XOR", "AND"},   {"XOR", "XOR"},
  };
  std::vector<NetworkSpec> out;
  for (auto& p : pairs) out.push_back(doublet(p[0], p[1]));
  out.push_back(cycle(3));
  for (auto d : {"111", "121", "123"}) out.push_back(thresholds(d));
  out.push_back(cycle(4));
  for (auto d : {"4422", "4322", "4321"}) out.push_back(thresholds(d));
  return out;
}

std::optional<NetworkSpec> find_builtin(std::string_view name) {
  for (auto& spec : builtin_battery())
    if (spec.name == name) return spec;
  return std::nullopt;
}

NetworkSpec load_network(const std::string& name_or_path) {
  if (auto b = find_builtin(name_or_path)) return *b;
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw std::invalid_argument("no builtin network or readable file named '" + name_or_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

}  // namespace synphi
