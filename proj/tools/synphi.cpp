// synphi: command-line front end for the synergy / IIT4 measures.
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "synphi/integration_measures.hpp"
#include "synphi/netspec.hpp"
#include "synphi/report.hpp"

namespace {

using namespace synphi;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCompute = 2;
constexpr int kRegression = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<MeasureKind> kind_from(const std::string& s) {
  if (s == "S1") return MeasureKind::S1;
  if (s == "S2") return MeasureKind::S2;
  if (s == "S3") return MeasureKind::S3;
  if (s == "S4") return MeasureKind::S4;
  if (s == "IIT4") return MeasureKind::IIT4;
  return std::nullopt;
}

Side side_from(const std::string& s) {
  if (s == "cause") return Side::Cause;
  if (s == "effect") return Side::Effect;
  return Side::Both;
}

State state_arg(const CausalTriple& t, const std::string& text) {
  auto s = parse_state(text, t.nodes());
  if (!s) throw UsageError("state '" + text + "' is not a " + std::to_string(t.nodes()) + "-character 0/1 string");
  if (!t.reachable(*s)) throw UsageError("state " + text + " is unreachable (p(s) = 0)");
  return *s;
}

std::string full(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream o;
  o.precision(9);
  o << std::fixed << v;
  return o.str();
}

void print_diag(std::ostream& out, const Diagnostics& d) {
  out << "bounded: " << (d.bounded ? "true" : "false") << '\n'
      << "infinite: " << (d.infinite ? "true" : "false") << '\n'
      << "clamp_count: " << d.clamp_count << '\n'
      << "over_bound_count: " << d.over_bound_count << '\n'
      << "feasibility_residual: " << d.feasibility_residual << '\n'
      << "optimality_gap: " << d.optimality_gap << '\n'
      << "iterations: " << d.iterations << '\n';
}

std::string display(double v, bool bounded) { return round3(v) + (bounded ? "*" : ""); }

int cmd_tpm(const std::string& net) {
  auto spec = load_network(net);
  auto tpm = build_tpm(spec);
  for (State s = 0; s < tpm.state_count(); ++s)
    std::cout << format_state(s, tpm.nodes()) << " → " << format_state(tpm.next(s), tpm.nodes()) << '\n';
  return kOk;
}

struct MeasureArgs {
  std::string network, state, partition, measure = "S1", side = "both";
  double tol = 1e-9;
  std::size_t exact_limit = 3;
};

int cmd_measure(const MeasureArgs& a) {
  auto spec = load_network(a.network);
  auto tpm = build_tpm(spec);
  CausalTriple t(tpm);
  const int n = t.nodes();
  std::cout << "network: " << spec.name << '\n';

  if (a.measure == "MI") {
    double v = mutual_information(t, {past_view(n)}, {present_view(n)});
    std::cout << "measure: MI\nvalue: " << full(v) << "\ndisplay: " << round3(v) << '\n';
    return kOk;
  }
  if (a.state.empty()) throw UsageError("--state is required for measure " + a.measure);
  State s = state_arg(t, a.state);
  std::cout << "state: " << a.state << '\n';
  if (a.measure == "ID") {
    double v = intrinsic_difference(t, {past_view(n)}, s);
    std::cout << "measure: ID\nvalue: " << full(v) << "\ndisplay: " << round3(v) << '\n';
    return kOk;
  }

  MeasureOptions mo;
  mo.tol = a.tol;
  mo.max_iterations = SolverOptions::from_env().max_iterations;
  mo.exact_predictor_limit = a.exact_limit;
  mo.side = side_from(a.side);
  MeasureEngine engine(t, mo);

  std::optional<Partition> part;
  if (!a.partition.empty()) {
    try {
      part = parse_partition(a.partition, n);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else if (n == 2) {
    part = bipartitions(2).front();
  }

  if (a.measure == "SYN") {
    Diagnostics d;
    double v;
    if (part) {
      auto set = mo.side == Side::Effect ? SourceSet::future(*part) : SourceSet::past(*part);
      v = engine.shannon_synergy(set, d);
      if (mo.side == Side::Both) v = std::min(v, engine.shannon_synergy(SourceSet::future(*part), d));
      std::cout << "partition: " << part->to_string() << '\n';
    } else {
      v = network_synergy(engine, mo.side, d);
      std::cout << "partition: min over bipartitions\n";
    }
    std::cout << "measure: SYN\nside: " << to_string(mo.side) << "\nvalue: " << full(v) << "\ndisplay: " << round3(v) << '\n';
    print_diag(std::cout, d);
    return kOk;
  }

  auto kind = kind_from(a.measure);
  if (!kind) throw UsageError("unknown measure '" + a.measure + "' (S1|S2|S3|S4|IIT4|MI|ID|SYN)");
  if (!part) throw UsageError("--partition is required for networks with more than two nodes");
  auto r = engine.evaluate(*kind, s, *part);
  std::cout << "partition: " << r.partition.to_string() << '\n'
            << "measure: " << to_string(r.kind) << '\n';
  if (*kind == MeasureKind::S1 || *kind == MeasureKind::IIT4)
    std::cout << "side: " << to_string(r.side) << '\n' << "cause: " << full(r.cause) << '\n' << "effect: " << full(r.effect) << '\n';
  std::cout << "value: " << full(r.value) << '\n'
            << "display: " << display(r.value, r.diag.bounded) << '\n'
            << "normalizer: " << full(r.normalizer) << '\n';
  print_diag(std::cout, r.diag);
  return r.diag.infinite ? kCompute : kOk;
}

struct MipArgs {
  std::string network, state, measure = "S1", side = "both";
  bool normalized = false, unnormalized = false;
  double tol = 1e-9;
};

int cmd_mip(const MipArgs& a) {
  auto spec = load_network(a.network);
  auto tpm = build_tpm(spec);
  CausalTriple t(tpm);
  auto kind = kind_from(a.measure);
  if (!kind) throw UsageError("unknown measure '" + a.measure + "' (S1|S2|S3|S4|IIT4)");
  if (a.normalized && a.unnormalized) throw UsageError("--normalized and --unnormalized are exclusive");
  // IIT4 normalizes by default; synergy measures default to the bipartition shortcut.
  Normalization norm = a.normalized ? Normalization::Normalized
                       : a.unnormalized ? Normalization::Unnormalized
                       : *kind == MeasureKind::IIT4 ? Normalization::Normalized
                                                    : Normalization::Unnormalized;
  MeasureOptions mo;
  mo.tol = a.tol;
  mo.max_iterations = SolverOptions::from_env().max_iterations;
  mo.side = side_from(a.side);
  MeasureEngine engine(t, mo);
  std::cout << "network: " << spec.name << "\nmeasure: " << to_string(*kind) << "\nside: " << to_string(mo.side)
            << "\nnormalization: " << (norm == Normalization::Normalized ? "normalized" : "unnormalized") << '\n';

  std::vector<State> states;
  if (!a.state.empty()) states.push_back(state_arg(t, a.state));
  else states = t.reachable_states();

  bool infinite = false;
  for (State s : states) {
    auto m = engine.find_mip(s, *kind, norm);
    infinite = infinite || m.result.diag.infinite;
    std::cout << "state " << format_state(s, t.nodes()) << ": partition " << m.partition.to_string() << " score "
              << full(m.score) << " value " << full(m.result.value) << " display " << display(m.result.value, m.result.diag.bounded)
              << '\n';
  }
  if (a.state.empty()) {
    auto per = expected_at_state_mip(engine, *kind, norm);
    std::cout << "expected (per-state MIP): " << full(per.mean) << " display " << display(per.mean, per.diag.bounded) << '\n';
    if (*kind != MeasureKind::IIT4) {
      auto net = expected_at_network_mip(engine, *kind);
      std::cout << "expected (network MIP " << net.partition->to_string() << "): " << full(net.mean) << " display "
                << display(net.mean, net.diag.bounded) << '\n';
    }
  }
  return infinite ? kCompute : kOk;
}

struct BatteryArgs {
  std::string suite, format = "csv", out, sidecar;
  bool check = false;
  double tol = 1e-9;
  unsigned threads = 0;
};

int cmd_battery(const BatteryArgs& a) {
  auto suite = parse_suite(a.suite);
  if (!suite) throw UsageError("unknown suite '" + a.suite + "' (table1|figure2|appendix4|appendixE)");
  Format fmt;
  if (a.format == "csv") fmt = Format::Csv;
  else if (a.format == "json") fmt = Format::Json;
  else if (a.format == "markdown" || a.format == "md") fmt = Format::Markdown;
  else throw UsageError("unknown format '" + a.format + "' (csv|json|markdown)");

  ReportOptions ro;
  ro.tol = a.tol;
  ro.max_iterations = SolverOptions::from_env().max_iterations;
  ro.threads = a.threads;
  if (!a.sidecar.empty()) {
    std::ifstream in(a.sidecar, std::ios::binary);
    if (!in) throw UsageError("cannot read sidecar " + a.sidecar);
    std::stringstream buf;
    buf << in.rdbuf();
    ro.sidecar = parse_sidecar(buf.str());
  }
  auto table = run_suite(*suite, ro);
  auto text = render(table, fmt);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw UsageError("cannot write " + a.out);
    out << text;
  }
  for (auto& r : table.rows)
    for (std::size_t i = 0; i < r.cells.size(); ++i)
      if (!r.cells[i].error.empty()) std::cerr << "ERR " << r.network << " " << table.columns[i].key << ": " << r.cells[i].error << '\n';
  if (table.has_errors()) return kCompute;

  if (a.check) {
    int failed = 0;
    for (auto& o : check_table(table)) {
      if (o.excluded) {
        std::cerr << "EXCLUDED " << o.network << " " << o.column << " (topology columns do not match)\n";
        continue;
      }
      if (!o.pass) {
        ++failed;
        std::cerr << "MISMATCH " << o.network << " " << o.column << ": expected " << round3(o.expected) << ", got "
                  << (o.actual ? full(*o.actual) : std::string("none")) << '\n';
      }
    }
    if (failed) return kRegression;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synergy-based integration measures and the IIT4 baseline for small binary networks"};
  app.require_subcommand(1);

  std::string tpm_net;
  auto* tpm = app.add_subcommand("tpm", "print a network's transition table");
  tpm->add_option("network", tpm_net, "builtin name or network file")->required();

  MeasureArgs ma;
  auto* meas = app.add_subcommand("measure", "evaluate one measure at one state and partition");
  meas->add_option("--network", ma.network, "builtin name or network file")->required();
  meas->add_option("--state", ma.state, "present state, node 0 first (e.g. 10)");
  meas->add_option("--partition", ma.partition, "blocks of 1-based nodes, e.g. \"1|2,3\"; suffix < or > for directional cuts");
  meas->add_option("--measure", ma.measure, "S1|S2|S3|S4|IIT4|MI|ID|SYN")->capture_default_str();
  meas->add_option("--side", ma.side, "cause|effect|both (S1, IIT4, SYN)")->capture_default_str();
  meas->add_option("--tol", ma.tol, "union solver optimality tolerance, bits")->capture_default_str();
  meas->add_option("--exact-limit", ma.exact_limit, "largest source set solved exactly; larger sets use the proxy bound")
      ->capture_default_str();

  BatteryArgs ba;
  auto* bat = app.add_subcommand("battery", "reproduce a comparison table over the builtin networks");
  bat->add_option("--suite", ba.suite, "table1|figure2|appendix4|appendixE")->required();
  bat->add_option("--format", ba.format, "csv|json|markdown")->capture_default_str();
  bat->add_option("--out", ba.out, "output path (default: stdout)");
  bat->add_option("--sidecar", ba.sidecar, "legacy column values, lines of network,column,value");
  bat->add_flag("--check", ba.check, "compare against the published values; exit 3 on mismatch");
  bat->add_option("--tol", ba.tol, "union solver optimality tolerance, bits")->capture_default_str();
  bat->add_option("--threads", ba.threads, "worker threads (0 = all cores)")->capture_default_str();

  MipArgs mi;
  auto* mip = app.add_subcommand("mip", "search the minimum information partition");
  mip->add_option("--network", mi.network, "builtin name or network file")->required();
  mip->add_option("--state", mi.state, "present state; omitted = every reachable state plus expectations");
  mip->add_option("--measure", mi.measure, "S1|S2|S3|S4|IIT4")->capture_default_str();
  mip->add_option("--side", mi.side, "cause|effect|both (S1, IIT4)")->capture_default_str();
  mip->add_flag("--normalized", mi.normalized, "divide by the bound before minimizing");
  mip->add_flag("--unnormalized", mi.unnormalized, "minimize raw values (synergy: bipartitions only)");
  mip->add_option("--tol", mi.tol, "union solver optimality tolerance, bits")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*tpm) return cmd_tpm(tpm_net);
    if (*meas) return cmd_measure(ma);
    if (*bat) return cmd_battery(ba);
    if (*mip) return cmd_mip(mi);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCompute;
  }
  return kUsage;
}
