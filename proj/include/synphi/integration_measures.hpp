#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synphi/iit4_baseline.hpp"
#include "synphi/partition.hpp"
#include "synphi/pid_solver.hpp"
#include "synphi/probcore.hpp"

namespace synphi {

enum class MeasureKind { S1, S2, S3, S4, IIT4 };
enum class Side { Cause, Effect, Both };
enum class Normalization { Normalized, Unnormalized };

const char* to_string(MeasureKind k);
const char* to_string(Side s);

struct MeasureOptions {
  double tol = 1e-9;
  long max_iterations = 100000;
  // Source sets larger than this use the max-substitution proxy.
  std::size_t exact_predictor_limit = 3;
  // S1 and IIT4: which half is reported (Both = the min of the two).
  Side side = Side::Both;
};

struct Diagnostics {
  double feasibility_residual = 0;
  double optimality_gap = 0;
  long iterations = 0;
  bool bounded = false;  // value is a proxy upper bound, not an exact solve
  bool infinite = false;
  int clamp_count = 0;       // S_ID raw values below zero
  int over_bound_count = 0;  // S_ID values above the ID bound

  void merge(const Diagnostics& o);
};

struct MeasureResult {
  MeasureKind kind = MeasureKind::S1;
  Side side = Side::Both;
  double value = 0;
  State state = 0;
  Partition partition;
  double normalizer = 0;  // ID bound (synergy kinds) or severed edge count (IIT4)
  double cause = 0;       // S1 / IIT4 halves
  double effect = 0;
  Diagnostics diag;
};

// Ω_θ and its derived predictor sets; every view is a (side, block) pair.
struct SourceSet {
  std::vector<Selection> sources;

  static SourceSet past(const Partition& p);          // {A_1..A_k}
  static SourceSet future(const Partition& p);        // {Z_1..Z_k}
  static SourceSet omega(const Partition& p);         // {A_1..A_k, Z_1..Z_k}
  static SourceSet block_joint(const Partition& p);   // {A_1Z_1, .., A_kZ_k}
  static SourceSet leave_one_out(const Partition& p); // {Ω \ x : x in Ω}
};

struct OrderingReport {
  double s2 = 0, s3 = 0, s4 = 0, id_bound = 0;
  bool s2_bounded = false, s3_bounded = false, s4_bounded = false;
  bool holds = true;
  std::vector<std::string> violations;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MipResult {
  Partition partition;
  MeasureResult result;
  double score = 0;  // normalized score (or the value itself when unnormalized)
};

// Caches union solves per source set; not thread-safe, use one per thread.
class MeasureEngine {
 public:
  explicit MeasureEngine(const CausalTriple& triple, MeasureOptions opts = {});
  // Holds a reference; a temporary triple would dangle.
  MeasureEngine(CausalTriple&&, MeasureOptions = {}) = delete;

  const CausalTriple& triple() const { return triple_; }
  const MeasureOptions& options() const { return opts_; }

  MeasureResult phi_s1(State s, const Partition& p);
  MeasureResult phi_s2(State s, const Partition& p);
  MeasureResult phi_s3(State s, const Partition& p);
  MeasureResult phi_s4(State s, const Partition& p);
  MeasureResult iit4(State s, const Partition& p);
  MeasureResult evaluate(MeasureKind kind, State s, const Partition& p);

  OrderingReport ordering_check(State s, const Partition& p);
  MipResult find_mip(State s, MeasureKind kind, Normalization norm);

  // S_ID(sources -> s): exact when small enough, otherwise the proxy.
  SidValue sid(const SourceSet& set, State s, Diagnostics& diag);
  // Shannon synergy of a source set into the present.
  double shannon_synergy(const SourceSet& set, Diagnostics& diag);

 private:
  struct Solved {
    PredictorSystem sys;
    std::optional<UnionDistribution> u;
  };
  const Solved& solve(const SourceSet& set, bool need_union);
  void check_state(State s) const;

  const CausalTriple& triple_;
  MeasureOptions opts_;
  std::map<std::string, std::unique_ptr<Solved>> cache_;
};

// Free-function forms; each builds a fresh engine.
MeasureResult phi_s1(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o = {});
MeasureResult phi_s2(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o = {});
MeasureResult phi_s3(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o = {});
MeasureResult phi_s4(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o = {});
OrderingReport ordering_check(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o = {});
MipResult find_mip(const CausalTriple& t, State s, MeasureKind kind, Normalization norm, const MeasureOptions& o = {});

// Network-level summaries over reachable states, weighted by p(s).
struct StateSummary {
  double mean = 0, min = 0, max = 0;
  Diagnostics diag;
  std::optional<Partition> partition;  // set for network-level MIPs
};

// ⟨value at the per-state MIP⟩.
StateSummary expected_at_state_mip(MeasureEngine& engine, MeasureKind kind, Normalization norm);
// min over bipartitions of ⟨value⟩: one fault line for the whole network.
StateSummary expected_at_network_mip(MeasureEngine& engine, MeasureKind kind);
// min over bipartitions of Shannon synergy of the past (cause) or future (effect) blocks.
double network_synergy(MeasureEngine& engine, Side side, Diagnostics& diag);

}  // namespace synphi
