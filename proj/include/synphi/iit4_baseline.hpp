#pragma once

#include <cstdint>
#include <vector>

#include "synphi/partition.hpp"
#include "synphi/probcore.hpp"

namespace synphi {

struct CauseEffectState {
  // Every state attaining the max; a_prime / z_prime are the lowest-index ones.
  std::vector<State> cause_candidates;
  std::vector<State> effect_candidates;
  State a_prime = 0;
  State z_prime = 0;
  double ii_c = 0;
  double ii_e = 0;
};

// Cause half only (effect fields left empty). Throws std::domain_error on unreachable s.
CauseEffectState intrinsic_info_cause(const CausalTriple& triple, State s);
// Effect half only.
CauseEffectState intrinsic_info_effect(const CausalTriple& triple, State s);
CauseEffectState maximal_states(const CausalTriple& triple, State s);

struct CutSystem {
  Partition partition;
  std::vector<std::uint32_t> severed;  // per target node, severed source mask

  explicit CutSystem(Partition p) : partition(std::move(p)), severed(partition.severed()) {}
};

// p^θ(to | from): each node's severed inputs are averaged over their uniform
// distribution, nodes combine as a product. Rows sum to 1. The same kernel
// serves both the cause (p^θ(s|a)) and effect (p^θ(z|s)) directions.
class CutKernel {
 public:
  CutKernel(const TransitionModel& tpm, const std::vector<std::uint32_t>& severed);

  double prob(State from, State to) const;
  int nodes() const { return n_; }

 private:
  int n_;
  std::vector<std::vector<double>> on_;  // on_[i][from] = p(node i -> 1 | from)
};

CutKernel causal_marginalize(const TransitionModel& tpm, const CutSystem& cut);

// +infinity when the cut kernel assigns zero to a transition the system makes.
double phi_c_2023(const CausalTriple& triple, State s, State a_prime, const CutSystem& cut);
double phi_e_2023(const CausalTriple& triple, State s, State z_prime, const CutSystem& cut);

// Tied maximal states are resolved at this cut by smallest value.
double phi_c_2023(const CausalTriple& triple, State s, const Partition& partition);
double phi_e_2023(const CausalTriple& triple, State s, const Partition& partition);
double phi_s_2023(const CausalTriple& triple, State s, const Partition& partition);

struct Iit4Result {
  State s = 0;
  State a_prime = 0;
  State z_prime = 0;
  Partition mip;
  double phi_c = 0;
  double phi_e = 0;
  double phi_s = 0;
  double normalizer = 1;  // severed edge count under normalization
  bool infinite = false;
};

// Per-state MIP over directional partitions. Normalized mode minimizes
// φ_s / (severed edges) and breaks exact ties toward the larger φ_s.
// Across tied maximal cause states the smallest φ_s (then φ_c) wins.
Iit4Result iit4_evaluate(const CausalTriple& triple, State s, bool normalized = true);
Iit4Result iit4_evaluate(const CausalTriple& triple, State s, const std::vector<Partition>& candidates,
                         bool normalized);

}  // namespace synphi
