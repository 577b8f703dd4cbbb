#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "synphi/probcore.hpp"

namespace synphi {

using Tuple = std::vector<std::uint32_t>;

// Sparse joint over (X_1..X_n, Y). Entries are merged and sorted by (y, x).
class PredictorSystem {
 public:
  struct Entry {
    Tuple x;
    std::uint32_t y;
    double mass;
  };

  PredictorSystem(std::vector<std::size_t> cards, std::size_t target_card, std::vector<Entry> entries);

  // Predictors are joint variables over the given selections; the target is the present state.
  static PredictorSystem from_triple(const CausalTriple& triple, const std::vector<Selection>& predictors);

  std::size_t predictor_count() const { return cards_.size(); }
  const std::vector<std::size_t>& cards() const { return cards_; }
  std::size_t target_card() const { return target_card_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<double>& p_y() const { return p_y_; }

  // p(x_i, y), dense cards[i] x target_card.
  std::vector<double> pairwise(std::size_t i) const;
  // Same system with predictor `i` first; used by equivariance tests.
  PredictorSystem permuted(const std::vector<std::size_t>& order) const;

  double mutual_information() const;
  double conditional_mutual_information(std::size_t i) const;  // I(X_1..X_n;Y | X_i)
  double intrinsic_difference(std::uint32_t y) const;          // ID[p(X_1..X_n) -> y]
  double single_intrinsic_difference(std::size_t i, std::uint32_t y) const;

 private:
  std::vector<std::size_t> cards_;
  std::size_t target_card_;
  std::vector<Entry> entries_;
  std::vector<double> p_y_;
};

struct SolverOptions {
  double tol = 1e-9;  // optimality gap, bits
  long max_iterations = 100000;
  // Reads SYNPHI_SOLVER_MAX_ITERS when set.
  static SolverOptions from_env(double tol = 1e-9);
};

struct UnionDistribution {
  std::vector<std::size_t> cards;
  std::size_t target_card = 0;
  std::vector<PredictorSystem::Entry> q;  // support: every (x, y) with p(x_i, y) > 0 for all i
  double objective = 0;                   // I_q(X;Y), bits
  double feasibility_residual = 0;        // L1 over all pairwise marginals
  double optimality_gap = 0;              // bits, barrier certificate
  long iterations = 0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, double gap)
      : std::runtime_error(what), residual_(residual), gap_(gap) {}
  double residual() const { return residual_; }
  double gap() const { return gap_; }

 private:
  double residual_;
  double gap_;
};

UnionDistribution solve_union(const PredictorSystem& sys, const SolverOptions& opts = {});

double synergy(const PredictorSystem& sys, const UnionDistribution& u, double tol = 1e-6);
double synergy_bound(const PredictorSystem& sys);

struct SidValue {
  double value = 0;  // raw clamped at 0; not capped at the bound
  double raw = 0;
  double bound = 0;  // ID[p(X_1..X_n) -> y]
  bool clamped = false;       // raw < 0
  bool exceeds_bound = false; // value > bound (possible under the joint max)
};

SidValue synergistic_id(const PredictorSystem& sys, const UnionDistribution& u, std::uint32_t y);
double union_max_upper_proxy(const PredictorSystem& sys, std::uint32_t y);

}  // namespace synphi
