#include <gtest/gtest.h>

#include <cmath>

#include "support/oracle.hpp"
#include "synphi/integration_measures.hpp"
#include "synphi/netspec.hpp"
#include "synphi/pid_solver.hpp"

using namespace synphi;

namespace {

// Two uniform input bits into Y = f(x1, x2).
template <class F>
PredictorSystem gate(F f) {
  std::vector<PredictorSystem::Entry> e;
  for (std::uint32_t a = 0; a < 2; ++a)
    for (std::uint32_t b = 0; b < 2; ++b) e.push_back({{a, b}, static_cast<std::uint32_t>(f(a, b)), 0.25});
  return PredictorSystem({2, 2}, 2, e);
}

PredictorSystem doublet_cause(const std::string& name) {
  CausalTriple t(build_tpm(*find_builtin(name)));
  return PredictorSystem::from_triple(t, SourceSet::past(bipartitions(2).front()).sources);
}

const char* kDoublets[] = {"ZERO-ZERO", "KEEP-ZERO", "KEEP-KEEP", "GET-ZERO", "GET-KEEP", "GET-GET",
                           "AND-ZERO",  "AND-KEEP",  "AND-GET",   "AND-AND",  "AND-XOR",  "XOR-ZERO",
                           "XOR-KEEP",  "XOR-GET",   "XOR-AND",   "XOR-XOR"};

}  // namespace

TEST(PidSolver, XorUnionIsZero) {
  auto sys = gate([](auto a, auto b) { return a ^ b; });
  auto u = solve_union(sys);
  EXPECT_NEAR(u.objective, 0.0, 1e-8);
  EXPECT_NEAR(synergy(sys, u), 1.0, 1e-8);
  EXPECT_LE(u.feasibility_residual, 1e-9);
}

TEST(PidSolver, AndUnionInformation) {
  auto sys = gate([](auto a, auto b) { return a & b; });
  auto u = solve_union(sys);
  EXPECT_NEAR(u.objective, 0.311, 5e-4);
  EXPECT_NEAR(synergy(sys, u), 0.5, 1e-6);
  EXPECT_NEAR(synergy_bound(sys), 0.5, 1e-12);
}

TEST(PidSolver, XorSynergyBound) {
  auto sys = gate([](auto a, auto b) { return a ^ b; });
  EXPECT_NEAR(synergy_bound(sys), 1.0, 1e-12);
}

TEST(PidSolver, SinglePredictorPinsTheJoint) {
  PredictorSystem sys({3}, 2, {{{0}, 0, 0.2}, {{1}, 0, 0.3}, {{1}, 1, 0.1}, {{2}, 1, 0.4}});
  auto u = solve_union(sys);
  EXPECT_NEAR(u.objective, sys.mutual_information(), 1e-12);
  EXPECT_EQ(u.iterations, 0);
  EXPECT_NEAR(synergy(sys, u), 0.0, 1e-12);
  EXPECT_NEAR(synergy_bound(sys), 0.0, 1e-12);
  EXPECT_NEAR(union_max_upper_proxy(sys, 0), 0.0, 1e-12);
}

TEST(PidSolver, ObjectiveNeverExceedsOriginal) {
  for (auto name : kDoublets) {
    auto sys = doublet_cause(name);
    auto u = solve_union(sys);
    EXPECT_LE(u.objective, sys.mutual_information() + 1e-9) << name;
    EXPECT_LE(u.feasibility_residual, 1e-9) << name;
    EXPECT_LE(u.optimality_gap, 1e-9) << name;
  }
}

TEST(PidSolver, TableSynergyValues) {
  EXPECT_NEAR(synergy(doublet_cause("XOR-ZERO"), solve_union(doublet_cause("XOR-ZERO"))), 1.0, 1e-6);
  EXPECT_NEAR(synergy(doublet_cause("AND-ZERO"), solve_union(doublet_cause("AND-ZERO"))), 0.5, 1e-6);
  EXPECT_NEAR(synergy(doublet_cause("GET-GET"), solve_union(doublet_cause("GET-GET"))), 0.0, 1e-6);
}

TEST(PidSolver, MatchesBruteForceOracle) {
  for (auto name : kDoublets) {
    auto sys = doublet_cause(name);
    oracle::BinaryPairOracle search(sys);
    double brute = search.search(500);
    EXPECT_NEAR(solve_union(sys).objective, brute, 1e-3) << name;
  }
}

TEST(PidSolver, OracleSanity) {
  // The oracle itself: never above the original joint, and lands on AND's 0.311.
  auto sys = gate([](auto a, auto b) { return a & b; });
  oracle::BinaryPairOracle search(sys);
  EXPECT_EQ(search.parameters(), 2u);
  EXPECT_LE(search.search(50), sys.mutual_information() + 1e-12);
  EXPECT_NEAR(search.search(50), 0.311, 1e-3);
}

TEST(PidSolver, PermutationEquivariance) {
  for (auto name : {"AND-ZERO", "AND-XOR", "XOR-AND", "AND-GET"}) {
    auto sys = doublet_cause(name);
    auto swapped = sys.permuted({1, 0});
    auto u = solve_union(sys), v = solve_union(swapped);
    EXPECT_NEAR(synergy(sys, u), synergy(swapped, v), 1e-7) << name;
    for (std::uint32_t y = 0; y < sys.target_card(); ++y) {
      if (!(sys.p_y()[y] > 0)) continue;
      EXPECT_NEAR(synergistic_id(sys, u, y).value, synergistic_id(swapped, v, y).value, 1e-6) << name;
    }
  }
}

TEST(PidSolver, BoundsOnDoublets) {
  for (auto name : kDoublets) {
    auto sys = doublet_cause(name);
    auto u = solve_union(sys);
    double syn = synergy(sys, u);
    EXPECT_GE(syn, 0.0) << name;
    EXPECT_LE(syn, synergy_bound(sys) + 1e-6) << name;
    for (std::uint32_t y = 0; y < sys.target_card(); ++y) {
      if (!(sys.p_y()[y] > 0)) continue;
      auto v = synergistic_id(sys, u, y);
      EXPECT_GE(v.value, 0.0);
      EXPECT_LE(v.value, v.bound + 1e-6) << name << " y=" << y;
      EXPECT_FALSE(v.exceeds_bound);
    }
  }
}

TEST(PidSolver, XorZeroProxyEqualsFullId) {
  auto sys = doublet_cause("XOR-ZERO");
  for (std::uint32_t y = 0; y < sys.target_card(); ++y) {
    if (!(sys.p_y()[y] > 0)) continue;
    EXPECT_NEAR(union_max_upper_proxy(sys, y), sys.intrinsic_difference(y), 1e-12);
  }
}

TEST(PidSolver, Deterministic) {
  auto sys = doublet_cause("AND-AND");
  auto a = solve_union(sys), b = solve_union(sys);
  ASSERT_EQ(a.q.size(), b.q.size());
  for (std::size_t i = 0; i < a.q.size(); ++i) EXPECT_EQ(a.q[i].mass, b.q[i].mass);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(PidSolver, IterationBudgetIsReported) {
  auto sys = gate([](auto a, auto b) { return a & b; });
  SolverOptions o;
  o.max_iterations = 2;
  try {
    solve_union(sys, o);
    FAIL() << "budget not enforced";
  } catch (const SolverError& e) {
    EXPECT_GT(e.gap(), 0.0);
  }
}

TEST(PidSolver, MismatchedPairRejected) {
  auto a = gate([](auto x, auto y) { return x & y; });
  auto b = doublet_cause("AND-ZERO");
  auto u = solve_union(b);
  EXPECT_THROW(synergy(a, u), std::invalid_argument);
}

TEST(PidSolver, RejectsBadInput) {
  EXPECT_THROW(PredictorSystem({2}, 2, {{{0}, 0, 0.5}}), std::invalid_argument);
  SolverOptions o;
  o.tol = 0;
  EXPECT_THROW(solve_union(gate([](auto x, auto y) { return x | y; }), o), std::invalid_argument);
}

TEST(PidSolver, EnvOverridesIterationCap) {
  ::setenv("SYNPHI_SOLVER_MAX_ITERS", "77", 1);
  EXPECT_EQ(SolverOptions::from_env().max_iterations, 77);
  ::unsetenv("SYNPHI_SOLVER_MAX_ITERS");
  EXPECT_EQ(SolverOptions::from_env().max_iterations, 100000);
}
