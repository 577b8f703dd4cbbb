#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>

#include "synphi/integration_measures.hpp"
#include "synphi/netspec.hpp"

using namespace synphi;

namespace {

// Engines hold a reference, so triples live for the whole test binary.
const CausalTriple& triple(const std::string& name) {
  static std::map<std::string, std::unique_ptr<CausalTriple>> cache;
  auto& slot = cache[name];
  if (!slot) slot = std::make_unique<CausalTriple>(build_tpm(*find_builtin(name)));
  return *slot;
}

State st(const char* s) { return *parse_state(s, static_cast<int>(std::string(s).size())); }

MeasureOptions side(Side s) {
  MeasureOptions o;
  o.side = s;
  return o;
}

// Node 0 = XOR of both nodes flipped with probability eps, node 1 copies node 0.
CausalTriple noisy_xor(double eps) {
  std::vector<double> k(16, 0.0);
  for (State a = 0; a < 4; ++a) {
    int x = (a & 1) ^ ((a >> 1) & 1);
    State keep = (a & 1) << 1;
    k[a * 4 + (static_cast<State>(x) | keep)] += 1 - eps;
    k[a * 4 + (static_cast<State>(1 - x) | keep)] += eps;
  }
  return CausalTriple::from_kernel(2, k);
}

}  // namespace

TEST(Measures, SourceSets) {
  auto p = parse_partition("1|2,3", 3);
  EXPECT_EQ(SourceSet::past(p).sources.size(), 2u);
  EXPECT_EQ(SourceSet::omega(p).sources.size(), 4u);
  auto bj = SourceSet::block_joint(p);
  ASSERT_EQ(bj.sources.size(), 2u);
  EXPECT_EQ(bj.sources[0].size(), 2u);
  auto loo = SourceSet::leave_one_out(p);
  ASSERT_EQ(loo.sources.size(), 4u);
  for (auto& s : loo.sources) EXPECT_EQ(s.size(), 3u);
}

TEST(Measures, S1TableExamples) {
  {
    MeasureEngine e(triple("AND-ZERO"), side(Side::Cause));
    EXPECT_NEAR(expected_at_network_mip(e, MeasureKind::S1).mean, 0.354, 5e-4);
  }
  {
    MeasureEngine e(triple("XOR-XOR"), side(Side::Cause));
    EXPECT_NEAR(expected_at_network_mip(e, MeasureKind::S1).mean, 0.5, 1e-6);
    // per state, consistent with the mean
    auto r = e.phi_s1(st("00"), bipartitions(2).front());
    EXPECT_NEAR(r.value, 0.5, 1e-6);
  }
  {
    MeasureEngine e(triple("GET3"), side(Side::Cause));
    EXPECT_NEAR(expected_at_network_mip(e, MeasureKind::S1).mean, 0.0, 1e-9);
  }
}

TEST(Measures, S1BothSidesZeroOnDoublets) {
  for (auto& spec : builtin_battery()) {
    if (spec.size() != 2) continue;
    MeasureEngine e(triple(spec.name));
    for (State s : e.triple().reachable_states()) EXPECT_NEAR(e.phi_s1(s, bipartitions(2).front()).value, 0.0, 1e-9) << spec.name;
  }
}

TEST(Measures, S1BelowEachSidesBound) {
  for (auto name : {"AND-XOR", "XOR-XOR", "121", "123"}) {
    auto t = triple(name);
    MeasureEngine both(t), c(t, side(Side::Cause)), ef(t, side(Side::Effect));
    for (State s : t.reachable_states())
      for (auto& p : bipartitions(t.nodes())) {
        double v = both.phi_s1(s, p).value;
        EXPECT_LE(v, c.phi_s1(s, p).value + 1e-12);
        EXPECT_LE(v, ef.phi_s1(s, p).value + 1e-12);
        EXPECT_LE(v, std::min(c.phi_s1(s, p).normalizer, ef.phi_s1(s, p).normalizer) + 1e-6) << name;
      }
  }
}

TEST(Measures, ZeroZeroIsZeroEverywhere) {
  MeasureEngine e(triple("ZERO-ZERO"));
  auto p = bipartitions(2).front();
  for (auto k : {MeasureKind::S1, MeasureKind::S2, MeasureKind::S3, MeasureKind::S4, MeasureKind::IIT4})
    EXPECT_EQ(e.evaluate(k, 0, p).value, 0.0);
  auto rep = e.ordering_check(0, p);
  EXPECT_TRUE(rep.holds);
}

TEST(Measures, S2IsTheLabeledProxy) {
  // XOR-ZERO, s = 00: the value equals ID[p(A,Z)->s] minus the best single source.
  auto t = triple("XOR-ZERO");
  MeasureEngine e(t);
  auto p = bipartitions(2).front();
  auto r = e.phi_s2(st("00"), p);
  EXPECT_TRUE(r.diag.bounded);
  auto sys = PredictorSystem::from_triple(t, SourceSet::omega(p).sources);
  double best = 0;
  for (std::size_t i = 0; i < 4; ++i) best = std::max(best, sys.single_intrinsic_difference(i, st("00")));
  EXPECT_NEAR(r.value, std::max(0.0, sys.intrinsic_difference(st("00")) - best), 1e-12);
  EXPECT_NEAR(r.normalizer, sys.intrinsic_difference(st("00")), 1e-12);
}

TEST(Measures, S3GetGetIsZero) {
  MeasureEngine e(triple("GET-GET"));
  for (State s = 0; s < 4; ++s) {
    auto r = e.phi_s3(s, bipartitions(2).front());
    EXPECT_NEAR(r.value, 0.0, 1e-6);
    EXPECT_FALSE(r.diag.bounded);
  }
}

TEST(Measures, S3XorXorWithinProxy) {
  MeasureEngine e(triple("XOR-XOR"));
  auto p = bipartitions(2).front();
  for (State s : e.triple().reachable_states()) {
    double s3 = e.phi_s3(s, p).value;
    EXPECT_GE(s3, 0.0);
    EXPECT_LE(s3, e.phi_s2(s, p).value + 1e-6);
  }
}

TEST(Measures, S4ZeroOnDeterministicNetworks) {
  for (auto& spec : builtin_battery()) {
    CausalTriple t(build_tpm(spec));
    MeasureEngine e(t);
    for (State s : t.reachable_states())
      for (auto& p : bipartitions(t.nodes())) EXPECT_EQ(e.phi_s4(s, p).value, 0.0) << spec.name;
  }
}

TEST(Measures, StochasticS4BetweenZeroAndS3) {
  for (double eps : {0.05, 0.1, 0.25}) {
    auto t = noisy_xor(eps);
    MeasureEngine e(t);
    auto p = bipartitions(2).front();
    for (State s : t.reachable_states()) {
      auto r = e.ordering_check(s, p);
      EXPECT_GE(r.s4, 0.0);
      EXPECT_LE(r.s4, r.s3 + 1e-6);
      EXPECT_GT(r.s3, 0.0) << "noise should leave some block-joint synergy";
    }
  }
}

TEST(Measures, BlockOrderDoesNotMatter) {
  auto t = triple("4321");
  MeasureEngine e(t);
  Partition a(4, {0b0011, 0b1100}), b(4, {0b1100, 0b0011});
  for (State s : t.reachable_states()) {
    EXPECT_EQ(e.phi_s1(s, a).value, e.phi_s1(s, b).value);
    EXPECT_EQ(e.phi_s3(s, a).value, e.phi_s3(s, b).value);
  }
}

TEST(Measures, DoubletMipIsTheOnlyBipartition) {
  MeasureEngine e(triple("AND-XOR"));
  for (State s : e.triple().reachable_states())
    for (auto k : {MeasureKind::S1, MeasureKind::S3})
      for (auto n : {Normalization::Normalized, Normalization::Unnormalized})
        EXPECT_EQ(e.find_mip(s, k, n).partition.to_string(), "1|2");
}

TEST(Measures, NormalizedMipSkipsZeroBounds) {
  MeasureEngine e(triple("ZERO-ZERO"));
  auto m = e.find_mip(0, MeasureKind::S1, Normalization::Normalized);
  EXPECT_EQ(m.result.value, 0.0);
  EXPECT_EQ(m.score, 0.0);
}

TEST(Measures, FigureTwoExamples) {
  MeasureEngine get3(triple("GET3"), side(Side::Cause));
  EXPECT_NEAR(expected_at_state_mip(get3, MeasureKind::IIT4, Normalization::Normalized).mean, 2.0, 1e-9);
  MeasureEngine n123(triple("123"), side(Side::Cause));
  EXPECT_NEAR(expected_at_network_mip(n123, MeasureKind::S1).mean, 0.604, 5e-4);
  Diagnostics d;
  EXPECT_NEAR(network_synergy(n123, Side::Cause, d), 1.0, 1e-6);
  EXPECT_NEAR(network_synergy(get3, Side::Cause, d), 0.0, 1e-6);
}

TEST(Measures, UnnormalizedMipIsABipartition) {
  MeasureEngine e(triple("4321"), side(Side::Cause));
  for (State s : e.triple().reachable_states()) EXPECT_EQ(e.find_mip(s, MeasureKind::S1, Normalization::Unnormalized).partition.k(), 2);
  EXPECT_NEAR(expected_at_network_mip(e, MeasureKind::S1).mean, 0.455, 5e-4);
}

TEST(Measures, MipBudget) {
  NetworkSpec big;
  big.name = "RING7";
  for (int i = 0; i < 7; ++i) big.nodes.push_back({GateKind::Copy, std::nullopt, {(i + 6) % 7}});
  CausalTriple t(build_tpm(big));
  MeasureEngine e(t);
  EXPECT_THROW(e.find_mip(0, MeasureKind::S1, Normalization::Unnormalized), BudgetError);
}

TEST(Measures, UnreachableStateRejected) {
  MeasureEngine e(triple("AND-ZERO"));
  EXPECT_THROW(e.phi_s1(st("11"), bipartitions(2).front()), std::domain_error);
}

TEST(Measures, ExactLimitSwitchesToProxy) {
  MeasureOptions o;
  o.exact_predictor_limit = 1;
  MeasureEngine e(triple("AND-XOR"), o);
  auto r = e.phi_s1(st("10"), bipartitions(2).front());
  EXPECT_TRUE(r.diag.bounded);
}
