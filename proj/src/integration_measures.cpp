#include "synphi/integration_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace synphi {

namespace {

constexpr double kTie = 1e-12;
constexpr double kChainSlack = 1e-6;
constexpr int kMipNodeBudget = 6;

std::string key_of(const SourceSet& set) {
  std::ostringstream k;
  for (auto& sel : set.sources) {
    k << '[';
    for (auto& v : sel) k << static_cast<int>(v.side) << ':' << v.block << ';';
    k << ']';
  }
  return k.str();
}

double side_value(Side side, double c, double e) {
  switch (side) {
    case Side::Cause: return c;
    case Side::Effect: return e;
    case Side::Both: return std::min(c, e);
  }
  return 0;
}

}  // namespace

const char* to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::S1: return "S1";
    case MeasureKind::S2: return "S2";
    case MeasureKind::S3: return "S3";
    case MeasureKind::S4: return "S4";
    case MeasureKind::IIT4: return "IIT4";
  }
  return "?";
}

const char* to_string(Side s) {
  switch (s) {
    case Side::Cause: return "cause";
    case Side::Effect: return "effect";
    case Side::Both: return "both";
  }
  return "?";
}

void Diagnostics::merge(const Diagnostics& o) {
  feasibility_residual = std::max(feasibility_residual, o.feasibility_residual);
  optimality_gap = std::max(optimality_gap, o.optimality_gap);
  iterations += o.iterations;
  bounded = bounded || o.bounded;
  infinite = infinite || o.infinite;
  clamp_count += o.clamp_count;
  over_bound_count += o.over_bound_count;
}

SourceSet SourceSet::past(const Partition& p) {
  SourceSet out;
  for (auto b : p.blocks()) out.sources.push_back({{Component::Past, b}});
  return out;
}

SourceSet SourceSet::future(const Partition& p) {
  SourceSet out;
  for (auto b : p.blocks()) out.sources.push_back({{Component::Future, b}});
  return out;
}

SourceSet SourceSet::omega(const Partition& p) {
  SourceSet out = past(p);
  for (auto& f : future(p).sources) out.sources.push_back(f);
  return out;
}

SourceSet SourceSet::block_joint(const Partition& p) {
  SourceSet out;
  for (auto b : p.blocks()) out.sources.push_back({{Component::Past, b}, {Component::Future, b}});
  return out;
}

SourceSet SourceSet::leave_one_out(const Partition& p) {
  auto om = omega(p).sources;
  SourceSet out;
  for (std::size_t drop = 0; drop < om.size(); ++drop) {
    Selection joint;
    for (std::size_t j = 0; j < om.size(); ++j)
      if (j != drop) joint.insert(joint.end(), om[j].begin(), om[j].end());
    out.sources.push_back(std::move(joint));
  }
  return out;
}

MeasureEngine::MeasureEngine(const CausalTriple& triple, MeasureOptions opts) : triple_(triple), opts_(opts) {}

void MeasureEngine::check_state(State s) const {
  if (!triple_.reachable(s)) throw std::domain_error("state " + format_state(s, triple_.nodes()) + " is unreachable");
}

const MeasureEngine::Solved& MeasureEngine::solve(const SourceSet& set, bool need_union) {
  auto key = key_of(set);
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, std::make_unique<Solved>(Solved{PredictorSystem::from_triple(triple_, set.sources), std::nullopt})).first;
  auto& solved = *it->second;
  if (need_union && !solved.u) {
    SolverOptions so;
    so.tol = opts_.tol;
    so.max_iterations = opts_.max_iterations;
    solved.u = solve_union(solved.sys, so);
  }
  return solved;
}

SidValue MeasureEngine::sid(const SourceSet& set, State s, Diagnostics& diag) {
  check_state(s);
  const bool exact = set.sources.size() <= opts_.exact_predictor_limit;
  const auto& solved = solve(set, exact);
  if (!exact) {
    SidValue v;
    v.bound = solved.sys.intrinsic_difference(s);
    v.raw = v.value = union_max_upper_proxy(solved.sys, s);
    diag.bounded = true;
    return v;
  }
  auto v = synergistic_id(solved.sys, *solved.u, s);
  diag.feasibility_residual = std::max(diag.feasibility_residual, solved.u->feasibility_residual);
  diag.optimality_gap = std::max(diag.optimality_gap, solved.u->optimality_gap);
  diag.iterations += solved.u->iterations;
  if (v.clamped) ++diag.clamp_count;
  if (v.exceeds_bound) ++diag.over_bound_count;
  return v;
}

double MeasureEngine::shannon_synergy(const SourceSet& set, Diagnostics& diag) {
  const auto& solved = solve(set, true);
  diag.feasibility_residual = std::max(diag.feasibility_residual, solved.u->feasibility_residual);
  diag.optimality_gap = std::max(diag.optimality_gap, solved.u->optimality_gap);
  diag.iterations += solved.u->iterations;
  return synergy(solved.sys, *solved.u);
}

static MeasureResult blank(MeasureKind kind, Side side, State s, const Partition& p) {
  MeasureResult r;
  r.kind = kind;
  r.side = side;
  r.state = s;
  r.partition = p;
  return r;
}

MeasureResult MeasureEngine::phi_s1(State s, const Partition& p) {
  MeasureResult r;
  r.kind = MeasureKind::S1;
  r.side = opts_.side;
  r.state = s;
  r.partition = p;
  // Only the requested halves are solved.
  std::optional<SidValue> c, e;
  if (opts_.side != Side::Effect) c = sid(SourceSet::past(p), s, r.diag);
  if (opts_.side != Side::Cause) e = sid(SourceSet::future(p), s, r.diag);
  r.cause = c ? c->value : 0;
  r.effect = e ? e->value : 0;
  r.value = side_value(opts_.side, r.cause, r.effect);
  r.normalizer = opts_.side == Side::Cause ? c->bound : opts_.side == Side::Effect ? e->bound : std::min(c->bound, e->bound);
  return r;
}

MeasureResult MeasureEngine::phi_s2(State s, const Partition& p) {
  auto r = blank(MeasureKind::S2, Side::Both, s, p);
  auto v = sid(SourceSet::omega(p), s, r.diag);
  r.value = v.value;
  r.normalizer = v.bound;
  return r;
}

MeasureResult MeasureEngine::phi_s3(State s, const Partition& p) {
  auto r = blank(MeasureKind::S3, Side::Both, s, p);
  auto v = sid(SourceSet::block_joint(p), s, r.diag);
  r.value = v.value;
  r.normalizer = v.bound;
  return r;
}

MeasureResult MeasureEngine::phi_s4(State s, const Partition& p) {
  auto r = blank(MeasureKind::S4, Side::Both, s, p);
  auto v = sid(SourceSet::leave_one_out(p), s, r.diag);
  r.value = v.value;
  r.normalizer = v.bound;
  return r;
}

MeasureResult MeasureEngine::iit4(State s, const Partition& p) {
  auto ev = iit4_evaluate(triple_, s, {p}, false);
  auto r = blank(MeasureKind::IIT4, opts_.side, s, p);
  r.cause = ev.phi_c;
  r.effect = ev.phi_e;
  r.value = opts_.side == Side::Both ? ev.phi_s : side_value(opts_.side, ev.phi_c, ev.phi_e);
  r.normalizer = p.severed_edge_count();
  r.diag.infinite = ev.infinite;
  return r;
}

MeasureResult MeasureEngine::evaluate(MeasureKind kind, State s, const Partition& p) {
  if (p.nodes() != triple_.nodes()) throw std::invalid_argument("partition does not match the network size");
  switch (kind) {
    case MeasureKind::S1: return phi_s1(s, p);
    case MeasureKind::S2: return phi_s2(s, p);
    case MeasureKind::S3: return phi_s3(s, p);
    case MeasureKind::S4: return phi_s4(s, p);
    case MeasureKind::IIT4: return iit4(s, p);
  }
  throw std::logic_error("unknown measure kind");
}

OrderingReport MeasureEngine::ordering_check(State s, const Partition& p) {
  OrderingReport rep;
  auto r2 = phi_s2(s, p), r3 = phi_s3(s, p), r4 = phi_s4(s, p);
  rep.s2 = r2.value;
  rep.s3 = r3.value;
  rep.s4 = r4.value;
  rep.id_bound = r2.normalizer;
  rep.s2_bounded = r2.diag.bounded;
  rep.s3_bounded = r3.diag.bounded;
  rep.s4_bounded = r4.diag.bounded;
  auto check = [&](bool ok, const std::string& what, double lhs, double rhs) {
    if (ok) return;
    rep.holds = false;
    std::ostringstream m;
    m.precision(6);
    m << std::fixed << what << " (" << lhs << " vs " << rhs << ")";
    rep.violations.push_back(m.str());
  };
  check(rep.s4 >= -kChainSlack, "S4 < 0", rep.s4, 0.0);
  check(rep.s4 <= rep.s3 + kChainSlack, std::string("S4 > S3") + (rep.s4_bounded ? " [S4 proxy]" : ""), rep.s4, rep.s3);
  check(rep.s3 <= rep.s2 + kChainSlack, std::string("S3 > S2") + (rep.s2_bounded ? " [S2 proxy]" : ""), rep.s3, rep.s2);
  check(rep.s2 <= rep.id_bound + kChainSlack, "S2 > ID[p(A,Z)->s]", rep.s2, rep.id_bound);
  return rep;
}

MipResult MeasureEngine::find_mip(State s, MeasureKind kind, Normalization norm) {
  const int n = triple_.nodes();
  if (n < 2) throw std::invalid_argument("a MIP needs at least two nodes");
  if (n > kMipNodeBudget) throw BudgetError("MIP enumeration is limited to " + std::to_string(kMipNodeBudget) + " nodes");
  check_state(s);
  const bool normalized = norm == Normalization::Normalized;

  if (kind == MeasureKind::IIT4) {
    auto ev = iit4_evaluate(triple_, s, normalized);
    MipResult m;
    m.partition = ev.mip;
    m.result = blank(MeasureKind::IIT4, opts_.side, s, ev.mip);
    m.result.cause = ev.phi_c;
    m.result.effect = ev.phi_e;
    m.result.value = opts_.side == Side::Both ? ev.phi_s : side_value(opts_.side, ev.phi_c, ev.phi_e);
    m.result.normalizer = ev.normalizer;
    m.result.diag.infinite = ev.infinite;
    m.score = ev.normalizer > 0 ? ev.phi_s / ev.normalizer : ev.phi_s;
    return m;
  }

  auto candidates = normalized ? set_partitions(n) : bipartitions(n);
  std::optional<MipResult> best;
  for (auto& p : candidates) {
    auto r = evaluate(kind, s, p);
    if (normalized && !(r.normalizer > 0)) continue;  // value is exactly 0 there
    double score = normalized ? r.value / r.normalizer : r.value;
    if (!best || score < best->score - kTie) best = MipResult{p, r, score};
  }
  if (!best) {
    auto r = evaluate(kind, s, candidates.front());
    r.value = 0;
    best = MipResult{candidates.front(), r, 0};
  }
  return *best;
}

MeasureResult phi_s1(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o) {
  return MeasureEngine(t, o).phi_s1(s, p);
}
MeasureResult phi_s2(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o) {
  return MeasureEngine(t, o).phi_s2(s, p);
}
MeasureResult phi_s3(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o) {
  return MeasureEngine(t, o).phi_s3(s, p);
}
MeasureResult phi_s4(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o) {
  return MeasureEngine(t, o).phi_s4(s, p);
}
OrderingReport ordering_check(const CausalTriple& t, State s, const Partition& p, const MeasureOptions& o) {
  return MeasureEngine(t, o).ordering_check(s, p);
}
MipResult find_mip(const CausalTriple& t, State s, MeasureKind kind, Normalization norm, const MeasureOptions& o) {
  return MeasureEngine(t, o).find_mip(s, kind, norm);
}

StateSummary expected_at_state_mip(MeasureEngine& engine, MeasureKind kind, Normalization norm) {
  const auto& t = engine.triple();
  StateSummary out;
  out.min = std::numeric_limits<double>::infinity();
  out.max = -std::numeric_limits<double>::infinity();
  for (State s : t.reachable_states()) {
    auto m = engine.find_mip(s, kind, norm);
    out.diag.merge(m.result.diag);
    if (std::isinf(m.result.value)) continue;  // flagged, kept out of the mean
    out.mean += t.p_present(s) * m.result.value;
    out.min = std::min(out.min, m.result.value);
    out.max = std::max(out.max, m.result.value);
  }
  return out;
}

StateSummary expected_at_network_mip(MeasureEngine& engine, MeasureKind kind) {
  const auto& t = engine.triple();
  if (t.nodes() < 2) throw std::invalid_argument("a MIP needs at least two nodes");
  if (t.nodes() > kMipNodeBudget) throw BudgetError("MIP enumeration is limited to " + std::to_string(kMipNodeBudget) + " nodes");
  std::optional<StateSummary> best;
  for (auto& p : bipartitions(t.nodes())) {
    StateSummary cur;
    cur.min = std::numeric_limits<double>::infinity();
    cur.max = -std::numeric_limits<double>::infinity();
    cur.partition = p;
    for (State s : t.reachable_states()) {
      auto r = engine.evaluate(kind, s, p);
      cur.diag.merge(r.diag);
      if (std::isinf(r.value)) continue;
      cur.mean += t.p_present(s) * r.value;
      cur.min = std::min(cur.min, r.value);
      cur.max = std::max(cur.max, r.value);
    }
    if (!best || cur.mean < best->mean - kTie) best = cur;
  }
  return *best;
}

double network_synergy(MeasureEngine& engine, Side side, Diagnostics& diag) {
  double best = std::numeric_limits<double>::infinity();
  for (auto& p : bipartitions(engine.triple().nodes())) {
    double v = 0;
    if (side != Side::Effect) v = engine.shannon_synergy(SourceSet::past(p), diag);
    if (side == Side::Effect) v = engine.shannon_synergy(SourceSet::future(p), diag);
    if (side == Side::Both) v = std::min(v, engine.shannon_synergy(SourceSet::future(p), diag));
    best = std::min(best, v);
  }
  return best;
}

}  // namespace synphi
