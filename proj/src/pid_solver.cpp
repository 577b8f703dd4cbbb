#include "synphi/pid_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace synphi {

namespace {

struct EntryLess {
  bool operator()(const PredictorSystem::Entry& a, const PredictorSystem::Entry& b) const {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  }
};

std::map<Tuple, double> x_marginal(const std::vector<PredictorSystem::Entry>& es) {
  std::map<Tuple, double> out;
  for (auto& e : es) out[e.x] += e.mass;
  return out;
}

// H(Y | X) in bits from a sparse joint.
double cond_entropy(const std::vector<PredictorSystem::Entry>& es) {
  auto px = x_marginal(es);
  double h = 0;
  for (auto& e : es)
    if (e.mass > 0) h -= xlog2(e.mass, e.mass / px[e.x]);
  return h;
}

double id_from(const std::vector<PredictorSystem::Entry>& es, std::uint32_t y, double py) {
  auto px = x_marginal(es);
  double best = 0;  // some x always has p(x|y) >= p(x)
  for (auto& e : es) {
    if (e.y != y || e.mass <= 0) continue;
    double c = e.mass / py;
    best = std::max(best, xlog2(c, c / px[e.x]));
  }
  return best;
}

std::vector<PredictorSystem::Entry> project_to(const std::vector<PredictorSystem::Entry>& es, std::size_t i) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> acc;
  for (auto& e : es) acc[{e.x[i], e.y}] += e.mass;
  std::vector<PredictorSystem::Entry> out;
  for (auto& [k, m] : acc) out.push_back({{k.first}, k.second, m});
  return out;
}

void check_pair(const PredictorSystem& sys, const UnionDistribution& u) {
  if (u.cards != sys.cards() || u.target_card != sys.target_card())
    throw std::invalid_argument("union distribution was solved for a different predictor system");
}

}  // namespace

PredictorSystem::PredictorSystem(std::vector<std::size_t> cards, std::size_t target_card, std::vector<Entry> entries)
    : cards_(std::move(cards)), target_card_(target_card) {
  if (cards_.empty()) throw std::invalid_argument("predictor system needs at least one predictor");
  if (target_card_ == 0) throw std::invalid_argument("target cardinality must be positive");
  std::sort(entries.begin(), entries.end(), EntryLess{});
  double total = 0;
  for (auto& e : entries) {
    if (e.x.size() != cards_.size()) throw std::invalid_argument("predictor tuple has wrong arity");
    for (std::size_t i = 0; i < cards_.size(); ++i)
      if (e.x[i] >= cards_[i]) throw std::invalid_argument("predictor value out of range");
    if (e.y >= target_card_) throw std::invalid_argument("target value out of range");
    if (!(e.mass >= 0)) throw std::invalid_argument("negative mass");
    if (e.mass == 0) continue;
    total += e.mass;
    if (!entries_.empty() && entries_.back().y == e.y && entries_.back().x == e.x)
      entries_.back().mass += e.mass;
    else
      entries_.push_back(std::move(e));
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("predictor joint does not sum to 1");
  p_y_.assign(target_card_, 0.0);
  for (auto& e : entries_) p_y_[e.y] += e.mass;
}

PredictorSystem PredictorSystem::from_triple(const CausalTriple& triple, const std::vector<Selection>& predictors) {
  std::vector<std::size_t> cards;
  for (auto& sel : predictors) {
    int bits = selection_bits(sel);
    if (bits > 30) throw std::invalid_argument("predictor too wide");
    cards.push_back(std::size_t{1} << bits);
  }
  const Selection target{present_view(triple.nodes())};
  // One pass per predictor over the triple's support keeps entries aligned.
  std::vector<JointTable> tabs;
  std::vector<Entry> entries;
  entries.reserve(triple.entries().size());
  for (auto& e : triple.entries()) entries.push_back({Tuple(predictors.size()), e.s, e.mass});
  for (std::size_t i = 0; i < predictors.size(); ++i) {
    std::size_t k = 0;
    for (auto& e : triple.entries()) {
      // Project a single entry via a one-entry table lookup.
      std::uint32_t v = 0;
      int shift = 0;
      for (auto& view : predictors[i]) {
        State src = view.side == Component::Past ? e.a : view.side == Component::Present ? e.s : e.z;
        int bit = 0;
        for (int j = 0; j < triple.nodes(); ++j)
          if ((view.block >> j) & 1U) v |= ((src >> j) & 1U) << (shift + bit++);
        shift += bit;
      }
      entries[k++].x[i] = v;
    }
  }
  return PredictorSystem(std::move(cards), triple.state_count(), std::move(entries));
}

std::vector<double> PredictorSystem::pairwise(std::size_t i) const {
  std::vector<double> out(cards_.at(i) * target_card_, 0.0);
  for (auto& e : entries_) out[e.x[i] * target_card_ + e.y] += e.mass;
  return out;
}

PredictorSystem PredictorSystem::permuted(const std::vector<std::size_t>& order) const {
  if (order.size() != cards_.size()) throw std::invalid_argument("permutation has wrong length");
  std::vector<std::size_t> cards;
  for (auto i : order) cards.push_back(cards_.at(i));
  std::vector<Entry> es;
  for (auto& e : entries_) {
    Tuple x;
    for (auto i : order) x.push_back(e.x[i]);
    es.push_back({x, e.y, e.mass});
  }
  return PredictorSystem(std::move(cards), target_card_, std::move(es));
}

double PredictorSystem::mutual_information() const {
  double hy = 0;
  for (double p : p_y_) hy -= xlog2(p, p);
  return std::max(0.0, hy - cond_entropy(entries_));
}

double PredictorSystem::conditional_mutual_information(std::size_t i) const {
  // I(X;Y|X_i) = H(Y|X_i) - H(Y|X) since X_i is a function of X.
  return std::max(0.0, cond_entropy(project_to(entries_, i)) - cond_entropy(entries_));
}

double PredictorSystem::intrinsic_difference(std::uint32_t y) const {
  if (y >= target_card_ || !(p_y_[y] > 0)) throw std::domain_error("intrinsic_difference: zero-probability target state");
  return id_from(entries_, y, p_y_[y]);
}

double PredictorSystem::single_intrinsic_difference(std::size_t i, std::uint32_t y) const {
  if (y >= target_card_ || !(p_y_[y] > 0)) throw std::domain_error("intrinsic_difference: zero-probability target state");
  return id_from(project_to(entries_, i), y, p_y_[y]);
}

SolverOptions SolverOptions::from_env(double tol) {
  SolverOptions o;
  o.tol = tol;
  if (const char* env = std::getenv("SYNPHI_SOLVER_MAX_ITERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) o.max_iterations = v;
  }
  return o;
}

// Log-barrier Newton method in the null space of the marginal constraints.
// The constraints only couple entries with the same y, so the null space is
// block diagonal; the objective couples entries sharing the same x.
UnionDistribution solve_union(const PredictorSystem& sys, const SolverOptions& opts) {
  if (!(opts.tol > 0)) throw std::invalid_argument("solve_union: tol must be positive");
  const std::size_t n = sys.predictor_count();
  const std::size_t Y = sys.target_card();
  std::vector<std::vector<double>> pw(n);
  for (std::size_t i = 0; i < n; ++i) pw[i] = sys.pairwise(i);
  const auto& py = sys.p_y();

  // Support and starting point q0 = p(y) prod_i p(x_i|y).
  std::vector<PredictorSystem::Entry> J;
  std::vector<std::size_t> block_start;
  constexpr std::size_t kMaxSupport = 200000;
  for (std::uint32_t y = 0; y < Y; ++y) {
    if (!(py[y] > 0)) continue;
    std::vector<std::vector<std::uint32_t>> vals(n);
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t v = 0; v < sys.cards()[i]; ++v)
        if (pw[i][v * Y + y] > 0) vals[i].push_back(v);
      combos *= vals[i].size();
      if (J.size() + combos > kMaxSupport) throw SolverError("solve_union: feasible support exceeds solver capacity", 0, 0);
    }
    block_start.push_back(J.size());
    Tuple x(n);
    std::vector<std::size_t> pos(n, 0);
    for (std::size_t c = 0; c < combos; ++c) {
      double m = py[y];
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = vals[i][pos[i]];
        m *= pw[i][x[i] * Y + y] / py[y];
      }
      J.push_back({x, y, m});
      for (std::size_t i = 0; i < n; ++i) {
        if (++pos[i] < vals[i].size()) break;
        pos[i] = 0;
      }
    }
  }
  block_start.push_back(J.size());
  const std::size_t m = J.size();
  const std::size_t B = block_start.size() - 1;

  // x-groups.
  std::map<Tuple, std::size_t> gid;
  std::vector<std::size_t> group(m);
  for (std::size_t j = 0; j < m; ++j) group[j] = gid.emplace(J[j].x, gid.size()).first->second;
  const std::size_t G = gid.size();

  // Orthonormal null-space basis per y block.
  std::vector<Eigen::MatrixXd> N(B);
  std::vector<std::size_t> col_start(B + 1, 0);
  for (std::size_t b = 0; b < B; ++b) {
    std::size_t lo = block_start[b], mb = block_start[b + 1] - lo;
    std::vector<Eigen::VectorXd> rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::map<std::uint32_t, Eigen::VectorXd> r;
      for (std::size_t j = 0; j < mb; ++j) {
        auto [it, fresh] = r.try_emplace(J[lo + j].x[i], Eigen::VectorXd::Zero(mb));
        it->second[j] = 1.0;
      }
      for (auto& [v, row] : r) rows.push_back(row);
    }
    Eigen::MatrixXd C(rows.size(), mb);
    for (std::size_t r = 0; r < rows.size(); ++r) C.row(r) = rows[r].transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv[k] > 1e-10 * sv[0]) ++rank;
    N[b] = svd.matrixV().rightCols(static_cast<Eigen::Index>(mb) - rank);
    col_start[b + 1] = col_start[b] + static_cast<std::size_t>(N[b].cols());
  }
  const std::size_t d = col_start[B];

  Eigen::VectorXd q(m);
  for (std::size_t j = 0; j < m; ++j) q[j] = J[j].mass;

  auto group_sums = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(G);
    for (std::size_t j = 0; j < m; ++j) s[group[j]] += v[j];
    return s;
  };
  auto objective_nats = [&](const Eigen::VectorXd& v) {
    auto vx = group_sums(v);
    double f = 0;
    for (std::size_t j = 0; j < m; ++j) f += v[j] * std::log(v[j] / vx[group[j]]);
    return f;
  };
  auto barrier = [&](const Eigen::VectorXd& v, double mu) {
    double f = objective_nats(v);
    for (std::size_t j = 0; j < m; ++j) f -= mu * std::log(v[j]);
    return f;
  };
  auto lift = [&](const Eigen::VectorXd& t) {
    Eigen::VectorXd out(m);
    for (std::size_t b = 0; b < B; ++b) {
      std::size_t lo = block_start[b], mb = block_start[b + 1] - lo;
      if (N[b].cols() == 0) out.segment(lo, mb).setZero();
      else out.segment(lo, mb) = N[b] * t.segment(col_start[b], N[b].cols());
    }
    return out;
  };

  long iterations = 0;
  double mu = 1.0;
  const double ln2 = std::log(2.0);
  double gap = d == 0 ? 0.0 : static_cast<double>(m) * mu / ln2;
  while (d > 0) {
    for (int inner = 0; inner < 500; ++inner) {
      if (++iterations > opts.max_iterations)
        throw SolverError("solve_union: iteration budget exhausted (gap " + std::to_string(gap) + " bits)", 0, gap);
      Eigen::VectorXd qx = group_sums(q);
      Eigen::VectorXd grad(m), w(m);
      for (std::size_t j = 0; j < m; ++j) {
        grad[j] = std::log(q[j] / qx[group[j]]) - mu / q[j];
        w[j] = 1.0 / q[j] + mu / (q[j] * q[j]);
      }
      Eigen::VectorXd r(d);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
      Eigen::MatrixXd V = Eigen::MatrixXd::Zero(d, G);
      for (std::size_t b = 0; b < B; ++b) {
        if (N[b].cols() == 0) continue;
        std::size_t lo = block_start[b], mb = block_start[b + 1] - lo, c0 = col_start[b];
        const auto& Nb = N[b];
        r.segment(c0, Nb.cols()) = Nb.transpose() * grad.segment(lo, mb);
        H.block(c0, c0, Nb.cols(), Nb.cols()) = Nb.transpose() * w.segment(lo, mb).asDiagonal() * Nb;
        for (std::size_t j = 0; j < mb; ++j) V.block(c0, group[lo + j], Nb.cols(), 1) = Nb.row(j).transpose();
      }
      Eigen::VectorXd inv_qx = qx.cwiseInverse();
      H.noalias() -= V * inv_qx.asDiagonal() * V.transpose();
      H.diagonal().array() += 1e-14 * H.trace() / static_cast<double>(d);
      Eigen::VectorXd dt = -H.ldlt().solve(r);
      double lambda2 = -r.dot(dt);
      if (!(lambda2 / 2 > 1e-14)) break;
      Eigen::VectorXd dq = lift(dt);
      double t = 1.0;
      for (std::size_t j = 0; j < m; ++j)
        if (dq[j] < 0) t = std::min(t, 0.99 * -q[j] / dq[j]);
      double f0 = barrier(q, mu);
      while (t > 1e-16 && barrier(q + t * dq, mu) > f0 - 0.25 * t * lambda2) t *= 0.5;
      if (t <= 1e-16) break;
      q += t * dq;
    }
    gap = static_cast<double>(m) * mu / ln2;
    if (gap <= opts.tol) break;
    mu *= 0.1;
  }

  UnionDistribution u;
  u.cards = sys.cards();
  u.target_card = Y;
  u.iterations = iterations;
  u.optimality_gap = gap;
  for (std::size_t j = 0; j < m; ++j) u.q.push_back({J[j].x, J[j].y, q[j]});
  auto qx = group_sums(q);
  double obj = 0;
  for (std::size_t j = 0; j < m; ++j) obj += xlog2(q[j], q[j] / (qx[group[j]] * py[J[j].y]));
  u.objective = std::max(0.0, obj);
  double resid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> acc(pw[i].size(), 0.0);
    for (auto& e : u.q) acc[e.x[i] * Y + e.y] += e.mass;
    for (std::size_t k = 0; k < acc.size(); ++k) resid += std::abs(acc[k] - pw[i][k]);
  }
  u.feasibility_residual = resid;
  if (resid > 1e-9) throw SolverError("solve_union: feasibility residual " + std::to_string(resid) + " exceeds 1e-9", resid, gap);
  return u;
}

double synergy(const PredictorSystem& sys, const UnionDistribution& u, double tol) {
  check_pair(sys, u);
  double s = sys.mutual_information() - u.objective;
  if (s < -tol) throw SolverError("synergy: union objective exceeds total information", u.feasibility_residual, u.optimality_gap);
  return std::max(0.0, s);
}

double synergy_bound(const PredictorSystem& sys) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sys.predictor_count(); ++i) best = std::min(best, sys.conditional_mutual_information(i));
  return best;
}

SidValue synergistic_id(const PredictorSystem& sys, const UnionDistribution& u, std::uint32_t y) {
  check_pair(sys, u);
  if (y >= sys.target_card() || !(sys.p_y()[y] > 0)) throw std::domain_error("synergistic_id: zero-probability target state");
  const double py = sys.p_y()[y];
  auto px = x_marginal(sys.entries());
  auto qx = x_marginal(u.q);
  std::map<Tuple, double> qy;
  for (auto& e : u.q)
    if (e.y == y) qy[e.x] = e.mass;

  SidValue out;
  out.bound = sys.intrinsic_difference(y);
  out.raw = -std::numeric_limits<double>::infinity();
  // Joint max over the support of p(x|y).
  for (auto& e : sys.entries()) {
    if (e.y != y) continue;
    double cp = e.mass / py;
    double tp = xlog2(cp, cp / px[e.x]);
    double tq = 0;
    if (auto it = qy.find(e.x); it != qy.end()) {
      double cq = it->second / py;
      tq = xlog2(cq, cq / qx[e.x]);
    }
    out.raw = std::max(out.raw, tp - tq);
  }
  // A p(x|y) term can pair with a negative q-term, so the joint max may
  // overshoot the bound; keep it (that is what the tables report) but flag it.
  out.value = std::max(out.raw, 0.0);
  out.clamped = out.raw < -1e-12;
  out.exceeds_bound = out.value > out.bound + 1e-12;
  return out;
}

double union_max_upper_proxy(const PredictorSystem& sys, std::uint32_t y) {
  double full = sys.intrinsic_difference(y);
  double best_single = 0;
  for (std::size_t i = 0; i < sys.predictor_count(); ++i)
    best_single = std::max(best_single, sys.single_intrinsic_difference(i, y));
  return std::max(0.0, full - best_single);
}

}  // namespace synphi
