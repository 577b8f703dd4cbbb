#include "synphi/probcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace synphi {

double xlog2(double p, double ratio) {
  if (p <= 0) return 0.0;
  return p * std::log2(ratio);
}

Dist::Dist(std::vector<double> mass) : mass_(std::move(mass)) {
  double total = 0;
  for (double m : mass_) {
    if (!(m >= 0)) throw std::invalid_argument("negative or NaN mass");
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTol) throw std::invalid_argument("masses do not sum to 1");
}

double kl_divergence(const Dist& p, const Dist& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: support size mismatch");
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    if (q[i] <= 0) throw AbsoluteContinuityError("kl_divergence: p has mass where q has none (index " + std::to_string(i) + ")");
    d += xlog2(p[i], p[i] / q[i]);
  }
  return std::max(0.0, d);
}

int selection_bits(const Selection& sel) {
  int bits = 0;
  for (auto& v : sel) bits += std::popcount(v.block);
  return bits;
}

std::vector<double> JointTable::x_marginal() const {
  std::vector<double> out(x_card, 0.0);
  for (std::size_t x = 0; x < x_card; ++x)
    for (std::size_t y = 0; y < y_card; ++y) out[x] += at(x, y);
  return out;
}

std::vector<double> JointTable::y_marginal() const {
  std::vector<double> out(y_card, 0.0);
  for (std::size_t x = 0; x < x_card; ++x)
    for (std::size_t y = 0; y < y_card; ++y) out[y] += at(x, y);
  return out;
}

double mutual_information(const JointTable& p) {
  auto px = p.x_marginal();
  auto py = p.y_marginal();
  double mi = 0;
  for (std::size_t x = 0; x < p.x_card; ++x)
    for (std::size_t y = 0; y < p.y_card; ++y) {
      double m = p.at(x, y);
      if (m > 0) mi += xlog2(m, m / (px[x] * py[y]));
    }
  return std::max(0.0, mi);
}

double intrinsic_difference(const JointTable& p, std::size_t y) {
  auto px = p.x_marginal();
  double py = 0;
  for (std::size_t x = 0; x < p.x_card; ++x) py += p.at(x, y);
  if (!(py > 0)) throw std::domain_error("intrinsic_difference: target state has zero probability");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < p.x_card; ++x) {
    double cond = p.at(x, y) / py;
    best = std::max(best, xlog2(cond, cond / px[x]));
  }
  return best;
}

namespace {

std::uint32_t extract(State s, std::uint32_t mask) {
  std::uint32_t out = 0;
  int k = 0;
  for (int i = 0; mask >> i; ++i)
    if ((mask >> i) & 1U) out |= ((s >> i) & 1U) << k++;
  return out;
}

std::size_t project(const Selection& sel, const CausalTriple::Entry& e) {
  std::size_t out = 0;
  int shift = 0;
  for (auto& v : sel) {
    State src = v.side == Component::Past ? e.a : v.side == Component::Present ? e.s : e.z;
    out |= static_cast<std::size_t>(extract(src, v.block)) << shift;
    shift += std::popcount(v.block);
  }
  return out;
}

void check_views(const Selection& sel, int n) {
  for (auto& v : sel)
    if (v.block == 0 || (v.block >> n)) throw std::invalid_argument("variable view has empty or out-of-range block");
}

}  // namespace

CausalTriple::CausalTriple(const TransitionModel& tpm) : CausalTriple(tpm.nodes(), {}, tpm) {}

CausalTriple CausalTriple::from_kernel(int n, std::vector<double> kernel) {
  if (n < 1 || n > 8) throw std::invalid_argument("stochastic kernels are limited to 8 nodes");
  std::size_t N = std::size_t{1} << n;
  if (kernel.size() != N * N) throw std::invalid_argument("kernel must be 2^n x 2^n");
  for (std::size_t r = 0; r < N; ++r) {
    double row = 0;
    for (std::size_t c = 0; c < N; ++c) {
      if (!(kernel[r * N + c] >= 0)) throw std::invalid_argument("kernel entries must be nonnegative");
      row += kernel[r * N + c];
    }
    if (std::abs(row - 1.0) > 1e-9) throw std::invalid_argument("kernel rows must sum to 1");
  }
  return CausalTriple(n, std::move(kernel), std::nullopt);
}

double CausalTriple::kernel(State from, State to) const {
  if (model_) return model_->next(from) == to ? 1.0 : 0.0;
  return kernel_[from * state_count() + to];
}

CausalTriple::CausalTriple(int n, std::vector<double> kernel, std::optional<TransitionModel> model)
    : n_(n), kernel_(std::move(kernel)), model_(std::move(model)) {
  const std::size_t N = state_count();
  const double pa = 1.0 / static_cast<double>(N);
  p_s_.assign(N, 0.0);
  p_z_.assign(N, 0.0);
  if (model_) {
    for (State a = 0; a < N; ++a) {
      State s = model_->next(a), z = model_->next(s);
      p_s_[s] += pa;
      p_z_[z] += pa;
      entries_.push_back({a, s, z, pa});
    }
    return;
  }
  for (State a = 0; a < N; ++a)
    for (State s = 0; s < N; ++s) {
      double pas = pa * kernel_[a * N + s];
      if (pas <= 0) continue;
      p_s_[s] += pas;
      for (State z = 0; z < N; ++z) {
        double m = pas * kernel_[s * N + z];
        if (m <= 0) continue;
        p_z_[z] += m;
        entries_.push_back({a, s, z, m});
      }
    }
}

std::vector<State> CausalTriple::reachable_states() const {
  std::vector<State> out;
  for (State s = 0; s < state_count(); ++s)
    if (p_s_[s] > 0) out.push_back(s);
  return out;
}

JointTable CausalTriple::joint(const Selection& x, const Selection& y) const {
  check_views(x, n_);
  check_views(y, n_);
  JointTable t;
  t.x_card = std::size_t{1} << selection_bits(x);
  t.y_card = std::size_t{1} << selection_bits(y);
  t.mass.assign(t.x_card * t.y_card, 0.0);
  for (auto& e : entries_) t.mass[project(x, e) * t.y_card + project(y, e)] += e.mass;
  return t;
}

double mutual_information(const CausalTriple& triple, const Selection& lhs, const Selection& rhs) {
  for (auto& l : lhs)
    for (auto& r : rhs)
      if (l.side == r.side && (l.block & r.block)) throw std::invalid_argument("mutual_information: overlapping selections");
  return mutual_information(triple.joint(lhs, rhs));
}

double intrinsic_difference(const CausalTriple& triple, const Selection& x, State s) {
  if (!triple.reachable(s)) throw std::domain_error("intrinsic_difference: state " + format_state(s, triple.nodes()) + " is unreachable");
  return intrinsic_difference(triple.joint(x, {present_view(triple.nodes())}), s);
}

double state_expectation(const std::map<State, double>& values, const CausalTriple& triple) {
  double total = 0;
  for (State s : triple.reachable_states()) {
    auto it = values.find(s);
    if (it == values.end()) throw std::out_of_range("state_expectation: missing value for state " + format_state(s, triple.nodes()));
    total += triple.p_present(s) * it->second;
  }
  return total;
}

VariableView past_view(int n) { return {Component::Past, (std::uint32_t{1} << n) - 1}; }
VariableView present_view(int n) { return {Component::Present, (std::uint32_t{1} << n) - 1}; }
VariableView future_view(int n) { return {Component::Future, (std::uint32_t{1} << n) - 1}; }

}  // namespace synphi
