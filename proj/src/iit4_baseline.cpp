#include "synphi/iit4_baseline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace synphi {

namespace {

constexpr double kTie = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

const TransitionModel& require_model(const CausalTriple& triple) {
  if (!triple.model()) throw std::invalid_argument("IIT4 baseline needs a node-factorized deterministic model");
  return *triple.model();
}

void require_reachable(const CausalTriple& triple, State s) {
  if (!triple.reachable(s))
    throw std::domain_error("state " + format_state(s, triple.nodes()) + " is unreachable");
}

std::vector<State> argmax_set(const std::vector<double>& v, double& best) {
  best = *std::max_element(v.begin(), v.end());
  std::vector<State> out;
  for (State i = 0; i < v.size(); ++i)
    if (v[i] >= best - kTie * std::max(1.0, std::abs(best))) out.push_back(i);
  return out;
}

// |w log2(p / pcut)|_+ with the infinite case made explicit.
double clamped_term(double w, double p, double pcut) {
  if (w <= 0 || p <= 0) return 0.0;
  if (pcut <= 0) return kInf;
  return std::max(0.0, w * std::log2(p / pcut));
}

}  // namespace

CauseEffectState intrinsic_info_cause(const CausalTriple& triple, State s) {
  require_reachable(triple, s);
  const std::size_t N = triple.state_count();
  // Uniform prior: p_c(s) = mean_a T(s|a), p_c(a|s) = T(s|a) / Σ_a T(s|a).
  double col = 0;
  for (State a = 0; a < N; ++a) col += triple.kernel(a, s);
  const double pc_s = col / static_cast<double>(N);
  std::vector<double> ii(N, 0.0);
  for (State a = 0; a < N; ++a) {
    double t = triple.kernel(a, s);
    ii[a] = t > 0 ? (t / col) * std::log2(t / pc_s) : -kInf;
  }
  CauseEffectState out;
  out.cause_candidates = argmax_set(ii, out.ii_c);
  out.a_prime = out.cause_candidates.front();
  return out;
}

CauseEffectState intrinsic_info_effect(const CausalTriple& triple, State s) {
  require_reachable(triple, s);
  const std::size_t N = triple.state_count();
  // Unconstrained effect repertoire: uniform over the present.
  std::vector<double> pe(N, 0.0);
  for (State x = 0; x < N; ++x)
    for (State z = 0; z < N; ++z) pe[z] += triple.kernel(x, z) / static_cast<double>(N);
  std::vector<double> ii(N, 0.0);
  for (State z = 0; z < N; ++z) {
    double t = triple.kernel(s, z);
    ii[z] = t > 0 ? t * std::log2(t / pe[z]) : -kInf;
  }
  CauseEffectState out;
  out.effect_candidates = argmax_set(ii, out.ii_e);
  out.z_prime = out.effect_candidates.front();
  return out;
}

CauseEffectState maximal_states(const CausalTriple& triple, State s) {
  auto out = intrinsic_info_cause(triple, s);
  auto eff = intrinsic_info_effect(triple, s);
  out.effect_candidates = std::move(eff.effect_candidates);
  out.z_prime = eff.z_prime;
  out.ii_e = eff.ii_e;
  return out;
}

CutKernel::CutKernel(const TransitionModel& tpm, const std::vector<std::uint32_t>& severed) : n_(tpm.nodes()) {
  if (static_cast<int>(severed.size()) != n_) throw std::invalid_argument("severed map has wrong size");
  const std::size_t N = tpm.state_count();
  on_.assign(n_, std::vector<double>(N, 0.0));
  for (int i = 0; i < n_; ++i) {
    const std::uint32_t mask = severed[i];
    const int k = std::popcount(mask);
    const double w = 1.0 / static_cast<double>(std::size_t{1} << k);
    for (State from = 0; from < N; ++from) {
      double acc = 0;
      // Enumerate every assignment of the severed sources.
      std::uint32_t sub = 0;
      do {
        acc += tpm.node_next(i, (from & ~mask) | sub);
        sub = (sub - mask) & mask;
      } while (sub != 0);
      on_[i][from] = acc * w;
    }
  }
}

double CutKernel::prob(State from, State to) const {
  double p = 1;
  for (int i = 0; i < n_; ++i) {
    double on = on_[i][from];
    p *= ((to >> i) & 1U) ? on : 1.0 - on;
  }
  return p;
}

CutKernel causal_marginalize(const TransitionModel& tpm, const CutSystem& cut) { return CutKernel(tpm, cut.severed); }

double phi_c_2023(const CausalTriple& triple, State s, State a_prime, const CutSystem& cut) {
  require_reachable(triple, s);
  const auto& tpm = require_model(triple);
  double col = 0;
  for (State a = 0; a < triple.state_count(); ++a) col += triple.kernel(a, s);
  double t = triple.kernel(a_prime, s);
  return clamped_term(t / col, t, causal_marginalize(tpm, cut).prob(a_prime, s));
}

double phi_e_2023(const CausalTriple& triple, State s, State z_prime, const CutSystem& cut) {
  require_reachable(triple, s);
  const auto& tpm = require_model(triple);
  double t = triple.kernel(s, z_prime);
  return clamped_term(t, t, causal_marginalize(tpm, cut).prob(s, z_prime));
}

double phi_c_2023(const CausalTriple& triple, State s, const Partition& partition) {
  auto ce = intrinsic_info_cause(triple, s);
  CutSystem cut(partition);
  double best = kInf;
  for (State a : ce.cause_candidates) best = std::min(best, phi_c_2023(triple, s, a, cut));
  return best;
}

double phi_e_2023(const CausalTriple& triple, State s, const Partition& partition) {
  auto ce = intrinsic_info_effect(triple, s);
  CutSystem cut(partition);
  double best = kInf;
  for (State z : ce.effect_candidates) best = std::min(best, phi_e_2023(triple, s, z, cut));
  return best;
}

double phi_s_2023(const CausalTriple& triple, State s, const Partition& partition) {
  return std::min(phi_c_2023(triple, s, partition), phi_e_2023(triple, s, partition));
}

Iit4Result iit4_evaluate(const CausalTriple& triple, State s, bool normalized) {
  return iit4_evaluate(triple, s, directional_partitions(triple.nodes()), normalized);
}

Iit4Result iit4_evaluate(const CausalTriple& triple, State s, const std::vector<Partition>& candidates, bool normalized) {
  const auto& tpm = require_model(triple);
  if (candidates.empty()) throw std::invalid_argument("no candidate partitions");
  auto ce = maximal_states(triple, s);
  double col = 0;
  for (State a = 0; a < triple.state_count(); ++a) col += triple.kernel(a, s);

  std::vector<CutKernel> kernels;
  std::vector<double> weights;
  for (auto& p : candidates) {
    kernels.emplace_back(tpm, p.severed());
    weights.push_back(normalized ? static_cast<double>(p.severed_edge_count()) : 1.0);
  }
  // The effect side does not depend on a', so resolve z' per cut up front.
  std::vector<double> phi_e(candidates.size(), kInf);
  std::vector<State> z_at(candidates.size(), ce.z_prime);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (State z : ce.effect_candidates) {
      double t = triple.kernel(s, z);
      double v = clamped_term(t, t, kernels[c].prob(s, z));
      if (v < phi_e[c]) {
        phi_e[c] = v;
        z_at[c] = z;
      }
    }

  bool have = false;
  Iit4Result best;
  for (State a : ce.cause_candidates) {
    double t = triple.kernel(a, s);
    // MIP for this a'.
    std::size_t win = 0;
    double win_score = kInf, win_phi = -1, win_c = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double pc = clamped_term(t / col, t, kernels[c].prob(a, s));
      double ps = std::min(pc, phi_e[c]);
      double score = weights[c] > 0 ? ps / weights[c] : kInf;
      bool better = c == 0 || score < win_score - kTie ||
                    (std::abs(score - win_score) <= kTie && ps > win_phi + kTie);
      if (better) {
        win = c;
        win_score = score;
        win_phi = ps;
        win_c = pc;
      }
    }
    bool take = !have || win_phi < best.phi_s - kTie || (std::abs(win_phi - best.phi_s) <= kTie && win_c < best.phi_c - kTie);
    if (take) {
      have = true;
      best.s = s;
      best.a_prime = a;
      best.z_prime = z_at[win];
      best.mip = candidates[win];
      best.phi_c = win_c;
      best.phi_e = phi_e[win];
      best.phi_s = win_phi;
      best.normalizer = weights[win];
    }
  }
  best.infinite = std::isinf(best.phi_s) || std::isinf(best.phi_c) || std::isinf(best.phi_e);
  return best;
}

}  // namespace synphi
