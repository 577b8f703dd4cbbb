#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "synphi/netspec.hpp"

namespace synphi {

inline constexpr double kMassTol = 1e-12;

// 0 log 0 = 0 and 0 log(0/0) = 0.
double xlog2(double p, double ratio);

class Dist {
 public:
  Dist() = default;
  explicit Dist(std::vector<double> mass);  // validates sum and sign

  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  const std::vector<double>& mass() const { return mass_; }

 private:
  std::vector<double> mass_;
};

class AbsoluteContinuityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bits. Throws AbsoluteContinuityError where p > 0 but q = 0.
double kl_divergence(const Dist& p, const Dist& q);

enum class Component { Past, Present, Future };

// `block` is a node bitmask.
struct VariableView {
  Component side = Component::Past;
  std::uint32_t block = 0;
  bool operator==(const VariableView&) const = default;
};

using Selection = std::vector<VariableView>;

int selection_bits(const Selection& sel);

// Dense p(x, y) with x-major layout: mass[x * y_card + y].
struct JointTable {
  std::size_t x_card = 0;
  std::size_t y_card = 0;
  std::vector<double> mass;

  double at(std::size_t x, std::size_t y) const { return mass[x * y_card + y]; }
  std::vector<double> x_marginal() const;
  std::vector<double> y_marginal() const;
};

double mutual_information(const JointTable& p);

// ID[p(X) -> y] = max_x p(x|y) log2(p(x|y) / p(x)). Throws on p(y) = 0.
double intrinsic_difference(const JointTable& p, std::size_t y);

class CausalTriple {
 public:
  struct Entry {
    State a, s, z;
    double mass;
  };

  explicit CausalTriple(const TransitionModel& tpm);
  // Row-stochastic kernel[from * 2^n + to]; for tests of the non-deterministic path.
  static CausalTriple from_kernel(int n, std::vector<double> kernel);

  int nodes() const { return n_; }
  std::size_t state_count() const { return std::size_t{1} << n_; }
  double kernel(State from, State to) const;
  double p_present(State s) const { return p_s_.at(s); }
  double p_future(State z) const { return p_z_.at(z); }
  bool reachable(State s) const { return s < state_count() && p_s_[s] > 0; }
  std::vector<State> reachable_states() const;
  bool deterministic() const { return model_.has_value(); }
  const std::optional<TransitionModel>& model() const { return model_; }
  const std::vector<Entry>& entries() const { return entries_; }

  JointTable joint(const Selection& x, const Selection& y) const;

 private:
  CausalTriple(int n, std::vector<double> kernel, std::optional<TransitionModel> model);

  int n_;
  std::vector<double> kernel_;
  std::optional<TransitionModel> model_;
  std::vector<double> p_s_, p_z_;
  std::vector<Entry> entries_;
};

inline CausalTriple make_triple(const TransitionModel& tpm) { return CausalTriple(tpm); }

// Bits; throws std::invalid_argument on overlapping selections.
double mutual_information(const CausalTriple& triple, const Selection& lhs, const Selection& rhs);

// ID[p(X) -> s] with X drawn from the given selection and the present as target.
double intrinsic_difference(const CausalTriple& triple, const Selection& x, State s);

// Σ_s p(s) v(s); throws std::out_of_range if a reachable state is missing.
double state_expectation(const std::map<State, double>& values, const CausalTriple& triple);

// Convenience views over the full node set.
VariableView past_view(int n);
VariableView present_view(int n);
VariableView future_view(int n);

}  // namespace synphi
