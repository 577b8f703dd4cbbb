#pragma once

// Dense random-restart projected search over the union polytope of a system
// with two binary predictors. Independent of the barrier solver: it only
// shares the pairwise marginals.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "synphi/pid_solver.hpp"

namespace synphi::oracle {

class BinaryPairOracle {
 public:
  explicit BinaryPairOracle(const PredictorSystem& sys) : Y_(sys.target_card()) {
    if (sys.predictor_count() != 2 || sys.cards()[0] != 2 || sys.cards()[1] != 2)
      throw std::invalid_argument("oracle needs exactly two binary predictors");
    auto p1 = sys.pairwise(0), p2 = sys.pairwise(1);
    const auto& py = sys.p_y();
    // q(1,1,y) = t; the other three cells follow from the marginals.
    for (std::uint32_t y = 0; y < Y_; ++y) {
      if (!(py[y] > 0)) continue;
      Block b;
      b.py = py[y];
      b.a = p1[1 * Y_ + y];
      b.b = p2[1 * Y_ + y];
      b.lo = std::max(0.0, b.a + b.b - b.py);
      b.hi = std::min(b.a, b.b);
      blocks_.push_back(b);
    }
  }

  // I_q(X1 X2; Y) in bits for one t per block.
  double objective(const std::vector<double>& t) const {
    double qx[4] = {0, 0, 0, 0};
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      auto c = cells(k, t[k]);
      for (int j = 0; j < 4; ++j) qx[j] += c[j];
    }
    double f = 0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      auto c = cells(k, t[k]);
      for (int j = 0; j < 4; ++j)
        if (c[j] > 0) f += c[j] * std::log2(c[j] / (qx[j] * blocks_[k].py));
    }
    return f;
  }

  // Minimum over `restarts` random feasible starts, each refined by a
  // projected pattern search.
  double search(int restarts, std::uint64_t seed = 12345) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> t(blocks_.size());
    for (int r = 0; r < restarts; ++r) {
      for (std::size_t k = 0; k < blocks_.size(); ++k) t[k] = blocks_[k].lo + u(rng) * (blocks_[k].hi - blocks_[k].lo);
      double f = objective(t);
      double h = 0.25;
      for (int it = 0; it < 60 && h > 1e-9; ++it) {
        bool moved = false;
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
          const double w = blocks_[k].hi - blocks_[k].lo;
          if (w <= 0) continue;
          for (double dir : {1.0, -1.0}) {
            double old = t[k];
            t[k] = std::clamp(old + dir * h * w, blocks_[k].lo, blocks_[k].hi);
            double g = objective(t);
            if (g < f) {
              f = g;
              moved = true;
              break;
            }
            t[k] = old;
          }
        }
        if (!moved) h *= 0.5;
      }
      best = std::min(best, f);
    }
    return best;
  }

  std::size_t parameters() const { return blocks_.size(); }

 private:
  struct Block {
    double py = 0, a = 0, b = 0, lo = 0, hi = 0;
  };
  // x index = x1 + 2*x2.
  std::array<double, 4> cells(std::size_t k, double t) const {
    const auto& b = blocks_[k];
    std::array<double, 4> c{std::max(0.0, b.py - b.a - b.b + t), std::max(0.0, b.a - t), std::max(0.0, b.b - t), t};
    return c;
  }

  std::uint32_t Y_;
  std::vector<Block> blocks_;
};

}  // namespace synphi::oracle
