#include "synphi/partition.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <set>
#include <stdexcept>

namespace synphi {

Partition::Partition(int n, std::vector<std::uint32_t> blocks, PartitionMode mode, std::vector<CutDirection> directions)
    : n_(n), mode_(mode) {
  if (n < 1 || n > 16) throw std::invalid_argument("partition: node count out of range");
  if (blocks.size() < 2) throw std::invalid_argument("partition needs at least two blocks");
  if (mode == PartitionMode::Plain) {
    if (!directions.empty()) throw std::invalid_argument("plain partitions carry no directions");
    directions.assign(blocks.size(), CutDirection::Both);
  } else if (directions.size() != blocks.size()) {
    throw std::invalid_argument("one direction per block required");
  }
  std::uint32_t seen = 0;
  for (auto b : blocks) {
    if (b == 0) throw std::invalid_argument("partition block is empty");
    if (b >> n) throw std::invalid_argument("partition block references a node out of range");
    if (seen & b) throw std::invalid_argument("partition blocks overlap");
    seen |= b;
  }
  if (seen != (std::uint32_t{1} << n) - 1) throw std::invalid_argument("partition blocks do not cover every node");
  std::vector<std::size_t> order(blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::countr_zero(blocks[a]) < std::countr_zero(blocks[b]); });
  for (auto i : order) {
    blocks_.push_back(blocks[i]);
    dirs_.push_back(directions[i]);
  }
}

std::vector<std::uint32_t> Partition::severed() const {
  std::vector<std::uint32_t> out(n_, 0);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      if (i == j) continue;
      // Edges from block j into block i survive only when i severs just its
      // outputs and j just its inputs.
      bool cut = dirs_[i] != CutDirection::Out || dirs_[j] != CutDirection::In;
      if (!cut) continue;
      for (int v = 0; v < n_; ++v)
        if ((blocks_[i] >> v) & 1U) out[v] |= blocks_[j];
    }
  return out;
}

int Partition::severed_edge_count() const {
  int c = 0;
  for (auto m : severed()) c += std::popcount(m);
  return c;
}

std::string Partition::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) out += '|';
    bool first = true;
    for (int v = 0; v < n_; ++v)
      if ((blocks_[i] >> v) & 1U) {
        if (!first) out += ',';
        out += std::to_string(v + 1);
        first = false;
      }
    if (mode_ == PartitionMode::Directional && dirs_[i] != CutDirection::Both) out += dirs_[i] == CutDirection::In ? '<' : '>';
  }
  return out;
}

Partition parse_partition(std::string_view text, int n) {
  std::vector<std::uint32_t> blocks;
  std::vector<CutDirection> dirs;
  bool directional = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t bar = text.find('|', pos);
    if (bar == std::string_view::npos) bar = text.size();
    std::string_view blk = text.substr(pos, bar - pos);
    pos = bar + 1;
    while (!blk.empty() && blk.front() == ' ') blk.remove_prefix(1);
    while (!blk.empty() && blk.back() == ' ') blk.remove_suffix(1);
    CutDirection dir = CutDirection::Both;
    if (!blk.empty() && (blk.back() == '<' || blk.back() == '>')) {
      dir = blk.back() == '<' ? CutDirection::In : CutDirection::Out;
      directional = true;
      blk.remove_suffix(1);
    }
    std::uint32_t mask = 0;
    std::size_t p = 0;
    while (p <= blk.size()) {
      std::size_t c = blk.find(',', p);
      if (c == std::string_view::npos) c = blk.size();
      auto item = blk.substr(p, c - p);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      int v = 0;
      auto [q, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || q != item.data() + item.size())
        throw std::invalid_argument("partition: bad node '" + std::string(item) + "'");
      if (v < 1 || v > n) throw std::invalid_argument("partition: node " + std::to_string(v) + " out of range 1.." + std::to_string(n));
      if ((mask >> (v - 1)) & 1U) throw std::invalid_argument("partition: node listed twice");
      mask |= std::uint32_t{1} << (v - 1);
      p = c + 1;
    }
    blocks.push_back(mask);
    dirs.push_back(dir);
    if (bar == text.size()) break;
  }
  if (!directional) return Partition(n, blocks);
  return Partition(n, blocks, PartitionMode::Directional, dirs);
}

std::vector<Partition> set_partitions(int n, int min_k, int max_k) {
  std::vector<Partition> out;
  std::vector<int> rgs(n, 0);
  // Restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i-1]).
  while (true) {
    int k = *std::max_element(rgs.begin(), rgs.end()) + 1;
    if (k >= min_k && k <= max_k) {
      std::vector<std::uint32_t> blocks(k, 0);
      for (int i = 0; i < n; ++i) blocks[rgs[i]] |= std::uint32_t{1} << i;
      out.emplace_back(n, blocks);
    }
    int i = n - 1;
    for (; i > 0; --i) {
      int mx = *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[i] <= mx) {
        ++rgs[i];
        std::fill(rgs.begin() + i + 1, rgs.end(), 0);
        break;
      }
    }
    if (i == 0) break;
  }
  return out;
}

std::vector<Partition> bipartitions(int n) {
  std::vector<Partition> out;
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  for (std::uint32_t m = 1; m < full; m += 2) out.emplace_back(n, std::vector<std::uint32_t>{m, full & ~m});
  return out;
}

std::vector<Partition> directional_partitions(int n) {
  static const CutDirection kDirs[] = {CutDirection::In, CutDirection::Out, CutDirection::Both};
  std::vector<Partition> out;
  std::set<std::vector<std::uint32_t>> seen;
  for (auto& base : set_partitions(n)) {
    const int k = base.k();
    std::vector<int> idx(k, 0);
    while (true) {
      std::vector<CutDirection> dirs(k);
      for (int i = 0; i < k; ++i) dirs[i] = kDirs[idx[i]];
      Partition p(n, base.blocks(), PartitionMode::Directional, dirs);
      if (seen.insert(p.severed()).second) out.push_back(std::move(p));
      int i = k - 1;
      for (; i >= 0; --i) {
        if (++idx[i] < 3) break;
        idx[i] = 0;
      }
      if (i < 0) break;
    }
  }
  return out;
}

}  // namespace synphi
