#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace synphi {

enum class PartitionMode { Plain, Directional };

// Directional blocks: In severs edges entering the block from other blocks,
// Out severs edges leaving it, Both severs both.
enum class CutDirection { Both, In, Out };

class Partition {
 public:
  Partition() = default;
  // Blocks are node bitmasks; stored sorted by lowest member node.
  Partition(int n, std::vector<std::uint32_t> blocks, PartitionMode mode = PartitionMode::Plain,
            std::vector<CutDirection> directions = {});

  int nodes() const { return n_; }
  int k() const { return static_cast<int>(blocks_.size()); }
  PartitionMode mode() const { return mode_; }
  const std::vector<std::uint32_t>& blocks() const { return blocks_; }
  const std::vector<CutDirection>& directions() const { return dirs_; }

  // severed()[v] = mask of sources whose edge into node v is cut.
  std::vector<std::uint32_t> severed() const;
  int severed_edge_count() const;

  // 1-based nodes, e.g. "1|2,3"; directional blocks carry "<" (in) or ">" (out).
  std::string to_string() const;

  bool operator==(const Partition&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint32_t> blocks_;
  PartitionMode mode_ = PartitionMode::Plain;
  std::vector<CutDirection> dirs_;
};

Partition parse_partition(std::string_view text, int n);

// Restricted-growth order; only partitions with k in [min_k, max_k].
std::vector<Partition> set_partitions(int n, int min_k = 2, int max_k = 32);
std::vector<Partition> bipartitions(int n);
// Every block/direction assignment, deduplicated by the severed-edge set.
std::vector<Partition> directional_partitions(int n);

}  // namespace synphi
