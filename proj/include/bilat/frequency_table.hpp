#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bilat/errors.hpp"

namespace bilat {

// One group's counts of subjects with 0, 1, 2 affected eyes.
struct GroupCounts {
  std::string label;
  std::int64_t m0 = 0;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;

  std::int64_t total() const { return m0 + m1 + m2; }
};

// The summarized dataset: one row per group. Counts are nonnegative and
// every group contains at least one subject.
class FrequencyTable {
 public:
  explicit FrequencyTable(std::vector<GroupCounts> groups);

  std::size_t num_groups() const { return groups_.size(); }
  const GroupCounts& group(std::size_t i) const { return groups_[i]; }
  const std::vector<GroupCounts>& groups() const { return groups_; }

  std::int64_t group_size(std::size_t i) const { return groups_[i].total(); }
  std::int64_t total() const;

  // Column total S_l = sum_i m_il for l in {0, 1, 2}.
  std::int64_t column_total(int l) const;

  FrequencyTable permuted(const std::vector<std::size_t>& order) const;

 private:
  std::vector<GroupCounts> groups_;
};

}  // namespace bilat
