#include "bilat/frequency_table.hpp"

#include <numeric>
#include <set>

namespace bilat {

FrequencyTable::FrequencyTable(std::vector<GroupCounts> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) {
    throw DomainError("FrequencyTable needs at least one group");
  }
  std::set<std::string> seen;
  for (const auto& g : groups_) {
    if (g.m0 < 0 || g.m1 < 0 || g.m2 < 0) {
      throw DomainError("group '" + g.label + "' has a negative count");
    }
    if (g.total() < 1) {
      throw DomainError("group '" + g.label + "' has no subjects");
    }
    if (!seen.insert(g.label).second) {
      throw DomainError("duplicate group label '" + g.label + "'");
    }
  }
}

std::int64_t FrequencyTable::total() const {
  return std::accumulate(groups_.begin(), groups_.end(), std::int64_t{0},
                         [](std::int64_t acc, const GroupCounts& g) {
                           return acc + g.total();
                         });
}

std::int64_t FrequencyTable::column_total(int l) const {
  std::int64_t s = 0;
  for (const auto& g : groups_) {
    s += (l == 0) ? g.m0 : (l == 1) ? g.m1 : g.m2;
  }
  return s;
}

FrequencyTable FrequencyTable::permuted(
    const std::vector<std::size_t>& order) const {
  if (order.size() != groups_.size()) {
    throw DomainError("permutation length does not match group count");
  }
  std::vector<GroupCounts> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(groups_.at(i));
  return FrequencyTable(std::move(out));
}

}  // namespace bilat
