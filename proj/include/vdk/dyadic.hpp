#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vdk/conversation.hpp"
#include "vdk/types.hpp"

namespace vdk {

// counts[i][j] = number of replies labeled subset[i] whose parent is labeled
// subset[j]. conditionals[i][j] = P(subset[i] | subset[j]); a column with no
// qualifying edges has nullopt entries.
struct DyadicMatrix {
  std::vector<Label> subset;
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::vector<std::optional<double>>> conditionals;
  std::uint64_t n_qualifying_edges = 0;

  bool column_defined(std::size_t j) const;
};

inline const std::vector<Label> kStanceLabels = {Label::L3, Label::L4};

// Raw counts only; conditionals are left empty. Counts from disjoint batches
// can be combined with merge_counts.
DyadicMatrix dyadic_counts(std::span<const ConversationTree> trees,
                           const std::vector<Label>& subset = kStanceLabels,
                           bool include_self_replies = true);

DyadicMatrix merge_counts(const DyadicMatrix& a, const DyadicMatrix& b);

// Fills conditionals from counts.
void normalize(DyadicMatrix& m);

DyadicMatrix dyadic_conditionals(std::span<const ConversationTree> trees,
                                 const std::vector<Label>& subset = kStanceLabels,
                                 bool include_self_replies = true);

// {"subset":[..],"counts":[[..]],"conditionals":[[..]],"n_qualifying_edges":N}
std::string dyadic_json(const DyadicMatrix& m);

}  // namespace vdk
