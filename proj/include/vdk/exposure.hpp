#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vdk/conversation.hpp"
#include "vdk/types.hpp"

namespace vdk {

// `target` was exposed to `label`, emitted by `source`. Users are positions
// into ViewpointNetwork::users.
struct ExposureEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  Label label = Label::L1;

  bool operator==(const ExposureEdge&) const = default;
};

struct ViewpointNetwork {
  std::string conversation_id;
  std::vector<std::string> users;  // ascending author_id
  std::vector<ExposureEdge> edges;
};

// Every cross-author reply dyad exposes each side to the other's label.
// Self-replies expose nobody.
ViewpointNetwork build_viewpoint_network(const ConversationTree& tree);

using ExposureColumn = std::array<std::uint64_t, kNumLabels>;

// 4 x U exposure counts, stored column-wise (one column per user).
struct ViewpointMatrix {
  std::string conversation_id;
  std::vector<std::string> users;
  std::vector<ExposureColumn> columns;

  std::size_t user_count() const { return users.size(); }
  std::uint64_t at(Label l, std::size_t user) const { return columns[user][index_of(l)]; }
  std::uint64_t total() const;
};

ViewpointMatrix build_viewpoint_matrix(const ViewpointNetwork& network);

// 4 rows (L1..L4) with a header of author ids.
std::string matrix_csv(const ViewpointMatrix& m);

}  // namespace vdk
