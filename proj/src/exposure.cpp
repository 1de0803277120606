#include "vdk/exposure.hpp"

#include <algorithm>
#include <numeric>

namespace vdk {

ViewpointNetwork build_viewpoint_network(const ConversationTree& tree) {
  ViewpointNetwork net;
  net.conversation_id = tree.conversation_id();
  for (const auto& t : tree.nodes()) net.users.push_back(t.author_id);
  std::sort(net.users.begin(), net.users.end());
  net.users.erase(std::unique(net.users.begin(), net.users.end()), net.users.end());

  auto user_of = [&](std::size_t node) {
    const auto& id = tree.node(node).author_id;
    return static_cast<std::size_t>(
        std::lower_bound(net.users.begin(), net.users.end(), id) - net.users.begin());
  };

  for (std::size_t child = 0; child < tree.size(); ++child) {
    std::size_t parent = tree.parent(child);
    if (parent == ConversationTree::kNoParent) continue;
    std::size_t uc = user_of(child);
    std::size_t up = user_of(parent);
    if (uc == up) continue;
    net.edges.push_back({up, uc, tree.node(parent).label});
    net.edges.push_back({uc, up, tree.node(child).label});
  }
  return net;
}

std::uint64_t ViewpointMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& col : columns) sum = std::accumulate(col.begin(), col.end(), sum);
  return sum;
}

ViewpointMatrix build_viewpoint_matrix(const ViewpointNetwork& network) {
  ViewpointMatrix m;
  m.conversation_id = network.conversation_id;
  m.users = network.users;
  m.columns.assign(network.users.size(), ExposureColumn{});
  for (const auto& e : network.edges) ++m.columns[e.target][index_of(e.label)];
  return m;
}

std::string matrix_csv(const ViewpointMatrix& m) {
  std::string out = "label";
  for (const auto& u : m.users) out += ',' + u;
  out += '\n';
  for (Label l : kAllLabels) {
    out += to_string(l);
    for (std::size_t u = 0; u < m.user_count(); ++u) out += ',' + std::to_string(m.at(l, u));
    out += '\n';
  }
  return out;
}

}  // namespace vdk
