#include "vdk/dyadic.hpp"

#include <algorithm>

#include <json.hpp>

namespace vdk {
namespace {

void check_subset(const std::vector<Label>& subset) {
  if (subset.size() < 2) {
    throw Error(ErrorKind::config, "dyadic label subset needs at least two labels");
  }
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      if (subset[i] == subset[j]) {
        throw Error(ErrorKind::config, "dyadic label subset repeats a label");
      }
    }
  }
}

DyadicMatrix empty_matrix(const std::vector<Label>& subset) {
  DyadicMatrix m;
  m.subset = subset;
  m.counts.assign(subset.size(), std::vector<std::uint64_t>(subset.size(), 0));
  return m;
}

}  // namespace

bool DyadicMatrix::column_defined(std::size_t j) const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) sum += row[j];
  return sum > 0;
}

DyadicMatrix dyadic_counts(std::span<const ConversationTree> trees,
                           const std::vector<Label>& subset, bool include_self_replies) {
  check_subset(subset);
  DyadicMatrix m = empty_matrix(subset);

  std::array<int, kNumLabels> slot{};
  slot.fill(-1);
  for (std::size_t i = 0; i < subset.size(); ++i) slot[index_of(subset[i])] = static_cast<int>(i);

  for (const auto& tree : trees) {
    for (std::size_t child = 0; child < tree.size(); ++child) {
      std::size_t parent = tree.parent(child);
      if (parent == ConversationTree::kNoParent) continue;
      int ci = slot[index_of(tree.node(child).label)];
      int pj = slot[index_of(tree.node(parent).label)];
      if (ci < 0 || pj < 0) continue;
      if (!include_self_replies && tree.node(child).author_id == tree.node(parent).author_id) {
        continue;
      }
      ++m.counts[static_cast<std::size_t>(ci)][static_cast<std::size_t>(pj)];
      ++m.n_qualifying_edges;
    }
  }
  return m;
}

DyadicMatrix merge_counts(const DyadicMatrix& a, const DyadicMatrix& b) {
  if (a.subset != b.subset) {
    throw Error(ErrorKind::validation, "cannot merge dyadic counts over different subsets");
  }
  DyadicMatrix m = empty_matrix(a.subset);
  for (std::size_t i = 0; i < a.subset.size(); ++i) {
    for (std::size_t j = 0; j < a.subset.size(); ++j) m.counts[i][j] = a.counts[i][j] + b.counts[i][j];
  }
  m.n_qualifying_edges = a.n_qualifying_edges + b.n_qualifying_edges;
  return m;
}

void normalize(DyadicMatrix& m) {
  const std::size_t k = m.subset.size();
  m.conditionals.assign(k, std::vector<std::optional<double>>(k));
  for (std::size_t j = 0; j < k; ++j) {
    std::uint64_t col = 0;
    for (std::size_t i = 0; i < k; ++i) col += m.counts[i][j];
    if (col == 0) continue;
    for (std::size_t i = 0; i < k; ++i) {
      m.conditionals[i][j] = static_cast<double>(m.counts[i][j]) / static_cast<double>(col);
    }
  }
}

DyadicMatrix dyadic_conditionals(std::span<const ConversationTree> trees,
                                 const std::vector<Label>& subset, bool include_self_replies) {
  DyadicMatrix m = dyadic_counts(trees, subset, include_self_replies);
  normalize(m);
  return m;
}

std::string dyadic_json(const DyadicMatrix& m) {
  using json = nlohmann::ordered_json;
  json subset = json::array();
  for (Label l : m.subset) subset.push_back(std::string(to_string(l)));
  json conditionals = json::array();
  for (const auto& row : m.conditionals) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
    conditionals.push_back(std::move(r));
  }
  json obj = json::object();
  obj["subset"] = std::move(subset);
  obj["counts"] = m.counts;
  obj["conditionals"] = std::move(conditionals);
  obj["n_qualifying_edges"] = m.n_qualifying_edges;
  return obj.dump();
}

}  // namespace vdk
