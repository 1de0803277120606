#include "vdk/conversation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "format.hpp"

namespace vdk {

namespace {

std::vector<std::size_t> resolve_parents(const std::vector<TweetRecord>& nodes) {
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < nodes.size(); ++i) by_id.emplace(nodes[i].tweet_id, i);
  std::vector<std::size_t> parents(nodes.size(), ConversationTree::kNoParent);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].parent_id) continue;
    if (auto it = by_id.find(*nodes[i].parent_id); it != by_id.end()) parents[i] = it->second;
  }
  return parents;
}

}  // namespace

ConversationTree::ConversationTree(std::string conversation_id, std::vector<TweetRecord> nodes,
                                   std::vector<std::size_t> parents)
    : conversation_id_(std::move(conversation_id)) {
  if (nodes.size() != parents.size()) {
    throw Error(ErrorKind::validation, "conversation " + conversation_id_ +
                                           ": parent list does not match node list");
  }
  if (nodes.empty()) {
    throw Error(ErrorKind::validation, "conversation " + conversation_id_ + " has no tweets");
  }

  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes[a].tweet_id < nodes[b].tweet_id; });
  std::vector<std::size_t> position(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  nodes_.reserve(nodes.size());
  parents_.reserve(nodes.size());
  for (std::size_t old : order) {
    nodes_.push_back(std::move(nodes[old]));
    std::size_t p = parents[old];
    if (p != kNoParent && p >= position.size()) {
      throw Error(ErrorKind::validation,
                  "conversation " + conversation_id_ + ": parent index out of range");
    }
    parents_.push_back(p == kNoParent ? kNoParent : position[p]);
  }
  validate();
}

ConversationTree::ConversationTree(std::string conversation_id, std::vector<TweetRecord> nodes)
    : ConversationTree(std::move(conversation_id), nodes, resolve_parents(nodes)) {}

void ConversationTree::validate() {
  const std::size_t n = nodes_.size();
  root_ = kNoParent;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && nodes_[i].tweet_id == nodes_[i - 1].tweet_id) {
      throw Error(ErrorKind::duplicate_id, "conversation " + conversation_id_ +
                                               ": duplicate tweet_id " + nodes_[i].tweet_id);
    }
    if (parents_[i] == i) {
      throw Error(ErrorKind::validation, "tweet " + nodes_[i].tweet_id + " replies to itself");
    }
    if (parents_[i] == kNoParent) {
      if (root_ != kNoParent) {
        throw Error(ErrorKind::validation,
                    "conversation " + conversation_id_ + " has more than one root");
      }
      root_ = i;
    }
  }

  // 0 = unvisited, 1 = on current path, 2 = reaches the root.
  std::vector<std::uint8_t> state(n, 0);
  std::vector<std::size_t> path;
  for (std::size_t start = 0; start < n; ++start) {
    std::size_t v = start;
    while (v != kNoParent && state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = parents_[v];
    }
    if (v != kNoParent && state[v] == 1) {
      throw Error(ErrorKind::cycle, "conversation " + conversation_id_ +
                                        ": reply references form a cycle");
    }
    for (std::size_t u : path) state[u] = 2;
    path.clear();
  }
  if (root_ == kNoParent) {
    throw Error(ErrorKind::cycle, "conversation " + conversation_id_ + " has no root");
  }
}

std::vector<std::vector<std::size_t>> ConversationTree::children() const {
  std::vector<std::vector<std::size_t>> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (parents_[i] != kNoParent) out[parents_[i]].push_back(i);
  }
  return out;
}

std::size_t ConversationTree::distinct_authors() const {
  std::unordered_set<std::string_view> authors;
  for (const auto& t : nodes_) authors.insert(t.author_id);
  return authors.size();
}

Reconstruction build_conversations(const Corpus& corpus) {
  std::map<std::string_view, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.tweets.size(); ++i) {
    groups[corpus.tweets[i].conversation_id].push_back(i);
  }

  Reconstruction out;
  out.diagnostics.conversation_groups = groups.size();
  constexpr std::size_t none = ConversationTree::kNoParent;

  for (const auto& [conv_id, members] : groups) {
    std::vector<TweetRecord> nodes;
    nodes.reserve(members.size());
    for (std::size_t i : members) nodes.push_back(corpus.tweets[i]);
    auto parents = resolve_parents(nodes);
    const std::size_t n = nodes.size();

    // Component of each node = the parentless node it reaches.
    std::vector<std::size_t> top(n, none);
    std::vector<std::uint8_t> state(n, 0);
    std::vector<std::size_t> path;
    for (std::size_t start = 0; start < n; ++start) {
      std::size_t v = start;
      while (state[v] == 0) {
        state[v] = 1;
        path.push_back(v);
        if (parents[v] == none) break;
        v = parents[v];
      }
      if (state[v] == 1 && parents[v] != none) {
        throw Error(ErrorKind::cycle, "conversation " + std::string(conv_id) +
                                          ": reply references form a cycle");
      }
      std::size_t r = parents[v] == none ? v : top[v];
      for (std::size_t u : path) {
        top[u] = r;
        state[u] = 2;
      }
      path.clear();
    }

    std::map<std::size_t, std::pair<std::size_t, std::string_view>> components;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = components.try_emplace(top[i], 0, nodes[i].tweet_id);
      ++it->second.first;
      if (nodes[i].tweet_id < it->second.second) it->second.second = nodes[i].tweet_id;
    }
    std::size_t keep = components.begin()->first;
    for (const auto& [r, info] : components) {
      const auto& best = components.at(keep);
      if (info.first > best.first || (info.first == best.first && info.second < best.second)) {
        keep = r;
      }
    }

    std::vector<TweetRecord> kept;
    std::vector<std::size_t> remap(n, none);
    for (std::size_t i = 0; i < n; ++i) {
      if (top[i] != keep) continue;
      remap[i] = kept.size();
      kept.push_back(std::move(nodes[i]));
    }
    std::vector<std::size_t> kept_parents;
    kept_parents.reserve(kept.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (top[i] == keep) kept_parents.push_back(parents[i] == none ? none : remap[parents[i]]);
    }

    out.diagnostics.discarded_components += components.size() - 1;
    out.diagnostics.discarded_tweets += n - kept.size();
    out.trees.emplace_back(std::string(conv_id), std::move(kept), std::move(kept_parents));
  }
  return out;
}

std::vector<ConversationTree> filter_eligible(std::vector<ConversationTree> trees,
                                              std::size_t min_authors) {
  std::erase_if(trees, [&](const ConversationTree& t) {
    return t.size() < 2 || t.distinct_authors() < min_authors;
  });
  return trees;
}

ConversationTree cap_size(const ConversationTree& tree, std::size_t max_nodes) {
  if (max_nodes < 2) {
    throw Error(ErrorKind::config, "max tweets per conversation must be at least 2");
  }
  if (tree.size() <= max_nodes) return tree;

  // Positions are in ascending tweet_id order, so sorting each level by
  // position gives the id tie-break.
  const auto kids = tree.children();
  std::vector<std::size_t> order{tree.root()};
  std::vector<std::size_t> level{tree.root()};
  while (!level.empty() && order.size() < max_nodes) {
    std::vector<std::size_t> next;
    for (std::size_t v : level) next.insert(next.end(), kids[v].begin(), kids[v].end());
    std::sort(next.begin(), next.end());
    for (std::size_t v : next) {
      if (order.size() == max_nodes) break;
      order.push_back(v);
    }
    level = std::move(next);
  }

  constexpr std::size_t none = ConversationTree::kNoParent;
  std::vector<std::size_t> remap(tree.size(), none);
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = i;

  std::vector<TweetRecord> nodes;
  std::vector<std::size_t> parents;
  for (std::size_t v : order) {
    std::size_t p = tree.parent(v);
    if (p != none && remap[p] == none) continue;  // parent dropped
    nodes.push_back(tree.node(v));
    parents.push_back(p == none ? none : remap[p]);
  }
  return ConversationTree(tree.conversation_id(), std::move(nodes), std::move(parents));
}

CorpusStats corpus_stats(std::span<const ConversationTree> trees) {
  CorpusStats s;
  std::unordered_set<std::string_view> users;
  std::array<std::size_t, kNumLabels> counts{};
  for (const auto& t : trees) {
    ++s.n_conversations;
    s.n_nodes += t.size();
    s.n_edges += t.edge_count();
    for (const auto& node : t.nodes()) {
      users.insert(node.author_id);
      ++counts[index_of(node.label)];
    }
  }
  s.n_distinct_users = users.size();
  if (s.n_nodes > 0) {
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      s.label_shares[l] = static_cast<double>(counts[l]) / static_cast<double>(s.n_nodes);
    }
  }
  return s;
}

std::string stats_csv_header() {
  return "topic,n_conversations,n_nodes,n_edges,n_distinct_users,share_L1,share_L2,share_L3,"
         "share_L4\n";
}

std::string stats_csv_row(std::string_view topic, const CorpusStats& s) {
  std::string row(topic);
  for (std::size_t v : {s.n_conversations, s.n_nodes, s.n_edges, s.n_distinct_users}) {
    row += ',' + std::to_string(v);
  }
  for (double share : s.label_shares) row += ',' + detail::format_double(share);
  row += '\n';
  return row;
}

std::string tree_json_line(const ConversationTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& t = tree.node(i);
    nodes.push_back({{"id", t.tweet_id},
                     {"author_id", t.author_id},
                     {"label", std::string(to_string(t.label))}});
    if (tree.parent(i) != ConversationTree::kNoParent) {
      edges.push_back({t.tweet_id, tree.node(tree.parent(i)).tweet_id});
    }
  }
  nlohmann::json obj = {{"conversation_id", tree.conversation_id()},
                        {"root", tree.node(tree.root()).tweet_id},
                        {"nodes", std::move(nodes)},
                        {"edges", std::move(edges)}};
  return obj.dump();
}

}  // namespace vdk
