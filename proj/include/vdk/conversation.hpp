#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdk/ingest.hpp"
#include "vdk/types.hpp"

namespace vdk {

// A validated reply tree. Nodes are stored in ascending tweet_id order and
// addressed by position; parent(i) is kNoParent only for the root.
class ConversationTree {
 public:
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  // `parents[i]` is the position of node i's parent or kNoParent. Throws
  // Error(validation) unless the result is a single rooted tree, and
  // Error(cycle) when the parent links loop.
  ConversationTree(std::string conversation_id, std::vector<TweetRecord> nodes,
                   std::vector<std::size_t> parents);

  // Resolves parents from each record's parent_id. The root is the unique
  // record whose parent_id is absent or does not name another node.
  ConversationTree(std::string conversation_id, std::vector<TweetRecord> nodes);

  const std::string& conversation_id() const { return conversation_id_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return nodes_.size() - 1; }
  std::size_t root() const { return root_; }

  const TweetRecord& node(std::size_t i) const { return nodes_[i]; }
  std::span<const TweetRecord> nodes() const { return nodes_; }
  std::size_t parent(std::size_t i) const { return parents_[i]; }
  std::span<const std::size_t> parents() const { return parents_; }
  std::vector<std::vector<std::size_t>> children() const;

  std::size_t distinct_authors() const;

 private:
  void validate();

  std::string conversation_id_;
  std::vector<TweetRecord> nodes_;
  std::vector<std::size_t> parents_;
  std::size_t root_ = kNoParent;
};

struct ReconstructionDiagnostics {
  std::size_t conversation_groups = 0;
  std::size_t discarded_components = 0;
  std::size_t discarded_tweets = 0;
};

struct Reconstruction {
  std::vector<ConversationTree> trees;
  ReconstructionDiagnostics diagnostics;
};

// Groups by conversation_id (ascending) and rebuilds each reply tree. When
// missing parents split a group, only the largest component survives; ties go
// to the component holding the smallest tweet_id.
Reconstruction build_conversations(const Corpus& corpus);

std::vector<ConversationTree> filter_eligible(std::vector<ConversationTree> trees,
                                              std::size_t min_authors = 2);

inline constexpr std::size_t kDefaultMaxNodes = 50;

// Keeps the root plus the first max_nodes-1 nodes in level order, ascending
// tweet_id within a level.
ConversationTree cap_size(const ConversationTree& tree, std::size_t max_nodes = kDefaultMaxNodes);

struct CorpusStats {
  std::size_t n_conversations = 0;
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  std::size_t n_distinct_users = 0;
  std::array<double, kNumLabels> label_shares{};  // all zero when n_nodes == 0
};

CorpusStats corpus_stats(std::span<const ConversationTree> trees);

std::string stats_csv_header();
std::string stats_csv_row(std::string_view topic, const CorpusStats& s);

// One JSON object per tree: conversation_id, root, nodes, edges [[child, parent]].
std::string tree_json_line(const ConversationTree& tree);

}  // namespace vdk
