#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdk/conversation.hpp"
#include "vdk/exposure.hpp"
#include "vdk/types.hpp"

namespace vdk {

enum class Variant { with_l1, without_l1 };

std::string_view to_string(Variant v);
constexpr bool excludes_l1(Variant v) { return v == Variant::without_l1; }

struct FragmentationScore {
  std::string conversation_id;
  std::string author_id;
  double score = 0.0;
  bool defined = false;
};

// Why a user received defined=false.
struct FragmentationTally {
  std::size_t defined = 0;
  std::size_t zero_exposure = 0;  // column empty in the active label rows
  std::size_t lone_user = 0;      // fewer than two users with exposure
};

// Per user: 1 - mean cosine similarity against every other user with
// nonzero exposure. Output order follows matrix column order.
std::vector<FragmentationScore> fragmentation_scores(const ViewpointMatrix& matrix,
                                                     bool exclude_l1,
                                                     FragmentationTally* tally = nullptr);

// Proportions over the active labels: all four, or L2..L4 when L1 is
// excluded. `probabilities` is indexed like `labels`.
struct LabelDistribution {
  std::vector<Label> labels;
  std::vector<double> probabilities;
  std::uint64_t mass = 0;

  bool empty() const { return mass == 0; }
};

std::vector<Label> active_labels(bool exclude_l1);

LabelDistribution label_distribution(const ConversationTree& tree, bool exclude_l1);
LabelDistribution pool_distribution(std::span<const ConversationTree> trees, bool exclude_l1);

// KL(p || q) in nats with 0 log 0 = 0. Throws Error(validation) if p puts mass
// where q has none, or the label sets differ.
double kl_divergence(const LabelDistribution& p, const LabelDistribution& q);

struct RepresentationScore {
  std::string conversation_id;
  double raw_kl = 0.0;
  double score = 0.0;
  bool defined = false;  // false when the conversation has no active-label tweets
};

// raw KL of each conversation against the pool, normalized by the topic max.
std::vector<RepresentationScore> representation_scores(std::span<const ConversationTree> trees,
                                                       const LabelDistribution& pool,
                                                       bool exclude_l1);

inline constexpr double kDefaultBinWidth = 0.05;

// Half-open bins [k*w, (k+1)*w); the final bin is closed at 1.
struct Histogram {
  double bin_width = kDefaultBinWidth;
  std::vector<std::size_t> counts;
  std::vector<double> shares;
  std::size_t total = 0;

  std::size_t bin_count() const { return counts.size(); }
  double lower(std::size_t bin) const;
  double upper(std::size_t bin) const;
};

std::size_t bin_count_for(double bin_width);
Histogram histogram(std::span<const double> scores, double bin_width = kDefaultBinWidth);

std::string histogram_csv_header();
// Rows `variant,metric,bin_lower,bin_upper,count,share`, newline-terminated.
std::string histogram_csv_rows(const Histogram& h, Variant variant, std::string_view metric);

}  // namespace vdk
