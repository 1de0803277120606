#include "vdk/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "format.hpp"

namespace vdk {
namespace {

// Scores landing within this distance below a bin edge are treated as on it,
// so 0.15 falls in [0.15, 0.2) even though 0.15 / 0.05 < 3 in binary.
constexpr double kEdgeSlack = 1e-9;

std::size_t first_active_row(bool exclude_l1) { return exclude_l1 ? index_of(Label::L2) : 0; }

double snap(double v) { return std::round(v * 1e12) / 1e12; }

}  // namespace

std::string_view to_string(Variant v) {
  return v == Variant::with_l1 ? "with_l1" : "without_l1";
}

std::vector<FragmentationScore> fragmentation_scores(const ViewpointMatrix& matrix,
                                                     bool exclude_l1,
                                                     FragmentationTally* tally) {
  const std::size_t first = first_active_row(exclude_l1);
  const std::size_t n = matrix.user_count();

  std::vector<FragmentationScore> out(n);
  std::vector<std::size_t> active;
  for (std::size_t u = 0; u < n; ++u) {
    out[u].conversation_id = matrix.conversation_id;
    out[u].author_id = matrix.users[u];
    bool any = false;
    for (std::size_t r = first; r < kNumLabels; ++r) any = any || matrix.columns[u][r] > 0;
    if (any) active.push_back(u);
  }

  FragmentationTally local;
  local.zero_exposure = n - active.size();
  if (active.size() < 2) {
    local.lone_user = active.size();
  } else {
    // Counts are small integers, so products stay exact in double and
    // sqrt(|a|^2 |a|^2) == |a|^2 for identical columns.
    std::vector<double> sq_norm(n, 0.0);
    for (std::size_t u : active) {
      for (std::size_t r = first; r < kNumLabels; ++r) {
        double x = static_cast<double>(matrix.columns[u][r]);
        sq_norm[u] += x * x;
      }
    }
    for (std::size_t u : active) {
      double sum = 0.0;
      for (std::size_t v : active) {
        if (v == u) continue;
        double dot = 0.0;
        for (std::size_t r = first; r < kNumLabels; ++r) {
          dot += static_cast<double>(matrix.columns[u][r]) * static_cast<double>(matrix.columns[v][r]);
        }
        sum += dot / std::sqrt(sq_norm[u] * sq_norm[v]);
      }
      double mean = sum / static_cast<double>(active.size() - 1);
      out[u].score = std::clamp(1.0 - mean, 0.0, 1.0);
      out[u].defined = true;
    }
    local.defined = active.size();
  }

  if (tally) {
    tally->defined += local.defined;
    tally->zero_exposure += local.zero_exposure;
    tally->lone_user += local.lone_user;
  }
  return out;
}

std::vector<Label> active_labels(bool exclude_l1) {
  std::vector<Label> labels;
  for (std::size_t r = first_active_row(exclude_l1); r < kNumLabels; ++r) {
    labels.push_back(label_at(r));
  }
  return labels;
}

namespace {

LabelDistribution from_counts(const std::array<std::uint64_t, kNumLabels>& counts,
                              bool exclude_l1) {
  LabelDistribution d;
  d.labels = active_labels(exclude_l1);
  for (Label l : d.labels) d.mass += counts[index_of(l)];
  for (Label l : d.labels) {
    d.probabilities.push_back(d.mass == 0 ? 0.0
                                          : static_cast<double>(counts[index_of(l)]) /
                                                static_cast<double>(d.mass));
  }
  return d;
}

void count_labels(const ConversationTree& tree, std::array<std::uint64_t, kNumLabels>& counts) {
  for (const auto& t : tree.nodes()) ++counts[index_of(t.label)];
}

}  // namespace

LabelDistribution label_distribution(const ConversationTree& tree, bool exclude_l1) {
  std::array<std::uint64_t, kNumLabels> counts{};
  count_labels(tree, counts);
  return from_counts(counts, exclude_l1);
}

LabelDistribution pool_distribution(std::span<const ConversationTree> trees, bool exclude_l1) {
  std::array<std::uint64_t, kNumLabels> counts{};
  for (const auto& t : trees) count_labels(t, counts);
  return from_counts(counts, exclude_l1);
}

double kl_divergence(const LabelDistribution& p, const LabelDistribution& q) {
  if (p.labels != q.labels) {
    throw Error(ErrorKind::validation, "KL divergence over different label sets");
  }
  if (p.empty() || q.empty()) {
    throw Error(ErrorKind::validation, "KL divergence of an empty distribution");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
    double pi = p.probabilities[i];
    if (pi == 0.0) continue;
    double qi = q.probabilities[i];
    if (qi == 0.0) {
      throw Error(ErrorKind::validation, "pool assigns zero probability to label " +
                                             std::string(to_string(p.labels[i])));
    }
    kl += pi * std::log(pi / qi);
  }
  return std::max(kl, 0.0);
}

std::vector<RepresentationScore> representation_scores(std::span<const ConversationTree> trees,
                                                       const LabelDistribution& pool,
                                                       bool exclude_l1) {
  std::vector<RepresentationScore> out;
  out.reserve(trees.size());
  double max_kl = 0.0;
  for (const auto& t : trees) {
    RepresentationScore s;
    s.conversation_id = t.conversation_id();
    auto dist = label_distribution(t, exclude_l1);
    if (!dist.empty()) {
      s.raw_kl = kl_divergence(dist, pool);
      s.defined = true;
      max_kl = std::max(max_kl, s.raw_kl);
    }
    out.push_back(std::move(s));
  }
  if (max_kl > 0.0) {
    for (auto& s : out) {
      if (s.defined) s.score = s.raw_kl / max_kl;
    }
  }
  return out;
}

std::size_t bin_count_for(double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw Error(ErrorKind::config, "bin width must lie in (0, 1], got " +
                                       detail::format_double(bin_width));
  }
  return static_cast<std::size_t>(std::ceil(1.0 / bin_width - kEdgeSlack));
}

double Histogram::lower(std::size_t bin) const {
  return snap(static_cast<double>(bin) * bin_width);
}

double Histogram::upper(std::size_t bin) const {
  return std::min(1.0, snap(static_cast<double>(bin + 1) * bin_width));
}

Histogram histogram(std::span<const double> scores, double bin_width) {
  Histogram h;
  h.bin_width = bin_width;
  const std::size_t bins = bin_count_for(bin_width);
  h.counts.assign(bins, 0);
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorKind::validation,
                  "histogram score outside [0, 1]: " + detail::format_double(s));
    }
    auto bin = static_cast<std::size_t>(std::floor(s / bin_width + kEdgeSlack));
    ++h.counts[std::min(bin, bins - 1)];
  }
  h.total = scores.size();
  h.shares.assign(bins, 0.0);
  if (h.total > 0) {
    for (std::size_t b = 0; b < bins; ++b) {
      h.shares[b] = static_cast<double>(h.counts[b]) / static_cast<double>(h.total);
    }
  }
  return h;
}

std::string histogram_csv_header() { return "variant,metric,bin_lower,bin_upper,count,share\n"; }

std::string histogram_csv_rows(const Histogram& h, Variant variant, std::string_view metric) {
  std::string out;
  for (std::size_t b = 0; b < h.bin_count(); ++b) {
    out += std::string(to_string(variant)) + ',' + std::string(metric) + ',' +
           detail::format_double(h.lower(b)) + ',' + detail::format_double(h.upper(b)) + ',' +
           std::to_string(h.counts[b]) + ',' + detail::format_double(h.shares[b]) + '\n';
  }
  return out;
}

}  // namespace vdk
