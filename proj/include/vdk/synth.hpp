#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "vdk/ingest.hpp"
#include "vdk/types.hpp"

namespace vdk::synth {

// Tree sizes are always >= 2.
struct Geometric {
  double p = 0.5;  // size = 2 + failures before first success
};
struct Fixed {
  std::size_t n = 2;
};
struct Uniform {
  std::size_t lo = 2;
  std::size_t hi = 2;
};
using SizeDistribution = std::variant<Geometric, Fixed, Uniform>;

struct OnePerTweet {};
using AuthorPolicy = std::variant<std::size_t, OnePerTweet>;

using LabelVector = std::array<double, kNumLabels>;
// kernel[child][parent] = Q(child | parent); every column sums to 1.
using ReplyKernel = std::array<LabelVector, kNumLabels>;

struct GeneratorConfig {
  std::string topic = "synthetic";
  std::string id_prefix = "s";
  std::size_t n_conversations = 100;
  SizeDistribution size_distribution = Geometric{};
  double attachment_alpha = 0.0;
  AuthorPolicy authors = OnePerTweet{};
  LabelVector root_label_distribution{0.25, 0.25, 0.25, 0.25};
  ReplyKernel reply_kernel{};
  double self_reply_prob = 0.0;
  std::uint64_t seed = 0;
  // Each conversation draws from its own stream derived from (seed, index),
  // so conversations can be generated independently.
  bool per_conversation_seeds = false;
};

// Throws Error(config) describing the first violated constraint.
void validate(const GeneratorConfig& config);

GeneratorConfig config_from_json(const std::string& json_text);
GeneratorConfig load_config(const std::filesystem::path& path);

std::vector<TweetRecord> generate(const GeneratorConfig& config);
Corpus generate_corpus(const GeneratorConfig& config);

// JSONL in the ingest schema, one tweet per line.
void write_jsonl(std::ostream& out, const std::vector<TweetRecord>& tweets);

// Stationary distribution of the kernel (power iteration). Useful to build a
// root distribution that keeps every depth at the same label mix.
LabelVector stationary_distribution(const ReplyKernel& kernel);

// Column j = (1 - mix) e_j + mix * target. Its stationary distribution is
// `target`; smaller `mix` means more assortative replies.
ReplyKernel assortative_kernel(const LabelVector& target, double mix);

}  // namespace vdk::synth
