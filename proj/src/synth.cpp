#include "vdk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "format.hpp"

namespace vdk::synth {
namespace {

constexpr double kSumTolerance = 1e-12;

// Distribution helpers are spelled out instead of using <random>
// distributions, whose output differs between standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

template <typename Weights>
std::size_t categorical(std::mt19937_64& rng, const Weights& w) {
  double total = 0.0;
  for (double x : w) total += x;
  double u = uniform01(rng) * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    if (u < w[i]) return i;
    u -= w[i];
  }
  return last;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::size_t draw_size(std::mt19937_64& rng, const SizeDistribution& dist) {
  struct Visitor {
    std::mt19937_64& rng;
    std::size_t operator()(const Fixed& f) const { return f.n; }
    std::size_t operator()(const Uniform& u) const {
      return u.lo + uniform_index(rng, u.hi - u.lo + 1);
    }
    std::size_t operator()(const Geometric& g) const {
      if (g.p >= 1.0) return 2;
      double u = uniform01(rng);
      return 2 + static_cast<std::size_t>(std::floor(std::log1p(-u) / std::log1p(-g.p)));
    }
  };
  return std::visit(Visitor{rng}, dist);
}

std::string pad(std::size_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, v);
  return buf;
}

void check_distribution(const LabelVector& p, const std::string& what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorKind::config, what + " has a probability outside [0, 1]");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorKind::config, what + " sums to " + detail::format_double(sum) + ", not 1");
  }
}

void generate_conversation(const GeneratorConfig& cfg, std::size_t index, std::mt19937_64& rng,
                           std::vector<TweetRecord>& out) {
  const std::size_t size = draw_size(rng, cfg.size_distribution);
  const std::string conv_prefix = cfg.id_prefix + pad(index, 7);
  auto tweet_id = [&](std::size_t k) { return conv_prefix + "-" + pad(k, 5); };
  auto author_name = [&](std::size_t k) { return conv_prefix + "-u" + pad(k, 3); };

  const bool one_per_tweet = std::holds_alternative<OnePerTweet>(cfg.authors);
  const std::size_t pool = one_per_tweet ? 0 : std::get<std::size_t>(cfg.authors);
  std::size_t next_author = 0;

  std::vector<Label> labels;
  std::vector<std::size_t> authors;
  std::vector<double> in_degree;
  std::vector<double> weights;

  labels.push_back(label_at(categorical(rng, cfg.root_label_distribution)));
  authors.push_back(one_per_tweet ? next_author++ : uniform_index(rng, pool));
  in_degree.push_back(0.0);
  bool single_author = true;

  out.push_back(TweetRecord{tweet_id(0), author_name(authors[0]), tweet_id(0), std::nullopt,
                            std::nullopt, labels[0]});

  for (std::size_t k = 1; k < size; ++k) {
    weights.resize(k);
    for (std::size_t i = 0; i < k; ++i) weights[i] = std::pow(1.0 + in_degree[i], cfg.attachment_alpha);
    const std::size_t parent = categorical(rng, weights);

    LabelVector column;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      column[c] = cfg.reply_kernel[c][index_of(labels[parent])];
    }
    const Label label = label_at(categorical(rng, column));

    // The last tweet of a so-far single-author thread always brings a second
    // author, so every conversation passes the two-author filter.
    const bool force_other = single_author && k + 1 == size;
    std::size_t author;
    if (!force_other && uniform01(rng) < cfg.self_reply_prob) {
      author = authors[parent];
    } else if (one_per_tweet) {
      author = next_author++;
    } else {
      author = uniform_index(rng, pool - 1);
      if (author >= authors[parent]) ++author;
    }
    single_author = single_author && author == authors[0];

    labels.push_back(label);
    authors.push_back(author);
    in_degree.push_back(0.0);
    in_degree[parent] += 1.0;
    out.push_back(TweetRecord{tweet_id(k), author_name(author), tweet_id(0), tweet_id(parent),
                              std::nullopt, label});
  }
}

template <typename T>
T get_field(const nlohmann::json& obj, const char* key, const char* what) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::config, std::string("config field '") + key + "' must be " + what);
  }
}

}  // namespace

void validate(const GeneratorConfig& cfg) {
  struct SizeCheck {
    void operator()(const Fixed& f) const {
      if (f.n < 2) throw Error(ErrorKind::config, "fixed conversation size must be >= 2");
    }
    void operator()(const Uniform& u) const {
      if (u.lo < 2 || u.hi < u.lo) {
        throw Error(ErrorKind::config, "uniform size range needs 2 <= lo <= hi");
      }
    }
    void operator()(const Geometric& g) const {
      if (!(g.p > 0.0 && g.p <= 1.0)) {
        throw Error(ErrorKind::config, "geometric size parameter p must lie in (0, 1]");
      }
    }
  };
  std::visit(SizeCheck{}, cfg.size_distribution);

  if (!(cfg.attachment_alpha >= 0.0) || !std::isfinite(cfg.attachment_alpha)) {
    throw Error(ErrorKind::config, "attachment exponent must be finite and >= 0");
  }
  if (const auto* n = std::get_if<std::size_t>(&cfg.authors); n && *n < 2) {
    throw Error(ErrorKind::config, "need at least 2 authors per conversation");
  }
  if (!(cfg.self_reply_prob >= 0.0 && cfg.self_reply_prob < 1.0)) {
    throw Error(ErrorKind::config, "self_reply_prob must lie in [0, 1)");
  }
  check_distribution(cfg.root_label_distribution, "root_label_distribution");
  for (std::size_t parent = 0; parent < kNumLabels; ++parent) {
    LabelVector column;
    for (std::size_t child = 0; child < kNumLabels; ++child) {
      column[child] = cfg.reply_kernel[child][parent];
    }
    check_distribution(column, "reply_kernel column " + std::string(to_string(label_at(parent))));
  }
}

GeneratorConfig config_from_json(const std::string& json_text) {
  using nlohmann::json;
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("generator config is not valid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorKind::config, "generator config must be a JSON object");

  static const std::vector<std::string> known = {
      "topic",           "id_prefix",          "n_conversations",         "size_distribution",
      "attachment_alpha", "n_authors_per_conversation", "root_label_distribution",
      "reply_kernel",    "self_reply_prob",    "seed",                    "per_conversation_seeds"};
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorKind::config, "unknown generator config field '" + item.key() + "'");
    }
  }

  GeneratorConfig cfg;
  if (obj.contains("topic")) cfg.topic = get_field<std::string>(obj, "topic", "a string");
  if (obj.contains("id_prefix")) cfg.id_prefix = get_field<std::string>(obj, "id_prefix", "a string");
  cfg.n_conversations = get_field<std::size_t>(obj, "n_conversations", "a count");

  const json& size = obj.contains("size_distribution") ? obj.at("size_distribution")
                                                        : throw Error(ErrorKind::config,
                                                                      "missing size_distribution");
  auto kind = get_field<std::string>(size, "kind", "one of geometric|fixed|uniform");
  if (kind == "geometric") {
    cfg.size_distribution = Geometric{get_field<double>(size, "p", "a number")};
  } else if (kind == "fixed") {
    cfg.size_distribution = Fixed{get_field<std::size_t>(size, "n", "a count")};
  } else if (kind == "uniform") {
    cfg.size_distribution = Uniform{get_field<std::size_t>(size, "lo", "a count"),
                                    get_field<std::size_t>(size, "hi", "a count")};
  } else {
    throw Error(ErrorKind::config, "unknown size distribution '" + kind + "'");
  }

  if (obj.contains("attachment_alpha")) {
    cfg.attachment_alpha = get_field<double>(obj, "attachment_alpha", "a number");
  }
  if (obj.contains("n_authors_per_conversation")) {
    const auto& a = obj.at("n_authors_per_conversation");
    if (a.is_string() && a.get<std::string>() == "one-per-tweet") {
      cfg.authors = OnePerTweet{};
    } else {
      cfg.authors = get_field<std::size_t>(obj, "n_authors_per_conversation",
                                           "a count or \"one-per-tweet\"");
    }
  }
  cfg.root_label_distribution =
      get_field<LabelVector>(obj, "root_label_distribution", "an array of 4 probabilities");
  cfg.reply_kernel = get_field<ReplyKernel>(obj, "reply_kernel",
                                            "a 4x4 array indexed [child][parent]");
  if (obj.contains("self_reply_prob")) {
    cfg.self_reply_prob = get_field<double>(obj, "self_reply_prob", "a number");
  }
  if (obj.contains("seed")) cfg.seed = get_field<std::uint64_t>(obj, "seed", "an unsigned integer");
  if (obj.contains("per_conversation_seeds")) {
    cfg.per_conversation_seeds = get_field<bool>(obj, "per_conversation_seeds", "a boolean");
  }
  validate(cfg);
  return cfg;
}

GeneratorConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open generator config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::vector<TweetRecord> generate(const GeneratorConfig& config) {
  validate(config);
  std::vector<TweetRecord> out;
  std::mt19937_64 stream(config.seed);
  for (std::size_t c = 0; c < config.n_conversations; ++c) {
    if (config.per_conversation_seeds) {
      std::mt19937_64 local(splitmix64(config.seed ^ splitmix64(c)));
      generate_conversation(config, c, local, out);
    } else {
      generate_conversation(config, c, stream, out);
    }
  }
  return out;
}

Corpus generate_corpus(const GeneratorConfig& config) {
  Corpus c = make_corpus(config.topic, generate(config));
  c.sources.push_back("synthetic:seed=" + std::to_string(config.seed));
  return c;
}

void write_jsonl(std::ostream& out, const std::vector<TweetRecord>& tweets) {
  for (const auto& t : tweets) out << format_tweet_line(t) << '\n';
}

LabelVector stationary_distribution(const ReplyKernel& kernel) {
  LabelVector pi{0.25, 0.25, 0.25, 0.25};
  for (int iter = 0; iter < 100000; ++iter) {
    LabelVector next{};
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      for (std::size_t p = 0; p < kNumLabels; ++p) next[c] += kernel[c][p] * pi[p];
    }
    double delta = 0.0;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      next[c] = 0.5 * (next[c] + pi[c]);  // lazy step; converges for periodic kernels too
      delta = std::max(delta, std::abs(next[c] - pi[c]));
    }
    pi = next;
    if (delta < 1e-16) break;
  }
  return pi;
}

ReplyKernel assortative_kernel(const LabelVector& target, double mix) {
  ReplyKernel q{};
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    for (std::size_t p = 0; p < kNumLabels; ++p) {
      q[c][p] = mix * target[c] + (c == p ? 1.0 - mix : 0.0);
    }
  }
  return q;
}

}  // namespace vdk::synth
