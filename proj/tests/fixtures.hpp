#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "vdk/conversation.hpp"
#include "vdk/ingest.hpp"

namespace fixtures {

inline vdk::TweetRecord tweet(std::string id, std::string author, std::string conv,
                              std::optional<std::string> parent = std::nullopt,
                              vdk::Label label = vdk::Label::L1) {
  return vdk::TweetRecord{std::move(id), std::move(author), std::move(conv), std::move(parent),
                          std::nullopt, label};
}

// Tweet ids are "t<k>" zero-padded so id order equals index order; authors
// are "u<a>".
inline std::string tid(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%03d", k);
  return buf;
}
inline std::string uid(int a) { return "u" + std::to_string(a); }

inline std::vector<vdk::TweetRecord> records(const oracle::Thread& t, const std::string& conv) {
  std::vector<vdk::TweetRecord> out;
  for (std::size_t k = 0; k < t.parent.size(); ++k) {
    std::optional<std::string> parent;
    if (t.parent[k] >= 0) parent = conv + "-" + tid(t.parent[k]);
    out.push_back(tweet(conv + "-" + tid(static_cast<int>(k)), uid(t.author[k]), conv, parent,
                        vdk::label_at(static_cast<std::size_t>(t.label[k]))));
  }
  return out;
}

inline vdk::ConversationTree tree(const oracle::Thread& t, const std::string& conv = "c") {
  return vdk::ConversationTree(conv, records(t, conv));
}

// Toy thread: A root by u1; B and C reply to A; D (by u1 again) replies to C.
inline std::vector<vdk::TweetRecord> fig2(vdk::Label a = vdk::Label::L3,
                                          vdk::Label b = vdk::Label::L4,
                                          vdk::Label c = vdk::Label::L3,
                                          vdk::Label d = vdk::Label::L2) {
  return {tweet("A", "u1", "A", std::nullopt, a), tweet("B", "u2", "A", "A", b),
          tweet("C", "u3", "A", "A", c), tweet("D", "u1", "A", "C", d)};
}

// Random recursive tree: node k attaches to a uniform earlier node.
inline oracle::Thread random_thread(std::mt19937_64& rng, int size, int authors, int labels,
                                    int first_label = 0) {
  oracle::Thread t;
  for (int k = 0; k < size; ++k) {
    t.parent.push_back(k == 0 ? -1 : static_cast<int>(rng() % static_cast<unsigned>(k)));
    t.author.push_back(static_cast<int>(rng() % static_cast<unsigned>(authors)));
    t.label.push_back(first_label + static_cast<int>(rng() % static_cast<unsigned>(labels)));
  }
  return t;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "vdk-test-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary);
  out << contents;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_jsonl(const std::filesystem::path& p,
                        const std::vector<vdk::TweetRecord>& tweets) {
  std::ofstream out(p, std::ios::binary);
  for (const auto& t : tweets) out << vdk::format_tweet_line(t) << '\n';
}

// `conversations` trees with `nodes` tweets in total; sizes differ by at most
// one, each conversation is a two-author chain.
inline std::vector<vdk::TweetRecord> shaped_corpus(std::size_t conversations, std::size_t nodes) {
  std::vector<vdk::TweetRecord> out;
  for (std::size_t c = 0; c < conversations; ++c) {
    std::size_t size = nodes / conversations + (c < nodes % conversations ? 1 : 0);
    std::string conv = "c" + std::to_string(c);
    for (std::size_t k = 0; k < size; ++k) {
      std::optional<std::string> parent;
      if (k > 0) parent = conv + "-" + tid(static_cast<int>(k - 1));
      out.push_back(tweet(conv + "-" + tid(static_cast<int>(k)), uid(static_cast<int>(k % 2)),
                          conv, parent, vdk::label_at(k % vdk::kNumLabels)));
    }
  }
  return out;
}

}  // namespace fixtures
