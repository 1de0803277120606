#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vdk/types.hpp"

namespace vdk {

enum class Relevance { relevant, irrelevant, not_english };
enum class Claim { diagnostic, counterclaim, none };

struct RawAnnotation {
  Relevance relevance = Relevance::irrelevant;
  Claim claim = Claim::none;
};

Relevance parse_relevance(std::string_view s);
Claim parse_claim(std::string_view s);

// Collapses classifier output into the four-label scheme. Claims win over
// relevance; everything without a claim that is not relevant becomes L1.
Label merge_labels(const RawAnnotation& raw);

// Parses one JSONL tweet object. Accepted keys:
//   id | tweet_id, author_id, conversation_id   (required strings)
//   replied_to                                  (flat parent reference)
//   referenced_tweets: [{type, id}, ...]        (first "replied_to" wins)
//   text, label ("L1".."L4"), relevance + claim (optional)
// `line_no` is only used in error messages.
TweetRecord parse_tweet_line(std::string_view line, std::size_t line_no = 0);

// Inverse of parse_tweet_line for the flat schema. Output is one line without
// a trailing newline and with a fixed key order.
std::string format_tweet_line(const TweetRecord& t);

struct IngestDiagnostics {
  std::size_t lines = 0;             // non-blank tweet lines read
  std::size_t unlabeled = 0;         // tweets defaulted to L1
  std::size_t labels_read = 0;
  std::size_t labels_unmatched = 0;  // label rows naming unknown tweets
};

struct Corpus {
  std::string topic;
  std::vector<TweetRecord> tweets;
  std::vector<std::string> sources;
  std::string ingested_at;  // ISO-8601 UTC; provenance only
  IngestDiagnostics diagnostics;
};

// Builds a corpus from in-memory records and checks the corpus invariants
// (unique ids, resolvable parents stay inside their conversation).
Corpus make_corpus(std::string topic, std::vector<TweetRecord> tweets);

// Labels file: CSV with header `tweet_id,relevance,claim`, or JSONL with the
// same keys. Format is detected from the first non-blank character.
Corpus load_corpus(const std::filesystem::path& tweets_path,
                   const std::optional<std::filesystem::path>& labels_path,
                   const std::string& topic);

std::string diagnostics_json(const IngestDiagnostics& d);

}  // namespace vdk
