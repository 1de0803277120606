#include "vdk/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace vdk {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(std::size_t line_no) {
  return line_no == 0 ? std::string() : "line " + std::to_string(line_no) + ": ";
}

// Ids may arrive as strings or as bare integers.
std::optional<std::string> id_field(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer() || it->is_number_unsigned()) return it->dump();
  throw Error(ErrorKind::schema,
              where(line_no) + "field '" + key + "' must be a string or integer id");
}

std::string required_id(const json& obj, std::initializer_list<const char*> keys,
                        std::size_t line_no) {
  for (const char* k : keys) {
    if (auto v = id_field(obj, k, line_no)) {
      if (v->empty()) throw Error(ErrorKind::schema, where(line_no) + "empty '" + k + "'");
      return *v;
    }
  }
  throw Error(ErrorKind::schema, where(line_no) + "missing required field '" +
                                     std::string(*keys.begin()) + "'");
}

std::optional<std::string> replied_to(const json& obj, std::size_t line_no) {
  if (auto flat = id_field(obj, "replied_to", line_no)) return flat;
  auto it = obj.find("referenced_tweets");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_array()) {
    throw Error(ErrorKind::schema, where(line_no) + "'referenced_tweets' must be an array");
  }
  for (const auto& ref : *it) {
    if (ref.is_object() && ref.value("type", "") == "replied_to") {
      return id_field(ref, "id", line_no);
    }
  }
  return std::nullopt;
}

// SOURCE_DATE_EPOCH pins the timestamp for reproducible output.
std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    long long v = std::strtoll(epoch, &end, 10);
    if (*end == '\0' && v >= 0) now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    auto field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.push_back(std::move(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::unordered_map<std::string, RawAnnotation> read_labels(const std::filesystem::path& path,
                                                           std::size_t& rows) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open labels file " + path.string());

  std::unordered_map<std::string, RawAnnotation> labels;
  auto add = [&](std::string id, RawAnnotation raw, std::size_t line_no) {
    if (!labels.emplace(std::move(id), raw).second) {
      throw Error(ErrorKind::duplicate_id,
                  "labels " + where(line_no) + "duplicate tweet_id in labels file");
    }
    ++rows;
  };

  std::string line;
  std::size_t line_no = 0;
  bool csv = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (t.front() != '{') {
        csv = true;
        auto cols = split_csv(t);
        if (cols != std::vector<std::string>{"tweet_id", "relevance", "claim"}) {
          throw Error(ErrorKind::schema,
                      "labels file " + path.string() + ": expected header tweet_id,relevance,claim");
        }
        continue;
      }
    }
    try {
      if (csv) {
        auto cols = split_csv(t);
        if (cols.size() != 3 || cols[0].empty()) {
          throw Error(ErrorKind::schema, where(line_no) + "expected 3 columns");
        }
        add(cols[0], RawAnnotation{parse_relevance(cols[1]), parse_claim(cols[2])}, line_no);
      } else {
        json obj = json::parse(t);
        if (!obj.is_object()) throw Error(ErrorKind::parse, where(line_no) + "not a JSON object");
        auto id = required_id(obj, {"tweet_id", "id"}, line_no);
        if (!obj.contains("relevance") || !obj.contains("claim")) {
          throw Error(ErrorKind::schema, where(line_no) + "label row needs relevance and claim");
        }
        add(std::move(id),
            RawAnnotation{parse_relevance(obj.at("relevance").get<std::string>()),
                          parse_claim(obj.at("claim").get<std::string>())},
            line_no);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse,
                  "labels file " + path.string() + " " + where(line_no) + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), "labels file " + path.string() + ": " + e.what());
    }
  }
  return labels;
}

}  // namespace

Relevance parse_relevance(std::string_view s) {
  auto v = lower(s);
  if (v == "relevant") return Relevance::relevant;
  if (v == "irrelevant" || v == "not_relevant") return Relevance::irrelevant;
  if (v == "not_english") return Relevance::not_english;
  throw Error(ErrorKind::schema, "unknown relevance '" + std::string(s) + "'");
}

Claim parse_claim(std::string_view s) {
  auto v = lower(s);
  if (v == "diagnostic") return Claim::diagnostic;
  if (v == "counterclaim") return Claim::counterclaim;
  if (v == "none") return Claim::none;
  throw Error(ErrorKind::schema, "unknown claim '" + std::string(s) + "'");
}

Label merge_labels(const RawAnnotation& raw) {
  switch (raw.claim) {
    case Claim::diagnostic:
      return Label::L3;
    case Claim::counterclaim:
      return Label::L4;
    case Claim::none:
      break;
  }
  return raw.relevance == Relevance::relevant ? Label::L2 : Label::L1;
}

namespace {

TweetRecord parse_record(std::string_view line, std::size_t line_no, bool& labeled) {
  labeled = false;
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, where(line_no) + "malformed JSON: " + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorKind::parse, where(line_no) + "expected a JSON object");

  TweetRecord t;
  t.tweet_id = required_id(obj, {"id", "tweet_id"}, line_no);
  t.author_id = required_id(obj, {"author_id"}, line_no);
  t.conversation_id = required_id(obj, {"conversation_id"}, line_no);
  t.parent_id = replied_to(obj, line_no);
  if (t.parent_id && *t.parent_id == t.tweet_id) {
    throw Error(ErrorKind::validation, where(line_no) + "tweet " + t.tweet_id + " replies to itself");
  }

  try {
    if (auto it = obj.find("text"); it != obj.end() && it->is_string()) {
      t.text = it->get<std::string>();
    }
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
      t.label = parse_label(it->get<std::string>());
      labeled = true;
    } else if (obj.contains("relevance") && obj.contains("claim")) {
      t.label = merge_labels({parse_relevance(obj.at("relevance").get<std::string>()),
                              parse_claim(obj.at("claim").get<std::string>())});
      labeled = true;
    }
  } catch (const json::type_error& e) {
    throw Error(ErrorKind::schema, where(line_no) + e.what());
  } catch (const Error& e) {
    throw Error(e.kind(), where(line_no) + e.what());
  }
  return t;
}

}  // namespace

TweetRecord parse_tweet_line(std::string_view line, std::size_t line_no) {
  bool labeled = false;
  return parse_record(line, line_no, labeled);
}

std::string format_tweet_line(const TweetRecord& t) {
  json obj = json::object();
  // nlohmann::json sorts object keys, which gives a fixed order.
  obj["id"] = t.tweet_id;
  obj["author_id"] = t.author_id;
  obj["conversation_id"] = t.conversation_id;
  if (t.parent_id) obj["replied_to"] = *t.parent_id;
  if (t.text) obj["text"] = *t.text;
  obj["label"] = std::string(to_string(t.label));
  return obj.dump();
}

Corpus make_corpus(std::string topic, std::vector<TweetRecord> tweets) {
  std::unordered_map<std::string_view, std::size_t> by_id;
  by_id.reserve(tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto& t = tweets[i];
    if (t.parent_id && *t.parent_id == t.tweet_id) {
      throw Error(ErrorKind::validation, "tweet " + t.tweet_id + " replies to itself");
    }
    if (!by_id.emplace(t.tweet_id, i).second) {
      throw Error(ErrorKind::duplicate_id, "duplicate tweet_id " + t.tweet_id);
    }
  }
  for (const auto& t : tweets) {
    if (!t.parent_id) continue;
    auto it = by_id.find(*t.parent_id);
    if (it != by_id.end() && tweets[it->second].conversation_id != t.conversation_id) {
      throw Error(ErrorKind::validation, "tweet " + t.tweet_id + " replies to " + *t.parent_id +
                                             " in a different conversation");
    }
  }
  Corpus c;
  c.topic = std::move(topic);
  c.tweets = std::move(tweets);
  c.ingested_at = utc_now();
  c.diagnostics.lines = c.tweets.size();
  return c;
}

Corpus load_corpus(const std::filesystem::path& tweets_path,
                   const std::optional<std::filesystem::path>& labels_path,
                   const std::string& topic) {
  std::ifstream in(tweets_path);
  if (!in) throw Error(ErrorKind::io, "cannot open tweets file " + tweets_path.string());

  std::vector<TweetRecord> tweets;
  std::vector<bool> inline_label;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    bool labeled = false;
    tweets.push_back(parse_record(line, line_no, labeled));
    inline_label.push_back(labeled);
  }
  if (in.bad()) throw Error(ErrorKind::io, "read error on " + tweets_path.string());

  IngestDiagnostics diag;
  diag.lines = tweets.size();
  std::unordered_map<std::string, RawAnnotation> labels;
  if (labels_path) labels = read_labels(*labels_path, diag.labels_read);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    auto& t = tweets[i];
    if (auto it = labels.find(t.tweet_id); it != labels.end()) {
      t.label = merge_labels(it->second);
      ++matched;
    } else if (!inline_label[i]) {
      t.label = Label::L1;
      ++diag.unlabeled;
    }
  }
  diag.labels_unmatched = labels.size() - std::min(matched, labels.size());

  Corpus c = make_corpus(topic, std::move(tweets));
  c.diagnostics = diag;
  c.sources.push_back(tweets_path.string());
  if (labels_path) c.sources.push_back(labels_path->string());
  return c;
}

std::string diagnostics_json(const IngestDiagnostics& d) {
  json obj = {{"lines", d.lines},
              {"unlabeled", d.unlabeled},
              {"labels_read", d.labels_read},
              {"labels_unmatched", d.labels_unmatched}};
  return obj.dump();
}

}  // namespace vdk
