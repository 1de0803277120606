#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vdk {

// Viewpoint labels in fixed ordinal order; the ordinal is the matrix row.
enum class Label : std::uint8_t {
  L1 = 0,  // irrelevant
  L2 = 1,  // relevant, no viewpoint
  L3 = 2,  // diagnostic claim
  L4 = 3,  // counterclaim
};

inline constexpr std::size_t kNumLabels = 4;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {Label::L1, Label::L2, Label::L3,
                                                            Label::L4};

constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }
constexpr Label label_at(std::size_t i) { return static_cast<Label>(i); }

std::string_view to_string(Label l);

// Accepts "L1".."L4" (case-insensitive). Throws Error(kind=schema) otherwise.
Label parse_label(std::string_view s);

enum class ErrorKind {
  parse,       // malformed input text
  schema,      // well-formed but missing/invalid fields
  validation,  // violates a structural invariant
  duplicate_id,
  cycle,
  config,
  io,
};

std::string_view to_string(ErrorKind k);

// Every hard failure in the library is reported as vdk::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct TweetRecord {
  std::string tweet_id;
  std::string author_id;
  std::string conversation_id;
  std::optional<std::string> parent_id;  // absent for a root candidate
  std::optional<std::string> text;
  Label label = Label::L1;

  bool operator==(const TweetRecord&) const = default;
};

}  // namespace vdk
