#include "vdk/types.hpp"

#include <cctype>

namespace vdk {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::L1:
      return "L1";
    case Label::L2:
      return "L2";
    case Label::L3:
      return "L3";
    case Label::L4:
      return "L4";
  }
  return "L1";
}

Label parse_label(std::string_view s) {
  if (s.size() == 2 && (s[0] == 'L' || s[0] == 'l') && s[1] >= '1' && s[1] <= '4') {
    return label_at(static_cast<std::size_t>(s[1] - '1'));
  }
  throw Error(ErrorKind::schema, "unknown label '" + std::string(s) + "'");
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
      return "parse";
    case ErrorKind::schema:
      return "schema";
    case ErrorKind::validation:
      return "validation";
    case ErrorKind::duplicate_id:
      return "duplicate_id";
    case ErrorKind::cycle:
      return "cycle";
    case ErrorKind::config:
      return "config";
    case ErrorKind::io:
      return "io";
  }
  return "unknown";
}

}  // namespace vdk
