#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace parallax::vpdsl {

/// Half-open byte range into the program source.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct Value {
  enum class Kind { String, Identifier, Null };
  Kind kind = Kind::Null;
  std::string text;                     // string contents or identifier name
  std::optional<std::string> attribute; // IDENT "." ATTR
  Span span;

  [[nodiscard]] std::string reference() const {
    return attribute ? text + "." + *attribute : text;
  }
};

struct Argument {
  std::string name;
  Value value;
  Span span;
};

struct Assignment {
  std::string target;
  Span target_span;
  std::string cell;
  Span cell_span;
  std::vector<Argument> args;
  Span span;
};

struct VisualProgram {
  std::vector<Assignment> statements;
  std::string source_text;
};

}  // namespace parallax::vpdsl
