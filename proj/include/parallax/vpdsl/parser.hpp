#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "parallax/vpdsl/diagnostics.hpp"
#include "parallax/vpdsl/program.hpp"

namespace parallax::vpdsl {

enum class TokenKind { Ident, String, Equals, LParen, RParen, Comma, Dot, End, Invalid };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  Span span;
};

/// Whole-input tokenization. Whitespace (including newlines) separates tokens
/// and is otherwise ignored. Malformed characters become Invalid tokens.
std::vector<Token> tokenize(std::string_view source);

struct ParseResult {
  VisualProgram program;
  std::vector<ProgramDiagnostic> diagnostics;

  [[nodiscard]] bool ok() const noexcept { return diagnostics.empty(); }
};

/// program   = statement+
/// statement = IDENT "=" IDENT "(" [arg ("," arg)*] ")"
/// arg       = IDENT "=" value
/// value     = STRING | IDENT ["." IDENT] | NULL
///
/// Never throws; each malformed statement yields a ParseError and parsing
/// resumes at the next line.
ParseResult parse_program(std::string_view source);

/// Removes the backslash of LaTeX escapes such as `\_` (corpus ingestion).
std::string strip_latex_escapes(std::string_view text);

}  // namespace parallax::vpdsl
