#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parallax/json.hpp"

#include "parallax/vpdsl/program.hpp"

namespace parallax::vpdsl {

enum class DiagnosticKind {
  ParseError,
  UnknownCell,
  TypeMismatch,
  UndefinedIdentifier,
  UnknownAttribute,
  DuplicateTarget,
  ArgumentError,
  NotAnchorTerminal,
  RuntimeFailure,
};

std::string_view to_string(DiagnosticKind kind) noexcept;

struct ProgramDiagnostic {
  DiagnosticKind kind = DiagnosticKind::ParseError;
  std::size_t statement = 0;
  Span span;
  std::string message;
  // RuntimeFailure only.
  std::string cell;
  std::string cause;
};

/// {"kind":..., "statement":i, "span":[a,b], "message":...}, plus "cell" and
/// "cause" for runtime failures.
Json to_json(const ProgramDiagnostic& diagnostic);
ProgramDiagnostic diagnostic_from_json(const Json& j);

}  // namespace parallax::vpdsl
