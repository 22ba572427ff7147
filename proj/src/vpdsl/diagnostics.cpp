#include "parallax/vpdsl/diagnostics.hpp"

#include <array>

namespace parallax::vpdsl {
namespace {

constexpr std::array<std::pair<DiagnosticKind, std::string_view>, 9> kNames = {{
    {DiagnosticKind::ParseError, "ParseError"},
    {DiagnosticKind::UnknownCell, "UnknownCell"},
    {DiagnosticKind::TypeMismatch, "TypeMismatch"},
    {DiagnosticKind::UndefinedIdentifier, "UndefinedIdentifier"},
    {DiagnosticKind::UnknownAttribute, "UnknownAttribute"},
    {DiagnosticKind::DuplicateTarget, "DuplicateTarget"},
    {DiagnosticKind::ArgumentError, "ArgumentError"},
    {DiagnosticKind::NotAnchorTerminal, "NotAnchorTerminal"},
    {DiagnosticKind::RuntimeFailure, "RuntimeFailure"},
}};

}  // namespace

std::string_view to_string(DiagnosticKind kind) noexcept {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "ParseError";
}

Json to_json(const ProgramDiagnostic& diagnostic) {
  Json j;
  j["kind"] = to_string(diagnostic.kind);
  j["statement"] = diagnostic.statement;
  j["span"] = {diagnostic.span.begin, diagnostic.span.end};
  j["message"] = diagnostic.message;
  if (diagnostic.kind == DiagnosticKind::RuntimeFailure) {
    j["cell"] = diagnostic.cell;
    j["cause"] = diagnostic.cause;
  }
  return j;
}

ProgramDiagnostic diagnostic_from_json(const Json& j) {
  ProgramDiagnostic d;
  const auto kind = j.at("kind").get<std::string>();
  for (const auto& [k, name] : kNames)
    if (name == kind) d.kind = k;
  d.statement = j.at("statement").get<std::size_t>();
  d.span = {j.at("span").at(0).get<std::size_t>(), j.at("span").at(1).get<std::size_t>()};
  d.message = j.at("message").get<std::string>();
  d.cell = j.value("cell", "");
  d.cause = j.value("cause", "");
  return d;
}

}  // namespace parallax::vpdsl
