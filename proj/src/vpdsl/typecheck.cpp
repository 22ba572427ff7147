#include "parallax/vpdsl/typecheck.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "parallax/vpdsl/cells.hpp"
#include "parallax/vpdsl/parser.hpp"

namespace parallax::vpdsl {
namespace {

std::string join_types(const std::vector<ValueType>& types) {
  std::string out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i) out += " or ";
    out += to_string(types[i]);
  }
  return out;
}

}  // namespace

std::vector<ProgramDiagnostic> typecheck_program(const VisualProgram& program) {
  std::vector<ProgramDiagnostic> out;
  // nullopt type: defined by a statement whose cell is unknown.
  std::map<std::string, std::optional<ValueType>> env;
  auto diag = [&](DiagnosticKind kind, std::size_t index, Span span, std::string message) {
    out.push_back({kind, index, span, std::move(message), {}, {}});
  };

  for (std::size_t index = 0; index < program.statements.size(); ++index) {
    const Assignment& stmt = program.statements[index];
    const CellSpec* cell = find_cell(stmt.cell);
    if (!cell) diag(DiagnosticKind::UnknownCell, index, stmt.cell_span, "unknown program cell '" + stmt.cell + "'");

    std::vector<const ParamSpec*> bound;
    for (const Argument& arg : stmt.args) {
      const ParamSpec* param = nullptr;
      if (cell) {
        for (const auto& p : cell->params)
          if (iequals(p.name, arg.name)) param = &p;
        if (!param) {
          diag(DiagnosticKind::ArgumentError, index, arg.span,
               std::string(cell->name) + " has no argument '" + arg.name + "'");
        } else if (std::find(bound.begin(), bound.end(), param) != bound.end()) {
          diag(DiagnosticKind::ArgumentError, index, arg.span, "argument '" + arg.name + "' given twice");
          param = nullptr;
        } else {
          bound.push_back(param);
        }
      }

      std::optional<ValueType> type;
      bool known = true;
      switch (arg.value.kind) {
        case Value::Kind::String: type = ValueType::String; break;
        case Value::Kind::Null: type = ValueType::Null; break;
        case Value::Kind::Identifier: {
          auto it = env.find(arg.value.text);
          if (it == env.end()) {
            diag(DiagnosticKind::UndefinedIdentifier, index, arg.value.span,
                 "'" + arg.value.text + "' is not defined by an earlier statement");
            known = false;
            break;
          }
          if (!it->second) {
            known = false;
            break;
          }
          type = *it->second;
          if (arg.value.attribute) {
            const auto attr = attribute_type(*type, *arg.value.attribute);
            if (!attr) {
              diag(DiagnosticKind::UnknownAttribute, index, arg.value.span,
                   std::string(to_string(*type)) + " has no attribute '" + *arg.value.attribute + "'");
              known = false;
              break;
            }
            type = attr;
          }
          break;
        }
      }
      if (param && known && type &&
          std::find(param->accepts.begin(), param->accepts.end(), *type) == param->accepts.end()) {
        diag(DiagnosticKind::TypeMismatch, index, arg.value.span,
             "argument '" + arg.name + "' of " + std::string(cell->name) + " expects " +
                 join_types(param->accepts) + ", got " + std::string(to_string(*type)));
      }
    }

    if (cell) {
      for (const auto& p : cell->params) {
        if (p.optional || std::find(bound.begin(), bound.end(), &p) != bound.end()) continue;
        diag(DiagnosticKind::ArgumentError, index, stmt.cell_span,
             std::string(cell->name) + " is missing argument '" + std::string(p.name) + "'");
      }
    }

    if (env.count(stmt.target)) {
      diag(DiagnosticKind::DuplicateTarget, index, stmt.target_span, "'" + stmt.target + "' is already defined");
    } else {
      env[stmt.target] = cell ? std::optional<ValueType>(cell->result) : std::nullopt;
    }
  }

  if (!program.statements.empty()) {
    const std::size_t last = program.statements.size() - 1;
    const Assignment& stmt = program.statements[last];
    const CellSpec* cell = find_cell(stmt.cell);
    if (cell && !is_anchor_cell(cell->id)) {
      diag(DiagnosticKind::NotAnchorTerminal, last, stmt.span,
           "program ends with " + std::string(cell->name) + " instead of a parametric anchor (Planar, Cylindrical or Spherical)");
    }
  }
  return out;
}

std::vector<ProgramDiagnostic> check_program(std::string_view source) {
  ParseResult parsed = parse_program(source);
  if (!parsed.ok()) return parsed.diagnostics;
  return typecheck_program(parsed.program);
}

}  // namespace parallax::vpdsl
