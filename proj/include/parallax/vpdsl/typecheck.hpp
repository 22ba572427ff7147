#pragma once

#include <vector>

#include "parallax/vpdsl/diagnostics.hpp"
#include "parallax/vpdsl/program.hpp"

namespace parallax::vpdsl {

/// Cell validity, argument names and arity, value types, attribute validity,
/// definition-before-use, unique targets, and the anchor-terminal rule.
std::vector<ProgramDiagnostic> typecheck_program(const VisualProgram& program);

/// parse_program followed by typecheck_program when parsing succeeded.
std::vector<ProgramDiagnostic> check_program(std::string_view source);

}  // namespace parallax::vpdsl
