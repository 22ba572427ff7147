#pragma once

#include <span>
#include <string>

namespace parallax::vpdsl {

/// In-context example: an image description and the matching program.
struct CorpusExample {
  int number = 0;
  std::string description;
  std::string program;
  /// Identifiers were respelled to match their definitions.
  bool normalized = false;
};

std::span<const CorpusExample> example_corpus();

}  // namespace parallax::vpdsl
