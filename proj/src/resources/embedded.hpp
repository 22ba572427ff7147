#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace parallax::resources {

enum class Resource { Corpus, PromptTemplate, PlaceholderText };

std::span<const std::uint8_t> bytes(Resource resource) noexcept;

inline std::string_view text(Resource resource) noexcept {
  const auto b = bytes(resource);
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

}  // namespace parallax::resources
