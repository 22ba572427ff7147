#pragma once

#include <json.hpp>

namespace parallax {

/// Key order follows insertion so emitted documents are stable and readable.
using Json = nlohmann::ordered_json;

}  // namespace parallax
