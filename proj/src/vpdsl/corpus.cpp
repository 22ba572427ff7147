#include "parallax/vpdsl/corpus.hpp"

#include <vector>

#include "parallax/json.hpp"
#include "resources/embedded.hpp"

namespace parallax::vpdsl {

std::span<const CorpusExample> example_corpus() {
  static const std::vector<CorpusExample> corpus = [] {
    std::vector<CorpusExample> out;
    const Json doc = Json::parse(resources::text(resources::Resource::Corpus));
    for (const auto& e : doc.at("examples")) {
      out.push_back({e.at("number").get<int>(), e.at("description").get<std::string>(),
                     e.at("program").get<std::string>(), e.at("normalized").get<bool>()});
    }
    return out;
  }();
  return corpus;
}

}  // namespace parallax::vpdsl
