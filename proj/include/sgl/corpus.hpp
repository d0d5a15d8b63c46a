#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sgl/types.hpp"

namespace sgl {

// Parses a corpus document:
//   { "samples": [ { "id": str, "width": int, "height": int,
//       "objects": [ {"id": int, "class": str, "attributes": [str], "box": [x, y, w, h]} ],
//       "relationships": [ {"subject": int, "predicate": str, "object": int} ] } ] }
//
// Class, predicate and attribute labels are normalized on the way in
// (lowercased, whitespace runs replaced by one underscore) and must then
// match the token grammar [a-z0-9_]+. Boxes are clipped to the image
// rectangle; a box with non-positive size, or one lying entirely outside
// the image, is a ParseError naming the sample and field. Relationship
// order is preserved exactly as listed.
std::vector<GroundedSample> parse_corpus(std::string_view document);

std::vector<GroundedSample> load_corpus(const std::filesystem::path& path);

std::string corpus_to_json(const std::vector<GroundedSample>& samples);
void save_corpus(const std::vector<GroundedSample>& samples, const std::filesystem::path& path);

// Split manifest: one sample id per line; blank lines ignored.
std::vector<std::string> read_manifest(const std::filesystem::path& path);

}  // namespace sgl
