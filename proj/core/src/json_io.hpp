#pragma once

// Private to the core library: JSON-level (de)serialisation shared by the
// tree and model documents.

#include <json.hpp>

#include "cobweb/cobweb_tree.hpp"

namespace cobweb::detail {

nlohmann::json tree_document(const CobwebTree& tree);
CobwebTree tree_from_document(const nlohmann::json& doc);

// Parses text, turning parser failures into DataError.
nlohmann::json parse_document(std::string_view text);

}  // namespace cobweb::detail
