#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "docrec/model.hpp"

namespace docrec {

// Canonical document JSON:
//   {"page_width":W,"page_height":H,"elements":[{"category":"Paragraph",
//    "bbox":[x0,y0,x1,y1],"content":{...}}]}
// content is {"lines":[{bbox,text}]}, {"rows":[[{bbox,rowspan,colspan,text}]]},
// {"latex":...} or {} depending on the category. Unknown keys are ignored.
// Shape errors raise FormatError; invariants are left to validate_document.

nlohmann::json bbox_to_json(const BoundingBox& b);
BoundingBox bbox_from_json(const nlohmann::json& j);

nlohmann::json element_to_json(const Element& e);
Element element_from_json(const nlohmann::json& j);

nlohmann::json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

/// One compact line, no trailing newline.
std::string dump_document(const Document& doc);
Document parse_document(std::string_view text);

}  // namespace docrec
