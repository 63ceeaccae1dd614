#include "docrec/json_io.hpp"

#include "docrec/error.hpp"

namespace docrec {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const char* context) {
  if (!j.is_object()) throw FormatError(std::string(context) + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) {
    throw FormatError(std::string(context) + " is missing \"" + key + "\"");
  }
  return *it;
}

double number(const json& j, const char* context) {
  if (!j.is_number()) throw FormatError(std::string(context) + " must be a number");
  return j.get<double>();
}

std::string text(const json& j, const char* context) {
  if (!j.is_string()) throw FormatError(std::string(context) + " must be a string");
  return j.get<std::string>();
}

int span(const json& cell, const char* key) {
  auto it = cell.find(key);
  if (it == cell.end()) return 1;
  if (!it->is_number_integer()) throw FormatError(std::string(key) + " must be an integer");
  const auto v = it->get<long long>();
  if (v < -1'000'000 || v > 1'000'000) throw FormatError(std::string(key) + " out of range");
  return static_cast<int>(v);
}

const json& array_field(const json& j, const char* key, const char* context) {
  const json& a = require(j, key, context);
  if (!a.is_array()) throw FormatError(std::string(context) + "." + key + " must be an array");
  return a;
}

Transcription content_from_json(Category c, const json& j) {
  if (!j.is_object()) throw FormatError("content must be an object");
  switch (c) {
    case Category::Paragraph: {
      ParagraphContent p;
      for (const auto& line : array_field(j, "lines", "content")) {
        p.lines.push_back({bbox_from_json(require(line, "bbox", "line")),
                           text(require(line, "text", "line"), "line.text")});
      }
      return p;
    }
    case Category::Table: {
      TableContent t;
      for (const auto& row : array_field(j, "rows", "content")) {
        if (!row.is_array()) throw FormatError("table row must be an array");
        auto& out = t.rows.emplace_back();
        for (const auto& cell : row) {
          out.push_back({bbox_from_json(require(cell, "bbox", "cell")), span(cell, "rowspan"),
                         span(cell, "colspan"), text(require(cell, "text", "cell"), "cell.text")});
        }
      }
      return t;
    }
    case Category::Formula:
      return FormulaContent{text(require(j, "latex", "content"), "content.latex")};
    case Category::Figure:
      return FigureContent{};
  }
  return FigureContent{};
}

json content_to_json(const Transcription& t) {
  struct Visitor {
    json operator()(const ParagraphContent& p) const {
      json lines = json::array();
      for (const auto& l : p.lines) lines.push_back({{"bbox", bbox_to_json(l.bbox)}, {"text", l.text}});
      return {{"lines", std::move(lines)}};
    }
    json operator()(const TableContent& t) const {
      json rows = json::array();
      for (const auto& row : t.rows) {
        json cells = json::array();
        for (const auto& c : row) {
          cells.push_back({{"bbox", bbox_to_json(c.bbox)},
                           {"rowspan", c.rowspan},
                           {"colspan", c.colspan},
                           {"text", c.text}});
        }
        rows.push_back(std::move(cells));
      }
      return {{"rows", std::move(rows)}};
    }
    json operator()(const FormulaContent& f) const { return {{"latex", f.latex}}; }
    json operator()(const FigureContent&) const { return json::object(); }
  };
  return std::visit(Visitor{}, t);
}

}  // namespace

json bbox_to_json(const BoundingBox& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

BoundingBox bbox_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("bbox must be an array of 4 numbers");
  return {number(j[0], "bbox"), number(j[1], "bbox"), number(j[2], "bbox"), number(j[3], "bbox")};
}

json element_to_json(const Element& e) {
  return {{"category", to_string(e.category)},
          {"bbox", bbox_to_json(e.bbox)},
          {"content", content_to_json(e.content)}};
}

Element element_from_json(const json& j) {
  const std::string name = text(require(j, "category", "element"), "element.category");
  auto cat = category_from_string(name);
  if (!cat) throw FormatError("unknown category \"" + name + "\"");
  Element e;
  e.category = *cat;
  e.bbox = bbox_from_json(require(j, "bbox", "element"));
  auto it = j.find("content");
  if (it == j.end()) {
    if (*cat != Category::Figure) throw FormatError("element is missing \"content\"");
    e.content = FigureContent{};
  } else {
    e.content = content_from_json(*cat, *it);
  }
  return e;
}

json document_to_json(const Document& doc) {
  json elements = json::array();
  for (const auto& e : doc.elements) elements.push_back(element_to_json(e));
  return {{"page_width", doc.page_width},
          {"page_height", doc.page_height},
          {"elements", std::move(elements)}};
}

Document document_from_json(const json& j) {
  Document doc;
  doc.page_width = number(require(j, "page_width", "document"), "page_width");
  doc.page_height = number(require(j, "page_height", "document"), "page_height");
  for (const auto& e : array_field(j, "elements", "document")) {
    doc.elements.push_back(element_from_json(e));
  }
  return doc;
}

std::string dump_document(const Document& doc) {
  return document_to_json(doc).dump(-1, ' ', false, json::error_handler_t::strict);
}

Document parse_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  return document_from_json(j);
}

}  // namespace docrec
