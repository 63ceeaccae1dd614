#include "docrec/convert.hpp"

#include "docrec/error.hpp"
#include "docrec/json_io.hpp"

namespace docrec {

std::string to_markdown(const Document& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.elements.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += transcription_text(doc.elements[i]);
  }
  return out;
}

std::vector<LayoutRecord> to_layout_records(const Document& doc) {
  std::vector<LayoutRecord> out;
  out.reserve(doc.elements.size());
  for (const auto& e : doc.elements) out.push_back({e.category, e.bbox, 1.0});
  return out;
}

nlohmann::json layout_records_to_json(const std::vector<LayoutRecord>& records) {
  auto out = nlohmann::json::array();
  for (const auto& r : records) {
    out.push_back({{"category", to_string(r.category)}, {"bbox", bbox_to_json(r.bbox)}, {"score", r.score}});
  }
  return out;
}

std::vector<LayoutRecord> layout_records_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("layout records must be an array");
  std::vector<LayoutRecord> out;
  for (const auto& r : j) {
    if (!r.is_object() || !r.contains("category") || !r.contains("bbox") || !r.contains("score")) {
      throw FormatError("layout record needs category, bbox and score");
    }
    if (!r["category"].is_string() || !r["score"].is_number()) throw FormatError("malformed layout record");
    auto cat = category_from_string(r["category"].get<std::string>());
    if (!cat) throw FormatError("unknown category in layout record");
    out.push_back({*cat, bbox_from_json(r["bbox"]), r["score"].get<double>()});
  }
  return out;
}

namespace {

std::string table_text(const TableContent& t) {
  std::string out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (r > 0) out += '\n';
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      if (c > 0) out += ' ';
      out += t.rows[r][c].text;
    }
  }
  return out;
}

}  // namespace

std::string to_plain_text(const Document& doc) {
  std::string out;
  for (const auto& e : doc.elements) {
    std::string text;
    if (e.category == Category::Paragraph) {
      text = transcription_text(e);
    } else if (const auto* t = std::get_if<TableContent>(&e.content)) {
      text = table_text(*t);
    }
    if (text.empty()) continue;
    if (!out.empty()) out += '\n';
    out += text;
  }
  return out;
}

std::vector<std::string> extract_tables(const Document& doc) {
  std::vector<std::string> out;
  for (const auto& e : doc.elements) {
    if (const auto* t = std::get_if<TableContent>(&e.content)) out.push_back(table_html(*t));
  }
  return out;
}

std::vector<std::string> extract_formulas(const Document& doc) {
  std::vector<std::string> out;
  for (const auto& e : doc.elements) {
    if (const auto* f = std::get_if<FormulaContent>(&e.content)) out.push_back(f->latex);
  }
  return out;
}

}  // namespace docrec
