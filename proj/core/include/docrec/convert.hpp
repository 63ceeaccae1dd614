#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "docrec/model.hpp"

namespace docrec {

/// Detection-style record: what survives when transcriptions are dropped.
struct LayoutRecord {
  Category category = Category::Paragraph;
  BoundingBox bbox;
  double score = 1.0;

  bool operator==(const LayoutRecord&) const = default;
};

/// Markdown rendering: transcription_text() of each element (all coordinates
/// discarded, tables kept as HTML), elements joined by a blank line.
std::string to_markdown(const Document& doc);

/// One record per element in reading order, score 1.
std::vector<LayoutRecord> to_layout_records(const Document& doc);

/// `[{"category":..,"bbox":[..],"score":..}]`
nlohmann::json layout_records_to_json(const std::vector<LayoutRecord>& records);
std::vector<LayoutRecord> layout_records_from_json(const nlohmann::json& j);

/// Text of paragraphs and tables in element order. Paragraph lines and table
/// rows end up on separate lines; table cells are separated by one space.
/// Formulas, figures and elements without text are skipped.
std::string to_plain_text(const Document& doc);

/// table_html() of every table element, coordinates stripped.
std::vector<std::string> extract_tables(const Document& doc);

std::vector<std::string> extract_formulas(const Document& doc);

}  // namespace docrec
