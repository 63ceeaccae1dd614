#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace docrec {

/// Axis-aligned box in page pixel coordinates, origin top-left.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool well_ordered() const { return x_min <= x_max && y_min <= y_max; }
  bool within(double page_width, double page_height) const {
    return x_min >= 0.0 && y_min >= 0.0 && x_max <= page_width && y_max <= page_height;
  }

  bool operator==(const BoundingBox&) const = default;
};

enum class Category { Paragraph, Table, Formula, Figure };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::Paragraph, Category::Table, Category::Formula, Category::Figure};

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view name);

struct TextLine {
  BoundingBox bbox;
  std::string text;

  bool operator==(const TextLine&) const = default;
};

struct TableCell {
  BoundingBox bbox;
  int rowspan = 1;
  int colspan = 1;
  std::string text;

  bool operator==(const TableCell&) const = default;
};

struct ParagraphContent {
  std::vector<TextLine> lines;
  bool operator==(const ParagraphContent&) const = default;
};

struct TableContent {
  std::vector<std::vector<TableCell>> rows;
  bool operator==(const TableContent&) const = default;
};

struct FormulaContent {
  std::string latex;
  bool operator==(const FormulaContent&) const = default;
};

struct FigureContent {
  bool operator==(const FigureContent&) const = default;
};

using Transcription = std::variant<ParagraphContent, TableContent, FormulaContent, FigureContent>;

/// The category whose content variant this is.
Category content_category(const Transcription& t);

/// Empty content of the variant belonging to `c`.
Transcription empty_content(Category c);

struct Element {
  Category category = Category::Paragraph;
  BoundingBox bbox;
  Transcription content;

  bool operator==(const Element&) const = default;
};

/// Page dimensions plus elements; list order is reading order.
struct Document {
  double page_width = 0.0;
  double page_height = 0.0;
  std::vector<Element> elements;

  bool operator==(const Document&) const = default;
};

inline constexpr int kDefaultBins = 1000;

// floor(v / extent * bins) clamped to [0, bins-1]. Throws DomainError when
// v is outside [0, extent], extent <= 0 or bins < 2.
int quantize_coord(double v, double extent, int bins = kDefaultBins);

// Center of the bin: (bin + 0.5) / bins * extent.
double dequantize_coord(int bin, double extent, int bins = kDefaultBins);

struct Violation {
  std::optional<std::size_t> element;  // nullopt for document-level problems
  std::string message;

  std::string describe() const;
  bool operator==(const Violation&) const = default;
};

/// Every broken invariant of `doc`; empty iff the document is valid.
std::vector<Violation> validate_document(const Document& doc);

/// Raised where a valid document is required but validate_document() objects.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// `<tr><td>..</td></tr>` markup without cell coordinates; span
/// attributes appear only when greater than one.
std::string table_html(const TableContent& table);

/// String form of an element's content used for transcription comparison and
/// markdown: paragraph lines joined by '\n', table HTML, LaTeX, or "" for
/// figures.
std::string transcription_text(const Element& e);

}  // namespace docrec
