#include "docrec/model.hpp"

#include <cmath>

#include "docrec/error.hpp"
#include "docrec/utf8.hpp"

namespace docrec {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Paragraph: return "Paragraph";
    case Category::Table: return "Table";
    case Category::Formula: return "Formula";
    case Category::Figure: return "Figure";
  }
  return "?";
}

std::optional<Category> category_from_string(std::string_view name) {
  for (Category c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

Category content_category(const Transcription& t) {
  return static_cast<Category>(t.index());
}

Transcription empty_content(Category c) {
  switch (c) {
    case Category::Paragraph: return ParagraphContent{};
    case Category::Table: return TableContent{};
    case Category::Formula: return FormulaContent{};
    case Category::Figure: return FigureContent{};
  }
  return FigureContent{};
}

int quantize_coord(double v, double extent, int bins) {
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw DomainError("quantize_coord: extent must be positive and finite");
  }
  if (bins < 2) throw DomainError("quantize_coord: bins must be >= 2");
  if (!(v >= 0.0 && v <= extent)) {
    throw DomainError("quantize_coord: coordinate outside [0, extent]");
  }
  const double scaled = std::floor(v / extent * bins);
  if (scaled >= bins - 1) return bins - 1;
  if (scaled <= 0.0) return 0;
  return static_cast<int>(scaled);
}

double dequantize_coord(int bin, double extent, int bins) {
  if (bins < 2) throw DomainError("dequantize_coord: bins must be >= 2");
  if (bin < 0 || bin >= bins) throw DomainError("dequantize_coord: bin out of range");
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw DomainError("dequantize_coord: extent must be positive and finite");
  }
  return (bin + 0.5) / bins * extent;
}

std::string Violation::describe() const {
  if (element) return "element " + std::to_string(*element) + ": " + message;
  return "document: " + message;
}

namespace {

class Validator {
 public:
  explicit Validator(const Document& doc) : doc_(doc) {}

  std::vector<Violation> run() {
    const bool page_ok = std::isfinite(doc_.page_width) && std::isfinite(doc_.page_height) &&
                         doc_.page_width > 0.0 && doc_.page_height > 0.0;
    if (!page_ok) out_.push_back({std::nullopt, "page dimensions must be positive and finite"});

    for (std::size_t i = 0; i < doc_.elements.size(); ++i) {
      const Element& e = doc_.elements[i];
      check_box(i, e.bbox, "bbox", page_ok);
      if (content_category(e.content) != e.category) {
        add(i, "category " + std::string(to_string(e.category)) + " carries " +
                   std::string(to_string(content_category(e.content))) + " content");
        continue;
      }
      std::visit([&](const auto& c) { check_content(i, c, page_ok); }, e.content);
    }
    return std::move(out_);
  }

 private:
  void add(std::size_t i, std::string msg) { out_.push_back({i, std::move(msg)}); }

  void check_box(std::size_t i, const BoundingBox& b, const std::string& what, bool page_ok) {
    const bool finite = std::isfinite(b.x_min) && std::isfinite(b.y_min) &&
                        std::isfinite(b.x_max) && std::isfinite(b.y_max);
    if (!finite) {
      add(i, what + " has non-finite coordinates");
      return;
    }
    if (!b.well_ordered()) add(i, what + " has min coordinate greater than max");
    if (page_ok && !b.within(doc_.page_width, doc_.page_height)) {
      add(i, what + " lies outside the page");
    }
  }

  void check_text(std::size_t i, std::string_view text, const std::string& what) {
    if (!utf8::is_valid(text)) {
      add(i, what + " is not valid UTF-8");
      return;
    }
    for (char ch : text) {
      const auto u = static_cast<unsigned char>(ch);
      if ((u < 0x20 && ch != '\t' && ch != '\n') || u == 0x7F) {
        add(i, what + " contains a control character");
        return;
      }
    }
    if (text.find("<Sep>") != std::string_view::npos ||
        text.find("<\\n>") != std::string_view::npos) {
      add(i, what + " contains a literal separator token");
    }
  }

  void check_content(std::size_t i, const ParagraphContent& p, bool page_ok) {
    for (std::size_t l = 0; l < p.lines.size(); ++l) {
      const std::string where = "line " + std::to_string(l);
      check_box(i, p.lines[l].bbox, where + " bbox", page_ok);
      check_text(i, p.lines[l].text, where + " text");
    }
  }

  void check_content(std::size_t i, const TableContent& t, bool page_ok) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
        const TableCell& cell = t.rows[r][c];
        const std::string where = "cell (" + std::to_string(r) + "," + std::to_string(c) + ")";
        check_box(i, cell.bbox, where + " bbox", page_ok);
        if (cell.rowspan < 1 || cell.colspan < 1) add(i, where + " has span < 1");
        check_text(i, cell.text, where + " text");
      }
    }
  }

  void check_content(std::size_t i, const FormulaContent& f, bool) {
    check_text(i, f.latex, "latex");
  }

  void check_content(std::size_t, const FigureContent&, bool) {}

  const Document& doc_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_document(const Document& doc) { return Validator(doc).run(); }

namespace {

std::string join_violations(const std::vector<Violation>& v) {
  std::string msg = "invalid document";
  for (const auto& x : v) msg += "; " + x.describe();
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

std::string table_html(const TableContent& table) {
  std::string out;
  for (const auto& row : table.rows) {
    out += "<tr>";
    for (const auto& cell : row) {
      out += "<td";
      if (cell.rowspan > 1) out += " rowspan=\"" + std::to_string(cell.rowspan) + "\"";
      if (cell.colspan > 1) out += " colspan=\"" + std::to_string(cell.colspan) + "\"";
      out += ">";
      out += cell.text;
      out += "</td>";
    }
    out += "</tr>";
  }
  return out;
}

std::string transcription_text(const Element& e) {
  struct Visitor {
    std::string operator()(const ParagraphContent& p) const {
      std::string out;
      for (std::size_t i = 0; i < p.lines.size(); ++i) {
        if (i > 0) out += '\n';
        out += p.lines[i].text;
      }
      return out;
    }
    std::string operator()(const TableContent& t) const { return table_html(t); }
    std::string operator()(const FormulaContent& f) const { return f.latex; }
    std::string operator()(const FigureContent&) const { return {}; }
  };
  return std::visit(Visitor{}, e.content);
}

}  // namespace docrec
