#include "docrec/seqformat.hpp"

#include <charconv>
#include <cstdio>

#include "docrec/error.hpp"
#include "docrec/utf8.hpp"

namespace docrec {

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::Xmin: return "Xmin";
    case Axis::Ymin: return "Ymin";
    case Axis::Xmax: return "Xmax";
    case Axis::Ymax: return "Ymax";
  }
  return "?";
}

std::string_view to_string(HtmlTag t) {
  switch (t) {
    case HtmlTag::Tr: return "tr";
    case HtmlTag::TrEnd: return "/tr";
    case HtmlTag::Td: return "td";
    case HtmlTag::TdEnd: return "/td";
  }
  return "?";
}

std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::MissingCategory: return "MissingCategory";
    case ParseErrorKind::TruncatedCoordQuartet: return "TruncatedCoordQuartet";
    case ParseErrorKind::UnterminatedElement: return "UnterminatedElement";
    case ParseErrorKind::MalformedTableTags: return "MalformedTableTags";
    case ParseErrorKind::CoordOutOfRange: return "CoordOutOfRange";
    case ParseErrorKind::InvertedBox: return "InvertedBox";
    case ParseErrorKind::UnexpectedToken: return "UnexpectedToken";
  }
  return "?";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t offset, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at token " + std::to_string(offset) +
                         (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      offset_(offset) {}

ScanError::ScanError(std::size_t offset, const std::string& detail)
    : std::runtime_error("scan error at byte " + std::to_string(offset) + ": " + detail),
      offset_(offset) {}

// ---------------------------------------------------------------------------
// serialize

namespace {

class Serializer {
 public:
  Serializer(const Document& doc, int bins) : doc_(doc), bins_(bins) {}

  TokenSequence run() {
    out_.bins = bins_;
    for (const Element& e : doc_.elements) {
      out_.tokens.emplace_back(CategoryTok{e.category});
      box(e.bbox);
      std::visit([this](const auto& c) { content(c); }, e.content);
      out_.tokens.emplace_back(SepTok{});
    }
    return std::move(out_);
  }

 private:
  void box(const BoundingBox& b) {
    out_.tokens.emplace_back(CoordTok{Axis::Xmin, quantize_coord(b.x_min, doc_.page_width, bins_)});
    out_.tokens.emplace_back(CoordTok{Axis::Ymin, quantize_coord(b.y_min, doc_.page_height, bins_)});
    out_.tokens.emplace_back(CoordTok{Axis::Xmax, quantize_coord(b.x_max, doc_.page_width, bins_)});
    out_.tokens.emplace_back(CoordTok{Axis::Ymax, quantize_coord(b.y_max, doc_.page_height, bins_)});
  }

  void text(std::string_view s) {
    for (char32_t cp : utf8::decode(s)) out_.tokens.emplace_back(TextTok{cp});
  }

  void content(const ParagraphContent& p) {
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
      if (i > 0) out_.tokens.emplace_back(LineSepTok{});
      box(p.lines[i].bbox);
      text(p.lines[i].text);
    }
  }

  void content(const TableContent& t) {
    for (const auto& row : t.rows) {
      out_.tokens.emplace_back(HtmlTagTok{HtmlTag::Tr, std::nullopt, std::nullopt});
      for (const auto& cell : row) {
        HtmlTagTok td{HtmlTag::Td, std::nullopt, std::nullopt};
        if (cell.rowspan > 1) td.rowspan = cell.rowspan;
        if (cell.colspan > 1) td.colspan = cell.colspan;
        out_.tokens.emplace_back(td);
        box(cell.bbox);
        text(cell.text);
        out_.tokens.emplace_back(HtmlTagTok{HtmlTag::TdEnd, std::nullopt, std::nullopt});
      }
      out_.tokens.emplace_back(HtmlTagTok{HtmlTag::TrEnd, std::nullopt, std::nullopt});
    }
  }

  void content(const FormulaContent& f) { text(f.latex); }
  void content(const FigureContent&) {}

  const Document& doc_;
  int bins_;
  TokenSequence out_;
};

}  // namespace

TokenSequence serialize(const Document& doc, int bins) {
  if (bins < 2) throw DomainError("serialize: bins must be >= 2");
  auto violations = validate_document(doc);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return Serializer(doc, bins).run();
}

// ---------------------------------------------------------------------------
// parse

namespace {

bool valid_codepoint(char32_t cp) { return cp <= 0x10FFFF && (cp < 0xD800 || cp > 0xDFFF); }

class Parser {
 public:
  Parser(const TokenSequence& seq, double width, double height)
      : toks_(seq.tokens), bins_(seq.bins), width_(width), height_(height) {}

  Document run() {
    Document doc{width_, height_, {}};
    while (pos_ < toks_.size()) {
      const auto* cat = std::get_if<CategoryTok>(&toks_[pos_]);
      if (!cat) fail(ParseErrorKind::MissingCategory, "element must start with a category token");
      ++pos_;
      Element e;
      e.category = cat->category;
      e.bbox = box();
      switch (e.category) {
        case Category::Paragraph: e.content = paragraph(); break;
        case Category::Table: e.content = table(); break;
        case Category::Formula: e.content = FormulaContent{text_until_sep()}; break;
        case Category::Figure: e.content = figure(); break;
      }
      // every content reader stops on the terminating <Sep>
      ++pos_;
      doc.elements.push_back(std::move(e));
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(ParseErrorKind kind, const std::string& detail) const {
    throw ParseError(kind, pos_, detail);
  }

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek() const { return toks_[pos_]; }
  template <class T>
  bool is() const {
    return !at_end() && std::holds_alternative<T>(peek());
  }

  void require_more() const {
    if (at_end()) throw ParseError(ParseErrorKind::UnterminatedElement, toks_.size(), "missing <Sep>");
  }

  // A category token before <Sep> means the previous element never ended.
  void reject_category() const {
    if (is<CategoryTok>()) fail(ParseErrorKind::UnterminatedElement, "new element before <Sep>");
  }

  BoundingBox box() {
    static constexpr Axis kOrder[] = {Axis::Xmin, Axis::Ymin, Axis::Xmax, Axis::Ymax};
    const std::size_t start = pos_;
    int bins[4];
    for (int i = 0; i < 4; ++i) {
      if (at_end()) {
        throw ParseError(ParseErrorKind::TruncatedCoordQuartet, toks_.size(), "stream ended inside box");
      }
      const auto* c = std::get_if<CoordTok>(&peek());
      if (!c || c->axis != kOrder[i]) {
        fail(ParseErrorKind::TruncatedCoordQuartet,
             "expected " + std::string(to_string(kOrder[i])) + " coordinate");
      }
      if (c->bin < 0 || c->bin >= bins_) {
        fail(ParseErrorKind::CoordOutOfRange, "bin " + std::to_string(c->bin));
      }
      bins[i] = c->bin;
      ++pos_;
    }
    if (bins[0] > bins[2] || bins[1] > bins[3]) {
      throw ParseError(ParseErrorKind::InvertedBox, start, "min bin exceeds max bin");
    }
    return {dequantize_coord(bins[0], width_, bins_), dequantize_coord(bins[1], height_, bins_),
            dequantize_coord(bins[2], width_, bins_), dequantize_coord(bins[3], height_, bins_)};
  }

  void append_text(std::string& out) {
    const char32_t cp = std::get<TextTok>(peek()).codepoint;
    if (!valid_codepoint(cp)) fail(ParseErrorKind::UnexpectedToken, "invalid codepoint");
    utf8::append(out, cp);
    ++pos_;
  }

  ParagraphContent paragraph() {
    ParagraphContent p;
    require_more();
    if (is<SepTok>()) return p;
    for (;;) {
      reject_category();
      TextLine line;
      line.bbox = box();
      for (;;) {
        require_more();
        if (is<TextTok>()) {
          append_text(line.text);
        } else if (is<LineSepTok>() || is<SepTok>()) {
          break;
        } else {
          reject_category();
          fail(ParseErrorKind::UnexpectedToken, "unexpected token in paragraph line");
        }
      }
      p.lines.push_back(std::move(line));
      if (is<SepTok>()) return p;
      ++pos_;  // <\n>
      require_more();
    }
  }

  const HtmlTagTok* tag() const { return is<HtmlTagTok>() ? &std::get<HtmlTagTok>(peek()) : nullptr; }

  bool tag_is(HtmlTag name) const {
    const auto* t = tag();
    return t && t->name == name;
  }

  TableContent table() {
    TableContent t;
    for (;;) {
      require_more();
      if (is<SepTok>()) return t;
      reject_category();
      if (!tag_is(HtmlTag::Tr)) fail(ParseErrorKind::MalformedTableTags, "expected <tr>");
      no_spans();
      ++pos_;
      auto& row = t.rows.emplace_back();
      for (;;) {
        require_more();
        reject_category();
        if (tag_is(HtmlTag::TrEnd)) {
          no_spans();
          ++pos_;
          break;
        }
        if (!tag_is(HtmlTag::Td)) fail(ParseErrorKind::MalformedTableTags, "expected <td> or </tr>");
        row.push_back(cell());
      }
    }
  }

  void no_spans() const {
    const auto* t = tag();
    if (t->rowspan || t->colspan) fail(ParseErrorKind::MalformedTableTags, "span attribute outside <td>");
  }

  TableCell cell() {
    const HtmlTagTok& open = *tag();
    TableCell c;
    c.rowspan = open.rowspan.value_or(1);
    c.colspan = open.colspan.value_or(1);
    if (c.rowspan < 1 || c.colspan < 1) fail(ParseErrorKind::MalformedTableTags, "span < 1");
    ++pos_;
    if (!at_end()) reject_category();
    c.bbox = box();
    for (;;) {
      require_more();
      if (is<TextTok>()) {
        append_text(c.text);
        continue;
      }
      if (tag_is(HtmlTag::TdEnd)) {
        no_spans();
        ++pos_;
        return c;
      }
      reject_category();
      if (is<HtmlTagTok>() || is<SepTok>()) fail(ParseErrorKind::MalformedTableTags, "missing </td>");
      fail(ParseErrorKind::UnexpectedToken, "unexpected token in table cell");
    }
  }

  std::string text_until_sep() {
    std::string out;
    for (;;) {
      require_more();
      if (is<SepTok>()) return out;
      if (is<TextTok>()) {
        append_text(out);
        continue;
      }
      reject_category();
      fail(ParseErrorKind::UnexpectedToken, "formula content must be text");
    }
  }

  FigureContent figure() {
    require_more();
    if (!is<SepTok>()) {
      reject_category();
      fail(ParseErrorKind::UnexpectedToken, "figure carries no content");
    }
    return {};
  }

  const std::vector<Token>& toks_;
  int bins_;
  double width_;
  double height_;
  std::size_t pos_ = 0;
};

}  // namespace

Document parse(const TokenSequence& seq, double page_width, double page_height) {
  if (seq.bins < 2) throw DomainError("parse: bins must be >= 2");
  if (!(page_width > 0.0) || !(page_height > 0.0)) {
    throw DomainError("parse: page dimensions must be positive");
  }
  return Parser(seq, page_width, page_height).run();
}

// ---------------------------------------------------------------------------
// render / scan

namespace {

constexpr Axis kAxisCycle[] = {Axis::Xmin, Axis::Ymin, Axis::Xmax, Axis::Ymax};

void render_text(std::string& out, char32_t cp) {
  switch (cp) {
    case U'<': out += "\\<"; return;
    case U'\\': out += "\\\\"; return;
    case U'\n': out += "\\n"; return;
    case U'\r': out += "\\r"; return;
    default: break;
  }
  if (!valid_codepoint(cp)) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "\\u{%X}", static_cast<unsigned>(cp));
    out += buf;
    return;
  }
  utf8::append(out, cp);
}

}  // namespace

std::string render_tokens(const TokenSequence& seq) {
  std::string out;
  std::size_t coord_run = 0;
  bool after_sep = false;
  for (const Token& tok : seq.tokens) {
    if (std::holds_alternative<CoordTok>(tok)) {
      const auto& c = std::get<CoordTok>(tok);
      out += '<';
      if (c.axis != kAxisCycle[coord_run % 4]) {
        out += to_string(c.axis);
        out += '=';
      }
      out += std::to_string(c.bin);
      out += '>';
      ++coord_run;
      after_sep = false;
      continue;
    }
    coord_run = 0;
    if (const auto* cat = std::get_if<CategoryTok>(&tok)) {
      if (after_sep) out += '\n';
      out += '<';
      out += to_string(cat->category);
      out += '>';
    } else if (const auto* t = std::get_if<TextTok>(&tok)) {
      render_text(out, t->codepoint);
    } else if (std::holds_alternative<LineSepTok>(tok)) {
      out += "<\\n>";
    } else if (std::holds_alternative<SepTok>(tok)) {
      out += "<Sep>";
    } else {
      const auto& h = std::get<HtmlTagTok>(tok);
      out += '<';
      out += to_string(h.name);
      if (h.rowspan) out += " rowspan=\"" + std::to_string(*h.rowspan) + "\"";
      if (h.colspan) out += " colspan=\"" + std::to_string(*h.colspan) + "\"";
      out += '>';
    }
    after_sep = std::holds_alternative<SepTok>(tok);
  }
  return out;
}

namespace {

class Scanner {
 public:
  Scanner(std::string_view text, int bins) : text_(text) { out_.bins = bins; }

  TokenSequence run() {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '\n' || ch == '\r') {
        ++pos_;
      } else if (ch == '<') {
        tag();
      } else if (ch == '\\') {
        escape();
      } else {
        push(TextTok{decode_one()});
      }
    }
    return std::move(out_);
  }

 private:
  void push(Token t) {
    coord_run_ = std::holds_alternative<CoordTok>(t) ? coord_run_ + 1 : 0;
    out_.tokens.push_back(std::move(t));
  }

  char32_t decode_one() {
    const auto b0 = static_cast<unsigned char>(text_[pos_]);
    std::size_t len = b0 < 0x80 ? 1 : (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3
                                     : (b0 & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || pos_ + len > text_.size()) throw ScanError(pos_, "invalid UTF-8");
    std::u32string cps;
    try {
      cps = utf8::decode(text_.substr(pos_, len));
    } catch (const FormatError&) {
      throw ScanError(pos_, "invalid UTF-8");
    }
    pos_ += len;
    return cps.front();
  }

  void escape() {
    const std::size_t at = pos_;
    if (pos_ + 1 >= text_.size()) throw ScanError(at, "dangling escape");
    const char next = text_[pos_ + 1];
    pos_ += 2;
    switch (next) {
      case '<': push(TextTok{U'<'}); return;
      case '\\': push(TextTok{U'\\'}); return;
      case 'n': push(TextTok{U'\n'}); return;
      case 'r': push(TextTok{U'\r'}); return;
      case 'u': {
        if (pos_ >= text_.size() || text_[pos_] != '{') throw ScanError(at, "malformed \\u escape");
        const auto close = text_.find('}', pos_);
        if (close == std::string_view::npos) throw ScanError(at, "malformed \\u escape");
        std::uint32_t value = 0;
        const char* first = text_.data() + pos_ + 1;
        const char* last = text_.data() + close;
        auto [ptr, ec] = std::from_chars(first, last, value, 16);
        if (ec != std::errc{} || ptr != last || first == last) throw ScanError(at, "malformed \\u escape");
        pos_ = close + 1;
        push(TextTok{static_cast<char32_t>(value)});
        return;
      }
      default: throw ScanError(at, "unknown escape");
    }
  }

  static std::optional<int> integer(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
  }

  // Parses ` rowspan="n" colspan="m"` after an html tag name.
  bool attrs(std::string_view s, HtmlTagTok& t) {
    while (!s.empty()) {
      if (s.front() != ' ') return false;
      s.remove_prefix(1);
      std::optional<int>* slot = nullptr;
      if (s.starts_with("rowspan=\"")) {
        slot = &t.rowspan;
        s.remove_prefix(9);
      } else if (s.starts_with("colspan=\"")) {
        slot = &t.colspan;
        s.remove_prefix(9);
      } else {
        return false;
      }
      const auto quote = s.find('"');
      if (quote == std::string_view::npos) return false;
      auto v = integer(s.substr(0, quote));
      if (!v || slot->has_value()) return false;
      // rowspan must precede colspan to keep rendering canonical
      if (slot == &t.rowspan && t.colspan) return false;
      *slot = *v;
      s.remove_prefix(quote + 1);
    }
    return true;
  }

  void tag() {
    const std::size_t at = pos_;
    const auto close = text_.find('>', pos_ + 1);
    if (close == std::string_view::npos) throw ScanError(at, "unterminated tag");
    const std::string_view body = text_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;

    if (auto cat = category_from_string(body)) return push(CategoryTok{*cat});
    if (body == "Sep") return push(SepTok{});
    if (body == "\\n") return push(LineSepTok{});
    if (auto v = integer(body)) return push(CoordTok{kAxisCycle[coord_run_ % 4], *v});
    if (const auto eq = body.find('='); eq != std::string_view::npos) {
      const std::string_view axis_name = body.substr(0, eq);
      for (Axis a : kAxisCycle) {
        if (to_string(a) != axis_name) continue;
        auto v = integer(body.substr(eq + 1));
        // the explicit form is only emitted when the axis differs from the implied one
        if (!v || a == kAxisCycle[coord_run_ % 4]) break;
        return push(CoordTok{a, *v});
      }
    }
    for (HtmlTag name : {HtmlTag::Tr, HtmlTag::TrEnd, HtmlTag::Td, HtmlTag::TdEnd}) {
      const std::string_view n = to_string(name);
      if (!body.starts_with(n)) continue;
      HtmlTagTok t{name, std::nullopt, std::nullopt};
      if (body.size() == n.size() || attrs(body.substr(n.size()), t)) return push(t);
    }
    throw ScanError(at, "unknown tag <" + std::string(body) + ">");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t coord_run_ = 0;
  TokenSequence out_;
};

}  // namespace

TokenSequence scan_tokens(std::string_view text, int bins) { return Scanner(text, bins).run(); }

}  // namespace docrec
