#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "docrec/model.hpp"

namespace docrec {

enum class Axis { Xmin, Ymin, Xmax, Ymax };
enum class HtmlTag { Tr, TrEnd, Td, TdEnd };

std::string_view to_string(Axis a);
std::string_view to_string(HtmlTag t);

struct CategoryTok {
  Category category;
  bool operator==(const CategoryTok&) const = default;
};

struct CoordTok {
  Axis axis;
  int bin;
  bool operator==(const CoordTok&) const = default;
};

/// One Unicode codepoint of transcription text.
struct TextTok {
  char32_t codepoint;
  bool operator==(const TextTok&) const = default;
};

/// Separates consecutive lines of a paragraph.
struct LineSepTok {
  bool operator==(const LineSepTok&) const = default;
};

/// Terminates an element.
struct SepTok {
  bool operator==(const SepTok&) const = default;
};

/// Table structure tag. Spans are only meaningful on an opening <td>.
struct HtmlTagTok {
  HtmlTag name;
  std::optional<int> rowspan;
  std::optional<int> colspan;
  bool operator==(const HtmlTagTok&) const = default;
};

using Token = std::variant<CategoryTok, CoordTok, TextTok, LineSepTok, SepTok, HtmlTagTok>;

struct TokenSequence {
  std::vector<Token> tokens;
  int bins = kDefaultBins;

  bool operator==(const TokenSequence&) const = default;
};

enum class ParseErrorKind {
  MissingCategory,
  TruncatedCoordQuartet,
  UnterminatedElement,
  MalformedTableTags,
  CoordOutOfRange,
  InvertedBox,
  UnexpectedToken,
};

std::string_view to_string(ParseErrorKind k);

/// First structural violation found by parse(); `offset` indexes the token
/// stream (tokens.size() when the stream ended early).
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& detail);
  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

/// Scan failure in the rendered text form; `offset` is a byte offset.
class ScanError : public std::runtime_error {
 public:
  ScanError(std::size_t offset, const std::string& detail);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Element grammar, in order: category, Xmin Ymin Xmax Ymax, content, <Sep>.
//   Paragraph: per line four coords then text; <\n> between lines.
//   Table:     <tr> (<td [spans]> four coords, text, </td>)* </tr> per row.
//   Formula:   LaTeX text.   Figure: nothing.
TokenSequence serialize(const Document& doc, int bins = kDefaultBins);

/// Inverse of serialize(); coordinates come back as bin centers.
Document parse(const TokenSequence& seq, double page_width, double page_height);

/// Angle-bracket text form, one element per line. Coordinates render as
/// `<n>` when their axis is the one implied by their position in a run of
/// coordinates, otherwise as `<Ymin=n>`. Text escapes: `\<`, `\\`, `\n`.
std::string render_tokens(const TokenSequence& seq);

/// Exact inverse of render_tokens(). Raw newlines between tokens are ignored.
TokenSequence scan_tokens(std::string_view text, int bins = kDefaultBins);

}  // namespace docrec
