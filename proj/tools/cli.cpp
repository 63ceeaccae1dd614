#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "docrec/convert.hpp"
#include "docrec/error.hpp"
#include "docrec/gtgen.hpp"
#include "docrec/json_io.hpp"
#include "docrec/metrics.hpp"
#include "docrec/parallel.hpp"
#include "docrec/readorder.hpp"
#include "docrec/seqformat.hpp"

namespace docrec::cli {

using nlohmann::json;

namespace {

/// Failure tied to an input location; becomes exit status 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input = "-";
  std::string output;
  std::string format = "json";
  int bins = kDefaultBins;
  double page_width = 0.0;
  double page_height = 0.0;
  unsigned jobs = 1;

  std::string gt, pred, metric = "both", key;
  std::string target = "markdown";
  bool raw = false;

  OrderConfig order;
  AssocConfig assoc;
};

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  // -0.0000 is not a useful output
  if (std::string_view(buf) == "-0.0000") return "0.0000";
  return buf;
}

std::string read_all(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Record {
  std::size_t line = 0;  // 1-based
  json value;
};

// Newline-delimited JSON objects; blank lines are skipped.
std::vector<Record> read_ndjson(const std::string& path, std::istream& in) {
  const std::string text = read_all(path, in);
  std::vector<Record> out;
  std::size_t start = 0;
  std::size_t line = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line;
    std::string_view row(text.data() + start, end - start);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.find_first_not_of(" \t") != std::string_view::npos) {
      try {
        out.push_back({line, json::parse(row)});
      } catch (const json::exception& e) {
        throw InputError(path + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
      }
      if (!out.back().value.is_object()) {
        throw InputError(path + ":" + std::to_string(line) + ": expected a JSON object");
      }
    }
    start = end + 1;
  }
  return out;
}

std::string where(const std::string& path, std::size_t line) { return path + ":" + std::to_string(line) + ": "; }

Document checked_document(const std::string& path, const Record& r) {
  Document doc;
  try {
    doc = document_from_json(r.value);
  } catch (const FormatError& e) {
    throw InputError(where(path, r.line) + e.what());
  }
  auto violations = validate_document(doc);
  if (!violations.empty()) {
    std::string msg = where(path, r.line) + "invalid document";
    for (const auto& v : violations) msg += "\n  " + v.describe();
    throw InputError(msg);
  }
  return doc;
}

std::vector<Document> load_documents(const Options& o, const std::string& path, std::istream& in) {
  std::vector<Document> docs;
  if (o.format == "tokens") {
    if (!(o.page_width > 0.0) || !(o.page_height > 0.0)) {
      throw InputError("--format tokens needs positive --page-width and --page-height");
    }
    const std::string text = read_all(path, in);
    try {
      docs.push_back(parse(scan_tokens(text, o.bins), o.page_width, o.page_height));
    } catch (const ScanError& e) {
      throw InputError(path + ": " + e.what());
    } catch (const ParseError& e) {
      throw InputError(path + ": " + e.what());
    }
    auto violations = validate_document(docs.back());
    if (!violations.empty()) {
      std::string msg = path + ": invalid document";
      for (const auto& v : violations) msg += "\n  " + v.describe();
      throw InputError(msg);
    }
    return docs;
  }
  for (const auto& r : read_ndjson(path, in)) docs.push_back(checked_document(path, r));
  return docs;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError(path + ": cannot open for writing");
      stream_ = &file_;
    } else {
      stream_ = &fallback;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  std::size_t total = 0;
  std::size_t valid = 0;
  if (o.format == "tokens") {
    load_documents(o, o.input, in);
    total = valid = 1;
  } else {
    for (const auto& r : read_ndjson(o.input, in)) {
      ++total;
      try {
        checked_document(o.input, r);
        ++valid;
      } catch (const InputError& e) {
        err << e.what() << "\n";
      }
    }
  }
  Output dst(o.output, out);
  *dst << "{\"documents\":" << total << ",\"valid\":" << valid << ",\"invalid\":" << (total - valid) << "}\n";
  return valid == total ? kOk : kFailure;
}

std::vector<Document> align_by_key(const Options& o, std::istream& in, std::vector<Document>& gt_docs) {
  auto gt_records = read_ndjson(o.gt, in);
  auto pred_records = read_ndjson(o.pred, in);
  if (gt_records.size() != pred_records.size()) {
    throw InputError("corpus length mismatch: gt has " + std::to_string(gt_records.size()) +
                     " documents, pred has " + std::to_string(pred_records.size()));
  }
  auto key_of = [&](const std::string& path, const Record& r) {
    auto it = r.value.find(o.key);
    if (it == r.value.end()) throw InputError(where(path, r.line) + "missing key \"" + o.key + "\"");
    return it->dump();
  };
  std::map<std::string, std::size_t> pred_index;
  for (std::size_t i = 0; i < pred_records.size(); ++i) {
    if (!pred_index.emplace(key_of(o.pred, pred_records[i]), i).second) {
      throw InputError(where(o.pred, pred_records[i].line) + "duplicate key");
    }
  }
  std::vector<Document> pred_docs;
  std::map<std::string, bool> seen;
  for (const auto& r : gt_records) {
    const std::string k = key_of(o.gt, r);
    if (seen[k]) throw InputError(where(o.gt, r.line) + "duplicate key");
    seen[k] = true;
    auto it = pred_index.find(k);
    if (it == pred_index.end()) throw InputError(where(o.gt, r.line) + "no prediction with key " + k);
    gt_docs.push_back(checked_document(o.gt, r));
    pred_docs.push_back(checked_document(o.pred, pred_records[it->second]));
  }
  return pred_docs;
}

std::string report_json(const EvalReport& r, bool with_dsm, bool with_ned) {
  std::string s = "{\"corpus_size\":" + std::to_string(r.corpus_size);
  if (with_dsm) s += ",\"dsm\":" + fixed4(r.dsm);
  if (with_ned) s += ",\"ned\":" + fixed4(r.ned);
  if (with_dsm) {
    s += ",\"per_document\":[";
    for (std::size_t i = 0; i < r.per_document.size(); ++i) {
      const auto& d = r.per_document[i];
      if (i) s += ',';
      s += "{\"distance\":" + fixed4(d.distance) + ",\"max_len\":" + std::to_string(d.max_len) +
           ",\"normalized\":" + fixed4(d.normalized) + "}";
    }
    s += "]";
  }
  return s + "}";
}

int cmd_eval(const Options& o, std::istream& in, std::ostream& out, std::ostream&) {
  if (o.gt == "-" && o.pred == "-") throw InputError("--gt and --pred cannot both read stdin");
  std::vector<Document> gt_docs, pred_docs;
  if (!o.key.empty()) {
    pred_docs = align_by_key(o, in, gt_docs);
  } else {
    Options ground = o;
    gt_docs = load_documents(ground, o.gt, in);
    pred_docs = load_documents(ground, o.pred, in);
  }
  if (gt_docs.size() != pred_docs.size()) {
    throw InputError("corpus length mismatch: gt has " + std::to_string(gt_docs.size()) +
                     " documents, pred has " + std::to_string(pred_docs.size()));
  }
  if (gt_docs.empty()) throw InputError("empty corpus");
  EvalOptions eo;
  eo.with_dsm = o.metric != "ned";
  eo.with_ned = o.metric != "dsm";
  eo.jobs = o.jobs;
  const EvalReport report = evaluate(gt_docs, pred_docs, eo);
  Output dst(o.output, out);
  *dst << report_json(report, eo.with_dsm, eo.with_ned) << "\n";
  return kOk;
}

int cmd_convert(const Options& o, std::istream& in, std::ostream& out, std::ostream&) {
  const auto docs = load_documents(o, o.input, in);
  std::vector<std::string> rendered(docs.size());
  parallel_for(docs.size(), o.jobs, [&](std::size_t i) {
    const Document& d = docs[i];
    if (o.target == "markdown" || o.target == "text") {
      std::string text = o.target == "markdown" ? to_markdown(d) : to_plain_text(d);
      rendered[i] = o.raw ? text : json(text).dump();
    } else if (o.target == "layout") {
      rendered[i] = layout_records_to_json(to_layout_records(d)).dump();
    } else if (o.target == "tables") {
      rendered[i] = json(extract_tables(d)).dump();
    } else {
      rendered[i] = json(extract_formulas(d)).dump();
    }
  });
  Output dst(o.output, out);
  for (const auto& r : rendered) *dst << r << "\n";
  return kOk;
}

int cmd_order(const Options& o, std::istream& in, std::ostream& out, std::ostream&) {
  auto records = read_ndjson(o.input, in);
  std::vector<std::string> rendered(records.size());
  std::vector<Document> docs;
  for (const auto& r : records) docs.push_back(checked_document(o.input, r));
  parallel_for(records.size(), o.jobs, [&](std::size_t i) {
    std::vector<BoundingBox> boxes;
    for (const auto& e : docs[i].elements) boxes.push_back(e.bbox);
    json j = records[i].value;
    json reordered = json::array();
    for (std::size_t k : xy_cut_order(boxes, o.order)) reordered.push_back(j["elements"][k]);
    j["elements"] = std::move(reordered);
    rendered[i] = j.dump();
  });
  Output dst(o.output, out);
  for (const auto& r : rendered) *dst << r << "\n";
  return kOk;
}

ElementSeed seed_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("element must be an object");
  ElementSeed s;
  if (j.contains("content")) {
    Element e = element_from_json(j);
    s.category = e.category;
    s.bbox = e.bbox;
    s.content = std::move(e.content);
  } else {
    auto cat = j.find("category");
    if (cat == j.end() || !cat->is_string()) throw FormatError("element.category must be a string");
    auto parsed = category_from_string(cat->get<std::string>());
    if (!parsed) throw FormatError("unknown category \"" + cat->get<std::string>() + "\"");
    auto bbox = j.find("bbox");
    if (bbox == j.end()) throw FormatError("element is missing \"bbox\"");
    s.category = *parsed;
    s.bbox = bbox_from_json(*bbox);
  }
  if (auto it = j.find("reference"); it != j.end()) {
    if (!it->is_string()) throw FormatError("reference must be a string");
    s.reference = it->get<std::string>();
  }
  return s;
}

int cmd_gtgen(const Options& o, std::istream& in, std::ostream& out, std::ostream&) {
  auto records = read_ndjson(o.input, in);
  std::vector<std::string> rendered(records.size());
  parallel_for(records.size(), o.jobs, [&](std::size_t i) {
    const Record& r = records[i];
    const json& j = r.value;
    try {
      auto number = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_number()) throw FormatError(std::string(key) + " must be a number");
        return it->get<double>();
      };
      auto array = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end() || !it->is_array()) throw FormatError(std::string(key) + " must be an array");
        return *it;
      };
      const double width = number("page_width");
      const double height = number("page_height");
      std::vector<ElementSeed> seeds;
      for (const auto& e : array("elements")) seeds.push_back(seed_from_json(e));
      std::vector<RawLine> lines;
      for (const auto& l : array("lines")) {
        if (!l.is_object() || !l.contains("bbox") || !l.contains("text") || !l["text"].is_string()) {
          throw FormatError("line needs bbox and text");
        }
        lines.push_back({bbox_from_json(l["bbox"]), l["text"].get<std::string>()});
      }
      const GroundTruth gt = assemble_ground_truth(width, height, seeds, lines, o.order, o.assoc);
      json doc = document_to_json(gt.document);
      if (j.contains("id")) doc["id"] = j["id"];
      json unassigned = json::array();
      for (std::size_t l : gt.unassigned) {
        unassigned.push_back({{"index", l}, {"bbox", bbox_to_json(lines[l].bbox)}, {"text", lines[l].text}});
      }
      doc["unassigned"] = std::move(unassigned);
      json mismatched = json::array();
      for (const auto& m : gt.mismatched) mismatched.push_back({{"element", m.element}, {"similarity", m.similarity}});
      doc["mismatched"] = std::move(mismatched);
      rendered[i] = doc.dump();
    } catch (const std::exception& e) {
      throw InputError(where(o.input, r.line) + e.what());
    }
  });
  Output dst(o.output, out);
  for (const auto& r : rendered) *dst << r << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

std::optional<unsigned> jobs_from_env() {
  const char* env = std::getenv("DOCREC_JOBS");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) return 0u;
  return static_cast<unsigned>(v);
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  if (auto env = jobs_from_env()) {
    if (*env == 0) {
      err << "docrec: DOCREC_JOBS must be an integer between 1 and 1024\n";
      return kUsage;
    }
    o.jobs = *env;
  }

  CLI::App app{"Document reconstruction sequence format, metrics and dataset tools", "docrec"};
  app.require_subcommand(1);
  const auto jobs_check = CLI::Range(1u, 1024u);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", o.output, "Output file (default stdout)");
    sub->add_option("-j,--jobs", o.jobs, "Documents processed concurrently (default $DOCREC_JOBS or 1)")
        ->check(jobs_check);
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Input representation")
        ->check(CLI::IsMember({"json", "tokens"}));
    sub->add_option("--bins", o.bins, "Coordinate bins per axis for token input")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--page-width", o.page_width, "Page width for token input");
    sub->add_option("--page-height", o.page_height, "Page height for token input");
  };
  auto add_order = [&](CLI::App* sub) {
    sub->add_option("--min-gap", o.order.min_gap, "Whitespace (px) that makes an XY cut")
        ->check(CLI::PositiveNumber);
    sub->add_option("--y-tolerance", o.order.y_tolerance, "Same-row band (px) for the fallback sort")
        ->check(CLI::NonNegativeNumber);
  };

  auto* validate = app.add_subcommand("validate", "Check documents against the format invariants");
  validate->add_option("-i,--input", o.input, "Input file, '-' for stdin")->required();
  add_format(validate);
  add_common(validate);

  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth (DSM, NED)");
  eval->add_option("--gt", o.gt, "Ground-truth corpus (NDJSON)")->required();
  eval->add_option("--pred", o.pred, "Predicted corpus (NDJSON)")->required();
  eval->add_option("--metric", o.metric, "Metric to report")->check(CLI::IsMember({"dsm", "ned", "both"}));
  eval->add_option("--key", o.key, "Align documents by this field instead of line order");
  add_common(eval);

  auto* convert = app.add_subcommand("convert", "Convert documents to per-task evaluation formats");
  convert->add_option("-i,--input", o.input, "Input file, '-' for stdin")->required();
  convert->add_option("--to", o.target, "Target format")
      ->check(CLI::IsMember({"markdown", "layout", "text", "tables", "formulas"}));
  convert->add_flag("--raw", o.raw, "Write markdown/text verbatim instead of one JSON string per line");
  add_format(convert);
  add_common(convert);

  auto* order = app.add_subcommand("order", "Reorder elements into reading order (XY-cut)");
  order->add_option("-i,--input", o.input, "Input file, '-' for stdin")->required();
  add_order(order);
  add_common(order);

  auto* gtgen = app.add_subcommand("gtgen", "Assemble ground-truth documents from layout boxes and text lines");
  gtgen->add_option("-i,--input", o.input, "Input file, '-' for stdin")->required();
  gtgen->add_option("--iou-threshold", o.assoc.iou_threshold, "Minimum line-in-element overlap ratio")
      ->check(CLI::Range(0.0, 1.0));
  gtgen->add_option("--fuzzy-threshold", o.assoc.fuzzy_threshold, "Minimum fuzzy match against references")
      ->check(CLI::Range(0.0, 1.0));
  add_order(gtgen);
  add_common(gtgen);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (o.assoc.iou_threshold <= 0.0) {
    err << "docrec: --iou-threshold must be greater than 0\n";
    return kUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "validate") return cmd_validate(o, in, out, err);
    if (name == "eval") return cmd_eval(o, in, out, err);
    if (name == "convert") return cmd_convert(o, in, out, err);
    if (name == "order") return cmd_order(o, in, out, err);
    return cmd_gtgen(o, in, out, err);
  } catch (const std::exception& e) {
    err << "docrec " << name << ": " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace docrec::cli
