#include "delco/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace delco {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::size_t resolve_column(const std::string& spec, const std::vector<std::string>* header,
                           std::size_t columns) {
  if (spec.empty()) return columns - 1;
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
  if (ec == std::errc() && ptr == spec.data() + spec.size()) {
    if (index >= columns)
      throw CsvError(CsvError::Kind::kColumn, "csv: column index " + spec + " out of range");
    return index;
  }
  if (header == nullptr)
    throw CsvError(CsvError::Kind::kColumn, "csv: column '" + spec + "' named but file has no header");
  const auto it = std::find(header->begin(), header->end(), spec);
  if (it == header->end())
    throw CsvError(CsvError::Kind::kColumn, "csv: no column named '" + spec + "'");
  return static_cast<std::size_t>(it - header->begin());
}

}  // namespace

BinarizeRule BinarizeRule::parse(std::string_view text) {
  BinarizeRule rule;
  if (text.empty() || text == "none") return rule;
  if (text.starts_with("threshold:")) {
    const auto rest = text.substr(10);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
      throw std::invalid_argument("binarize rule: expected threshold:<col>:<value>");
    const auto value = parse_real(rest.substr(colon + 1));
    if (!value) throw std::invalid_argument("binarize rule: threshold value is not a number");
    rule.kind = Kind::kThreshold;
    rule.column = std::string(rest.substr(0, colon));
    rule.threshold = *value;
    return rule;
  }
  if (text.starts_with("group:")) {
    rule.kind = Kind::kGroup;
    for (auto& g : split_fields(text.substr(6)))
      if (!g.empty()) rule.group.push_back(std::move(g));
    if (rule.group.empty()) throw std::invalid_argument("binarize rule: empty group");
    return rule;
  }
  throw std::invalid_argument("binarize rule: unknown rule '" + std::string(text) + "'");
}

LabeledDataset read_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    rows.push_back(split_fields(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw CsvError(CsvError::Kind::kMalformedRow, "csv: no rows");

  const std::size_t columns = rows.front().size();
  if (columns < 2)
    throw CsvError(CsvError::Kind::kMalformedRow, "csv: need at least one feature and a label");

  const std::string& label_spec =
      options.binarize.kind == BinarizeRule::Kind::kThreshold ? options.binarize.column
                                                              : options.label_column;

  bool has_header = false;
  if (options.has_header) {
    has_header = *options.has_header;
  } else {
    // A header is present if any cell of the first row other than the label
    // candidate fails to parse; a named label column also implies a header.
    const auto as_index = parse_real(label_spec);
    const bool named = !label_spec.empty() && !as_index.has_value();
    std::size_t label_guess = columns - 1;
    if (as_index && *as_index >= 0.0) label_guess = static_cast<std::size_t>(*as_index);
    has_header = named;
    for (std::size_t c = 0; c < columns && !has_header; ++c)
      if (c != label_guess && !parse_real(rows.front()[c])) has_header = true;
  }

  std::vector<std::string> header;
  if (has_header) {
    header = rows.front();
    rows.erase(rows.begin());
    line_numbers.erase(line_numbers.begin());
    if (rows.empty()) throw CsvError(CsvError::Kind::kMalformedRow, "csv: header but no data rows");
  }
  const std::size_t label_col = resolve_column(label_spec, has_header ? &header : nullptr, columns);

  const auto n = static_cast<Eigen::Index>(rows.size());
  FeatureMatrix x(n, static_cast<Eigen::Index>(columns - 1));
  std::vector<int> labels(rows.size());
  int max_label = 0;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    const std::string where = "csv line " + std::to_string(line_numbers[r]);
    if (fields.size() != columns)
      throw CsvError(CsvError::Kind::kMalformedRow, where + ": expected " + std::to_string(columns) +
                                                        " fields, found " +
                                                        std::to_string(fields.size()));
    Eigen::Index f = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_col) continue;
      const auto value = parse_real(fields[c]);
      if (!value)
        throw CsvError(CsvError::Kind::kNonNumeric,
                       where + ": non-numeric feature '" + fields[c] + "' in column " + std::to_string(c));
      x(static_cast<Eigen::Index>(r), f++) = *value;
    }

    const std::string& cell = fields[label_col];
    int label = 0;
    switch (options.binarize.kind) {
      case BinarizeRule::Kind::kThreshold: {
        const auto score = parse_real(cell);
        if (!score) throw CsvError(CsvError::Kind::kLabel, where + ": non-numeric score '" + cell + "'");
        label = *score > options.binarize.threshold ? 1 : 0;
        break;
      }
      case BinarizeRule::Kind::kGroup: {
        const auto& g = options.binarize.group;
        label = std::find(g.begin(), g.end(), cell) != g.end() ? 0 : 1;
        break;
      }
      case BinarizeRule::Kind::kNone: {
        const auto value = parse_real(cell);
        if (!value || *value != std::floor(*value) || *value < 0.0 || *value > 1e9)
          throw CsvError(CsvError::Kind::kLabel,
                         where + ": label '" + cell + "' is not a non-negative integer");
        label = static_cast<int>(*value);
        break;
      }
    }
    labels[r] = label;
    max_label = std::max(max_label, label);
  }

  int num_classes = 2;
  if (options.binarize.kind == BinarizeRule::Kind::kNone) {
    num_classes = options.num_classes.value_or(std::max(2, max_label + 1));
    if (max_label >= num_classes)
      throw CsvError(CsvError::Kind::kLabel, "csv: label " + std::to_string(max_label) +
                                                 " outside [0, " + std::to_string(num_classes) + ")");
  }

  if (options.standardize && n > 0) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double mean = x.col(c).mean();
      x.col(c).array() -= mean;
      const double sd = std::sqrt(x.col(c).squaredNorm() / static_cast<double>(n));
      if (sd > 0.0) x.col(c) /= sd;
    }
  }
  return LabeledDataset(std::move(x), std::move(labels), num_classes);
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw CsvError(CsvError::Kind::kIo, "csv: cannot open " + path.string());
  return read_csv(in, options);
}

void write_csv(std::ostream& out, const LabeledDataset& data) {
  for (int c = 0; c < data.dim(); ++c) out << 'x' << c << ',';
  out << "label\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << v << ',';
    out << data.label(i) << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const LabeledDataset& data) {
  std::ofstream out(path);
  if (!out) throw CsvError(CsvError::Kind::kIo, "csv: cannot write " + path.string());
  write_csv(out, data);
}

}  // namespace delco
