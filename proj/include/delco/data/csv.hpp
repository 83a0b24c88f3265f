#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "delco/data/dataset.hpp"

namespace delco {

class CsvError : public std::runtime_error {
 public:
  enum class Kind {
    kIo,           // file missing or unreadable
    kMalformedRow, // wrong field count or empty file
    kNonNumeric,   // a feature cell does not parse as a real
    kLabel,        // label missing, unparseable, or outside the class range
    kColumn,       // label/rule column cannot be resolved
  };

  CsvError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Maps raw label cells to {0, 1}.
///  - `threshold:<col>:<value>`  class 1 iff the numeric cell in <col> is > value
///  - `group:<a>,<b>,...`        class 0 iff the label cell is one of the listed values
/// A threshold rule names its own label column.
struct BinarizeRule {
  enum class Kind { kNone, kThreshold, kGroup };
  Kind kind = Kind::kNone;
  std::string column;
  double threshold = 0.0;
  std::vector<std::string> group;

  static BinarizeRule parse(std::string_view text);
};

struct CsvOptions {
  /// Column name or 0-based index; empty means the last column.
  std::string label_column;
  /// nullopt: detect a header when the first row has a non-numeric feature cell.
  std::optional<bool> has_header;
  BinarizeRule binarize;
  /// Without a rule, labels must be integers in [0, num_classes). When unset,
  /// num_classes = max(label) + 1 (at least 2).
  std::optional<int> num_classes;
  /// Z-score each feature column.
  bool standardize = false;
};

LabeledDataset read_csv(std::istream& in, const CsvOptions& options = {});
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Header `x0,...,x{d-1},label`, then one row per example (17 significant digits).
void write_csv(std::ostream& out, const LabeledDataset& data);
void save_csv(const std::filesystem::path& path, const LabeledDataset& data);

}  // namespace delco
