#pragma once

#include <json.hpp>

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace sublab::io {

using OrderedJson = nlohmann::ordered_json;

/// Raised when a non-finite value would reach an output file; the CLI maps it
/// to exit code 4.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double v);

/// Column-oriented CSV with a header row. NaN never passes; infinity only in
/// columns explicitly marked as sentinel columns (exit times use "inf").
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> headers, std::vector<bool> allow_inf = {});

  void add_row(const std::vector<double>& values);
  void write(const std::string& path) const;
  std::string to_string() const;

 private:
  std::vector<std::string> headers_;
  std::vector<bool> allow_inf_;
  std::vector<std::vector<double>> rows_;
};

/// Recursively rejects NaN anywhere in a JSON document, then writes it with a
/// trailing newline.
void write_json(const std::string& path, const OrderedJson& doc);

OrderedJson vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v);

void ensure_dir(const std::string& path);

}  // namespace sublab::io
