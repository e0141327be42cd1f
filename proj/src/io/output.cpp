#include "sublab/io/output.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace sublab::io {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> headers, std::vector<bool> allow_inf)
    : headers_(std::move(headers)), allow_inf_(std::move(allow_inf)) {
  allow_inf_.resize(headers_.size(), false);
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != headers_.size())
    throw std::invalid_argument("csv: row width does not match header");
  for (size_t c = 0; c < values.size(); ++c) {
    if (std::isnan(values[c]))
      throw InvariantViolation("csv: NaN in column " + headers_[c]);
    if (std::isinf(values[c]) && !allow_inf_[c])
      throw InvariantViolation("csv: non-finite value in column " + headers_[c]);
  }
  rows_.push_back(values);
}

std::string CsvTable::to_string() const {
  std::string out;
  for (size_t c = 0; c < headers_.size(); ++c) {
    if (c) out += ',';
    out += headers_[c];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << to_string();
}

namespace {

void check_no_nan(const OrderedJson& doc, const std::string& where) {
  if (doc.is_number_float()) {
    const double v = doc.get<double>();
    if (!std::isfinite(v)) throw InvariantViolation("json: non-finite value at " + where);
  } else if (doc.is_object()) {
    for (const auto& [key, val] : doc.items()) check_no_nan(val, where + "/" + key);
  } else if (doc.is_array()) {
    int i = 0;
    for (const auto& val : doc) check_no_nan(val, where + "/" + std::to_string(i++));
  }
}

}  // namespace

void write_json(const std::string& path, const OrderedJson& doc) {
  check_no_nan(doc, "");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << doc.dump(2) << '\n';
}

OrderedJson vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  OrderedJson arr = OrderedJson::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void ensure_dir(const std::string& path) {
  std::filesystem::create_directories(path);
}

}  // namespace sublab::io
