#include "adastep/libsvm.hpp"

#include "adastep/quadratic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace adastep {

double SparseDataset::dot(Index i, const Vec &x) const {
  double s = 0.0;
  for (std::size_t p = row_start[i]; p < row_start[i + 1]; ++p) s += values[p] * x[columns[p]];
  return s;
}

void SparseDataset::axpy(Index i, double scale, Vec &out) const {
  for (std::size_t p = row_start[i]; p < row_start[i + 1]; ++p) out[columns[p]] += scale * values[p];
}

double SparseDataset::row_norm_sq(Index i) const {
  double s = 0.0;
  for (std::size_t p = row_start[i]; p < row_start[i + 1]; ++p) s += values[p] * values[p];
  return s;
}

SparseDataset SparseDataset::head(Index count) const {
  count = std::min(count, rows());
  SparseDataset out;
  out.dim = dim;
  out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(count));
  out.row_start.assign(row_start.begin(), row_start.begin() + static_cast<std::ptrdiff_t>(count) + 1);
  const auto nnz = static_cast<std::ptrdiff_t>(out.row_start.back());
  out.columns.assign(columns.begin(), columns.begin() + nnz);
  out.values.assign(values.begin(), values.begin() + nnz);
  return out;
}

namespace {

bool parse_number(std::string_view tok, double &out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

bool parse_index(std::string_view tok, std::uint64_t &out) {
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

SparseDataset parse_libsvm(std::istream &in, const LabelMap &label_map) {
  SparseDataset data;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty()) throw ParseError(lineno, "empty line");

    double raw_label;
    if (!parse_number(tokens[0], raw_label))
      throw ParseError(lineno, "non-numeric label '" + std::string(tokens[0]) + "'");
    int label = 0;
    if (std::find(label_map.negative.begin(), label_map.negative.end(), raw_label) !=
        label_map.negative.end())
      label = -1;
    else if (std::find(label_map.positive.begin(), label_map.positive.end(), raw_label) !=
             label_map.positive.end())
      label = +1;
    else
      throw ParseError(lineno, "unknown label '" + std::string(tokens[0]) + "'");

    std::uint64_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(lineno, "expected <index>:<value>, got '" + std::string(tok) + "'");
      std::uint64_t idx;
      double value;
      if (!parse_index(tok.substr(0, colon), idx))
        throw ParseError(lineno, "non-numeric index in '" + std::string(tok) + "'");
      if (idx == 0) throw ParseError(lineno, "indices are 1-based; got 0");
      if (idx > UINT32_MAX) throw ParseError(lineno, "index too large");
      if (idx <= prev) throw ParseError(lineno, "indices must be strictly increasing");
      if (!parse_number(tok.substr(colon + 1), value))
        throw ParseError(lineno, "non-numeric value in '" + std::string(tok) + "'");
      prev = idx;
      data.columns.push_back(static_cast<std::uint32_t>(idx - 1));
      data.values.push_back(value);
    }
    max_index = std::max(max_index, prev);
    data.labels.push_back(label);
    data.row_start.push_back(data.columns.size());
  }
  data.dim = static_cast<Index>(max_index);
  return data;
}

SparseDataset read_libsvm_file(const std::string &path, const LabelMap &labels) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  return parse_libsvm(in, labels);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericError("format_double failed");
  return std::string(buf, ptr);
}

std::string serialize_libsvm(const SparseDataset &data) {
  std::string out;
  for (Index i = 0; i < data.rows(); ++i) {
    out += data.labels[i] > 0 ? "+1" : "-1";
    for (std::size_t p = data.row_begin(i); p < data.row_end(i); ++p) {
      out += ' ';
      out += std::to_string(data.columns[p] + 1);
      out += ':';
      out += format_double(data.values[p]);
    }
    out += '\n';
  }
  return out;
}

std::string dataset_hash(const SparseDataset &data) {
  const std::string text = serialize_libsvm(data) + "dim=" + std::to_string(data.dim);
  return fnv1a_hex(text.data(), text.size());
}

}  // namespace adastep
