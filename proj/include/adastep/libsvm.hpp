#pragma once

#include "adastep/types.hpp"

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace adastep {

/// Binary-labelled sparse rows in compressed-row form. Indices are 0-based.
struct SparseDataset {
  std::vector<std::size_t> row_start{0};
  std::vector<std::uint32_t> columns;
  std::vector<double> values;
  std::vector<int> labels;  // each -1 or +1
  Index dim = 0;

  Index rows() const { return labels.size(); }
  std::size_t row_begin(Index i) const { return row_start[i]; }
  std::size_t row_end(Index i) const { return row_start[i + 1]; }

  /// a_i^T x
  double dot(Index i, const Vec &x) const;
  /// out += scale * a_i
  void axpy(Index i, double scale, Vec &out) const;
  double row_norm_sq(Index i) const;

  /// First `count` rows (all if count >= rows()).
  SparseDataset head(Index count) const;

  bool operator==(const SparseDataset &) const = default;
};

/// Which numeric label values map to the negative and positive class.
struct LabelMap {
  std::vector<double> negative{-1.0, 0.0};
  std::vector<double> positive{1.0};
};

/// Parses "<label> <idx>:<val> ..." lines with 1-based, strictly increasing
/// indices. Throws ParseError carrying the offending 1-based line number.
SparseDataset parse_libsvm(std::istream &in, const LabelMap &labels = {});
SparseDataset read_libsvm_file(const std::string &path, const LabelMap &labels = {});

/// Inverse of parse_libsvm: labels as +1/-1, values in shortest round-trip form.
std::string serialize_libsvm(const SparseDataset &data);

/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

std::string dataset_hash(const SparseDataset &data);

}  // namespace adastep
