#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace osclab {

using Vector = std::vector<double>;

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Square sparse matrix in compressed-row storage. Entries are stored in
/// full (no symmetric packing); columns are sorted within each row.
class SparseOperator {
 public:
  SparseOperator() = default;

  /// Duplicates are summed in the order they appear in `triplets`, so the
  /// result is a deterministic function of the triplet sequence.
  static SparseOperator from_triplets(int n, std::vector<Triplet> triplets);

  int size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  Vector apply(std::span<const double> x) const;
  /// y = A^T x
  Vector apply_transpose(std::span<const double> x) const;

  /// v^T A u
  double form(std::span<const double> v, std::span<const double> u) const;

  double at(int row, int col) const noexcept;
  Vector diagonal() const;
  Vector row_sums() const;
  /// max |A_ij - A_ji|
  double max_asymmetry() const;

  /// alpha * A + beta * B on the union pattern.
  static SparseOperator combine(double alpha, const SparseOperator& a, double beta,
                                const SparseOperator& b);

  /// One "row col value" line per stored entry, zero-based indices.
  void write_coordinate(std::ostream& out) const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

}  // namespace osclab
