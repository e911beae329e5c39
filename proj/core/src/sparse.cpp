#include "osclab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace osclab {

SparseOperator SparseOperator::from_triplets(int n, std::vector<Triplet> triplets) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseOperator op;
  op.n_ = n;
  op.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  op.col_idx_.reserve(triplets.size());
  op.values_.reserve(triplets.size());
  std::size_t k = 0;
  for (int r = 0; r < n; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const int c = triplets[k].col;
      if (c < 0 || c >= n) throw std::out_of_range("triplet column out of range");
      double sum = 0.0;
      while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
        sum += triplets[k].value;
        ++k;
      }
      op.col_idx_.push_back(c);
      op.values_.push_back(sum);
    }
    op.row_ptr_[r + 1] = static_cast<int>(op.col_idx_.size());
  }
  if (k != triplets.size()) throw std::out_of_range("triplet row out of range");
  return op;
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < n_; ++r) {
    double sum = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sum += values_[k] * x[col_idx_[k]];
    y[r] = sum;
  }
}

Vector SparseOperator::apply(std::span<const double> x) const {
  Vector y(n_);
  apply(x, y);
  return y;
}

Vector SparseOperator::apply_transpose(std::span<const double> x) const {
  Vector y(n_, 0.0);
  for (int r = 0; r < n_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * x[r];
  }
  return y;
}

double SparseOperator::form(std::span<const double> v, std::span<const double> u) const {
  double total = 0.0;
  for (int r = 0; r < n_; ++r) {
    double sum = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sum += values_[k] * u[col_idx_[k]];
    total += v[r] * sum;
  }
  return total;
}

double SparseOperator::at(int row, int col) const noexcept {
  const auto first = col_idx_.begin() + row_ptr_[row];
  const auto last = col_idx_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector SparseOperator::diagonal() const {
  Vector d(n_);
  for (int r = 0; r < n_; ++r) d[r] = at(r, r);
  return d;
}

Vector SparseOperator::row_sums() const {
  Vector s(n_, 0.0);
  for (int r = 0; r < n_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s[r] += values_[k];
  }
  return s;
}

double SparseOperator::max_asymmetry() const {
  double worst = 0.0;
  for (int r = 0; r < n_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      worst = std::max(worst, std::abs(values_[k] - at(col_idx_[k], r)));
    }
  }
  return worst;
}

SparseOperator SparseOperator::combine(double alpha, const SparseOperator& a, double beta,
                                       const SparseOperator& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("combine: dimension mismatch");
  SparseOperator out;
  out.n_ = a.n_;
  out.row_ptr_.assign(static_cast<std::size_t>(a.n_) + 1, 0);
  out.col_idx_.reserve(std::max(a.nonzeros(), b.nonzeros()));
  out.values_.reserve(std::max(a.nonzeros(), b.nonzeros()));
  for (int r = 0; r < a.n_; ++r) {
    int ka = a.row_ptr_[r];
    int kb = b.row_ptr_[r];
    const int ea = a.row_ptr_[r + 1];
    const int eb = b.row_ptr_[r + 1];
    while (ka < ea || kb < eb) {
      const int ca = ka < ea ? a.col_idx_[ka] : a.n_;
      const int cb = kb < eb ? b.col_idx_[kb] : b.n_;
      if (ca == cb) {
        out.col_idx_.push_back(ca);
        out.values_.push_back(alpha * a.values_[ka++] + beta * b.values_[kb++]);
      } else if (ca < cb) {
        out.col_idx_.push_back(ca);
        out.values_.push_back(alpha * a.values_[ka++]);
      } else {
        out.col_idx_.push_back(cb);
        out.values_.push_back(beta * b.values_[kb++]);
      }
    }
    out.row_ptr_[r + 1] = static_cast<int>(out.col_idx_.size());
  }
  return out;
}

void SparseOperator::write_coordinate(std::ostream& out) const {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  for (int r = 0; r < n_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out << r << ' ' << col_idx_[k] << ' ' << values_[k] << '\n';
    }
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace osclab
