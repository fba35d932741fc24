#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tfz {

using cd = std::complex<double>;

// Dense row-major matrix. Rows index time, columns index frequency
// throughout this codebase.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Grid: negative shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  T* row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const T* row(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <class U>
  bool same_shape(const Grid<U>& o) const {
    return rows_ == o.rows() && cols_ == o.cols();
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using RGrid = Grid<double>;
using CGrid = Grid<cd>;
using BGrid = Grid<std::uint8_t>;  // boolean grid; vector<bool> is a trap

}  // namespace tfz
