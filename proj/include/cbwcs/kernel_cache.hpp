// kernel_cache.hpp - lazily filled kernel-matrix rows with LRU eviction
#pragma once

#include <cstddef>
#include <functional>
#include <list>
#include <span>
#include <vector>

namespace cbwcs {

/// Row i of an m x m symmetric kernel matrix, computed on first access.
/// When `max_rows >= m` every row stays resident (full cache); otherwise the
/// least recently used row is recycled.
class KernelRows {
 public:
  using RowFill = std::function<void(std::size_t i, std::span<double> row)>;

  KernelRows(std::size_t m, RowFill fill, std::vector<double> diagonal, std::size_t max_rows);

  std::size_t size() const { return m_; }
  double diag(std::size_t i) const { return diag_[i]; }
  /// The spans of the two most recently requested rows stay valid together.
  std::span<const double> row(std::size_t i);

  std::size_t misses() const { return misses_; }

 private:
  std::size_t m_;
  RowFill fill_;
  std::vector<double> diag_;
  std::size_t max_rows_;
  std::vector<std::vector<double>> rows_;
  std::list<std::size_t> lru_;  // most recent at front
  std::vector<std::list<std::size_t>::iterator> where_;
  std::vector<bool> resident_;
  std::size_t misses_ = 0;
};

}  // namespace cbwcs
