#include "cbwcs/kernel_cache.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbwcs {

KernelRows::KernelRows(std::size_t m, RowFill fill, std::vector<double> diagonal,
                       std::size_t max_rows)
    : m_(m),
      fill_(std::move(fill)),
      diag_(std::move(diagonal)),
      max_rows_(std::max<std::size_t>(2, std::min(max_rows, m))),
      rows_(m),
      where_(m),
      resident_(m, false) {
  if (diag_.size() != m) throw std::invalid_argument("KernelRows: diagonal size mismatch");
}

std::span<const double> KernelRows::row(std::size_t i) {
  if (resident_[i]) {
    lru_.splice(lru_.begin(), lru_, where_[i]);
    return rows_[i];
  }
  ++misses_;
  std::vector<double> buf;
  if (lru_.size() >= max_rows_) {
    const std::size_t victim = lru_.back();
    lru_.pop_back();
    resident_[victim] = false;
    buf = std::move(rows_[victim]);
    rows_[victim] = {};
  }
  buf.resize(m_);
  fill_(i, buf);
  rows_[i] = std::move(buf);
  lru_.push_front(i);
  where_[i] = lru_.begin();
  resident_[i] = true;
  return rows_[i];
}

}  // namespace cbwcs
