#include "mot/tensor.hpp"

#include <limits>

namespace mot {

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)), strides_(dims_.size(), 1) {
  size_ = dims_.empty() ? 0 : 1;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    strides_[k] = size_;
    size_ *= dims_[k];
  }
}

std::size_t Shape::offset(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) {
    throw Error(ErrorKind::shape_mismatch, "multi-index has the wrong order");
  }
  std::size_t off = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (index[k] >= dims_[k]) {
      throw Error(ErrorKind::shape_mismatch, "multi-index out of range");
    }
    off += index[k] * strides_[k];
  }
  return off;
}

MultiIndex Shape::unravel(std::size_t offset) const {
  MultiIndex index(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    index[k] = (offset / strides_[k]) % dims_[k];
  }
  return index;
}

bool advance(MultiIndex& index, const Shape& shape) {
  for (std::size_t k = index.size(); k-- > 0;) {
    if (++index[k] < shape.extent(k)) return true;
    index[k] = 0;
  }
  return false;
}

std::size_t checked_size(std::span<const std::size_t> dims, std::size_t guard) {
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d != 0 && total > std::numeric_limits<std::size_t>::max() / d) {
      throw Error(ErrorKind::size_guard, "tensor size overflows");
    }
    total *= d;
    if (total > guard) {
      throw Error(ErrorKind::size_guard,
                  "tensor has more than " + std::to_string(guard) + " entries");
    }
  }
  return total;
}

}  // namespace mot
