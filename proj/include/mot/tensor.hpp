#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mot/error.hpp"

namespace mot {

using MultiIndex = std::vector<std::size_t>;

// Row-major extents, last index fastest.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> dims);

  std::size_t order() const { return dims_.size(); }
  std::size_t extent(std::size_t k) const { return dims_[k]; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }
  std::size_t size() const { return size_; }

  std::size_t offset(std::span<const std::size_t> index) const;
  MultiIndex unravel(std::size_t offset) const;
  std::size_t coordinate(std::size_t offset, std::size_t k) const {
    return (offset / strides_[k]) % dims_[k];
  }

  friend bool operator==(const Shape& a, const Shape& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Odometer step in row-major order. Returns false after the last index.
bool advance(MultiIndex& index, const Shape& shape);

/// Product of extents, or throws Error(size_guard) once it passes `guard`.
std::size_t checked_size(std::span<const std::size_t> dims, std::size_t guard);

template <class T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, T fill) : shape_(std::move(shape)), data_(shape_.size(), fill) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw Error(ErrorKind::shape_mismatch, "tensor data length does not match its shape");
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  const T& operator[](std::size_t offset) const { return data_[offset]; }
  T& operator[](std::size_t offset) { return data_[offset]; }
  const T& at(std::span<const std::size_t> index) const { return data_[shape_.offset(index)]; }
  T& at(std::span<const std::size_t> index) { return data_[shape_.offset(index)]; }

 private:
  Shape shape_;
  std::vector<T> data_;
};

/// Sub-tensor on the product of per-axis index lists (kept in the given order).
template <class T>
Tensor<T> restrict_tensor(const Tensor<T>& t, const std::vector<std::vector<std::size_t>>& keep) {
  const Shape& full = t.shape();
  if (keep.size() != full.order()) {
    throw Error(ErrorKind::shape_mismatch, "restriction needs one index list per axis");
  }
  std::vector<std::size_t> dims;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    for (std::size_t i : keep[k]) {
      if (i >= full.extent(k)) {
        throw Error(ErrorKind::shape_mismatch, "restriction index out of range");
      }
    }
    dims.push_back(keep[k].size());
  }
  Shape sub(dims);
  std::vector<T> data;
  data.reserve(sub.size());
  if (sub.size() > 0) {
    MultiIndex local(dims.size(), 0);
    MultiIndex global(dims.size(), 0);
    do {
      for (std::size_t k = 0; k < dims.size(); ++k) global[k] = keep[k][local[k]];
      data.push_back(t.at(global));
    } while (advance(local, sub));
  }
  return Tensor<T>(std::move(sub), std::move(data));
}

}  // namespace mot
