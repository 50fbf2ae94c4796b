#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "geomsign/rng.hpp"

namespace geomsign {

// Dense row-major N-d value container. Real is float for training,
// double for verification (gradient checks, invariance at 1e-10).
template <typename Real>
struct Tensor {
  std::vector<size_t> shape;
  std::vector<Real> data;

  Tensor() = default;
  explicit Tensor(std::vector<size_t> s) : shape(std::move(s)), data(count(shape), Real(0)) {}
  Tensor(std::vector<size_t> s, std::vector<Real> d) : shape(std::move(s)), data(std::move(d)) {}

  static size_t count(const std::vector<size_t>& s) {
    size_t n = 1;
    for (size_t e : s) n *= e;
    return n;
  }

  static Tensor zeros(std::vector<size_t> s) { return Tensor(std::move(s)); }

  static Tensor full(std::vector<size_t> s, Real v) {
    Tensor t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  static Tensor scalar(Real v) { return Tensor({1}, {v}); }

  static Tensor randn(std::vector<size_t> s, Rng& rng, double stddev = 1.0) {
    Tensor t(std::move(s));
    for (auto& v : t.data) v = static_cast<Real>(rng.normal() * stddev);
    return t;
  }

  size_t numel() const { return data.size(); }
  size_t rank() const { return shape.size(); }
  size_t dim(size_t i) const { return shape[i]; }

  Real& at(size_t i) { return data[i]; }
  Real at(size_t i) const { return data[i]; }
  Real& at(size_t i, size_t j) { return data[i * shape[1] + j]; }
  Real at(size_t i, size_t j) const { return data[i * shape[1] + j]; }
  Real& at(size_t i, size_t j, size_t k) { return data[(i * shape[1] + j) * shape[2] + k]; }
  Real at(size_t i, size_t j, size_t k) const { return data[(i * shape[1] + j) * shape[2] + k]; }
  Real& at(size_t i, size_t j, size_t k, size_t l) {
    return data[((i * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }
  Real at(size_t i, size_t j, size_t k, size_t l) const {
    return data[((i * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    os << ']';
    return os.str();
  }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace geomsign
