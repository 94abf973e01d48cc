#include "grasplab/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace grasplab::ad {

namespace {
int64_t shape_size(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t e : shape) {
    if (e < 0) throw std::invalid_argument("Tensor: negative extent");
    n *= e;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int64_t> shape)
    : shape_(std::move(shape)), data_(static_cast<size_t>(shape_size(shape_)), 0.0) {
  if (shape_.size() > 2) throw std::invalid_argument("Tensor: rank > 2 unsupported");
}

Tensor::Tensor(std::vector<int64_t> shape, std::vector<double> values) : shape_(std::move(shape)) {
  if (shape_.size() > 2) throw std::invalid_argument("Tensor: rank > 2 unsupported");
  if (static_cast<int64_t>(values.size()) != shape_size(shape_)) {
    throw std::invalid_argument("Tensor: value count does not match shape");
  }
  data_ = std::move(values);
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int64_t> shape, double v) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.size(); ++i) t[i] = v;
  return t;
}

int64_t Tensor::rows() const {
  if (rank() == 2) return shape_[0];
  if (rank() == 1) return shape_[0];
  return 1;
}

int64_t Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  return 1;
}

double& Tensor::at(int64_t r, int64_t c) {
  return data_[static_cast<size_t>(r * cols() + c)];
}

double Tensor::at(int64_t r, int64_t c) const {
  return data_[static_cast<size_t>(r * cols() + c)];
}

double Tensor::scalar_value() const {
  if (size() != 1) throw std::logic_error("Tensor: scalar_value on non-scalar of shape " + shape_string());
  return data_[0];
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_string() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << ",";
    os << shape_[i];
  }
  os << "]";
  return os.str();
}

}  // namespace grasplab::ad
