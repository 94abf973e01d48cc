#include "grasplab/params.hpp"

#include <cmath>
#include <stdexcept>

namespace grasplab::ad {

void ParamStore::create(const std::string& name, Tensor init) {
  if (has(name)) throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  Entry e;
  e.grad = Tensor::zeros(init.shape());
  e.m = Tensor::zeros(init.shape());
  e.v = Tensor::zeros(init.shape());
  e.value = std::move(init);
  entries_.emplace(name, std::move(e));
}

bool ParamStore::has(const std::string& name) const { return entries_.count(name) > 0; }

Tensor& ParamStore::value(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
  return it->second.value;
}

const Tensor& ParamStore::value(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
  return it->second.value;
}

Tensor& ParamStore::grad(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
  return it->second.grad;
}

void ParamStore::accumulate_grad(const std::string& name, const Tensor& g) {
  Tensor& dst = grad(name);
  if (!dst.same_shape(g)) {
    throw std::invalid_argument("ParamStore: gradient shape " + g.shape_string() +
                                " does not match parameter " + name + " " + dst.shape_string());
  }
  for (int64_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
  any_grad_ = true;
}

void ParamStore::zero_grad() {
  for (auto& [name, e] : entries_) {
    for (int64_t i = 0; i < e.grad.size(); ++i) e.grad[i] = 0.0;
  }
  any_grad_ = false;
}

void ParamStore::adam_step(double lr) {
  if (!any_grad_) {
    throw std::logic_error("ParamStore: adam_step with no gradients populated");
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++step_count_;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_count_));
  for (auto& [name, e] : entries_) {
    for (int64_t i = 0; i < e.value.size(); ++i) {
      const double g = e.grad[i];
      e.m[i] = kBeta1 * e.m[i] + (1.0 - kBeta1) * g;
      e.v[i] = kBeta2 * e.v[i] + (1.0 - kBeta2) * g * g;
      const double mhat = e.m[i] / bc1;
      const double vhat = e.v[i] / bc2;
      e.value[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
    }
  }
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

int64_t ParamStore::total_size() const {
  int64_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.size();
  return n;
}

std::vector<double> ParamStore::flatten_values() const {
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(total_size()));
  for (const auto& [name, e] : entries_) {
    for (int64_t i = 0; i < e.value.size(); ++i) flat.push_back(e.value[i]);
  }
  return flat;
}

void ParamStore::unflatten_values(const std::vector<double>& flat) {
  size_t k = 0;
  for (auto& [name, e] : entries_) {
    for (int64_t i = 0; i < e.value.size(); ++i) {
      if (k >= flat.size()) throw std::invalid_argument("ParamStore: flat vector too short");
      e.value[i] = flat[k++];
    }
  }
  if (k != flat.size()) throw std::invalid_argument("ParamStore: flat vector too long");
}

}  // namespace grasplab::ad
