#pragma once

#include <map>
#include <string>
#include <vector>

#include "grasplab/tensor.hpp"

namespace grasplab::ad {

/// Named parameter tensors with per-parameter Adam state. Iteration order is
/// the lexicographic name order, so updates and serialization are
/// deterministic.
class ParamStore {
 public:
  void create(const std::string& name, Tensor init);
  bool has(const std::string& name) const;

  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Tensor& grad(const std::string& name);

  void accumulate_grad(const std::string& name, const Tensor& g);
  void zero_grad();

  /// Standard Adam update (beta1 0.9, beta2 0.999, eps 1e-8, bias
  /// correction). Throws if no gradient has been accumulated since the last
  /// zero_grad.
  void adam_step(double lr);

  int64_t step_count() const { return step_count_; }
  std::vector<std::string> names() const;
  int64_t total_size() const;

  /// Flat export/import of values only (used by finite-difference tests).
  std::vector<double> flatten_values() const;
  void unflatten_values(const std::vector<double>& flat);

  struct Entry {
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;
  };
  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
  int64_t step_count_ = 0;
  bool any_grad_ = false;
};

}  // namespace grasplab::ad
