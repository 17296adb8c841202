// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "refmv/rng.hpp"
#include "refmv/tensor.hpp"

namespace refmv {

enum class Init { kZero, kOne, kHeNormal };

// Flat named parameter arrays with gradients. Layers hold indices into this
// store; checkpoints serialize it by name.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    std::vector<int> shape;
    std::vector<double> w, g;
    bool trainable = true;
  };

  int add(const std::string& name, std::vector<int> shape, Init init, Rng& rng);
  Entry& at(int id) { return entries_[id]; }
  const Entry& at(int id) const { return entries_[id]; }
  int find(const std::string& name) const;  // -1 when absent
  size_t count() const { return entries_.size(); }
  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void zero_grads();
  // Marks every parameter whose name starts with `prefix`.
  void set_trainable(const std::string& prefix, bool trainable);

 private:
  std::vector<Entry> entries_;
};

// Dynamic tape: each forward pass builds nodes; backward() walks the tape in
// reverse creation order.
class Graph {
 public:
  explicit Graph(ParamStore& params) : params_(params) {}

  int input(Tensor value);
  const Tensor& value(int id) const { return nodes_[id].val; }
  Tensor& grad(int id) { return nodes_[id].grad; }

  int conv2d(int x, int wid, int bid, int stride, int pad);
  int group_norm(int x, int gid, int bid, int groups);
  int silu(int x);
  int add(int a, int b);
  int add_bias_hw(int x, int bias_node);  // bias (c,1,1) broadcast over h,w
  int concat_ch(int a, int b);
  int upsample2(int x);  // nearest neighbor, x2
  int global_avg_pool(int x);
  int linear(int x, int wid, int bid);
  // Single-head self-attention over the h*w token grid with a residual add.
  int attention(int x, int gnw, int gnb, int groups, int wqkv, int bqkv, int wproj, int bproj);
  int mse(int pred, Tensor target);  // scalar node

  void backward(int loss, double seed = 1.0);

 private:
  struct Node {
    Tensor val;
    Tensor grad;
    std::function<void(Graph&, int)> back;  // (graph, own id)
  };
  int push(Tensor val, std::function<void(Graph&, int)> back);

  std::vector<Node> nodes_;
  ParamStore& params_;
};

}  // namespace refmv
