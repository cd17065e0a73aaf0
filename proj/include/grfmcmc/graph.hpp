#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "grfmcmc/errors.hpp"

namespace grfmcmc {

// Simple undirected graph on n labelled nodes, dense adjacency storage.
// Dyads (unordered node pairs) are indexed lexicographically:
// (0,1), (0,2), ..., (0,n-1), (1,2), ...
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int n) : n_(n) {
    if (n <= 1) throw ContractError("UndirectedGraph: need at least 2 nodes");
    adj_.assign(static_cast<std::size_t>(n) * n, 0);
    deg_.assign(static_cast<std::size_t>(n), 0);
  }

  int n_nodes() const { return n_; }
  int n_dyads() const { return n_ * (n_ - 1) / 2; }
  int edge_count() const { return edges_; }
  int degree(int i) const { return deg_[static_cast<std::size_t>(i)]; }

  bool edge(int i, int j) const { return adj_[static_cast<std::size_t>(i) * n_ + j] != 0; }

  void set_edge(int i, int j, bool on) {
    check_pair(i, j);
    bool cur = edge(i, j);
    if (cur == on) return;
    std::uint8_t v = on ? 1 : 0;
    adj_[static_cast<std::size_t>(i) * n_ + j] = v;
    adj_[static_cast<std::size_t>(j) * n_ + i] = v;
    int d = on ? 1 : -1;
    deg_[static_cast<std::size_t>(i)] += d;
    deg_[static_cast<std::size_t>(j)] += d;
    edges_ += d;
  }

  void toggle(int i, int j) { set_edge(i, j, !edge(i, j)); }

  // Number of nodes adjacent to both i and j.
  int common_neighbors(int i, int j) const {
    const std::uint8_t* ri = &adj_[static_cast<std::size_t>(i) * n_];
    const std::uint8_t* rj = &adj_[static_cast<std::size_t>(j) * n_];
    int c = 0;
    for (int k = 0; k < n_; ++k) c += ri[k] & rj[k];
    return c;
  }

  // Node pair of dyad d in lexicographic order.
  std::pair<int, int> dyad(int d) const {
    if (d < 0 || d >= n_dyads()) throw ContractError("UndirectedGraph: dyad index out of range");
    int i = 0;
    int row = n_ - 1;  // dyads with first node i
    while (d >= row) {
      d -= row;
      ++i;
      --row;
    }
    return {i, i + 1 + d};
  }

  bool operator==(const UndirectedGraph& o) const { return n_ == o.n_ && adj_ == o.adj_; }

 private:
  void check_pair(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ContractError("UndirectedGraph: node out of range");
    if (i == j) throw ContractError("UndirectedGraph: self-loops are not allowed");
  }

  int n_;
  int edges_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<int> deg_;
};

}  // namespace grfmcmc
