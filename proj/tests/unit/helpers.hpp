#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "grfmcmc/gibbs.hpp"
#include "grfmcmc/model.hpp"
#include "grfmcmc/rng.hpp"

namespace grfmcmc::testing {

inline VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

// Lattice synthesised by Gibbs sweeps at a known parameter, deterministic.
inline SpinLattice simulate_lattice(int h, int w, double theta, int sweeps, std::uint64_t seed) {
  GrfModel model = GrfModel::ising(h, w);
  RngStream rng(seed);
  GrfState y = model.random_state(rng);
  VectorXd th = vec({theta});
  for (int s = 0; s < sweeps; ++s) gibbs_sweep(model, th, y, rng);
  return std::get<SpinLattice>(y);
}

inline UndirectedGraph ring_graph(int n) {
  UndirectedGraph g(n);
  for (int i = 0; i < n; ++i) g.set_edge(i, (i + 1) % n, true);
  return g;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  std::filesystem::path p = std::filesystem::path("test_tmp") / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace grfmcmc::testing
