#include "grfmcmc/model.hpp"

#include <cmath>

#include "grfmcmc/rng.hpp"

namespace grfmcmc {

namespace {

long long choose2(long long d) { return d * (d - 1) / 2; }
long long choose3(long long d) { return d * (d - 1) * (d - 2) / 6; }

}  // namespace

std::string ergm_stat_name(ErgmStat s) {
  switch (s) {
    case ErgmStat::Edges: return "edges";
    case ErgmStat::TwoStars: return "two-stars";
    case ErgmStat::ThreeStars: return "three-stars";
    case ErgmStat::Triangles: return "triangles";
  }
  throw ContractError("ergm_stat_name: unknown statistic");
}

ErgmStat ergm_stat_from_name(const std::string& name) {
  if (name == "edges") return ErgmStat::Edges;
  if (name == "two-stars") return ErgmStat::TwoStars;
  if (name == "three-stars") return ErgmStat::ThreeStars;
  if (name == "triangles") return ErgmStat::Triangles;
  throw ParseError("unknown network statistic: " + name);
}

GaussianPrior GaussianPrior::iso(int dim, double mean, double variance) {
  GaussianPrior p;
  p.mean = VectorXd::Constant(dim, mean);
  p.variance = VectorXd::Constant(dim, variance);
  p.validate();
  return p;
}

void GaussianPrior::validate() const {
  if (mean.size() == 0 || mean.size() != variance.size())
    throw ContractError("GaussianPrior: mean/variance size mismatch");
  for (Eigen::Index i = 0; i < variance.size(); ++i)
    if (!(variance[i] > 0.0)) throw ContractError("GaussianPrior: variances must be positive");
}

double GaussianPrior::log_density(const VectorXd& theta) const {
  if (theta.size() != mean.size()) throw ContractError("GaussianPrior: dimension mismatch");
  double lp = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    lp += normal_logpdf(theta[i], mean[i], std::sqrt(variance[i]));
  return lp;
}

VectorXd GaussianPrior::grad_log_density(const VectorXd& theta) const {
  if (theta.size() != mean.size()) throw ContractError("GaussianPrior: dimension mismatch");
  return (mean - theta).cwiseQuotient(variance);
}

MatrixXd GaussianPrior::hessian_log_density() const {
  return (-variance.cwiseInverse()).asDiagonal();
}

GrfModel::GrfModel(Kind kind, int a, int b, std::vector<ErgmStat> stats, GaussianPrior prior)
    : kind_(kind), stats_(std::move(stats)), dim_(0), prior_(std::move(prior)) {
  if (kind_ == Kind::Ising) {
    if (a <= 0 || b <= 0) throw ContractError("GrfModel: lattice dimensions must be positive");
    height_ = a;
    width_ = b;
    dim_ = 1;
  } else {
    if (a <= 1) throw ContractError("GrfModel: graph needs at least 2 nodes");
    n_nodes_ = a;
    if (stats_.empty()) throw ContractError("GrfModel: at least one network statistic required");
    for (std::size_t i = 1; i < stats_.size(); ++i)
      if (static_cast<int>(stats_[i]) <= static_cast<int>(stats_[i - 1]))
        throw ContractError(
            "GrfModel: statistics must be distinct and in canonical order "
            "(edges, two-stars, three-stars, triangles)");
    dim_ = static_cast<int>(stats_.size());
  }
  prior_.validate();
  if (prior_.dim() != dim_) throw ContractError("GrfModel: prior dimension mismatch");
}

GrfModel GrfModel::ising(int height, int width) {
  return ising(height, width, GaussianPrior::iso(1));
}

GrfModel GrfModel::ising(int height, int width, GaussianPrior prior) {
  return GrfModel(Kind::Ising, height, width, {}, std::move(prior));
}

GrfModel GrfModel::ergm(int n_nodes, std::vector<ErgmStat> stats) {
  auto prior = GaussianPrior::iso(static_cast<int>(stats.size()));
  return ergm(n_nodes, std::move(stats), std::move(prior));
}

GrfModel GrfModel::ergm(int n_nodes, std::vector<ErgmStat> stats, GaussianPrior prior) {
  return GrfModel(Kind::Ergm, n_nodes, 0, std::move(stats), std::move(prior));
}

int GrfModel::height() const {
  if (kind_ != Kind::Ising) throw ContractError("GrfModel: not a lattice model");
  return height_;
}

int GrfModel::width() const {
  if (kind_ != Kind::Ising) throw ContractError("GrfModel: not a lattice model");
  return width_;
}

int GrfModel::n_nodes() const {
  if (kind_ != Kind::Ergm) throw ContractError("GrfModel: not a graph model");
  return n_nodes_;
}

const std::vector<ErgmStat>& GrfModel::stats() const {
  if (kind_ != Kind::Ergm) throw ContractError("GrfModel: not a graph model");
  return stats_;
}

int GrfModel::n_sites() const {
  return kind_ == Kind::Ising ? height_ * width_ : n_nodes_ * (n_nodes_ - 1) / 2;
}

double GrfModel::stat_bound() const {
  if (kind_ == Kind::Ising) {
    // |s| is maximised by the all-equal configuration: one unit per bond.
    return static_cast<double>(height_ * (width_ - 1) + width_ * (height_ - 1));
  }
  // Each statistic is monotone in edge additions, so the complete graph
  // maximises every coordinate simultaneously.
  long long n = n_nodes_;
  double ss = 0.0;
  for (ErgmStat st : stats_) {
    double m = 0.0;
    switch (st) {
      case ErgmStat::Edges: m = static_cast<double>(choose2(n)); break;
      case ErgmStat::TwoStars: m = static_cast<double>(n * choose2(n - 1)); break;
      case ErgmStat::ThreeStars: m = static_cast<double>(n * choose3(n - 1)); break;
      case ErgmStat::Triangles: m = static_cast<double>(choose3(n)); break;
    }
    ss += m * m;
  }
  return std::sqrt(ss);
}

void GrfModel::validate_state(const GrfState& y) const {
  if (kind_ == Kind::Ising) {
    const auto* lat = std::get_if<SpinLattice>(&y);
    if (!lat) throw ContractError("GrfModel: expected a spin lattice state");
    if (lat->height() != height_ || lat->width() != width_)
      throw ContractError("GrfModel: lattice dimensions do not match the model");
  } else {
    const auto* g = std::get_if<UndirectedGraph>(&y);
    if (!g) throw ContractError("GrfModel: expected a graph state");
    if (g->n_nodes() != n_nodes_)
      throw ContractError("GrfModel: node count does not match the model");
  }
}

VectorXd GrfModel::suffstats(const GrfState& y) const {
  validate_state(y);
  if (kind_ == Kind::Ising) {
    VectorXd s(1);
    s[0] = ising_suffstat(std::get<SpinLattice>(y));
    return s;
  }
  return ergm_suffstats(std::get<UndirectedGraph>(y), stats_);
}

VectorXd GrfModel::change_statistic(const GrfState& y, int site) const {
  validate_state(y);
  if (site < 0 || site >= n_sites()) throw ContractError("GrfModel: site index out of range");
  VectorXd d(dim_);
  if (kind_ == Kind::Ising) {
    const auto& lat = std::get<SpinLattice>(y);
    d[0] = -2.0 * lat.spin(site) * lat.neighbor_sum(site);
    return d;
  }
  return ergm_change_statistic(std::get<UndirectedGraph>(y), stats_, site);
}

VectorXd ergm_change_statistic(const UndirectedGraph& g, const std::vector<ErgmStat>& stats,
                               int dyad) {
  VectorXd d(static_cast<Eigen::Index>(stats.size()));
  auto [i, j] = g.dyad(dyad);
  bool adding = !g.edge(i, j);
  long long di = g.degree(i), dj = g.degree(j);
  for (std::size_t k = 0; k < stats.size(); ++k) {
    auto idx = static_cast<Eigen::Index>(k);
    switch (stats[k]) {
      case ErgmStat::Edges:
        d[idx] = adding ? 1.0 : -1.0;
        break;
      case ErgmStat::TwoStars:
        d[idx] = adding ? static_cast<double>(di + dj) : -static_cast<double>(di - 1 + dj - 1);
        break;
      case ErgmStat::ThreeStars:
        d[idx] = adding ? static_cast<double>(choose2(di) + choose2(dj))
                        : -static_cast<double>(choose2(di - 1) + choose2(dj - 1));
        break;
      case ErgmStat::Triangles: {
        double c = g.common_neighbors(i, j);
        d[idx] = adding ? c : -c;
        break;
      }
    }
  }
  return d;
}

double GrfModel::unnorm_logdensity(const VectorXd& theta, const GrfState& y) const {
  if (theta.size() != dim_) throw ContractError("GrfModel: parameter dimension mismatch");
  return theta.dot(suffstats(y));
}

GrfState GrfModel::reference_state() const {
  if (kind_ == Kind::Ising) return SpinLattice(height_, width_, -1);
  return UndirectedGraph(n_nodes_);
}

GrfState GrfModel::random_state(RngStream& rng) const {
  if (kind_ == Kind::Ising) {
    SpinLattice lat(height_, width_, -1);
    for (int i = 0; i < lat.size(); ++i)
      if (rng.bernoulli(0.5)) lat.flip(i);
    return lat;
  }
  UndirectedGraph g(n_nodes_);
  for (int d = 0; d < g.n_dyads(); ++d) {
    auto [i, j] = g.dyad(d);
    g.set_edge(i, j, rng.bernoulli(0.5));
  }
  return g;
}

double ising_suffstat(const SpinLattice& y) {
  long long s = 0;
  for (int r = 0; r < y.height(); ++r)
    for (int c = 0; c < y.width(); ++c) {
      int v = y.spin(r, c);
      if (c + 1 < y.width()) s += v * y.spin(r, c + 1);
      if (r + 1 < y.height()) s += v * y.spin(r + 1, c);
    }
  return static_cast<double>(s);
}

VectorXd ergm_suffstats(const UndirectedGraph& g, const std::vector<ErgmStat>& stats) {
  VectorXd s(static_cast<Eigen::Index>(stats.size()));
  int n = g.n_nodes();
  for (std::size_t k = 0; k < stats.size(); ++k) {
    long long v = 0;
    switch (stats[k]) {
      case ErgmStat::Edges:
        v = g.edge_count();
        break;
      case ErgmStat::TwoStars:
        for (int i = 0; i < n; ++i) v += choose2(g.degree(i));
        break;
      case ErgmStat::ThreeStars:
        for (int i = 0; i < n; ++i) v += choose3(g.degree(i));
        break;
      case ErgmStat::Triangles:
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (g.edge(i, j))
              for (int l = j + 1; l < n; ++l)
                if (g.edge(i, l) && g.edge(j, l)) ++v;
        break;
    }
    s[static_cast<Eigen::Index>(k)] = static_cast<double>(v);
  }
  return s;
}

}  // namespace grfmcmc
