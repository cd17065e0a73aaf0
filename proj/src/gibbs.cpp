#include "grfmcmc/gibbs.hpp"

#include <cmath>

#include "grfmcmc/errors.hpp"

namespace grfmcmc {

namespace {

// Conditional P(spin = +1 | neighbours) for each possible neighbour sum.
struct IsingFlipTable {
  double p_plus[9];  // indexed by neighbour sum + 4

  explicit IsingFlipTable(double theta) {
    for (int n = -4; n <= 4; ++n) p_plus[n + 4] = 1.0 / (1.0 + std::exp(-2.0 * theta * n));
  }
};

void ising_sweep(SpinLattice& lat, const IsingFlipTable& tab, RngStream& rng) {
  const int h = lat.height(), w = lat.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      int n = lat.neighbor_sum(r, c);
      lat.set(r, c, rng.uniform() < tab.p_plus[n + 4] ? 1 : -1);
    }
}

void ergm_dyad_update(const std::vector<ErgmStat>& stats, const VectorXd& theta,
                      UndirectedGraph& g, int dyad, RngStream& rng) {
  auto [i, j] = g.dyad(dyad);
  // change_statistic is s(toggled) - s(current); orient it as s(on) - s(off).
  VectorXd delta = ergm_change_statistic(g, stats, dyad);
  double t_on = theta.dot(delta);
  if (g.edge(i, j)) t_on = -t_on;
  double p_on = 1.0 / (1.0 + std::exp(-t_on));
  g.set_edge(i, j, rng.uniform() < p_on);
}

}  // namespace

void gibbs_site_update(const GrfModel& model, const VectorXd& theta, GrfState& y, int site,
                       RngStream& rng) {
  model.validate_state(y);
  if (theta.size() != model.dim()) throw ContractError("gibbs_site_update: dimension mismatch");
  if (site < 0 || site >= model.n_sites())
    throw ContractError("gibbs_site_update: site index out of range");
  if (model.kind() == GrfModel::Kind::Ising) {
    auto& lat = std::get<SpinLattice>(y);
    double n = lat.neighbor_sum(site);
    double p_plus = 1.0 / (1.0 + std::exp(-2.0 * theta[0] * n));
    bool plus = rng.uniform() < p_plus;
    if ((lat.spin(site) > 0) != plus) lat.flip(site);
  } else {
    ergm_dyad_update(model.stats(), theta, std::get<UndirectedGraph>(y), site, rng);
  }
}

void gibbs_sweep(const GrfModel& model, const VectorXd& theta, GrfState& y, RngStream& rng) {
  model.validate_state(y);
  if (theta.size() != model.dim()) throw ContractError("gibbs_sweep: dimension mismatch");
  if (model.kind() == GrfModel::Kind::Ising) {
    IsingFlipTable tab(theta[0]);
    ising_sweep(std::get<SpinLattice>(y), tab, rng);
  } else {
    auto& g = std::get<UndirectedGraph>(y);
    for (int d = 0; d < g.n_dyads(); ++d) ergm_dyad_update(model.stats(), theta, g, d, rng);
  }
}

std::vector<GrfState> draw_auxiliary(const GrfModel& model, const VectorXd& theta, int count,
                                     int burnin, int thin, RngStream& rng) {
  if (count < 1) throw ContractError("draw_auxiliary: count must be at least 1");
  if (burnin < 0 || thin < 0) throw ContractError("draw_auxiliary: negative schedule");
  GrfState y = model.random_state(rng);
  if (model.kind() == GrfModel::Kind::Ising) {
    // Sweeps share one flip table; this loop dominates sampler run time.
    IsingFlipTable tab(theta[0]);
    auto& lat = std::get<SpinLattice>(y);
    std::vector<GrfState> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int b = 0; b < burnin; ++b) ising_sweep(lat, tab, rng);
    for (int k = 0; k < count; ++k) {
      for (int t = 0; t < thin; ++t) ising_sweep(lat, tab, rng);
      out.push_back(y);
    }
    return out;
  }
  std::vector<GrfState> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int b = 0; b < burnin; ++b) gibbs_sweep(model, theta, y, rng);
  for (int k = 0; k < count; ++k) {
    for (int t = 0; t < thin; ++t) gibbs_sweep(model, theta, y, rng);
    out.push_back(y);
  }
  return out;
}

MatrixXd suffstat_rows(const GrfModel& model, const std::vector<GrfState>& states) {
  MatrixXd s(static_cast<Eigen::Index>(states.size()), model.dim());
  for (std::size_t i = 0; i < states.size(); ++i)
    s.row(static_cast<Eigen::Index>(i)) = model.suffstats(states[i]).transpose();
  return s;
}

MatrixXd draw_auxiliary_stats(const GrfModel& model, const VectorXd& theta, int count, int burnin,
                              int thin, RngStream& rng) {
  return suffstat_rows(model, draw_auxiliary(model, theta, count, burnin, thin, rng));
}

}  // namespace grfmcmc
