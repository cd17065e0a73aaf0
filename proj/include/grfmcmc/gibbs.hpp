#pragma once

#include <vector>

#include "grfmcmc/model.hpp"
#include "grfmcmc/rng.hpp"

namespace grfmcmc {

// Resample one site from its full conditional under f(.|theta).
// Consumes exactly one uniform from the stream.
void gibbs_site_update(const GrfModel& model, const VectorXd& theta, GrfState& y, int site,
                       RngStream& rng);

// Systematic-scan sweep over all sites in index order.
void gibbs_sweep(const GrfModel& model, const VectorXd& theta, GrfState& y, RngStream& rng);

// Approximate draws from f(.|theta): start from a uniform random state, run
// `burnin` sweeps, then collect `count` states spaced `thin` sweeps apart
// (the first collected state follows `thin` further sweeps after burn-in).
std::vector<GrfState> draw_auxiliary(const GrfModel& model, const VectorXd& theta, int count,
                                     int burnin, int thin, RngStream& rng);

// Statistics of draw_auxiliary's output, one row per draw.
MatrixXd draw_auxiliary_stats(const GrfModel& model, const VectorXd& theta, int count, int burnin,
                              int thin, RngStream& rng);

MatrixXd suffstat_rows(const GrfModel& model, const std::vector<GrfState>& states);

}  // namespace grfmcmc
