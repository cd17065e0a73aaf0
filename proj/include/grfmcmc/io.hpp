#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "grfmcmc/chain.hpp"
#include "grfmcmc/oracle.hpp"

namespace grfmcmc {

using nlohmann::json;

// Lattice text format: a "HEIGHT WIDTH" line, then HEIGHT rows of WIDTH
// whitespace-separated spins from {-1, +1}.  Parse errors carry the
// offending line number.
SpinLattice parse_lattice(std::istream& in, const std::string& name);
SpinLattice load_lattice(const std::string& path);
void save_lattice(const SpinLattice& lat, const std::string& path);

// Graph text format: a "N_NODES" line, then one "i j" edge per line with
// 0-indexed endpoints, canonically i < j.  Blank lines are ignored;
// self-loops, duplicate edges and out-of-range endpoints are rejected.
UndirectedGraph parse_graph(std::istream& in, const std::string& name);
UndirectedGraph load_graph(const std::string& path);
void save_graph(const UndirectedGraph& g, const std::string& path);

// Fixed-layout CSV trace: iter,theta_0..theta_{m-1},accepted,elapsed_ns.
// Parameter values keep full precision, so re-emission is byte-identical.
void write_trace_csv(const Trace& trace, const std::string& path);

// Two-column CSV "theta,density" of a grid posterior.
void write_posterior_csv(const PosteriorGrid& grid, const std::string& path);

// Sampler configuration as JSON.  Unknown keys are rejected; every field is
// optional and defaults as in SamplerConfig.  The budget object holds either
// "iterations" or "seconds".
SamplerConfig sampler_config_from_json(const json& j);
json sampler_config_to_json(const SamplerConfig& cfg);
SamplerConfig load_sampler_config(const std::string& path);

json load_json(const std::string& path);
void write_json(const json& j, const std::string& path);

// Deterministic number formatting used by every report writer.
std::string fmt_g(double v, int precision = 12);

}  // namespace grfmcmc
