#include "grfmcmc/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "grfmcmc/errors.hpp"

namespace grfmcmc {

namespace {

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  return out;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

std::string fmt_g(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

SpinLattice parse_lattice(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  int h = 0, w = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream head(line);
    std::string extra;
    if (!(head >> h >> w) || (head >> extra))
      parse_fail(name, lineno, "expected a 'HEIGHT WIDTH' header line");
    break;
  }
  if (h == 0 && w == 0) parse_fail(name, lineno == 0 ? 1 : lineno, "missing header line");
  if (h <= 0 || w <= 0) parse_fail(name, lineno, "lattice dimensions must be positive");

  SpinLattice lat(h, w, -1);
  int rows_read = 0;
  while (rows_read < h && std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream row(line);
    for (int c = 0; c < w; ++c) {
      int v;
      if (!(row >> v)) parse_fail(name, lineno, "row has fewer than " + std::to_string(w) + " spins");
      if (v != -1 && v != 1) parse_fail(name, lineno, "spins must be -1 or +1");
      lat.set(rows_read, c, v);
    }
    std::string extra;
    if (row >> extra) parse_fail(name, lineno, "row has more than " + std::to_string(w) + " spins");
    ++rows_read;
  }
  if (rows_read < h)
    parse_fail(name, lineno + 1, "expected " + std::to_string(h) + " rows, got " +
                                     std::to_string(rows_read));
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank(line)) parse_fail(name, lineno, "unexpected content after the lattice rows");
  }
  return lat;
}

SpinLattice load_lattice(const std::string& path) {
  auto in = open_input(path);
  return parse_lattice(in, path);
}

void save_lattice(const SpinLattice& lat, const std::string& path) {
  auto out = open_output(path);
  out << lat.height() << ' ' << lat.width() << '\n';
  for (int r = 0; r < lat.height(); ++r) {
    for (int c = 0; c < lat.width(); ++c) {
      if (c) out << ' ';
      out << lat.spin(r, c);
    }
    out << '\n';
  }
}

UndirectedGraph parse_graph(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  int n = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream head(line);
    std::string extra;
    if (!(head >> n) || (head >> extra))
      parse_fail(name, lineno, "expected a node-count header line");
    break;
  }
  if (n < 0) parse_fail(name, lineno == 0 ? 1 : lineno, "missing header line");
  if (n < 2) parse_fail(name, lineno, "graph needs at least 2 nodes");

  UndirectedGraph g(n);
  std::set<std::pair<int, int>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream edge(line);
    int i, j;
    std::string extra;
    if (!(edge >> i >> j) || (edge >> extra))
      parse_fail(name, lineno, "expected an 'i j' edge line");
    if (i == j) parse_fail(name, lineno, "self-loop " + std::to_string(i));
    if (i < 0 || j < 0 || i >= n || j >= n)
      parse_fail(name, lineno, "edge endpoint out of range [0, " + std::to_string(n - 1) + "]");
    if (i > j) std::swap(i, j);
    if (!seen.insert({i, j}).second)
      parse_fail(name, lineno, "duplicate edge " + std::to_string(i) + " " + std::to_string(j));
    g.set_edge(i, j, true);
  }
  return g;
}

UndirectedGraph load_graph(const std::string& path) {
  auto in = open_input(path);
  return parse_graph(in, path);
}

void save_graph(const UndirectedGraph& g, const std::string& path) {
  auto out = open_output(path);
  out << g.n_nodes() << '\n';
  for (int i = 0; i < g.n_nodes(); ++i)
    for (int j = i + 1; j < g.n_nodes(); ++j)
      if (g.edge(i, j)) out << i << ' ' << j << '\n';
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  auto out = open_output(path);
  out << "iter";
  for (int p = 0; p < trace.dim(); ++p) out << ",theta_" << p;
  out << ",accepted,elapsed_ns\n";
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    out << i;
    for (int p = 0; p < trace.dim(); ++p) out << ',' << fmt_g(trace.states[i][p], 17);
    out << ',' << static_cast<int>(trace.accepted[i]) << ',' << trace.elapsed_ns[i] << '\n';
  }
}

void write_posterior_csv(const PosteriorGrid& grid, const std::string& path) {
  auto out = open_output(path);
  out << "theta,density\n";
  for (Eigen::Index i = 0; i < grid.grid.size(); ++i)
    out << fmt_g(grid.grid[i], 17) << ',' << fmt_g(grid.density[i], 17) << '\n';
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace

SamplerConfig sampler_config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("sampler config: expected a JSON object");
  check_keys(j,
             {"n_aux", "aux_burnin", "aux_thin", "rw_scale", "step_matrix", "theta0", "seed",
              "budget"},
             "sampler config");
  SamplerConfig cfg;
  try {
    cfg.n_aux = j.value("n_aux", cfg.n_aux);
    cfg.aux_burnin = j.value("aux_burnin", cfg.aux_burnin);
    cfg.aux_thin = j.value("aux_thin", cfg.aux_thin);
    cfg.rw_scale = j.value("rw_scale", cfg.rw_scale);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("theta0")) {
      auto v = j.at("theta0").get<std::vector<double>>();
      cfg.theta0 = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("step_matrix")) {
      auto rows = j.at("step_matrix").get<std::vector<std::vector<double>>>();
      if (rows.empty()) throw ParseError("sampler config: step_matrix must be non-empty");
      cfg.step_matrix.resize(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(rows.front().size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size())
          throw ParseError("sampler config: ragged step_matrix");
        for (std::size_t c = 0; c < rows[r].size(); ++c)
          cfg.step_matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
    if (j.contains("budget")) {
      const json& b = j.at("budget");
      check_keys(b, {"iterations", "seconds"}, "sampler config budget");
      cfg.budget.iterations = b.value("iterations", cfg.budget.iterations);
      cfg.budget.seconds = b.value("seconds", cfg.budget.seconds);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("sampler config: ") + e.what());
  }
  return cfg;
}

json sampler_config_to_json(const SamplerConfig& cfg) {
  json j;
  j["n_aux"] = cfg.n_aux;
  j["aux_burnin"] = cfg.aux_burnin;
  j["aux_thin"] = cfg.aux_thin;
  j["rw_scale"] = cfg.rw_scale;
  j["seed"] = cfg.seed;
  if (cfg.theta0.size() != 0)
    j["theta0"] = std::vector<double>(cfg.theta0.data(), cfg.theta0.data() + cfg.theta0.size());
  if (cfg.step_matrix.size() != 0) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < cfg.step_matrix.rows(); ++r) {
      std::vector<double> row;
      for (Eigen::Index c = 0; c < cfg.step_matrix.cols(); ++c)
        row.push_back(cfg.step_matrix(r, c));
      rows.push_back(std::move(row));
    }
    j["step_matrix"] = rows;
  }
  j["budget"] = json{{"iterations", cfg.budget.iterations}, {"seconds", cfg.budget.seconds}};
  return j;
}

SamplerConfig load_sampler_config(const std::string& path) {
  return sampler_config_from_json(load_json(path));
}

json load_json(const std::string& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

}  // namespace grfmcmc
