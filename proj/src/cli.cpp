#include "iqc/cli.hpp"

#include "iqc/nlevel.hpp"
#include "iqc/probe_prep.hpp"
#include "iqc/qubit.hpp"
#include "iqc/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>
#include <vector>

namespace iqc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x); // no "-0"
  return buf;
}

namespace {

// A diagnostic tied to a line of the config text.
struct ConfigIssue {
  int line = 1;
  std::string message;
};

class Config {
public:
  static Config load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw ConfigIssue{0, "cannot open config file"};
    std::ostringstream buf;
    buf << in.rdbuf();
    Config cfg;
    cfg.text_ = buf.str();
    try {
      cfg.doc_ = json::parse(cfg.text_);
    } catch (const json::parse_error& e) {
      throw ConfigIssue{cfg.line_of_byte(e.byte), e.what()};
    }
    if (!cfg.doc_.is_object())
      throw ConfigIssue{1, "top level must be a JSON object"};
    return cfg;
  }

  const json& doc() const { return doc_; }

  [[noreturn]] void fail(const std::string& key,
                         const std::string& message) const {
    throw ConfigIssue{line_of_key(key), "\"" + key + "\": " + message};
  }

  const json& require(const json& obj, const std::string& key) const {
    const auto it = obj.find(key);
    if (it == obj.end())
      throw ConfigIssue{line_of_key(key) > 1 ? line_of_key(key) : 1,
                        "missing required field \"" + key + "\""};
    return *it;
  }

  double number(const json& obj, const std::string& key) const {
    const json& v = require(obj, key);
    if (!v.is_number())
      fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
      fail(key, "expected a finite number");
    return x;
  }

  double number_or(const json& obj, const std::string& key,
                    double fallback) const {
    return obj.contains(key) ? number(obj, key) : fallback;
  }

  double probability(const json& obj, const std::string& key) const {
    const double p = number(obj, key);
    if (p < 0.0 || p > 1.0)
      fail(key, "must lie in [0, 1]");
    return p;
  }

  Complex complex(const json& v, const std::string& key) const {
    if (v.is_number())
      return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    fail(key, "expected a number or an [re, im] pair");
  }

  Matrix matrix(const json& obj, const std::string& key) const {
    const json& v = require(obj, key);
    if (!v.is_array() || v.empty() || !v[0].is_array())
      fail(key, "expected a non-empty array of rows");
    const Index rows = static_cast<Index>(v.size());
    const Index cols = static_cast<Index>(v[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      const json& row = v[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != cols)
        fail(key, "rows must all have the same length");
      for (Index j = 0; j < cols; ++j)
        m(i, j) = complex(row[static_cast<std::size_t>(j)], key);
    }
    if (!m.allFinite())
      fail(key, "entries must be finite");
    return m;
  }

  DensityMatrix density(const json& obj, const std::string& key) const {
    const Matrix m = matrix(obj, key);
    try {
      return DensityMatrix(m);
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }

  RealVector weights(const json& obj, const std::string& key) const {
    const json& v = require(obj, key);
    if (!v.is_array() || v.empty())
      fail(key, "expected a non-empty array of numbers");
    RealVector w(static_cast<Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number())
        fail(key, "expected numbers");
      w(static_cast<Index>(k)) = v[k].get<double>();
    }
    if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > 1e-10)
      fail(key, "weights must be non-negative and sum to 1");
    return w;
  }

  std::vector<double> axis(const json& obj, const std::string& key) const {
    const json& v = require(obj, key);
    if (v.is_number())
      return {v.get<double>()};
    if (!v.is_object())
      fail(key, "expected a number or {start, stop, count}");
    const double start = number(v, "start");
    const double stop = number(v, "stop");
    const json& c = require(v, "count");
    if (!c.is_number_integer() || c.get<long long>() < 0)
      fail("count", "expected a non-negative integer");
    const auto count = c.get<long long>();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long long k = 0; k < count; ++k)
      out.push_back(count == 1 ? start
                               : start + (stop - start) * static_cast<double>(k) /
                                             static_cast<double>(count - 1));
    return out;
  }

private:
  int line_of_byte(std::size_t byte) const {
    const std::size_t end = std::min(byte, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(),
                                           text_.begin() + static_cast<long>(end),
                                           '\n'));
  }

  int line_of_key(const std::string& key) const {
    const std::size_t pos = text_.find("\"" + key + "\"");
    return pos == std::string::npos ? 1 : line_of_byte(pos);
  }

  std::string text_;
  json doc_;
};

// --- parsed jobs -----------------------------------------------------------

struct SimulateJob {
  QubitCouplings couplings;
  double p_s = 0.0;
  double p_p = 0.0;
  std::vector<double> times;
  std::optional<DensityMatrix> target;
};

struct SolveJob {
  double p_s = 0.0;
  DensityMatrix target;
  SolverBudget budget;
};

struct ReachJob {
  Matrix h_s;
  Matrix h_p;
  double t = 0.0;
  RealVector energies;
  ReachabilityProblem problem;
  int max_iterations = 10000;
  bool forward = false;
};

struct ThermalJob {
  double temperature = 1.0;
  std::optional<double> e0;
  std::optional<double> e1;
  std::optional<double> p_p;
};

struct SweepJob {
  double p_s = 0.0;
  double beta = 0.0;
  std::vector<double> theta;
  std::vector<double> alpha;
  std::vector<double> p_p;
};

using Job = std::variant<SimulateJob, SolveJob, ReachJob, ThermalJob, SweepJob>;

double probe_occupancy(const Config& cfg, const json& doc) {
  if (doc.contains("thermal")) {
    const json& th = doc["thermal"];
    ThermalSpec spec{cfg.number(th, "e0"), cfg.number(th, "e1"),
                     cfg.number(th, "temperature")};
    if (spec.temperature <= 0.0)
      cfg.fail("temperature", "must be positive");
    return thermal_occupancy(spec);
  }
  return cfg.probability(doc, "p_p");
}

QubitCouplings parse_couplings(const Config& cfg, const json& doc) {
  const json& c = cfg.require(doc, "couplings");
  QubitCouplings g;
  g.g1 = cfg.number(c, "g1");
  g.g2 = c.contains("g2") ? cfg.complex(c["g2"], "g2") : Complex{};
  g.g3 = cfg.number(c, "g3");
  g.g4 = cfg.number(c, "g4");
  if (g.probe_strength() == 0.0)
    cfg.fail("g4", "g3 and g4 cannot both be zero");
  return g;
}

SimulateJob parse_simulate(const Config& cfg, const json& doc) {
  SimulateJob job;
  job.couplings = parse_couplings(cfg, doc);
  job.p_s = cfg.probability(doc, "p_s");
  job.p_p = probe_occupancy(cfg, doc);
  job.times = cfg.axis(doc, "times");
  if (doc.contains("target")) {
    job.target = cfg.density(doc, "target");
    if (job.target->dim() != 2)
      cfg.fail("target", "must be a 2x2 density matrix");
  }
  return job;
}

SolveJob parse_solve(const Config& cfg, const json& doc) {
  const double p_s = cfg.probability(doc, "p_s");
  DensityMatrix target = cfg.density(doc, "target");
  if (target.dim() != 2)
    cfg.fail("target", "must be a 2x2 density matrix");
  SolverBudget budget;
  if (doc.contains("budget")) {
    const json& b = doc["budget"];
    budget.tol = cfg.number_or(b, "tol", budget.tol);
    budget.max_evaluations = static_cast<std::int64_t>(
        cfg.number_or(b, "max_evaluations",
                      static_cast<double>(budget.max_evaluations)));
    budget.lattice =
        static_cast<int>(cfg.number_or(b, "lattice", budget.lattice));
    if (budget.tol <= 0.0 || budget.max_evaluations < 1 || budget.lattice < 2)
      cfg.fail("budget", "tol > 0, max_evaluations >= 1, lattice >= 2");
  }
  return {p_s, std::move(target), budget};
}

ReachJob parse_reach(const Config& cfg, const json& doc) {
  ReachJob job;
  job.h_s = cfg.matrix(doc, "system_hamiltonian");
  job.h_p = cfg.matrix(doc, "probe_hamiltonian");
  job.t = cfg.number(doc, "t");
  std::optional<ProductHamiltonian> h;
  try {
    h.emplace(job.h_s, job.h_p);
  } catch (const Error& e) {
    cfg.fail("probe_hamiltonian", e.what());
  }
  job.energies = h->probe_eigensystem().values;
  const std::span<const double> energies(job.energies.data(),
                                         static_cast<std::size_t>(job.energies.size()));
  const RealVector p = cfg.weights(doc, "initial_weights");
  if (p.size() != job.h_s.rows())
    cfg.fail("initial_weights", "length must equal the system dimension");
  job.max_iterations =
      static_cast<int>(cfg.number_or(doc, "max_iterations", 10000));

  if (doc.contains("forward_probe_weights")) {
    const RealVector w = cfg.weights(doc, "forward_probe_weights");
    if (w.size() != p.size())
      cfg.fail("forward_probe_weights", "length must equal the dimension");
    job.problem = forward_reachability_problem(job.h_s, energies, job.t, p, w);
    job.forward = true;
  } else {
    job.problem.initial_weights = p;
    job.problem.target_weights = cfg.weights(doc, "target_weights");
    const double reference_time = cfg.number_or(doc, "reference_time", job.t);
    job.problem.coefficients =
        expansion_coefficients(job.h_s, energies, job.t, reference_time);
  }
  try {
    job.problem.validate();
  } catch (const Error& e) {
    cfg.fail("target_weights", e.what());
  }
  return job;
}

ThermalJob parse_thermal(const Config& cfg, const json& doc) {
  ThermalJob job;
  job.temperature = cfg.number(doc, "temperature");
  if (job.temperature <= 0.0)
    cfg.fail("temperature", "must be positive");
  if (doc.contains("p_p")) {
    job.p_p = cfg.probability(doc, "p_p");
  } else {
    job.e0 = cfg.number(doc, "e0");
    job.e1 = cfg.number(doc, "e1");
  }
  return job;
}

SweepJob parse_sweep(const Config& cfg, const json& doc) {
  SweepJob job;
  job.p_s = cfg.probability(doc, "p_s");
  job.beta = cfg.number_or(doc, "beta", 0.0);
  const json& axes = cfg.require(doc, "axes");
  job.theta = cfg.axis(axes, "theta");
  job.alpha = cfg.axis(axes, "alpha");
  job.p_p = cfg.axis(axes, "p_p");
  for (double p : job.p_p)
    if (p < 0.0 || p > 1.0)
      cfg.fail("p_p", "axis values must lie in [0, 1]");
  return job;
}

Job parse_job(const Config& cfg) {
  const json& doc = cfg.doc();
  const json& mode = cfg.require(doc, "mode");
  if (!mode.is_string())
    cfg.fail("mode", "expected a string");
  const std::string m = mode.get<std::string>();
  if (m == "simulate")
    return parse_simulate(cfg, doc);
  if (m == "solve")
    return parse_solve(cfg, doc);
  if (m == "reach")
    return parse_reach(cfg, doc);
  if (m == "thermal")
    return parse_thermal(cfg, doc);
  if (m == "sweep")
    return parse_sweep(cfg, doc);
  cfg.fail("mode", "unknown mode \"" + m +
                       "\" (expected simulate, solve, reach, thermal or sweep)");
}

// --- output ----------------------------------------------------------------

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    row(header);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values)
      cells.push_back(format_double(v));
    row(cells);
    ++rows_;
  }

  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }

private:
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw Error("CsvWriter: row width mismatch");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k)
        text_ += ',';
      text_ += cells[k];
    }
    text_ += '\n';
  }

  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

fs::path write_output(const fs::path& config, const Options& opts,
                      const std::string& extension, const std::string& body) {
  fs::create_directories(opts.out_dir);
  const fs::path out = opts.out_dir / (config.stem().string() + extension);
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error("cannot write " + out.string());
  os << body;
  return out;
}

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

template <typename V> ordered_json vector_json(const V& v) {
  ordered_json out = ordered_json::array();
  for (Index k = 0; k < v.size(); ++k)
    out.push_back(v(k));
  return out;
}

struct Outcome {
  std::string extension;
  std::string body;
  std::size_t rows = 0;
  int code = kSuccess;
};

Outcome execute(const SimulateJob& job) {
  const double theta = probe_mixing_angle(job.couplings);
  const PMProbeComponents probe = pm_components(theta, job.p_p);
  const double initial_weights[] = {1.0 - job.p_s, job.p_s};
  const DensityMatrix reference =
      job.target ? *job.target : DensityMatrix::diagonal(initial_weights);

  CsvWriter csv({"t", "rho00", "rho11", "re_rho10", "im_rho10", "e_plus",
                 "e_minus", "trace_distance_to_target"});
  for (double t : job.times) {
    const ConditionalUnitaries u = conditional_unitaries(job.couplings, t);
    const ClosedFormState s =
        reduced_state_closed_form(job.p_s, probe, overlap_angles(u));
    // Both calls validate the state (unit trace, PSD) before it is written.
    const SpectralForm sf = spectral_form(s.rho00, s.rho11, s.rho01());
    const DensityMatrix rho = to_computational(s, u);
    csv.row({t, s.rho00, s.rho11, s.rho10.real(), s.rho10.imag(), sf.e_plus,
             sf.e_minus, trace_distance(rho, reference)});
  }
  return {".csv", csv.text(), csv.rows()};
}

Outcome execute(const SolveJob& job, const Options& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ControlSolution sol = solve_controls_numeric(job.p_s, job.target, job.budget);
  const double oracle = check_solution(sol, job.p_s, job.target);
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();

  ordered_json doc;
  doc["mode"] = "solve";
  doc["p_s"] = job.p_s;
  doc["feasible"] = sol.feasible;
  doc["residual"] = sol.residual;
  doc["oracle_residual"] = oracle;
  doc["tolerance"] = job.budget.tol;
  doc["evaluations"] = sol.evaluations;
  ordered_json s;
  s["g1"] = sol.couplings.g1;
  s["g2"] = complex_json(sol.couplings.g2);
  s["g3"] = sol.couplings.g3;
  s["g4"] = sol.couplings.g4;
  s["theta"] = sol.theta;
  s["alpha"] = sol.alpha;
  s["p_p"] = sol.p_p;
  s["t"] = sol.t;
  doc["solution"] = s;
  if (sol.p_p > 0.0 && sol.p_p < 1.0)
    doc["thermal_gap_unit_temperature"] = required_gap(sol.p_p, 1.0);
  else
    doc["thermal_gap_unit_temperature"] = nullptr;
  if (opts.timing)
    doc["wall_time_s"] = wall;
  return {".json", doc.dump(2) + "\n", 0, sol.feasible ? kSuccess : kInfeasible};
}

Outcome execute(const ReachJob& job, const Options& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ProbeSpectrumSolution sol =
      solve_probe_spectrum(job.problem, job.max_iterations);
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();

  ordered_json doc;
  doc["mode"] = "reach";
  doc["dimension"] = job.problem.dim();
  doc["forward_constructed"] = job.forward;
  doc["probe_energies"] = vector_json(job.energies);
  doc["initial_weights"] = vector_json(job.problem.initial_weights);
  doc["target_weights"] = vector_json(job.problem.target_weights);
  doc["probe_weights"] = vector_json(sol.weights);
  doc["residual"] = sol.residual;
  doc["iterations"] = sol.iterations;
  doc["reachable"] = sol.reachable;
  if (opts.timing)
    doc["wall_time_s"] = wall;
  return {".json", doc.dump(2) + "\n", 0, sol.reachable ? kSuccess : kInfeasible};
}

Outcome execute(const ThermalJob& job) {
  ordered_json doc;
  doc["mode"] = "thermal";
  doc["temperature"] = job.temperature;
  if (job.p_p) {
    doc["p_p"] = *job.p_p;
    doc["gap"] = required_gap(*job.p_p, job.temperature);
  } else {
    doc["e0"] = *job.e0;
    doc["e1"] = *job.e1;
    doc["p_p"] = thermal_occupancy({*job.e0, *job.e1, job.temperature});
  }
  return {".json", doc.dump(2) + "\n"};
}

Outcome execute(const SweepJob& job) {
  CsvWriter csv({"theta", "alpha", "p_p", "rho00", "abs_rho10"});
  for (double theta : job.theta)
    for (double alpha : job.alpha)
      for (double p_p : job.p_p) {
        const ClosedFormState s =
            reduced_state_closed_form(job.p_s, theta, p_p, {alpha, job.beta});
        spectral_form(s.rho00, s.rho11, s.rho01()); // trace / PSD gate
        csv.row({theta, alpha, p_p, s.rho00, std::abs(s.rho10)});
      }
  return {".csv", csv.text(), csv.rows()};
}

void report(std::ostream& err, const fs::path& config, const ConfigIssue& issue) {
  err << config.string() << ":" << issue.line << ": error: " << issue.message
      << "\n";
}

template <typename Body>
int guarded(const fs::path& config, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigIssue& issue) {
    report(err, config, issue);
  } catch (const std::exception& e) {
    err << config.string() << ": error: " << e.what() << "\n";
  }
  return kError;
}

int finish(const fs::path& config, const Options& opts, std::ostream& log,
           const Outcome& outcome) {
  const fs::path out =
      write_output(config, opts, outcome.extension, outcome.body);
  if (!opts.quiet) {
    log << "wrote " << out.string();
    if (outcome.extension == ".csv")
      log << " (" << outcome.rows << " rows)";
    if (outcome.code == kInfeasible)
      log << " [infeasible: best-effort result]";
    log << "\n";
  }
  return outcome.code;
}

} // namespace

int run(const fs::path& config, const Options& opts, std::ostream& log,
        std::ostream& err) {
  return guarded(config, err, [&] {
    const Config cfg = Config::load(config);
    const Job job = parse_job(cfg);
    if (std::holds_alternative<SweepJob>(job))
      throw ConfigIssue{1, "sweep configs are executed with the sweep command"};
    const Outcome outcome = std::visit(
        [&](const auto& j) -> Outcome {
          using T = std::decay_t<decltype(j)>;
          if constexpr (std::is_same_v<T, SolveJob> || std::is_same_v<T, ReachJob>)
            return execute(j, opts);
          else
            return execute(j);
        },
        job);
    return finish(config, opts, log, outcome);
  });
}

int sweep(const fs::path& config, const Options& opts, std::ostream& log,
          std::ostream& err) {
  return guarded(config, err, [&] {
    const Config cfg = Config::load(config);
    const Job job = parse_job(cfg);
    const auto* s = std::get_if<SweepJob>(&job);
    if (!s)
      throw ConfigIssue{1, "sweep requires a config with \"mode\": \"sweep\""};
    return finish(config, opts, log, execute(*s));
  });
}

int check(const fs::path& config, const Options& opts, std::ostream& log,
          std::ostream& err) {
  return guarded(config, err, [&] {
    const Config cfg = Config::load(config);
    parse_job(cfg);
    if (!opts.quiet)
      log << config.string() << ": ok\n";
    return static_cast<int>(kSuccess);
  });
}

} // namespace iqc::cli
