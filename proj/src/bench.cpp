#include "gcnm/bench.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace gcnm {

const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::pgm: return "pgm";
    case SolverKind::glpg: return "glpg";
    case SolverKind::gcnm: return "gcnm";
    case SolverKind::newton: return "newton";
  }
  return "?";
}

SolverKind solver_from_string(const std::string& s) {
  if (s == "pgm") return SolverKind::pgm;
  if (s == "glpg") return SolverKind::glpg;
  if (s == "gcnm") return SolverKind::gcnm;
  if (s == "newton") return SolverKind::newton;
  throw InvalidArgument(fmt::format("unknown solver '{}' (expected pgm, glpg, gcnm or newton)", s));
}

RunOutcome run_solver(const CompositeProblem& problem, const Vec& x0, SolverKind solver,
                      const ConfigOverrides& overrides, const std::string& instance_id,
                      bool keep_iterates) {
  const SolverConfig config = make_config(problem, overrides);
  RunOutcome out;
  SolveOptions opts;
  opts.keep_iterates = keep_iterates;
  switch (solver) {
    case SolverKind::pgm: out.trace = solve_pgm(problem, config, x0, keep_iterates); break;
    case SolverKind::glpg: out.trace = solve_glpg(problem, config, x0, opts); break;
    case SolverKind::gcnm: out.trace = solve_gcnm(problem, config, x0, opts); break;
    case SolverKind::newton: out.trace = solve_pure_newton(problem, config, x0, opts); break;
  }
  RunReport& r = out.report;
  r.instance = instance_id;
  r.solver = to_string(solver);
  r.time = out.trace.totals.time_s;
  r.iter = out.trace.iterations();
  const Vec& x = out.trace.final_x;
  r.delta = x.allFinite() ? problem.smooth().data_residual(x).value_or(std::numeric_limits<double>::quiet_NaN())
                          : std::numeric_limits<double>::quiet_NaN();
  r.eta = out.trace.last().eta;
  r.nnz = static_cast<Index>((x.array() != 0.0).count());
  r.status = to_string(out.trace.termination);
  r.message = out.trace.message;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

// Splits one CSV record starting at `pos`; advances `pos` past the newline.
std::vector<std::string> csv_record(const std::string& text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cur += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      ++pos;
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
T field_number(const std::string& s, const char* what, std::size_t offset) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("report CSV: bad {} value '{}'", what, s), offset);
  }
  return v;
}

}  // namespace

std::string report_csv_row(const RunReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{}", csv_field(r.instance), csv_field(r.solver), r.time, r.iter, r.delta,
                     r.eta, r.nnz, csv_field(r.status));
}

std::string reports_to_csv(const std::vector<RunReport>& rows) {
  std::string out = kReportHeader;
  out += '\n';
  for (const RunReport& r : rows) {
    out += report_csv_row(r);
    out += '\n';
  }
  return out;
}

std::vector<RunReport> parse_reports_csv(const std::string& text) {
  std::size_t pos = 0;
  const std::vector<std::string> header = csv_record(text, pos);
  std::string joined;
  for (std::size_t i = 0; i < header.size(); ++i) joined += (i ? "," : "") + header[i];
  if (joined != kReportHeader) throw ParseError(fmt::format("report CSV: unexpected header '{}'", joined), 0);
  std::vector<RunReport> rows;
  while (pos < text.size()) {
    const std::size_t at = pos;
    const std::vector<std::string> f = csv_record(text, pos);
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 8) throw ParseError(fmt::format("report CSV: expected 8 fields, got {}", f.size()), at);
    RunReport r;
    r.instance = f[0];
    r.solver = f[1];
    r.time = field_number<double>(f[2], "time", at);
    r.iter = field_number<int>(f[3], "iter", at);
    r.delta = field_number<double>(f[4], "delta", at);
    r.eta = field_number<double>(f[5], "eta", at);
    r.nnz = field_number<Index>(f[6], "nnz", at);
    r.status = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string trace_to_csv(const SolveTrace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const IterationRecord& r : trace.records) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.k, r.fbe, r.eta, r.v_norm, r.tau, r.backtracks, r.elapsed);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T suite_number(const std::string& key, const std::string& val, int line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
  if (ec != std::errc() || ptr != val.data() + val.size()) {
    throw InvalidArgument(fmt::format("suite line {}: invalid value '{}' for '{}'", line, val, key));
  }
  return v;
}

}  // namespace

Suite parse_suite(const std::string& text) {
  Suite suite;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string l = trim(raw);
    if (l.empty() || l[0] == '#') continue;
    if (l.front() == '[') {
      if (l.back() != ']' || l.size() < 3) throw InvalidArgument(fmt::format("suite line {}: bad section header", line));
      suite.entries.push_back({trim(l.substr(1, l.size() - 2)), ""});
      continue;
    }
    if (!suite.entries.empty()) {
      suite.entries.back().spec_text += l + "\n";
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw InvalidArgument(fmt::format("suite line {}: expected key=value", line));
    const std::string key = trim(l.substr(0, eq));
    const std::string val = trim(l.substr(eq + 1));
    if (key == "solvers") {
      suite.solvers.clear();
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) suite.solvers.push_back(solver_from_string(trim(item)));
      }
    } else if (key == "tol") {
      suite.overrides.tol = suite_number<double>(key, val, line);
    } else if (key == "max_iter") {
      suite.overrides.max_iter = suite_number<int>(key, val, line);
    } else if (key == "lambda") {
      suite.overrides.lambda = suite_number<double>(key, val, line);
    } else if (key == "sigma") {
      suite.overrides.sigma = suite_number<double>(key, val, line);
    } else if (key == "beta") {
      suite.overrides.beta = suite_number<double>(key, val, line);
    } else {
      throw InvalidArgument(fmt::format("suite line {}: unknown global key '{}'", line, key));
    }
  }
  return suite;
}

namespace {

RunReport error_row(const std::string& instance, SolverKind solver, const std::string& message) {
  RunReport r;
  r.instance = instance;
  r.solver = to_string(solver);
  r.delta = r.eta = std::numeric_limits<double>::quiet_NaN();
  r.status = "error";
  r.message = message;
  return r;
}

std::vector<RunReport> run_entry(const SuiteEntry& entry, const Suite& suite, const ConfigOverrides& o) {
  std::vector<RunReport> rows;
  std::optional<Instance> inst;
  std::optional<CompositeProblem> problem;
  std::string gen_error;
  try {
    inst = generate(parse_spec(entry.spec_text));
    problem.emplace(make_problem(*inst));
  } catch (const std::exception& e) {
    gen_error = e.what();
  }
  for (SolverKind s : suite.solvers) {
    if (!problem) {
      rows.push_back(error_row(entry.name, s, gen_error));
      continue;
    }
    try {
      rows.push_back(run_solver(*problem, inst->x0, s, o, entry.name).report);
    } catch (const std::exception& e) {
      rows.push_back(error_row(entry.name, s, e.what()));
    }
  }
  return rows;
}

ConfigOverrides merge(ConfigOverrides base, const ConfigOverrides& extra) {
  if (extra.lambda) base.lambda = extra.lambda;
  if (extra.sigma) base.sigma = extra.sigma;
  if (extra.beta) base.beta = extra.beta;
  if (extra.tol) base.tol = extra.tol;
  if (extra.max_iter) base.max_iter = extra.max_iter;
  if (extra.max_backtracks) base.max_backtracks = extra.max_backtracks;
  return base;
}

}  // namespace

std::vector<RunReport> run_suite(const Suite& suite, int threads, const ConfigOverrides& extra) {
  const ConfigOverrides o = merge(suite.overrides, extra);
  const std::size_t count = suite.entries.size();
  std::vector<std::vector<RunReport>> per_entry(count);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) per_entry[i] = run_entry(suite.entries[i], suite, o);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) per_entry[i] = run_entry(suite.entries[i], suite, o);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<RunReport> rows;
  for (auto& v : per_entry) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

// ---------------------------------------------------------------------------

DeblurResult run_deblur(const GrayImage& truth, const DeblurParams& p, const std::string& instance_id) {
  InstanceSpec spec;
  spec.family = Family::deblur;
  spec.kernel_size = p.kernel_size;
  spec.kernel_std = p.kernel_std;
  spec.noise_std = p.noise_std;
  spec.mu0 = p.mu0;
  spec.mu2 = p.mu2;
  spec.seed = p.seed;
  const Instance inst = gen_deblur(truth, spec);
  const CompositeProblem problem = make_problem(inst);
  const RunOutcome run = run_solver(problem, inst.x0, p.solver, p.overrides, instance_id);

  DeblurResult out;
  out.report = run.report;
  out.observed = {truth.width, truth.height, inst.b};
  out.restored = {truth.width, truth.height, run.trace.final_x};
  out.error_observed = (inst.b - truth.pixels).norm();
  out.error_restored = (run.trace.final_x - truth.pixels).norm();
  return out;
}

}  // namespace gcnm
