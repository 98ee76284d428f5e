#include "gcnm/gcnm.h"

#include "gcnm/bench.hpp"
#include "gcnm/instances.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstring>
#include <string>

struct gcnm_instance {
  gcnm::Instance inst;
  gcnm::CompositeProblem problem;
};

struct gcnm_result {
  gcnm::RunOutcome run;
};

namespace {

thread_local std::string g_last_error;

gcnm_status fail(gcnm_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Maps the C++ exception hierarchy onto status codes.
template <typename F>
gcnm_status guarded(F&& body) {
  try {
    body();
    return GCNM_OK;
  } catch (const gcnm::ConfigError& e) {
    return fail(GCNM_ERR_CONFIG, e.what());
  } catch (const gcnm::DimensionMismatch& e) {
    return fail(GCNM_ERR_DIMENSION, e.what());
  } catch (const gcnm::InvalidArgument& e) {
    return fail(GCNM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const gcnm::Unsupported& e) {
    return fail(GCNM_ERR_UNSUPPORTED, e.what());
  } catch (const gcnm::IoError& e) {
    return fail(GCNM_ERR_IO, e.what());
  } catch (const gcnm::ParseError& e) {
    return fail(GCNM_ERR_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(GCNM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GCNM_ERR_INTERNAL, "unknown exception");
  }
}

gcnm::ConfigOverrides to_overrides(const gcnm_options* o) {
  gcnm::ConfigOverrides c;
  if (!o) return c;
  if (!std::isnan(o->lambda)) c.lambda = o->lambda;
  if (!std::isnan(o->sigma)) c.sigma = o->sigma;
  if (!std::isnan(o->beta)) c.beta = o->beta;
  if (!std::isnan(o->tol)) c.tol = o->tol;
  if (o->max_iter > 0) c.max_iter = o->max_iter;
  if (o->max_backtracks > 0) c.max_backtracks = o->max_backtracks;
  return c;
}

gcnm_report to_c(const gcnm::RunReport& r, gcnm::Termination t) {
  gcnm_report out;
  out.time = r.time;
  out.iter = r.iter;
  out.delta = r.delta;
  out.eta = r.eta;
  out.nnz = r.nnz;
  out.termination = t == gcnm::Termination::converged  ? GCNM_CONVERGED
                    : t == gcnm::Termination::max_iter ? GCNM_MAX_ITER
                                                       : GCNM_ERROR;
  return out;
}

gcnm::Termination termination_from(const std::string& s) {
  if (s == "converged") return gcnm::Termination::converged;
  if (s == "max_iter") return gcnm::Termination::max_iter;
  return gcnm::Termination::error;
}

gcnm_instance* wrap(gcnm::Instance inst) {
  gcnm::CompositeProblem problem = gcnm::make_problem(inst);
  return new gcnm_instance{std::move(inst), std::move(problem)};
}

gcnm::InstanceSpec with_seed(gcnm::InstanceSpec spec, int64_t seed_override) {
  if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);
  return spec;
}

}  // namespace

extern "C" {

const char* gcnm_version(void) { return "0.1.0"; }

const char* gcnm_status_string(gcnm_status s) {
  switch (s) {
    case GCNM_OK: return "ok";
    case GCNM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GCNM_ERR_CONFIG: return "invalid configuration";
    case GCNM_ERR_DIMENSION: return "dimension mismatch";
    case GCNM_ERR_IO: return "I/O error";
    case GCNM_ERR_PARSE: return "parse error";
    case GCNM_ERR_UNSUPPORTED: return "unsupported";
    case GCNM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gcnm_last_error(void) { return g_last_error.c_str(); }

gcnm_status gcnm_instance_generate(const char* spec_text, int64_t seed_override, gcnm_instance** out) {
  if (!spec_text || !out) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = wrap(gcnm::generate(with_seed(gcnm::parse_spec(spec_text), seed_override))); });
}

gcnm_status gcnm_instance_generate_file(const char* spec_path, int64_t seed_override, gcnm_instance** out) {
  if (!spec_path || !out) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = wrap(gcnm::generate(with_seed(gcnm::read_spec_file(spec_path), seed_override))); });
}

gcnm_status gcnm_instance_load(const char* path, gcnm_instance** out) {
  if (!path || !out) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = wrap(gcnm::load_instance(path)); });
}

gcnm_status gcnm_instance_save(const gcnm_instance* inst, const char* path) {
  if (!inst || !path) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { gcnm::save_instance(path, inst->inst); });
}

void gcnm_instance_free(gcnm_instance* inst) { delete inst; }

int64_t gcnm_instance_dim(const gcnm_instance* inst) { return inst ? inst->problem.dim() : -1; }

const char* gcnm_instance_family(const gcnm_instance* inst) {
  return inst ? gcnm::to_string(inst->inst.spec.family) : "";
}

gcnm_status gcnm_instance_set_x0(gcnm_instance* inst, const double* x0, size_t n) {
  if (!inst || (!x0 && n > 0)) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  if (static_cast<int64_t>(n) != inst->problem.dim()) {
    return fail(GCNM_ERR_DIMENSION, fmt::format("x0 has {} entries, instance dimension is {}", n, inst->problem.dim()));
  }
  inst->inst.x0 = Eigen::Map<const gcnm::Vec>(x0, static_cast<gcnm::Index>(n));
  return GCNM_OK;
}

void gcnm_options_init(gcnm_options* o) {
  if (!o) return;
  o->lambda = o->sigma = o->beta = o->tol = std::nan("");
  o->max_iter = 0;
  o->max_backtracks = 0;
}

gcnm_status gcnm_solve(const gcnm_instance* inst, const char* solver, const gcnm_options* opts, gcnm_result** out) {
  if (!inst || !solver || !out) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const gcnm::SolverKind kind = gcnm::solver_from_string(solver);
    auto res = std::make_unique<gcnm_result>();
    res->run = gcnm::run_solver(inst->problem, inst->inst.x0, kind, to_overrides(opts));
    *out = res.release();
  });
}

void gcnm_result_free(gcnm_result* res) { delete res; }

gcnm_status gcnm_result_report(const gcnm_result* res, gcnm_report* out) {
  if (!res || !out) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  *out = to_c(res->run.report, res->run.trace.termination);
  return GCNM_OK;
}

const char* gcnm_result_message(const gcnm_result* res) { return res ? res->run.report.message.c_str() : ""; }

size_t gcnm_result_x(const gcnm_result* res, double* buf, size_t cap) {
  if (!res) return 0;
  const gcnm::Vec& x = res->run.trace.final_x;
  const size_t n = static_cast<size_t>(x.size());
  if (buf) std::memcpy(buf, x.data(), sizeof(double) * std::min(n, cap));
  return n;
}

gcnm_status gcnm_result_write_trace(const gcnm_result* res, const char* path) {
  if (!res || !path) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { gcnm::write_file(path, gcnm::trace_to_csv(res->run.trace)); });
}

size_t gcnm_result_report_row(const gcnm_result* res, const char* instance_id, char* buf, size_t cap) {
  if (!res) return 0;
  gcnm::RunReport r = res->run.report;
  r.instance = instance_id ? instance_id : "";
  const std::string row = gcnm::report_csv_row(r);
  if (buf && cap > 0) {
    const size_t n = std::min(row.size(), cap - 1);
    std::memcpy(buf, row.data(), n);
    buf[n] = '\0';
  }
  return row.size() + 1;
}

const char* gcnm_report_header(void) { return gcnm::kReportHeader; }

gcnm_status gcnm_bench(const char* suite_path, const char* out_csv, int threads, const gcnm_options* opts,
                       size_t* rows_out) {
  if (!suite_path || !out_csv) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const gcnm::Suite suite = gcnm::parse_suite(gcnm::read_file(suite_path));
    const auto rows = gcnm::run_suite(suite, threads, to_overrides(opts));
    gcnm::write_file(out_csv, gcnm::reports_to_csv(rows));
    if (rows_out) *rows_out = rows.size();
  });
}

void gcnm_deblur_params_init(gcnm_deblur_params* p) {
  if (!p) return;
  const gcnm::DeblurParams d;
  p->kernel_size = d.kernel_size;
  p->kernel_std = d.kernel_std;
  p->noise_std = d.noise_std;
  p->mu0 = d.mu0;
  p->mu2 = d.mu2;
  p->seed = d.seed;
  p->solver = nullptr;
}

gcnm_status gcnm_deblur(const char* in_pgm, const char* out_pgm, const char* observed_pgm,
                        const gcnm_deblur_params* params, const gcnm_options* opts, gcnm_deblur_report* report) {
  if (!in_pgm || !out_pgm || !params) return fail(GCNM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    gcnm::DeblurParams p;
    p.kernel_size = params->kernel_size;
    p.kernel_std = params->kernel_std;
    p.noise_std = params->noise_std;
    p.mu0 = params->mu0;
    p.mu2 = params->mu2;
    p.seed = params->seed;
    p.solver = gcnm::solver_from_string(params->solver ? params->solver : "gcnm");
    p.overrides = to_overrides(opts);
    const gcnm::GrayImage truth = gcnm::read_pgm(in_pgm);
    const gcnm::DeblurResult r = gcnm::run_deblur(truth, p, in_pgm);
    gcnm::write_pgm(out_pgm, r.restored);
    if (observed_pgm) gcnm::write_pgm(observed_pgm, r.observed);
    if (report) {
      report->run = to_c(r.report, termination_from(r.report.status));
      report->error_observed = r.error_observed;
      report->error_restored = r.error_restored;
    }
  });
}

}  // extern "C"
