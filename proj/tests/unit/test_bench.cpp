#include "gcnm/bench.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace gcnm;

TEST_SUITE("bench") {
  TEST_CASE("report CSV round trip") {
    RunReport a;
    a.instance = "TN,1 \"quoted\"";
    a.solver = "gcnm";
    a.time = 0.125;
    a.iter = 17;
    a.delta = 1.0 / 3.0;
    a.eta = 3.5e-9;
    a.nnz = 42;
    a.status = "converged";
    RunReport b = a;
    b.instance = "plain";
    b.delta = std::numeric_limits<double>::quiet_NaN();
    b.status = "error";
    const std::string csv = reports_to_csv({a, b});
    CHECK(csv.rfind(std::string(kReportHeader) + "\n", 0) == 0);
    const auto rows = parse_reports_csv(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].instance == a.instance);
    CHECK(rows[0].delta == a.delta);
    CHECK(rows[0].eta == a.eta);
    CHECK(rows[0].iter == 17);
    CHECK(rows[0].nnz == 42);
    CHECK(std::isnan(rows[1].delta));
    CHECK(rows[1].status == "error");
  }

  TEST_CASE("report CSV errors") {
    CHECK_THROWS_AS(parse_reports_csv("a,b\n"), ParseError);
    try {
      parse_reports_csv(std::string(kReportHeader) + "\nx,gcnm,1,2,3\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() == std::string(kReportHeader).size() + 1);
    }
    CHECK_THROWS_AS(parse_reports_csv(std::string(kReportHeader) + "\nx,gcnm,1,two,3,4,5,converged\n"), ParseError);
    CHECK(parse_reports_csv(std::string(kReportHeader) + "\n").empty());
  }

  TEST_CASE("suite parsing") {
    const Suite s = parse_suite(
        "# demo\nsolvers = pgm, gcnm, newton\ntol = 1e-8\nmax_iter = 50\n\n[A]\nfamily=l0l2\nm=5\n[B]\nfamily=studentt\nn=40\n");
    CHECK(s.solvers == std::vector<SolverKind>{SolverKind::pgm, SolverKind::gcnm, SolverKind::newton});
    CHECK(s.overrides.tol == 1e-8);
    CHECK(s.overrides.max_iter == 50);
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].name == "A");
    CHECK(parse_spec(s.entries[1].spec_text).n == 40);
    CHECK_THROWS_AS(parse_suite("solvers = simplex\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_suite("colour = red\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_suite("tol = fast\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_suite("[unterminated\n"), InvalidArgument);
    CHECK(parse_suite("# nothing\n").entries.empty());
  }

  TEST_CASE("running a suite") {
    const Suite s = parse_suite(
        "solvers = gcnm, pgm\n[ok]\nfamily=l0l2\nm=6\nseed=1\n[broken]\nfamily=studentt\nn=16\n[t]\nfamily=studentt\nn=40\n");
    const auto rows = run_suite(s);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].instance == "ok");
    CHECK(rows[0].solver == "gcnm");
    CHECK(rows[0].status == "converged");
    CHECK(rows[1].solver == "pgm");
    CHECK(rows[2].status == "error");
    CHECK(rows[2].message.find("n >= 40") != std::string::npos);
    CHECK(rows[3].status == "error");
    CHECK(rows[4].instance == "t");
    CHECK(rows[4].status != "error");

    const auto threaded = run_suite(s, 3);
    REQUIRE(threaded.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(threaded[i].instance == rows[i].instance);
      CHECK(threaded[i].iter == rows[i].iter);
      CHECK(threaded[i].nnz == rows[i].nnz);
      CHECK((threaded[i].eta == rows[i].eta || (std::isnan(threaded[i].eta) && std::isnan(rows[i].eta))));
    }
    CHECK(run_suite(parse_suite("")).empty());
  }

  TEST_CASE("config errors surface as error rows in suites and exceptions in run_solver") {
    const Suite s = parse_suite("lambda = 100\n[x]\nfamily=l0l2\nm=4\n");
    const auto rows = run_suite(s);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "error");
    CHECK(rows[0].message.find("lambda") != std::string::npos);
    const Instance inst = generate(parse_spec("family=l0l2\nm=4\n"));
    ConfigOverrides o;
    o.beta = 1.5;
    CHECK_THROWS_AS(run_solver(make_problem(inst), inst.x0, SolverKind::gcnm, o), ConfigError);
  }

  TEST_CASE("run report fields") {
    const Instance inst = generate(parse_spec("family=l0l2\nm=10\nseed=3\n"));
    const CompositeProblem p = make_problem(inst);
    const RunOutcome r = run_solver(p, inst.x0, SolverKind::gcnm, {}, "id");
    CHECK(r.report.instance == "id");
    CHECK(r.report.iter == r.trace.iterations());
    CHECK(r.report.eta <= 1e-6);
    CHECK(r.report.delta == doctest::Approx((inst.a * r.trace.final_x - inst.b).norm()));
    CHECK(r.report.nnz == (r.trace.final_x.array() != 0.0).count());
    const std::string trace = trace_to_csv(r.trace);
    CHECK(trace.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == static_cast<long>(r.trace.records.size()) + 1);
    CHECK(solver_from_string("glpg") == SolverKind::glpg);
    CHECK_THROWS_AS(solver_from_string("adam"), InvalidArgument);
  }

  TEST_CASE("deblur restores the synthetic image") {
    DeblurParams params;
    params.overrides.tol = 1e-3;
    const DeblurResult r = run_deblur(synthetic_image(32, 32), params);
    CHECK(r.report.status == "converged");
    CHECK(r.error_restored < r.error_observed);
    CHECK(r.restored.width == 32);
  }

  TEST_CASE("identity kernel without noise restores the input to PGM precision") {
    GrayImage img = synthetic_image(24, 16);
    for (Index i = 0; i < img.pixels.size(); i += 7) img.pixels[i] = static_cast<double>(i % 256) / 255.0;
    DeblurParams params;
    params.kernel_size = 1;
    params.noise_std = 0.0;
    params.mu0 = 1e-12;
    params.mu2 = 0.0;
    params.solver = SolverKind::pgm;
    const DeblurResult r = run_deblur(img, params);
    const GrayImage out = parse_pgm(encode_pgm(r.restored));
    CHECK((out.pixels - img.pixels).cwiseAbs().maxCoeff() <= 1.0 / 255.0);
  }
}
