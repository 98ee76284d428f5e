#include "gcnm/instances.hpp"
#include "gcnm/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

using namespace gcnm;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gcnm_test_" + name)).string();
}

std::string pgm_header(const char* magic, int w, int h, int maxval) {
  return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n" + std::to_string(maxval) +
         "\n";
}

}  // namespace

TEST_SUITE("instances") {
  TEST_CASE("spec parsing fills family defaults") {
    const InstanceSpec a = parse_spec("family=l0l2\nm=20\n");
    CHECK(a.n == 100);
    CHECK(a.mu0 == 1e-2);
    CHECK(a.mu2 == 1e-2);
    const InstanceSpec b = parse_spec("# comment\n\nfamily = studentt\nn = 160\nseed = 3\n");
    CHECK(b.m == 20);
    CHECK(b.mu0 == 0.1);
    CHECK(b.seed == 3);
    const InstanceSpec c = parse_spec("family=deblur\nwidth=8\nheight=4\n");
    CHECK(c.n == 32);
    CHECK(c.mu0 == 1e-4);
    CHECK(c.mu2 == 5e-3);
    const InstanceSpec d = parse_spec("family=studentt2d\n");
    CHECK(d.x0 == std::vector<double>{5.0, 5.0});
    CHECK(parse_spec("family=studentt2d\nx0=-5, 5\n").x0 == std::vector<double>{-5.0, 5.0});
  }

  TEST_CASE("spec errors") {
    CHECK_THROWS_WITH_AS(parse_spec("family=lasso\nm=3\n"), doctest::Contains("unknown family"), InvalidArgument);
    CHECK_THROWS_WITH_AS(parse_spec("family=l0l2\nm=3\ncolour=red\n"), doctest::Contains("unknown key"),
                         InvalidArgument);
    CHECK_THROWS_AS(parse_spec("m=3\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec("family=l0l2\nm=3\nn=10\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec("family=l0l2\nm=abc\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec("family=l0l2\nm=3\nmu0=-1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec("family=deblur\nkernel_size=4\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec("family=studentt2d\nx0=1,2,3\n"), InvalidArgument);
    CHECK_THROWS_WITH_AS(parse_spec("family=studentt\nn=32\n"), doctest::Contains("n >= 40"), InvalidArgument);
  }

  TEST_CASE("format_spec round trip") {
    for (const char* text : {"family=l0l2\nm=7\nmu0=0.003\nseed=11\n", "family=studentt\nn=80\nnu=2.5\n",
                             "family=deblur\nwidth=5\nheight=3\nkernel_size=3\nnoise_std=0\n",
                             "family=studentt2d\nx0=0.1,-2\n"}) {
      const InstanceSpec s = parse_spec(text);
      const InstanceSpec t = parse_spec(format_spec(s));
      CHECK(format_spec(s) == format_spec(t));
    }
  }

  TEST_CASE("l0l2 generation") {
    const Instance a = generate(parse_spec("family=l0l2\nm=30\nseed=5\n"));
    const Instance b = generate(parse_spec("family=l0l2\nm=30\nseed=5\n"));
    const Instance c = generate(parse_spec("family=l0l2\nm=30\nseed=6\n"));
    CHECK(a.a == b.a);
    CHECK(a.b == b.b);
    CHECK(a.a != c.a);
    CHECK(a.a.rows() == 30);
    CHECK(a.a.cols() == 150);
    CHECK(a.b.minCoeff() >= 0.0);
    CHECK(a.b.maxCoeff() < 1.0);
    CHECK(a.x0.isZero(0.0));
    const double mean = a.a.mean();
    const double var = (a.a.array() - mean).square().mean();
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.1);
  }

  TEST_CASE("studentt generation") {
    const Instance inst = generate(parse_spec("family=studentt\nn=160\nseed=9\n"));
    CHECK(inst.a.rows() == 20);
    CHECK((inst.x_true.array() != 0.0).count() == 4);
    for (Index i = 0; i < inst.x_true.size(); ++i) {
      if (inst.x_true[i] != 0.0) {
        CHECK(std::abs(inst.x_true[i]) >= 1.0);
        CHECK(std::abs(inst.x_true[i]) <= 10.0);
      }
    }
    CHECK((inst.x0 - inst.a.transpose() * inst.b).norm() <= 1e-12 * (1.0 + inst.x0.norm()));
    const Vec noise = inst.b - inst.a * inst.x_true;
    CHECK(noise.cwiseAbs().maxCoeff() < 5.0);
  }

  TEST_CASE("student t(4) draws") {
    Rng rng(123);
    std::vector<double> xs(200000);
    for (double& x : xs) x = rng.student_t(4);
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
      m2 += x * x;
      m4 += x * x * x * x;
    }
    m2 /= xs.size();
    m4 /= xs.size();
    CHECK(m2 == doctest::Approx(2.0).epsilon(0.05));  // var of t_4 is 4/(4-2)
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    CHECK(std::abs(xs[xs.size() / 2]) < 0.02);
    // Excess kurtosis of t_4 is infinite; the sample value is large.
    CHECK(m4 / (m2 * m2) > 4.0);
  }

  TEST_CASE("deblur generation") {
    GrayImage img;
    img.width = 5;
    img.height = 4;
    img.pixels = Vec::LinSpaced(20, 0.0, 1.0);
    InstanceSpec s;
    s.family = Family::deblur;
    s.kernel_size = 1;
    s.noise_std = 0.0;
    const Instance inst = gen_deblur(img, s);
    CHECK(inst.b == img.pixels);
    CHECK(inst.x0 == inst.b);
    CHECK(inst.x_true == img.pixels);

    const Instance syn = generate(parse_spec("family=deblur\nwidth=32\nheight=32\nseed=1\n"));
    CHECK(syn.b.size() == 1024);
    CHECK((syn.b - syn.x_true).norm() > 0.0);
    const CompositeProblem p = make_problem(syn);
    CHECK(p.dim() == 1024);
    CHECK(p.lipschitz() == doctest::Approx(1.0 + 2 * 5e-3));
  }

  TEST_CASE("synthetic image") {
    const GrayImage img = synthetic_image(64, 64);
    CHECK(img.pixels[0] == 1.0);
    CHECK(img.pixels[16] == 0.0);
    CHECK(img.pixels[16 * 64] == 0.0);
    CHECK(img.pixels[16 * 64 + 16] == 1.0);
    CHECK(img.pixels.sum() == 2048.0);
  }

  TEST_CASE("studentt2d instance") {
    const Instance inst = generate(parse_spec("family=studentt2d\nx0=-5,5\n"));
    CHECK(inst.a == Mat::Ones(1, 2));
    CHECK(inst.b == Vec::Ones(1));
    CHECK(inst.x0[0] == -5.0);
    const CompositeProblem p = make_problem(inst);
    CHECK(p.dim() == 2);
  }

  TEST_CASE("PGM parsing") {
    const GrayImage a = parse_pgm("P2 1 1 255 128");
    CHECK(a.width == 1);
    CHECK(a.pixels[0] == doctest::Approx(128.0 / 255.0));

    const GrayImage b = parse_pgm("P2\n# a comment\n2 1\n# another\n10\n0 10\n");
    CHECK(b.pixels[0] == 0.0);
    CHECK(b.pixels[1] == 1.0);

    std::string p5 = pgm_header("P5", 2, 1, 65535);
    p5 += std::string("\x01\x00\xff\xff", 4);
    const GrayImage c = parse_pgm(p5);
    CHECK(c.pixels[0] == doctest::Approx(256.0 / 65535.0));
    CHECK(c.pixels[1] == 1.0);
  }

  TEST_CASE("PGM errors carry offsets") {
    const std::string header = pgm_header("P5", 4, 4, 255);
    try {
      parse_pgm(header + std::string(10, '\0'));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("expected 16 bytes, received 10") != std::string::npos);
      CHECK(e.offset() == header.size() + 10);
    }
    CHECK_THROWS_AS(parse_pgm("P6 1 1 255 0"), ParseError);
    CHECK_THROWS_AS(parse_pgm("P2 1 1 10 11"), ParseError);
    CHECK_THROWS_AS(parse_pgm("P2 2 1 255 3"), ParseError);
    CHECK_THROWS_AS(parse_pgm("P2 0 1 255"), ParseError);
    CHECK_THROWS_AS(parse_pgm("P2 1 1 70000 1"), ParseError);

    const std::string path = temp_path("bad.pgm");
    write_file(path, "P2 1 1 255");
    CHECK_THROWS_WITH_AS(read_pgm(path), doctest::Contains(path.c_str()), ParseError);
    std::remove(path.c_str());
    CHECK_THROWS_WITH_AS(read_pgm("/nonexistent/dir/x.pgm"), doctest::Contains("/nonexistent/dir/x.pgm"), IoError);
  }

  TEST_CASE("PGM round trip") {
    GrayImage img = synthetic_image(20, 10);
    img.pixels[3] = 0.5;
    img.pixels[4] = -0.2;
    img.pixels[5] = 1.7;
    for (bool binary : {true, false}) {
      for (int maxval : {255, 65535}) {
        const GrayImage back = parse_pgm(encode_pgm(img, maxval, binary));
        CHECK(back.width == 20);
        CHECK(back.height == 10);
        CHECK(back.pixels[4] == 0.0);
        CHECK(back.pixels[5] == 1.0);
        CHECK(std::abs(back.pixels[3] - 0.5) <= 0.5 / maxval + 1e-15);
        CHECK(back.pixels.tail(10) == img.pixels.tail(10));
      }
    }
    const std::string path = temp_path("rt.pgm");
    write_pgm(path, img);
    CHECK(read_pgm(path).pixels.size() == 200);
    std::remove(path.c_str());
  }

  TEST_CASE("container round trip") {
    for (const char* text : {"family=l0l2\nm=6\nseed=2\n", "family=studentt\nn=40\nseed=4\n",
                             "family=deblur\nwidth=6\nheight=5\nkernel_size=3\n", "family=studentt2d\nx0=1,2\n"}) {
      const Instance inst = generate(parse_spec(text));
      const Instance back = decode_instance(encode_instance(inst));
      CHECK(format_spec(back.spec) == format_spec(inst.spec));
      CHECK(back.a == inst.a);
      CHECK(back.b == inst.b);
      CHECK(back.x0 == inst.x0);
      CHECK(back.x_true == inst.x_true);
    }
    const Instance inst = generate(parse_spec("family=l0l2\nm=4\n"));
    const std::string path = temp_path("inst.bin");
    save_instance(path, inst);
    CHECK(load_instance(path).a == inst.a);
    std::remove(path.c_str());
  }

  TEST_CASE("container errors") {
    const std::string good = encode_instance(generate(parse_spec("family=l0l2\nm=4\n")));
    CHECK_THROWS_WITH_AS(decode_instance("NOTMAGIC"), doctest::Contains("bad magic"), ParseError);

    std::string v = good;
    v[8] = 2;
    try {
      decode_instance(v);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("unsupported version 2") != std::string::npos);
      CHECK(e.offset() == 8);
    }

    std::string fam = good;
    fam[12] = 9;
    CHECK_THROWS_WITH_AS(decode_instance(fam), doctest::Contains("unknown family code 9"), ParseError);

    std::string dims = good;
    dims[16] = 5;  // low byte of m
    CHECK_THROWS_WITH_AS(decode_instance(dims), doctest::Contains("disagrees"), ParseError);

    CHECK_THROWS_WITH_AS(decode_instance(good.substr(0, good.size() - 3)), doctest::Contains("truncated"), ParseError);
    CHECK_THROWS_WITH_AS(decode_instance(good + "xx"), doctest::Contains("2 trailing bytes"), ParseError);
    CHECK_THROWS_AS(load_instance("/nonexistent/inst.bin"), IoError);
  }
}
