#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "chblend/errors.hpp"
#include "chblend/io.hpp"
#include "chblend/stepper.hpp"
#include "oracle.hpp"

using namespace chblend;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "chblend_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

void check_same(const RunConfig& a, const RunConfig& b) {
  CHECK(a.domain.x_min == b.domain.x_min);
  CHECK(a.domain.y_max == b.domain.y_max);
  CHECK(a.nx == b.nx);
  CHECK(a.ny == b.ny);
  CHECK(a.params.tau_u == b.params.tau_u);
  CHECK(a.params.tau_v == b.params.tau_v);
  CHECK(a.params.eps_u == b.params.eps_u);
  CHECK(a.params.eps_v == b.params.eps_v);
  CHECK(a.params.alpha == b.params.alpha);
  CHECK(a.params.beta == b.params.beta);
  CHECK(a.params.sigma == b.params.sigma);
  CHECK(a.params.v_bar == b.params.v_bar);
  CHECK(a.v_bar_from_v0 == b.v_bar_from_v0);
  CHECK(a.params.dt == b.params.dt);
  CHECK(a.params.t_end == b.params.t_end);
  CHECK(a.params.scheme == b.params.scheme);
  CHECK(a.params.stab == b.params.stab);
  CHECK(a.params.solver_tol == b.params.solver_tol);
  CHECK(a.params.solver_max_iter == b.params.solver_max_iter);
  CHECK(a.params.linear_solver == b.params.linear_solver);
  CHECK(a.params.blowup_threshold == b.params.blowup_threshold);
  CHECK(a.u0 == b.u0);
  CHECK(a.v0 == b.v0);
  CHECK(a.snapshot_times == b.snapshot_times);
  CHECK(a.snapshot_fields == b.snapshot_fields);
  CHECK(a.snapshot_formats == b.snapshot_formats);
  CHECK(a.series_every == b.series_every);
  CHECK(a.output_dir == b.output_dir);
  CHECK(a.tags == b.tags);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("minimal config keeps defaults") {
    const RunConfig c = parse_config("nx = 8\nny = 6\ndt = 0.01\nt_end = 1\n");
    CHECK(c.nx == 8);
    CHECK(c.ny == 6);
    CHECK(c.params.dt == 0.01);
    CHECK(c.params.t_end == 1.0);
    const Params d;
    CHECK(c.params.scheme == SchemeKind::OD2);
    CHECK(c.params.tau_v == d.tau_v);
    CHECK(c.params.solver_tol == 1e-10);
    CHECK(c.params.stab == 0.0);
    CHECK(c.series_every == 1);
  }

  TEST_CASE("scheme selection and grammar") {
    const RunConfig c = parse_config(
        "# header comment\n"
        "scheme = wvv   # trailing comment\n"
        "u0 = \"sin(10*x*y)\"  # comment after a string\n"
        "tag.hash = \"a # b\"\n"
        "snapshot_times = 0.005, 0.01\n"
        "snapshot_fields = u, \"w_v\"\n"
        "snapshot_format = csv\n"
        "tag.note = \"quoted \\\"text\\\"\"\n"
        "v_bar = 0.6\n"
        "t_end = 0.01\n");
    CHECK(c.params.scheme == SchemeKind::WVV);
    CHECK(c.u0 == "sin(10*x*y)");
    CHECK(c.tags.at("hash") == "a # b");
    CHECK(c.snapshot_times == std::vector<double>{0.005, 0.01});
    CHECK(c.snapshot_fields == std::vector<std::string>{"u", "w_v"});
    CHECK(c.snapshot_formats == std::vector<SnapshotFormat>{SnapshotFormat::Csv});
    CHECK(c.tags.at("note") == "quoted \"text\"");
    CHECK(!c.v_bar_from_v0);
    CHECK(c.params.v_bar == 0.6);
  }

  TEST_CASE("baseline setting file") {
    const fs::path path = scratch("baseline.cfg");
    std::ofstream(path) << "dt = 0.005\nt_end = 15\nnx = 20\nny = 20\nu0 = \"sin(10*x*y)\"\n";
    const RunConfig c = load_config(path);
    CHECK(c.params.dt == 0.005);
    CHECK(c.params.t_end == 15.0);
    CHECK(c.nx == 20);
    CHECK(c.u0 == "sin(10*x*y)");
    CHECK(c.params.num_steps() == 3000);
  }

  TEST_CASE("errors name the key and line") {
    const auto expect = [](const std::string& text, const std::string& key, std::size_t line) {
      try {
        (void)parse_config(text);
        FAIL("expected ConfigError for: " << text);
      } catch (const ConfigError& e) {
        CHECK(e.key() == key);
        CHECK(e.line() == line);
      }
    };
    expect("nx = 4\nbogus = 1\n", "bogus", 2);
    expect("\n\ndt = abc\n", "dt", 3);
    expect("nx = 0\n", "nx", 1);
    expect("nx = 2.5\n", "nx", 1);
    expect("scheme = euler\n", "scheme", 1);
    expect("u0 = \"10xy\"\n", "u0", 1);
    expect("u0 = \"sin(x)\n", "u0", 1);
    expect("nx = 3\nnx = 4\n", "nx", 2);
    expect("just words\n", "", 1);
    expect("snapshot_fields = u, q\n", "snapshot_fields", 1);
    expect("snapshot_format = png\n", "snapshot_format", 1);
    expect("dt = 0\n", "dt", 0);
    expect("t_end = 1\nsnapshot_times = 2\n", "snapshot_times", 0);
    expect("snapshot_times = 0.0012\n", "snapshot_times", 0);
    expect("dt = 0.003\nt_end = 1\n", "t_end", 0);
    CHECK_THROWS_AS(load_config(scratch("missing") / "nope.cfg"), IOError);
  }

  TEST_CASE("dump round-trip") {
    RunConfig c;
    c.domain = {-1.0, 2.0, 0.5, 1.5};
    c.nx = 7;
    c.params.beta = -0.9;
    c.params.eps_v = 0.03;
    c.params.scheme = SchemeKind::EY;
    c.params.linear_solver = LinearSolverKind::Gmres;
    c.params.dt = 1e-4;
    c.params.t_end = 0.3;
    c.v_bar_from_v0 = false;
    c.params.v_bar = 0.1 + 0.2;
    c.snapshot_times = {0.1, 0.3};
    c.snapshot_fields = {"w_u"};
    c.output_dir = "out dir/x";
    c.tags["who"] = "a b";
    c.u0 = "sin(x)";
    const RunConfig back = parse_config(dump_config(c));
    check_same(c, back);
    const RunConfig d;
    check_same(d, parse_config(dump_config(d)));
  }

  TEST_CASE("effective v_bar") {
    const RunConfig c = parse_config("nx = 20\nny = 20\n");
    CHECK(c.v_bar_from_v0);
    const Mesh mesh = build_structured(c.domain, 20, 20);
    const Params p = effective_params(c, mesh);
    CHECK(p.v_bar == doctest::Approx(0.011265547164328286).epsilon(1e-12));
    const RunConfig fixed = parse_config("v_bar = 0\n");
    CHECK(effective_params(fixed, mesh).v_bar == 0.0);
  }

  TEST_CASE("series files") {
    const fs::path empty = scratch("empty_series.csv");
    write_series({}, empty);
    CHECK(slurp(empty) == std::string(kSeriesHeader) + "\n");
    CHECK(read_series(empty).empty());

    TimeSeries one{{0.0, 0.1, 0.2, 0.3, 0.4, -1.0, 1.0, -0.5, 0.5}};
    const fs::path p1 = scratch("one_series.csv");
    write_series(one, p1);
    CHECK(count_lines(p1) == 2);

    std::mt19937_64 rng(61);
    TimeSeries many;
    for (int i = 0; i < 20; ++i) {
      const auto v = oracle::random_vector(9, rng, -1e3, 1e3);
      many.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
    }
    many[3].energy = 1.0 / 3.0;
    many[4].mass_v = 4.9e-324;
    const fs::path pm = scratch("many_series.csv");
    write_series(many, pm);
    const auto back = read_series(pm);
    REQUIRE(back.size() == many.size());
    for (std::size_t i = 0; i < many.size(); ++i) {
      CHECK(back[i].t == many[i].t);
      CHECK(back[i].energy == many[i].energy);
      CHECK(back[i].mass_v == many[i].mass_v);
      CHECK(back[i].v_max == many[i].v_max);
    }
    const fs::path pm2 = scratch("many_series_again.csv");
    write_series(many, pm2);
    CHECK(slurp(pm) == slurp(pm2));
  }

  TEST_CASE("series stride arithmetic") {
    const Mesh mesh = build_structured({}, 2, 2);
    Params p;
    p.dt = 0.005;
    p.t_end = 15;
    p.linear_solver = LinearSolverKind::Gmres;
    const auto r = run(mesh, p, Expr::parse("sin(10*x*y)"), Expr::parse("cos(10*(x-y))*x*y"),
                       RunOptions{200});
    CHECK(r.series.size() == 16);
    const fs::path path = scratch("stride.csv");
    write_series(r.series, path);
    CHECK(count_lines(path) == 17);
  }

  TEST_CASE("snapshots") {
    const Mesh mesh = build_structured({}, 2, 2);
    std::mt19937_64 rng(67);
    State s = initialize(mesh, Expr::parse("x"), Expr::parse("1"));
    s.w_u = oracle::random_vector(9, rng);
    s.t = 3.0;

    const Snapshot snap = take_snapshot(s, "w_u");
    CHECK(snapshot_filename(snap, SnapshotFormat::Csv) == "snapshot_w_u_t3.csv");
    s.t = 0.9;
    CHECK(snapshot_filename(take_snapshot(s, "v"), SnapshotFormat::Vtk) == "snapshot_v_t0.9.vtk");
    CHECK_THROWS_AS(take_snapshot(s, "p"), std::invalid_argument);

    const fs::path csv = scratch("snap.csv");
    write_snapshot(snap, mesh, SnapshotFormat::Csv, csv);
    CHECK(count_lines(csv) == 10);
    const auto rows = read_snapshot_csv(csv);
    REQUIRE(rows.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(rows[i].value == snap.values[i]);
      CHECK(rows[i].x == mesh.vertices()[i].x);
      CHECK(rows[i].y == mesh.vertices()[i].y);
    }

    const fs::path ones = scratch("ones.csv");
    write_snapshot(take_snapshot(s, "v"), mesh, SnapshotFormat::Csv, ones);
    for (const auto& r : read_snapshot_csv(ones)) CHECK(r.value == 1.0);

    const Mesh big = build_structured({}, 20, 20);
    const State bs = initialize(big, Expr::parse("x*y"), Expr::parse("0"));
    const fs::path vtk = scratch("big.vtk");
    write_snapshot(take_snapshot(bs, "u"), big, SnapshotFormat::Vtk, vtk);
    const std::string text = slurp(vtk);
    CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
    CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(text.find("POINTS 441 double") != std::string::npos);
    CHECK(text.find("CELLS 800 3200") != std::string::npos);
    CHECK(text.find("CELL_TYPES 800") != std::string::npos);
    CHECK(text.find("POINT_DATA 441") != std::string::npos);
    CHECK(text.find("SCALARS u double 1") != std::string::npos);

    CHECK_THROWS_AS(write_snapshot(snap, mesh, SnapshotFormat::Csv, scratch("no") / "such" / "dir.csv"),
                    IOError);
    CHECK_THROWS_AS(read_snapshot_csv(scratch("absent.csv")), IOError);
  }

  TEST_CASE("format_real is lossless") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
      const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
      CHECK(std::stod(format_real(x)) == x);
    }
  }
}
