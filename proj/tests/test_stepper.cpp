#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <random>

#include "chblend/errors.hpp"
#include "chblend/stepper.hpp"
#include "oracle.hpp"

using namespace chblend;

namespace {

constexpr SchemeKind kSchemes[] = {SchemeKind::OD2, SchemeKind::WVV, SchemeKind::EY, SchemeKind::LS};

std::vector<double> stacked(const State& s) {
  std::vector<double> x;
  for (const auto* f : {&s.u, &s.w_u, &s.v, &s.w_v}) x.insert(x.end(), f->begin(), f->end());
  return x;
}

State random_state(const Mesh& mesh, std::mt19937_64& rng) {
  State s;
  const std::size_t n = mesh.num_vertices();
  s.u = oracle::random_vector(n, rng, -1.2, 1.2);
  s.v = oracle::random_vector(n, rng, -1.2, 1.2);
  s.w_u = oracle::random_vector(n, rng);
  s.w_v = oracle::random_vector(n, rng);
  return s;
}

Params unit_params(SchemeKind kind) {
  Params p;
  p.tau_u = p.tau_v = p.eps_u = p.eps_v = p.alpha = p.beta = p.sigma = p.v_bar = 1.0;
  p.dt = 0.1;
  p.t_end = 0.1;
  p.scheme = kind;
  p.blowup_threshold = std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace

TEST_SUITE("stepper") {
  TEST_CASE("initialize") {
    const Mesh mesh = build_structured({}, 2, 2);
    const State zero = initialize(mesh, Expr::parse("0"), Expr::parse("0"));
    CHECK(norm_inf(zero.u) == 0.0);
    CHECK(norm_inf(zero.w_v) == 0.0);
    CHECK(zero.k == 0);
    CHECK(zero.t == 0.0);
    const State s = initialize(mesh, Expr::parse("sin(x*y)"), Expr::parse("cos(10*(x-y))*x*y"));
    CHECK(std::abs(s.u[8] - 0.8414710) < 1e-6);
    CHECK(s.v[4] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(initialize(mesh, Expr::parse("1/x"), Expr::parse("0")), EvalError);
  }

  TEST_CASE("one step matches the dense oracle") {
    std::mt19937_64 rng(21);
    const Mesh mesh = build_structured({}, 2, 2);
    for (SchemeKind kind : kSchemes) {
      for (auto solver : {LinearSolverKind::Lu, LinearSolverKind::Gmres}) {
        CAPTURE(to_string(kind));
        CAPTURE(to_string(solver));
        Params p = unit_params(kind);
        p.linear_solver = solver;
        p.stab = kind == SchemeKind::WVV ? 0.01 : 0.0;
        const State s = random_state(mesh, rng);
        const auto sys = oracle::step_system(mesh, p, s);
        const auto expected = oracle::dense_solve(sys.a, sys.b);
        Stepper stepper(mesh, p);
        const State next = stepper.step(s);
        CHECK(oracle::max_abs_diff(stacked(next), expected) <= 1e-10 * oracle::norm(expected));
        CHECK(next.k == 1);
        CHECK(next.t == doctest::Approx(0.1));

        const BlockSystem block = stepper.assemble(s);
        const auto dense = block.matrix.to_dense();
        CHECK(oracle::max_abs_diff(dense, sys.a.a) <= 1e-13);
        CHECK(oracle::max_abs_diff(block.rhs, sys.b) <= 1e-13);
      }
    }
  }

  TEST_CASE("default parameters against the dense oracle over several steps") {
    const Mesh mesh = build_structured({}, 3, 3);
    for (SchemeKind kind : {SchemeKind::OD2, SchemeKind::EY, SchemeKind::LS}) {
      Params p;
      p.scheme = kind;
      p.v_bar = 0.3;
      Stepper stepper(mesh, p);
      State s = initialize(mesh, Expr::parse("sin(10*x*y)"), Expr::parse("cos(10*(x-y))*x*y"));
      for (int k = 0; k < 5; ++k) {
        const auto sys = oracle::step_system(mesh, p, s);
        const auto expected = oracle::dense_solve(sys.a, sys.b);
        s = stepper.step(s);
        CHECK(oracle::max_abs_diff(stacked(s), expected) <= 1e-10 * oracle::norm(expected));
      }
    }
  }

  TEST_CASE("uncoupled u-system") {
    std::mt19937_64 rng(31);
    const Mesh mesh = build_structured({}, 3, 2);
    const std::size_t n = mesh.num_vertices();
    for (SchemeKind kind : kSchemes) {
      CAPTURE(to_string(kind));
      Params p = unit_params(kind);
      p.alpha = p.beta = 0.0;
      p.eps_u = 0.2;
      const State s = random_state(mesh, rng);
      const auto full = oracle::step_system(mesh, p, s);
      oracle::Dense a(2 * n);
      std::vector<double> b(2 * n);
      for (std::size_t i = 0; i < 2 * n; ++i) {
        b[i] = full.b[i];
        for (std::size_t j = 0; j < 2 * n; ++j) a(i, j) = full.a(i, j);
      }
      const auto x = oracle::dense_solve(a, b);
      const State next = step(s, p, mesh);
      const std::vector<double> u_only(x.begin(), x.begin() + static_cast<long>(n));
      CHECK(oracle::max_abs_diff(next.u, u_only) <= 10 * p.solver_tol * std::max(1.0, oracle::norm(u_only)));
    }
  }

  TEST_CASE("zero is a fixed point when the explicit terms vanish") {
    const Mesh mesh = build_structured({}, 4, 4);
    for (SchemeKind kind : {SchemeKind::OD2, SchemeKind::EY, SchemeKind::LS}) {
      Params p;
      p.scheme = kind;
      Stepper stepper(mesh, p);
      State s = initialize(mesh, Expr::parse("0"), Expr::parse("0"));
      for (int k = 0; k < 10; ++k) s = stepper.step(s);
      for (const auto* f : {&s.u, &s.w_u, &s.v, &s.w_v}) CHECK(norm_inf(*f) == 0.0);
    }
  }

  TEST_CASE("mass invariants hold for random states and parameters") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> pos(0.05, 2.0), any(-1.0, 1.0);
    const Mesh mesh = build_structured({0.0, 1.5, 0.0, 1.0}, 5, 4);
    for (int trial = 0; trial < 12; ++trial) {
      Params p;
      p.scheme = kSchemes[trial % 4];
      p.tau_u = pos(rng);
      p.tau_v = pos(rng) * 50;
      p.sigma = pos(rng) * 50;
      p.alpha = any(rng);
      p.beta = any(rng);
      p.v_bar = any(rng);
      p.dt = 1e-3;
      p.t_end = 1e-3;
      p.stab = 0.01;
      p.blowup_threshold = std::numeric_limits<double>::infinity();
      Stepper stepper(mesh, p);
      const State s = random_state(mesh, rng);
      const State next = stepper.step(s);
      const auto& m = stepper.mass();
      const double r = p.tau_v / (p.tau_v + p.dt * p.sigma);
      const double expected_v =
          r * mass(m, s.v) + p.dt * p.sigma * mesh.area() * p.v_bar / (p.tau_v + p.dt * p.sigma);
      CHECK(std::abs(mass(m, next.u) - mass(m, s.u)) <= 100 * p.solver_tol * norm2(next.u));
      CHECK(std::abs(mass(m, next.v) - expected_v) <= 100 * p.solver_tol * norm2(next.v));
    }
  }

  TEST_CASE("blow-up is reported as a non-finite state") {
    const Mesh mesh = build_structured({}, 4, 4);
    Params p;
    p.scheme = SchemeKind::WVV;
    p.tau_v = p.sigma = 1.0;
    p.alpha = 0.5;
    p.beta = 0.8;
    Stepper stepper(mesh, p);
    State s = initialize(mesh, Expr::parse("sin(x*y)"), Expr::parse("cos(10*(x-y))*x*y"));
    CHECK_THROWS_AS(
        [&] {
          for (int k = 0; k < 100; ++k) s = stepper.step(s);
        }(),
        NonFiniteState);
  }

  TEST_CASE("run: step counts, records and failures") {
    const Mesh mesh = build_structured({}, 3, 3);
    const Expr u0 = Expr::parse("sin(10*x*y)"), v0 = Expr::parse("cos(10*(x-y))*x*y");
    Params p;
    p.dt = 0.01;
    p.t_end = 0.01;
    RunResult one = run(mesh, p, u0, v0);
    CHECK(one.steps_completed == 1);
    CHECK(one.series.size() == 2);
    CHECK(!one.failure);

    p.t_end = 0.2;
    std::size_t states = 0;
    RunResult strided = run(mesh, p, u0, v0, RunOptions{5}, {[&](const State&) { ++states; }, {}});
    CHECK(strided.steps_completed == 20);
    CHECK(strided.series.size() == 5);
    CHECK(states == 21);
    CHECK(strided.final_state.t == doctest::Approx(0.2));
    for (std::size_t i = 1; i < strided.series.size(); ++i)
      CHECK(strided.series[i].t > strided.series[i - 1].t);

    Params bad = p;
    bad.scheme = SchemeKind::WVV;
    bad.tau_v = bad.sigma = 1.0;
    bad.alpha = 0.5;
    bad.beta = 0.8;
    bad.dt = 0.005;
    bad.t_end = 1.0;
    RunResult blown = run(mesh, bad, Expr::parse("sin(x*y)"), v0);
    REQUIRE(blown.failure);
    CHECK(blown.failure->kind == FailureKind::NonFinite);
    CHECK(blown.failure->step == blown.steps_completed + 1);
    CHECK(blown.series.size() == blown.steps_completed + 1);
  }

  TEST_CASE("step counts from the time grid") {
    Params p;
    p.dt = 0.005;
    p.t_end = 15;
    CHECK(p.num_steps() == 3000);
    p.t_end = 10;
    CHECK(p.num_steps() == 2000);
    p.t_end = p.dt;
    CHECK(p.num_steps() == 1);
    p.t_end = 0.0123;
    CHECK_THROWS_AS((void)p.num_steps(), ConfigError);
    p.dt = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }

  TEST_CASE("runs are bitwise deterministic") {
    const Mesh mesh = build_structured({}, 5, 5);
    Params p;
    p.t_end = 0.1;
    const Expr u0 = Expr::parse("sin(10*x*y)"), v0 = Expr::parse("cos(10*(x-y))*x*y");
    for (auto solver : {LinearSolverKind::Lu, LinearSolverKind::Gmres}) {
      p.linear_solver = solver;
      const auto a = run(mesh, p, u0, v0), b = run(mesh, p, u0, v0);
      REQUIRE(a.series.size() == b.series.size());
      for (std::size_t i = 0; i < a.series.size(); ++i) {
        CHECK(a.series[i].energy == b.series[i].energy);
        CHECK(a.series[i].mass_v == b.series[i].mass_v);
        CHECK(a.series[i].u_max == b.series[i].u_max);
      }
    }
  }

  TEST_CASE("gmres mode meets the residual contract every step") {
    const Mesh mesh = build_structured({}, 6, 6);
    Params p;
    p.dt = 1e-3;
    p.t_end = 0.05;
    p.linear_solver = LinearSolverKind::Gmres;
    Stepper stepper(mesh, p);
    State s = initialize(mesh, Expr::parse("sin(10*x*y)"), Expr::parse("cos(10*(x-y))*x*y"));
    for (int k = 0; k < 50; ++k) {
      const BlockSystem sys = stepper.assemble(s);
      s = stepper.step(s);
      Vector r = sys.matrix.multiply(stacked(s));
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.rhs[i];
      CHECK(norm2(r) <= p.solver_tol * norm2(sys.rhs));
    }
  }
}
