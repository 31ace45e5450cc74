#include <catch2/catch_amalgamated.hpp>

#include "oneform/closure.hpp"
#include "oneform/lattice.hpp"
#include "test_util.hpp"

using namespace oneform;

TEST_CASE("quadratic fast path matches a generic evaluator on random inputs") {
  LagrangianOneForm fast = quadratic_one_form({1.0, 2.0}, 2);
  LagrangianOneForm generic = fast;
  generic.evaluator = [](int axis, const Eigen::VectorXd& q, const Eigen::VectorXd& dq,
                         const TimePoint&) {
    const double w = axis == 0 ? 1.0 : 2.0;
    double s = 0.0;
    for (int i = 0; i < q.size(); ++i) s += 0.5 * dq[i] * dq[i] - 0.5 * w * w * q[i] * q[i];
    return s;
  };
  testutil::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd q(2), dq(2);
    q << rng.uniform(), rng.uniform();
    dq << rng.uniform(), rng.uniform();
    TimePoint t{rng.uniform(), rng.uniform()};
    for (int axis = 0; axis < 2; ++axis)
      REQUIRE(std::abs(fast.component(axis, q, dq, t) -
                       generic.component(axis, q, dq, t)) < 1e-12);
  }
}

TEST_CASE("solution families are smooth: supplied partials match differences") {
  std::vector<MultiTimeSolution> sols{cosine_solution(1.0, {1.0, 2.0}, 0.3),
                                      circular_solution(0.8, {1.0, 2.0}),
                                      product_field()};
  const double h = 1e-5;
  for (const MultiTimeSolution& sol : sols) {
    TimePoint t{0.43, 0.71};
    Eigen::MatrixXd dq = sol.dq(t);
    for (int axis = 0; axis < sol.n_times; ++axis) {
      TimePoint tp = t, tm = t;
      tp[size_t(axis)] += h;
      tm[size_t(axis)] -= h;
      Eigen::VectorXd fd = (sol.q(tp) - sol.q(tm)) / (2.0 * h);
      REQUIRE((fd - dq.col(axis)).norm() < 1e-8);
    }
  }
}

TEST_CASE("equation-of-motion residuals") {
  std::vector<double> omegas{1.0, 2.0};
  SECTION("cosine solution solves every axis") {
    MultiTimeSolution sol = cosine_solution(1.0, omegas);
    auto r = eom_residual(sol, omegas, {0.37, 0.81}, 1e-3);
    for (double v : r) REQUIRE(v < 1e-6);
  }
  SECTION("product field is a non-solution witness") {
    MultiTimeSolution sol = product_field();
    auto r = eom_residual(sol, omegas, {1.0, 1.0}, 1e-3);
    REQUIRE(r[0] == Catch::Approx(1.0).margin(1e-4));  // |w1^2 t1 t2| at (1,1)
    REQUIRE(r[1] == Catch::Approx(4.0).margin(1e-4));
  }
  SECTION("circular pair solves every axis") {
    MultiTimeSolution sol = circular_solution(0.8, omegas);
    auto r = eom_residual(sol, omegas, {0.2, -0.4}, 1e-3);
    for (double v : r) REQUIRE(v < 1e-6);
  }
  SECTION("step guard") {
    MultiTimeSolution sol = product_field();
    REQUIRE_THROWS_AS(eom_residual(sol, omegas, {0.0, 0.0}, 1e-9), StepTooSmall);
  }
}

TEST_CASE("closure residual on the named solution families") {
  SECTION("symmetric frequencies") {
    LagrangianOneForm form = quadratic_one_form({1.4, 1.4});
    MultiTimeSolution sol = cosine_solution(1.0, {1.4, 1.4});
    REQUIRE(closure_residual(form, sol, 0, 1, {0.3, 0.7}, 1e-4) < 1e-6);
  }
  SECTION("circular two-component solution: L_j constant on the solution") {
    // on q = A(cos th, sin th): (d_j q)^2 = A^2 w_j^2 and q^2 = A^2, so each
    // L_j = A^2 w_j^2/2 - w_j^2 A^2/2 = 0 identically; the residual vanishes
    LagrangianOneForm form = quadratic_one_form({1.0, 2.0}, 2);
    MultiTimeSolution sol = circular_solution(0.9, {1.0, 2.0});
    REQUIRE(closure_residual(form, sol, 0, 1, {0.5, 0.2}, 1e-4) < 1e-6);
    Eigen::VectorXd q = sol.q({0.3, 0.4});
    Eigen::VectorXd dq0 = sol.dq({0.3, 0.4}).col(0);
    REQUIRE(std::abs(form.component(0, q, dq0, {0.3, 0.4})) < 1e-12);
  }
  SECTION("off-shell witness") {
    LagrangianOneForm form = quadratic_one_form({1.0, 2.0});
    MultiTimeSolution sol = product_field();
    REQUIRE(closure_residual(form, sol, 0, 1, {1.0, 1.0}, 1e-4) > 0.1);
  }
}

TEST_CASE("action along staircase paths") {
  LagrangianOneForm form = quadratic_one_form({1.0, 1.0});
  MultiTimeSolution sol = cosine_solution(1.0, {1.0, 1.0});

  SECTION("zero-length path") {
    StaircasePath empty;
    empty.start = {0, 0};
    REQUIRE(action_along_path(form, sol, empty, {1.0, 1.0}) == 0.0);
  }
  SECTION("constant integrand integrates exactly") {
    LagrangianOneForm constant;
    constant.n_times = 2;
    constant.evaluator = [](int, const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const TimePoint&) { return 3.7; };
    StaircasePath seg = parse_path("(0,0);t1:3");
    REQUIRE(action_along_path(constant, sol, seg, {0.5, 0.5}) ==
            Catch::Approx(3.7 * 1.5).epsilon(1e-14));
  }
  SECTION("paths A and B agree on a closure-satisfying solution") {
    StaircasePath a = parse_path("(0,0);t1:2,t2:2");
    StaircasePath b = parse_path("(0,0);t2:2,t1:2");
    const double sa = action_along_path(form, sol, a, {0.35, 0.25}, 500);
    const double sb = action_along_path(form, sol, b, {0.35, 0.25}, 500);
    REQUIRE(std::abs(sa - sb) < 1e-8);
  }
  SECTION("quadrature error drops ~16x when the mesh is halved") {
    StaircasePath seg = parse_path("(0,0);t1:1");
    const double exact = action_along_path(form, sol, seg, {2.0, 2.0}, 4096);
    const double e1 = std::abs(action_along_path(form, sol, seg, {2.0, 2.0}, 16) - exact);
    const double e2 = std::abs(action_along_path(form, sol, seg, {2.0, 2.0}, 32) - exact);
    REQUIRE(e1 / e2 == Catch::Approx(16.0).margin(6.0));
  }
}

TEST_CASE("loop action and the Green identity") {
  SECTION("closure-satisfying solution: vanishing circulation") {
    LagrangianOneForm form = quadratic_one_form({1.0, 2.0}, 2);
    MultiTimeSolution sol = circular_solution(0.8, {1.0, 2.0});
    REQUIRE(std::abs(loop_action(form, sol, {0.0, 0.0}, 0, 1, 1.0, 1.0, 128)) < 1e-8);
  }
  SECTION("degenerate rectangle") {
    LagrangianOneForm form = quadratic_one_form({1.0, 2.0});
    MultiTimeSolution sol = product_field();
    REQUIRE(loop_action(form, sol, {0.0, 0.0}, 0, 1, 0.0, 1.0) == 0.0);
  }
  SECTION("off-shell witness: circulation equals the area integral") {
    LagrangianOneForm form = quadratic_one_form({1.0, 2.0});
    MultiTimeSolution sol = product_field();
    const double circ = loop_action(form, sol, {0.0, 0.0}, 0, 1, 1.0, 1.0, 256);
    const double area = closure_area_integral(form, sol, {0.0, 0.0}, 0, 1, 1.0, 1.0, 64);
    REQUIRE(std::abs(circ) > 0.1);
    REQUIRE(std::abs(circ - area) < 1e-6);
    // hand value: L1 = t2^2/2 - t1^2 t2^2 / 2, L2 = t1^2/2 - 2 t1^2 t2^2,
    // circulation over the unit square = -1/2 with this orientation
    REQUIRE(circ == Catch::Approx(-0.5).margin(1e-6));
  }
}

TEST_CASE("classical boundary-value action") {
  SECTION("free limit") {
    const double s = classical_bvp_action(0.0, 0.8, 0.2, 1.0);
    REQUIRE(s == Catch::Approx((1.0 - 0.2) * (1.0 - 0.2) / (2.0 * 0.8)).epsilon(1e-13));
  }
  SECTION("quarter period frozen value against the shooting oracle") {
    const double w = 1.3, x = 0.6;
    const double s = classical_bvp_action(w, kPi / (2.0 * w), x, x);
    REQUIRE(s == Catch::Approx(-w * x * x).epsilon(1e-12));
    REQUIRE(std::abs(s - classical_bvp_action_shooting(w, kPi / (2.0 * w), x, x)) < 1e-8);
  }
  SECTION("closed form tracks the shooting oracle away from caustics") {
    testutil::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const double w = rng.uniform(0.2, 2.5);
      double T = rng.uniform(0.2, 2.0);
      if (std::abs(std::sin(w * T)) < 0.05) T += 0.3;
      const double x0 = rng.uniform(-1.5, 1.5), x1 = rng.uniform(-1.5, 1.5);
      REQUIRE(std::abs(classical_bvp_action(w, T, x0, x1) -
                       classical_bvp_action_shooting(w, T, x0, x1)) < 1e-8);
    }
  }
  SECTION("mixed derivative feeds the semiclassical prefactor") {
    const double w = 1.0, T = 0.8, h = 1e-4;
    auto s = [&](double a, double b) { return classical_bvp_action(w, T, a, b); };
    const double mixed = (s(h, h) - s(h, -h) - s(-h, h) + s(-h, -h)) / (4.0 * h * h);
    REQUIRE(mixed == Catch::Approx(-w / std::sin(w * T)).epsilon(1e-9));
  }
  SECTION("caustic guard") {
    REQUIRE_THROWS_AS(classical_bvp_action(1.0, kPi, 0.1, 0.2), Caustic);
  }
}

TEST_CASE("composed boundary-value action") {
  SECTION("single segment reduces to the closed form") {
    REQUIRE(composed_bvp_action({{1.0, 0.8}}, 0.3, 0.7) ==
            Catch::Approx(classical_bvp_action(1.0, 0.8, 0.3, 0.7)).epsilon(1e-13));
  }
  SECTION("same-frequency chain satisfies the semigroup of actions") {
    const double w = 1.1;
    const double direct = classical_bvp_action(w, 1.2, -0.4, 0.9);
    const double chained = composed_bvp_action({{w, 0.7}, {w, 0.5}}, -0.4, 0.9);
    REQUIRE(chained == Catch::Approx(direct).epsilon(1e-12));
  }
  SECTION("empty chain is rejected") {
    REQUIRE_THROWS_AS(composed_bvp_action({}, 0.0, 1.0), IdentityKernel);
  }
}

TEST_CASE("path independence across the enumerated family at steps 4") {
  LagrangianOneForm form = quadratic_one_form({1.0, 2.0}, 2);
  MultiTimeSolution sol = circular_solution(0.8, {1.0, 2.0});
  LatticeSpec spec(2, 4, {0.3, 0.2});
  std::vector<StaircasePath> paths = enumerate_paths(spec);
  double lo = 1e300, hi = -1e300;
  for (const StaircasePath& p : paths) {
    const double s = action_along_path(form, sol, p, spec.widths, 200);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  REQUIRE(hi - lo < 1e-7);
}
