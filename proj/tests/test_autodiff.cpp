#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "partmotion/adam.hpp"
#include "partmotion/autodiff.hpp"
#include "partmotion/error.hpp"
#include "partmotion/rng.hpp"

using namespace pm;
using ad::Tape;
using ad::Var;

TEST_CASE("backward: x^2 at 3") {
  Tape t;
  Var x = t.input(3.0);
  Var y = x * x;
  t.backward(y);
  CHECK(t.adjoint(x) == doctest::Approx(6.0));
}

TEST_CASE("backward: x*y + sin(x) at (0, 2)") {
  Tape t;
  Var x = t.input(0.0);
  Var y = t.input(2.0);
  Var f = x * y + sin(x);
  t.backward(f);
  CHECK(t.adjoint(x) == doctest::Approx(3.0));
  CHECK(t.adjoint(y) == doctest::Approx(0.0));
}

TEST_CASE("backward: rotation derivative dy/dtheta at theta=0") {
  Tape t;
  Var theta = t.input(0.0);
  ad::VarV3 axis{t.constant(0), t.constant(0), t.constant(1)};
  ad::VarV3 p{t.constant(1), t.constant(0), t.constant(0)};
  ad::VarV3 center{t.constant(0), t.constant(0), t.constant(0)};
  ad::VarV3 r = rotate_axis_cs(p, axis, cos(theta), sin(theta), center);
  t.backward(r.y);
  CHECK(t.adjoint(theta) == doctest::Approx(1.0));
}

TEST_CASE("backward: one pass per evaluation enforced") {
  Tape t;
  Var x = t.input(2.0);
  Var y = x * x;
  t.backward(y);
  CHECK_THROWS_AS(t.backward(y), NumericalError);
  t.clear();
  Var x2 = t.input(2.0);
  Var y2 = x2 + x2;
  t.backward(y2);
  CHECK(t.adjoint(x2) == doctest::Approx(2.0));
}

TEST_CASE("forward errors: divide by zero and sqrt of negative") {
  Tape t;
  Var x = t.input(0.0);
  Var one = t.constant(1.0);
  CHECK_THROWS_AS((void)(one / x), NumericalError);
  Var neg = t.input(-1.0);
  CHECK_THROWS_AS((void)sqrt(neg), NumericalError);
}

TEST_CASE("kink subgradients are zero") {
  Tape t;
  Var x = t.input(0.0);
  Var y = abs(x);
  t.backward(y);
  CHECK(t.adjoint(x) == 0.0);

  t.clear();
  Var a = t.input(1.0);
  Var r = ad::relu(t.input(0.0) * a - a + a * 0.0 + t.constant(0.0));
  t.backward(r);
  CHECK(std::isfinite(t.adjoint(a)));
}

TEST_CASE("adam: first-step closed form") {
  AdamState st(1, 0.01);
  std::vector<double> params{1.0};
  std::vector<double> grads{2.0};
  adam_step(st, params, grads);
  double expected = 1.0 - 0.01 * 2.0 / (std::abs(2.0) + 1e-8);
  CHECK(std::abs(params[0] - expected) < 1e-6);
}

TEST_CASE("adam: zero gradient leaves params unchanged") {
  AdamState st(3, 0.05);
  std::vector<double> params{1.0, -2.0, 0.5};
  std::vector<double> grads{0.0, 0.0, 0.0};
  adam_step(st, params, grads);
  CHECK(params[0] == 1.0);
  CHECK(params[1] == -2.0);
  CHECK(params[2] == 0.5);
}

TEST_CASE("adam: identical runs give identical trajectories") {
  auto run = [] {
    AdamState st(2, 0.1);
    std::vector<double> p{0.3, -0.7};
    for (int i = 0; i < 50; ++i) {
      std::vector<double> g{2.0 * p[0], 2.0 * (p[1] + 1.0)};
      adam_step(st, p, g);
    }
    return p;
  };
  auto a = run();
  auto b = run();
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
}

TEST_CASE("adam: non-finite gradient names the parameter") {
  AdamState st(2, 0.1);
  std::vector<double> p{0.0, 0.0};
  std::vector<double> g{0.0, std::numeric_limits<double>::quiet_NaN()};
  std::vector<std::string> names{"axis.x", "axis.y"};
  try {
    adam_step(st, p, g, names);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("axis.y") != std::string::npos);
  }
}

TEST_CASE("finite_diff_check: quadratic form") {
  auto f = [](Tape& t, std::span<const Var> x) {
    Var out = t.constant(0.0);
    for (size_t i = 0; i < x.size(); ++i) out = out + (x[i] * x[i]) * (1.0 + double(i));
    return out;
  };
  std::vector<double> x{0.7, -1.2, 2.5};
  CHECK(ad::finite_diff_check(f, x) < 1e-7);
}

TEST_CASE("gradient of sum equals sum of gradients") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    auto build_f = [](Tape& t, Var x, Var y) { return x * y + sin(x) * exp(y); };
    auto build_g = [](Tape& t, Var x, Var y) { return sqrt(x * x + 1.0) - y * y * x; };

    Tape tf;
    Var x1 = tf.input(a), y1 = tf.input(b);
    tf.backward(build_f(tf, x1, y1));
    double fgx = tf.adjoint(x1), fgy = tf.adjoint(y1);

    Tape tg;
    Var x2 = tg.input(a), y2 = tg.input(b);
    tg.backward(build_g(tg, x2, y2));
    double ggx = tg.adjoint(x2), ggy = tg.adjoint(y2);

    Tape ts;
    Var x3 = ts.input(a), y3 = ts.input(b);
    ts.backward(build_f(ts, x3, y3) + build_g(ts, x3, y3));
    CHECK(ts.adjoint(x3) == doctest::Approx(fgx + ggx).epsilon(1e-12));
    CHECK(ts.adjoint(y3) == doctest::Approx(fgy + ggy).epsilon(1e-12));
  }
}

TEST_CASE("finite_diff_check: mixed primitive soup") {
  Rng rng(29);
  auto f = [](Tape& t, std::span<const Var> x) {
    Var s = abs(x[0]) + max(x[1], x[2]) + min(x[0] * x[1], x[2]) + tan(x[0] * 0.3);
    return s * s + exp(x[2] * 0.1) + log(x[1] * x[1] + 1.0) + sqrt(x[0] * x[0] + 2.0);
  };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x{rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5), rng.uniform(-1.5, -0.2)};
    CHECK(ad::finite_diff_check(f, x) < 1e-6);
  }
}
