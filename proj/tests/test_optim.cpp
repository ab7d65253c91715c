#include <doctest.h>

#include <cmath>
#include <random>

#include "spellnet/optim.hpp"
#include "support/gradcheck.hpp"

using namespace spellnet;

TEST_SUITE("optim") {

TEST_CASE("adam defaults match the training recipe") {
  AdamState s;
  CHECK(s.lr == doctest::Approx(0.001));
  CHECK(s.beta1 == doctest::Approx(0.9));
  CHECK(s.beta2 == doctest::Approx(0.999));
  CHECK(s.eps == doctest::Approx(1e-8));
}

TEST_CASE("adam with zero gradient is a fixed point") {
  std::mt19937_64 rng(1);
  Mat p = testsup::random_matf(3, 3, rng);
  Mat before = p;
  p.ensure_grad();
  p.zero_grad();
  AdamState s;
  adam_step({&p}, s);
  CHECK(s.t == 1);
  for (size_t i = 0; i < p.v.size(); ++i) CHECK(p.v[i] == before.v[i]);
  adam_step({&p}, s);
  CHECK(s.t == 2);
  for (size_t i = 0; i < p.v.size(); ++i) CHECK(p.v[i] == before.v[i]);
}

TEST_CASE("adam first step is roughly -lr * sign(g)") {
  for (float g : {0.3f, -1.7f, 0.002f}) {
    Mat p(1, 1);
    p.v[0] = 5.0f;
    p.ensure_grad();
    p.g[0] = g;
    AdamState s;
    adam_step({&p}, s);
    const double update = p.v[0] - 5.0f;
    const double expected = -s.lr * (g > 0 ? 1.0 : -1.0);
    CHECK(std::abs(update - expected) <= std::abs(s.lr * s.eps / (std::abs(g) + s.eps)) + 1e-7);
  }
}

TEST_CASE("adam rejects moment shape changes") {
  Mat p(2, 2);
  p.ensure_grad();
  AdamState s;
  adam_step({&p}, s);
  Mat q(3, 3);
  q.ensure_grad();
  CHECK_THROWS_AS(adam_step({&q}, s), std::invalid_argument);
}

TEST_CASE("sgd halving schedule") {
  SgdSchedule s;
  s.lr0 = 0.2f;
  s.halve_every = 50000;
  s.step = 0;
  CHECK(s.effective_lr() == doctest::Approx(0.2));
  s.step = 49999;
  CHECK(s.effective_lr() == doctest::Approx(0.2));
  s.step = 50000;
  CHECK(s.effective_lr() == doctest::Approx(0.1));
  s.step = 100000;
  CHECK(s.effective_lr() == doctest::Approx(0.05));
}

TEST_CASE("sgd applies the effective lr and zero grad is a no-op") {
  Mat p(1, 2);
  p.v = {1.0f, -2.0f};
  p.ensure_grad();
  p.g = {0.5f, 0.0f};
  SgdSchedule s;
  s.lr0 = 0.2f;
  s.halve_every = 10;
  sgd_step({&p}, s);
  CHECK(p.v[0] == doctest::Approx(1.0f - 0.2f * 0.5f));
  CHECK(p.v[1] == doctest::Approx(-2.0f));
  CHECK(s.step == 1);

  Mat q(2, 2);
  q.v = {1, 2, 3, 4};
  Mat before = q;
  q.ensure_grad();
  q.zero_grad();
  sgd_step({&q}, s);
  for (size_t i = 0; i < q.v.size(); ++i) CHECK(q.v[i] == before.v[i]);
}

TEST_CASE("global norm clip scales gradients") {
  Mat p(1, 2);
  p.ensure_grad();
  p.g = {3.0f, 4.0f};  // norm 5
  const double norm = clip_global_norm({&p}, 1.0);
  CHECK(norm == doctest::Approx(5.0));
  CHECK(p.g[0] == doctest::Approx(0.6f));
  CHECK(p.g[1] == doctest::Approx(0.8f));

  p.g = {3.0f, 4.0f};
  clip_global_norm({&p}, 0.0);  // disabled
  CHECK(p.g[0] == doctest::Approx(3.0f));
}

}  // TEST_SUITE
