#include <doctest.h>

#include <cmath>
#include <random>

#include "spellnet/tensor.hpp"
#include "support/gradcheck.hpp"

using namespace spellnet;
using testsup::max_grad_rel_err;
using testsup::random_mat;

namespace {

// Independent triple-loop product, kept deliberately naive.
MatT<double> matmul_oracle(const MatT<double>& a, const MatT<double>& b) {
  MatT<double> c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double acc = 0;
      for (int k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(k, j);
      c.at(i, j) = acc;
    }
  return c;
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("matmul identity") {
  MatT<double> eye(3, 3);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  std::mt19937_64 rng(7);
  auto a = random_mat(3, 2, rng);
  auto out = matmul(eye, a);
  for (size_t i = 0; i < a.v.size(); ++i) CHECK(out.v[i] == doctest::Approx(a.v[i]));
}

TEST_CASE("matmul shape law") {
  std::mt19937_64 rng(8);
  auto a = random_mat(2, 3, rng);
  auto b = random_mat(3, 4, rng);
  auto c = matmul(a, b);
  CHECK(c.rows == 2);
  CHECK(c.cols == 4);
}

TEST_CASE("matmul matches triple-loop oracle") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_mat(4, 4, rng);
    auto b = random_mat(4, 4, rng);
    auto got = matmul(a, b);
    auto want = matmul_oracle(a, b);
    for (size_t i = 0; i < got.v.size(); ++i)
      CHECK(std::abs(got.v[i] - want.v[i]) <=
            1e-6 * std::max(1.0, std::abs(want.v[i])));
  }
}

TEST_CASE("matmul shape mismatch names both shapes") {
  GraphT<double> g;
  auto a = g.zeros(2, 3);
  auto b = g.zeros(4, 5);
  CHECK_THROWS_WITH_AS(g.matmul(a, b),
                       "matmul: inner dimensions disagree: (2x3) * (4x5)",
                       std::invalid_argument);
}

TEST_CASE("softmax uniform logits") {
  MatT<double> x(1, 3);
  auto y = softmax_rows(x);
  for (int j = 0; j < 3; ++j) CHECK(y.at(0, j) == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("softmax shift invariance") {
  std::mt19937_64 rng(10);
  auto x = random_mat(4, 6, rng);
  auto shifted = x;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) shifted.at(i, j) += 3.25;
  auto a = softmax_rows(x);
  auto b = softmax_rows(shifted);
  for (size_t i = 0; i < a.v.size(); ++i) CHECK(std::abs(a.v[i] - b.v[i]) < 1e-6);
}

TEST_CASE("softmax hand-evaluated row") {
  MatT<double> x(1, 2, {1.0, 2.0});
  auto y = softmax_rows(x);
  CHECK(y.at(0, 0) == doctest::Approx(0.26894).epsilon(1e-4));
  CHECK(y.at(0, 1) == doctest::Approx(0.73106).epsilon(1e-4));
}

TEST_CASE("softmax stable at large magnitudes") {
  // float path, logits up to 1e3
  std::mt19937_64 rng(11);
  Mat x(8, 5);
  fill_uniform(x, 1000.0f, rng);
  auto y = softmax_rows(x);
  for (int i = 0; i < y.rows; ++i) {
    double sum = 0;
    for (int j = 0; j < y.cols; ++j) {
      CHECK(std::isfinite(y.at(i, j)));
      CHECK(y.at(i, j) >= 0.0f);
      sum += y.at(i, j);
    }
    CHECK(std::abs(sum - 1.0) < 1e-6);
  }
}

TEST_CASE("backward of sum is all-ones") {
  MatT<double> x(3, 2, {1, 2, 3, 4, 5, 6});
  x.ensure_grad();
  GraphT<double> g;
  auto loss = g.sum_all(g.param(x));
  g.backward(loss);
  for (double v : x.g) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("backward requires scalar loss") {
  MatT<double> x(2, 2);
  GraphT<double> g;
  auto node = g.param(x);
  CHECK_THROWS_AS(g.backward(node), std::invalid_argument);
}

TEST_CASE("unused parameter keeps zero gradient") {
  MatT<double> used(2, 2), unused(2, 2);
  std::mt19937_64 rng(12);
  fill_uniform(used, 1.0, rng);
  fill_uniform(unused, 1.0, rng);
  GraphT<double> g;
  auto u = g.param(used);
  (void)g.param(unused);
  unused.zero_grad();
  used.zero_grad();
  g.backward(g.sum_all(g.sigmoid(u)));
  bool any = false;
  for (double v : used.g) any |= (v != 0.0);
  CHECK(any);
  for (double v : unused.g) CHECK(v == 0.0);
}

TEST_CASE("matmul gradient matches finite differences") {
  std::mt19937_64 rng(13);
  auto a = random_mat(3, 4, rng);
  auto b = random_mat(4, 2, rng);
  const double err = max_grad_rel_err({&a, &b}, [&](GraphT<double>& g) {
    return g.sum_all(g.tanh(g.matmul(g.param(a), g.param(b))));
  });
  CHECK(err < 1e-4);
}

TEST_CASE("every op passes finite-difference checks") {
  std::mt19937_64 rng(14);
  const double tol = 1e-4;

  for (int trial = 0; trial < 5; ++trial) {
    auto a = random_mat(3, 4, rng);
    auto b = random_mat(3, 4, rng);
    auto row = random_mat(1, 4, rng);
    auto col = random_mat(3, 1, rng);

    CHECK(max_grad_rel_err({&a, &b}, [&](GraphT<double>& g) {
            return g.sum_all(g.tanh(g.add(g.param(a), g.param(b))));
          }) < tol);
    CHECK(max_grad_rel_err({&a, &b}, [&](GraphT<double>& g) {
            return g.sum_all(g.sigmoid(g.mul(g.param(a), g.param(b))));
          }) < tol);
    CHECK(max_grad_rel_err({&a, &row}, [&](GraphT<double>& g) {
            return g.sum_all(g.tanh(g.add_rowvec(g.param(a), g.param(row))));
          }) < tol);
    CHECK(max_grad_rel_err({&a, &col}, [&](GraphT<double>& g) {
            return g.sum_all(g.tanh(g.mul_colvec(g.param(a), g.param(col))));
          }) < tol);
    CHECK(max_grad_rel_err({&a}, [&](GraphT<double>& g) {
            return g.sum_all(g.affine(g.sigmoid(g.param(a)), -2.0, 0.5));
          }) < tol);
    CHECK(max_grad_rel_err({&a, &b}, [&](GraphT<double>& g) {
            return g.sum_all(g.tanh(g.concat_cols(g.param(a), g.param(b))));
          }) < tol);
    CHECK(max_grad_rel_err({&a, &b}, [&](GraphT<double>& g) {
            return g.sum_all(g.sigmoid(g.concat_rows({g.param(a), g.param(b)})));
          }) < tol);
    CHECK(max_grad_rel_err({&a}, [&](GraphT<double>& g) {
            return g.sum_all(g.tanh(g.reshape(g.param(a), 4, 3)));
          }) < tol);
    CHECK(max_grad_rel_err({&a}, [&](GraphT<double>& g) {
            return g.sum_all(g.sigmoid(g.gather_rows(g.param(a), {2, 0, 0, 1})));
          }) < tol);
    CHECK(max_grad_rel_err({&a}, [&](GraphT<double>& g) {
            return g.sum_all(g.tanh(g.sum_row_groups(g.param(a), 3)));
          }) < tol);
    // softmax needs a non-uniform downstream weighting to exercise its jacobian
    CHECK(max_grad_rel_err({&a, &b}, [&](GraphT<double>& g) {
            return g.sum_all(g.mul(g.softmax_rows(g.param(a)), g.param(b)));
          }) < tol);
    CHECK(max_grad_rel_err({&a}, [&](GraphT<double>& g) {
            return g.cross_entropy(g.param(a), {1, 3, 0}, {0.7, 0.2, 0.1});
          }) < tol);
  }
}

TEST_CASE("cross entropy skips masked rows") {
  std::mt19937_64 rng(15);
  auto a = random_mat(3, 4, rng);
  GraphT<double> g;
  auto full = g.cross_entropy(g.param(a), {1, -1, 2}, {1.0, 1.0, 1.0});
  GraphT<double> g2;
  auto only = g2.cross_entropy(g2.param(a), {1, 2, -1}, {1.0, 0.0, 1.0});
  // row 1 masked either way; row 2 weighted out in the second graph
  GraphT<double> g3;
  auto first = g3.cross_entropy(g3.param(a), {1, -1, -1}, {1.0, 1.0, 1.0});
  CHECK(g.value(full)[0] > g3.value(first)[0]);
  CHECK(g2.value(only)[0] == doctest::Approx(g3.value(first)[0]));
}

TEST_CASE("graph evaluation is deterministic bit for bit") {
  auto run = [](uint64_t seed) {
    std::mt19937_64 rng(seed);
    Mat a(5, 7), b(7, 3);
    fill_uniform(a, 1.0f, rng);
    fill_uniform(b, 1.0f, rng);
    Graph g;
    auto out = g.softmax_rows(g.matmul(g.input(a), g.input(b)));
    return g.materialize(out);
  };
  auto x = run(42);
  auto y = run(42);
  REQUIRE(x.v.size() == y.v.size());
  for (size_t i = 0; i < x.v.size(); ++i) CHECK(x.v[i] == y.v[i]);
}

TEST_CASE("forward ops keep finite values on bounded input") {
  std::mt19937_64 rng(16);
  Mat a(4, 4), b(4, 4);
  fill_uniform(a, 1000.0f, rng);
  fill_uniform(b, 1000.0f, rng);
  Graph g;
  auto m = g.matmul(g.input(a), g.input(b));
  auto s = g.sigmoid(m);
  auto t = g.tanh(m);
  auto sm = g.softmax_rows(m);
  for (auto ref : {m, s, t, sm}) {
    const float* v = g.value(ref);
    for (int i = 0; i < ref.rows * ref.cols; ++i) CHECK(std::isfinite(v[i]));
  }
}

}  // TEST_SUITE
