#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spellnet {

// Dense row-major matrix with an optional gradient buffer of the same shape.
// Vectors are 1xN or Nx1 matrices; scalars are 1x1. This is the storage type
// for model parameters and for values exchanged with callers; the computation
// graph below owns its intermediate buffers itself.
template <typename T>
struct MatT {
  int rows = 0;
  int cols = 0;
  std::vector<T> v;  // values, row-major
  std::vector<T> g;  // gradient; empty until ensure_grad()

  MatT() = default;
  MatT(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, T(0)) {
    if (r <= 0 || c <= 0) throw std::invalid_argument("MatT: dimensions must be positive");
  }
  MatT(int r, int c, std::vector<T> data) : rows(r), cols(c), v(std::move(data)) {
    if (r <= 0 || c <= 0) throw std::invalid_argument("MatT: dimensions must be positive");
    if (v.size() != static_cast<size_t>(r) * c)
      throw std::invalid_argument("MatT: data length does not match shape");
  }

  size_t size() const { return v.size(); }
  T& at(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
  const T& at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }

  void ensure_grad() {
    if (g.size() != v.size()) g.assign(v.size(), T(0));
  }
  void zero_grad() { std::fill(g.begin(), g.end(), T(0)); }

  bool same_shape(const MatT& o) const { return rows == o.rows && cols == o.cols; }
};

using Mat = MatT<float>;

template <typename T>
using NamedParamsT = std::vector<std::pair<std::string, MatT<T>*>>;

inline std::string shape_str(int r, int c) {
  return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

// 53-bit uniform in [0,1).
inline double rng_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Unbiased integer in [0, n).
inline uint64_t rng_below(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) throw std::invalid_argument("rng_below: n must be positive");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

template <typename T>
void fill_uniform(MatT<T>& m, T range, std::mt19937_64& rng) {
  for (auto& x : m.v) x = static_cast<T>((2.0 * rng_unit(rng) - 1.0) * range);
}

// ---------------------------------------------------------------------------
// Matrix kernels. Accumulating variants; callers zero the output first.
// Loop orders keep the innermost stride contiguous for row-major data.
// ---------------------------------------------------------------------------

// C(mxn) += A(mxk) * B(kxn)
template <typename T>
void gemm_nn_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<size_t>(i) * k;
    T* crow = c + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const T s = arow[p];
      if (s == T(0)) continue;
      const T* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += s * brow[j];
    }
  }
}

// C(mxn) += A(mxk) * B(nxk)^T
template <typename T>
void gemm_nt_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<size_t>(i) * k;
    T* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const T* brow = b + static_cast<size_t>(j) * k;
      T acc = T(0);
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

// C(mxn) += A(pxm)^T * B(pxn)
template <typename T>
void gemm_tn_acc(const T* a, const T* b, T* c, int p, int m, int n) {
  for (int q = 0; q < p; ++q) {
    const T* arow = a + static_cast<size_t>(q) * m;
    const T* brow = b + static_cast<size_t>(q) * n;
    for (int i = 0; i < m; ++i) {
      const T s = arow[i];
      if (s == T(0)) continue;
      T* crow = c + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += s * brow[j];
    }
  }
}

// ---------------------------------------------------------------------------
// Reverse-mode computation graph, define-by-run. A graph is built per
// minibatch, evaluated eagerly op by op, and backward() walks the tape in
// reverse creation order (creation order is topological by construction).
// Templated on the scalar so tests can run gradient checks in double while
// the models train in float.
// ---------------------------------------------------------------------------
template <typename T>
class GraphT {
 public:
  struct Ref {
    int id = -1;
    int rows = 0;
    int cols = 0;
  };

  // Trainable leaf. Gradients accumulate into p.g, which is allocated here
  // and zeroed by the caller between optimizer steps.
  Ref param(MatT<T>& p) {
    p.ensure_grad();
    Node n;
    n.rows = p.rows;
    n.cols = p.cols;
    n.vext = p.v.data();
    n.gext = p.g.data();
    return push(std::move(n));
  }

  // Frozen leaf: reads external storage, keeps gradients local. Safe for
  // concurrent graphs over one immutable model.
  Ref view(const MatT<T>& p) {
    Node n;
    n.rows = p.rows;
    n.cols = p.cols;
    n.vext = p.v.data();
    n.grad.assign(p.size(), T(0));
    return push(std::move(n));
  }

  Ref input(const MatT<T>& x) { return leaf(x.rows, x.cols, x.v); }

  Ref constant(int rows, int cols, std::vector<T> data) {
    if (data.size() != static_cast<size_t>(rows) * cols)
      throw std::invalid_argument("constant: data length does not match shape");
    return leaf(rows, cols, std::move(data));
  }

  Ref zeros(int rows, int cols) {
    return leaf(rows, cols, std::vector<T>(static_cast<size_t>(rows) * cols, T(0)));
  }

  Ref matmul(Ref a, Ref b) {
    if (a.cols != b.rows)
      throw std::invalid_argument("matmul: inner dimensions disagree: " +
                                  shape_str(a.rows, a.cols) + " * " + shape_str(b.rows, b.cols));
    Ref out = alloc(a.rows, b.cols);
    gemm_nn_acc(vp(a), vp(b), vp_mut(out), a.rows, a.cols, b.cols);
    set_back(out, [a, b, out](GraphT& g) {
      // dA += dC * B^T ; dB += A^T * dC
      gemm_nt_acc(g.gp(out), g.vp(b), g.gp(a), a.rows, b.cols, a.cols);
      gemm_tn_acc(g.vp(a), g.gp(out), g.gp(b), a.rows, a.cols, b.cols);
    });
    return out;
  }

  Ref add(Ref a, Ref b) {
    require_same(a, b, "add");
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    const T* bv = vp(b);
    T* ov = vp_mut(out);
    for (size_t i = 0; i < count(a); ++i) ov[i] = av[i] + bv[i];
    set_back(out, [a, b, out](GraphT& g) {
      const T* go = g.gp(out);
      T* ga = g.gp(a);
      T* gb = g.gp(b);
      for (size_t i = 0; i < g.count(a); ++i) {
        ga[i] += go[i];
        gb[i] += go[i];
      }
    });
    return out;
  }

  // a + r broadcast over rows; r is 1 x cols.
  Ref add_rowvec(Ref a, Ref r) {
    if (r.rows != 1 || r.cols != a.cols)
      throw std::invalid_argument("add_rowvec: want 1x" + std::to_string(a.cols) + ", got " +
                                  shape_str(r.rows, r.cols));
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    const T* rv = vp(r);
    T* ov = vp_mut(out);
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j)
        ov[static_cast<size_t>(i) * a.cols + j] = av[static_cast<size_t>(i) * a.cols + j] + rv[j];
    set_back(out, [a, r, out](GraphT& g) {
      const T* go = g.gp(out);
      T* ga = g.gp(a);
      T* gr = g.gp(r);
      for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
          const T d = go[static_cast<size_t>(i) * a.cols + j];
          ga[static_cast<size_t>(i) * a.cols + j] += d;
          gr[j] += d;
        }
    });
    return out;
  }

  Ref mul(Ref a, Ref b) {
    require_same(a, b, "mul");
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    const T* bv = vp(b);
    T* ov = vp_mut(out);
    for (size_t i = 0; i < count(a); ++i) ov[i] = av[i] * bv[i];
    set_back(out, [a, b, out](GraphT& g) {
      const T* go = g.gp(out);
      const T* av = g.vp(a);
      const T* bv = g.vp(b);
      T* ga = g.gp(a);
      T* gb = g.gp(b);
      for (size_t i = 0; i < g.count(a); ++i) {
        ga[i] += go[i] * bv[i];
        gb[i] += go[i] * av[i];
      }
    });
    return out;
  }

  // Scale each row i of a by m[i]; m is rows x 1.
  Ref mul_colvec(Ref a, Ref m) {
    if (m.cols != 1 || m.rows != a.rows)
      throw std::invalid_argument("mul_colvec: want " + std::to_string(a.rows) + "x1, got " +
                                  shape_str(m.rows, m.cols));
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    const T* mv = vp(m);
    T* ov = vp_mut(out);
    for (int i = 0; i < a.rows; ++i) {
      const T s = mv[i];
      for (int j = 0; j < a.cols; ++j)
        ov[static_cast<size_t>(i) * a.cols + j] = av[static_cast<size_t>(i) * a.cols + j] * s;
    }
    set_back(out, [a, m, out](GraphT& g) {
      const T* go = g.gp(out);
      const T* av = g.vp(a);
      const T* mv = g.vp(m);
      T* ga = g.gp(a);
      T* gm = g.gp(m);
      for (int i = 0; i < a.rows; ++i) {
        T acc = T(0);
        for (int j = 0; j < a.cols; ++j) {
          const size_t ix = static_cast<size_t>(i) * a.cols + j;
          ga[ix] += go[ix] * mv[i];
          acc += go[ix] * av[ix];
        }
        gm[i] += acc;
      }
    });
    return out;
  }

  Ref affine(Ref a, T scale, T shift) {
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    T* ov = vp_mut(out);
    for (size_t i = 0; i < count(a); ++i) ov[i] = scale * av[i] + shift;
    set_back(out, [a, out, scale](GraphT& g) {
      const T* go = g.gp(out);
      T* ga = g.gp(a);
      for (size_t i = 0; i < g.count(a); ++i) ga[i] += scale * go[i];
    });
    return out;
  }

  Ref sigmoid(Ref a) {
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    T* ov = vp_mut(out);
    for (size_t i = 0; i < count(a); ++i) {
      // split by sign to avoid exp overflow
      const T x = av[i];
      ov[i] = x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
    }
    set_back(out, [a, out](GraphT& g) {
      const T* go = g.gp(out);
      const T* yv = g.vp(out);
      T* ga = g.gp(a);
      for (size_t i = 0; i < g.count(a); ++i) ga[i] += go[i] * yv[i] * (T(1) - yv[i]);
    });
    return out;
  }

  Ref tanh(Ref a) {
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    T* ov = vp_mut(out);
    for (size_t i = 0; i < count(a); ++i) ov[i] = std::tanh(av[i]);
    set_back(out, [a, out](GraphT& g) {
      const T* go = g.gp(out);
      const T* yv = g.vp(out);
      T* ga = g.gp(a);
      for (size_t i = 0; i < g.count(a); ++i) ga[i] += go[i] * (T(1) - yv[i] * yv[i]);
    });
    return out;
  }

  Ref concat_cols(Ref a, Ref b) {
    if (a.rows != b.rows)
      throw std::invalid_argument("concat_cols: row counts differ: " + shape_str(a.rows, a.cols) +
                                  " vs " + shape_str(b.rows, b.cols));
    Ref out = alloc(a.rows, a.cols + b.cols);
    const T* av = vp(a);
    const T* bv = vp(b);
    T* ov = vp_mut(out);
    for (int i = 0; i < a.rows; ++i) {
      std::copy(av + static_cast<size_t>(i) * a.cols, av + static_cast<size_t>(i + 1) * a.cols,
                ov + static_cast<size_t>(i) * out.cols);
      std::copy(bv + static_cast<size_t>(i) * b.cols, bv + static_cast<size_t>(i + 1) * b.cols,
                ov + static_cast<size_t>(i) * out.cols + a.cols);
    }
    set_back(out, [a, b, out](GraphT& g) {
      const T* go = g.gp(out);
      T* ga = g.gp(a);
      T* gb = g.gp(b);
      for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j)
          ga[static_cast<size_t>(i) * a.cols + j] += go[static_cast<size_t>(i) * out.cols + j];
        for (int j = 0; j < b.cols; ++j)
          gb[static_cast<size_t>(i) * b.cols + j] +=
              go[static_cast<size_t>(i) * out.cols + a.cols + j];
      }
    });
    return out;
  }

  Ref concat_rows(const std::vector<Ref>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: empty part list");
    int total = 0;
    const int c = parts[0].cols;
    for (const Ref& p : parts) {
      if (p.cols != c) throw std::invalid_argument("concat_rows: column counts differ");
      total += p.rows;
    }
    Ref out = alloc(total, c);
    T* ov = vp_mut(out);
    size_t off = 0;
    for (const Ref& p : parts) {
      std::copy(vp(p), vp(p) + count(p), ov + off);
      off += count(p);
    }
    set_back(out, [parts, out](GraphT& g) {
      const T* go = g.gp(out);
      size_t off = 0;
      for (const Ref& p : parts) {
        T* gp_ = g.gp(p);
        for (size_t i = 0; i < g.count(p); ++i) gp_[i] += go[off + i];
        off += g.count(p);
      }
    });
    return out;
  }

  // Same data, new shape.
  Ref reshape(Ref a, int rows, int cols) {
    if (static_cast<size_t>(rows) * cols != count(a))
      throw std::invalid_argument("reshape: element count mismatch: " +
                                  shape_str(a.rows, a.cols) + " -> " + shape_str(rows, cols));
    Ref out = alloc(rows, cols);
    std::copy(vp(a), vp(a) + count(a), vp_mut(out));
    set_back(out, [a, out](GraphT& g) {
      const T* go = g.gp(out);
      T* ga = g.gp(a);
      for (size_t i = 0; i < g.count(a); ++i) ga[i] += go[i];
    });
    return out;
  }

  Ref gather_rows(Ref a, std::vector<int> idx) {
    for (int i : idx)
      if (i < 0 || i >= a.rows)
        throw std::invalid_argument("gather_rows: index " + std::to_string(i) +
                                    " out of range for " + shape_str(a.rows, a.cols));
    Ref out = alloc(static_cast<int>(idx.size()), a.cols);
    const T* av = vp(a);
    T* ov = vp_mut(out);
    for (size_t i = 0; i < idx.size(); ++i)
      std::copy(av + static_cast<size_t>(idx[i]) * a.cols,
                av + static_cast<size_t>(idx[i] + 1) * a.cols, ov + i * a.cols);
    auto shared = std::make_shared<std::vector<int>>(std::move(idx));
    set_back(out, [a, out, shared](GraphT& g) {
      const T* go = g.gp(out);
      T* ga = g.gp(a);
      const auto& ix = *shared;
      for (size_t i = 0; i < ix.size(); ++i)
        for (int j = 0; j < a.cols; ++j)
          ga[static_cast<size_t>(ix[i]) * a.cols + j] += go[i * a.cols + j];
    });
    return out;
  }

  // Sum consecutive groups of `group` rows: (n*group x c) -> (n x c).
  Ref sum_row_groups(Ref a, int group) {
    if (group <= 0 || a.rows % group != 0)
      throw std::invalid_argument("sum_row_groups: rows " + std::to_string(a.rows) +
                                  " not divisible by group " + std::to_string(group));
    Ref out = alloc(a.rows / group, a.cols);
    const T* av = vp(a);
    T* ov = vp_mut(out);
    std::fill(ov, ov + count(out), T(0));
    for (int i = 0; i < a.rows; ++i) {
      T* orow = ov + static_cast<size_t>(i / group) * a.cols;
      const T* arow = av + static_cast<size_t>(i) * a.cols;
      for (int j = 0; j < a.cols; ++j) orow[j] += arow[j];
    }
    set_back(out, [a, out, group](GraphT& g) {
      const T* go = g.gp(out);
      T* ga = g.gp(a);
      for (int i = 0; i < a.rows; ++i) {
        const T* orow = go + static_cast<size_t>(i / group) * a.cols;
        T* arow = ga + static_cast<size_t>(i) * a.cols;
        for (int j = 0; j < a.cols; ++j) arow[j] += orow[j];
      }
    });
    return out;
  }

  // Row-wise softmax with max subtraction.
  Ref softmax_rows(Ref a) {
    Ref out = alloc(a.rows, a.cols);
    const T* av = vp(a);
    T* ov = vp_mut(out);
    for (int i = 0; i < a.rows; ++i) {
      const T* x = av + static_cast<size_t>(i) * a.cols;
      T* y = ov + static_cast<size_t>(i) * a.cols;
      T mx = x[0];
      for (int j = 1; j < a.cols; ++j) mx = std::max(mx, x[j]);
      T z = T(0);
      for (int j = 0; j < a.cols; ++j) {
        y[j] = std::exp(x[j] - mx);
        z += y[j];
      }
      for (int j = 0; j < a.cols; ++j) y[j] /= z;
    }
    set_back(out, [a, out](GraphT& g) {
      const T* go = g.gp(out);
      const T* yv = g.vp(out);
      T* ga = g.gp(a);
      for (int i = 0; i < a.rows; ++i) {
        const T* dy = go + static_cast<size_t>(i) * a.cols;
        const T* y = yv + static_cast<size_t>(i) * a.cols;
        T* dx = ga + static_cast<size_t>(i) * a.cols;
        T dot = T(0);
        for (int j = 0; j < a.cols; ++j) dot += dy[j] * y[j];
        for (int j = 0; j < a.cols; ++j) dx[j] += y[j] * (dy[j] - dot);
      }
    });
    return out;
  }

  Ref sum_all(Ref a) {
    Ref out = alloc(1, 1);
    const T* av = vp(a);
    T acc = T(0);
    for (size_t i = 0; i < count(a); ++i) acc += av[i];
    vp_mut(out)[0] = acc;
    set_back(out, [a, out](GraphT& g) {
      const T d = g.gp(out)[0];
      T* ga = g.gp(a);
      for (size_t i = 0; i < g.count(a); ++i) ga[i] += d;
    });
    return out;
  }

  // Weighted softmax cross-entropy over rows, fused for stability:
  //   loss = sum_i w[i] * (logsumexp(logits[i]) - logits[i][target[i]])
  // Rows with target < 0 are skipped. Returns a 1x1 node.
  Ref cross_entropy(Ref logits, std::vector<int> targets, std::vector<T> weights) {
    if (targets.size() != static_cast<size_t>(logits.rows))
      throw std::invalid_argument("cross_entropy: target count " +
                                  std::to_string(targets.size()) + " != rows " +
                                  std::to_string(logits.rows));
    if (weights.size() != targets.size())
      throw std::invalid_argument("cross_entropy: weight count mismatch");
    for (size_t i = 0; i < targets.size(); ++i)
      if (targets[i] >= logits.cols)
        throw std::invalid_argument("cross_entropy: target " + std::to_string(targets[i]) +
                                    " out of range for " + std::to_string(logits.cols) +
                                    " classes");
    const int rows = logits.rows, cols = logits.cols;
    auto probs = std::make_shared<std::vector<T>>(static_cast<size_t>(rows) * cols, T(0));
    const T* xv = vp(logits);
    T loss = T(0);
    for (int i = 0; i < rows; ++i) {
      if (targets[i] < 0) continue;
      const T* x = xv + static_cast<size_t>(i) * cols;
      T* p = probs->data() + static_cast<size_t>(i) * cols;
      T mx = x[0];
      for (int j = 1; j < cols; ++j) mx = std::max(mx, x[j]);
      T z = T(0);
      for (int j = 0; j < cols; ++j) {
        p[j] = std::exp(x[j] - mx);
        z += p[j];
      }
      for (int j = 0; j < cols; ++j) p[j] /= z;
      loss += weights[i] * (std::log(z) + mx - x[targets[i]]);
    }
    Ref out = alloc(1, 1);
    vp_mut(out)[0] = loss;
    auto tg = std::make_shared<std::vector<int>>(std::move(targets));
    auto wt = std::make_shared<std::vector<T>>(std::move(weights));
    set_back(out, [logits, out, probs, tg, wt, rows, cols](GraphT& g) {
      const T d = g.gp(out)[0];
      T* gx = g.gp(logits);
      for (int i = 0; i < rows; ++i) {
        const int t = (*tg)[i];
        if (t < 0) continue;
        const T w = d * (*wt)[i];
        const T* p = probs->data() + static_cast<size_t>(i) * cols;
        T* row = gx + static_cast<size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) row[j] += w * p[j];
        row[t] -= w;
      }
    });
    return out;
  }

  const T* value(Ref r) const { return vp(r); }

  MatT<T> materialize(Ref r) const {
    MatT<T> m(r.rows, r.cols);
    std::copy(vp(r), vp(r) + count(r), m.v.begin());
    return m;
  }

  // Seeds d(loss)/d(loss) = 1 and walks the tape backwards. Parameters touched
  // by the graph receive accumulated gradients in their external buffers;
  // everything else keeps the zeros it was created with.
  void backward(Ref loss) {
    if (loss.rows != 1 || loss.cols != 1)
      throw std::invalid_argument("backward: loss must be a 1x1 scalar, got " +
                                  shape_str(loss.rows, loss.cols));
    gp(loss)[0] += T(1);
    for (int id = loss.id; id >= 0; --id)
      if (nodes_[id].back) nodes_[id].back(*this);
  }

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    int rows = 0, cols = 0;
    std::vector<T> val;
    std::vector<T> grad;
    const T* vext = nullptr;
    T* gext = nullptr;
    std::function<void(GraphT&)> back;
  };

  std::vector<Node> nodes_;

  Ref push(Node n) {
    Ref r{static_cast<int>(nodes_.size()), n.rows, n.cols};
    nodes_.push_back(std::move(n));
    return r;
  }

  Ref leaf(int rows, int cols, std::vector<T> data) {
    Node n;
    n.rows = rows;
    n.cols = cols;
    n.val = std::move(data);
    n.grad.assign(n.val.size(), T(0));
    return push(std::move(n));
  }

  Ref alloc(int rows, int cols) {
    Node n;
    n.rows = rows;
    n.cols = cols;
    n.val.assign(static_cast<size_t>(rows) * cols, T(0));
    n.grad.assign(n.val.size(), T(0));
    return push(std::move(n));
  }

  void set_back(Ref r, std::function<void(GraphT&)> fn) { nodes_[r.id].back = std::move(fn); }

  const T* vp(Ref r) const {
    const Node& n = nodes_[r.id];
    return n.vext ? n.vext : n.val.data();
  }
  T* vp_mut(Ref r) { return nodes_[r.id].val.data(); }
  T* gp(Ref r) {
    Node& n = nodes_[r.id];
    return n.gext ? n.gext : n.grad.data();
  }
  size_t count(Ref r) const { return static_cast<size_t>(r.rows) * r.cols; }

  void require_same(Ref a, Ref b, const char* op) {
    if (a.rows != b.rows || a.cols != b.cols)
      throw std::invalid_argument(std::string(op) + ": shapes differ: " +
                                  shape_str(a.rows, a.cols) + " vs " + shape_str(b.rows, b.cols));
  }
};

using Graph = GraphT<float>;

// Standalone row softmax on plain storage (same math as the graph op).
template <typename T>
MatT<T> softmax_rows(const MatT<T>& x) {
  GraphT<T> g;
  return g.materialize(g.softmax_rows(g.input(x)));
}

// Standalone matrix product on plain storage.
template <typename T>
MatT<T> matmul(const MatT<T>& a, const MatT<T>& b) {
  GraphT<T> g;
  return g.materialize(g.matmul(g.input(a), g.input(b)));
}

}  // namespace spellnet
