#pragma once

#include <string>

#include "spellnet/tensor.hpp"

namespace spellnet {

// Gated recurrent unit parameters. Weights are stored input-major so a batch
// step is plain row-major matmuls: x is B x d_in, h is B x d_h,
//   z = sigmoid(x W_z + h U_z + b_z)
//   r = sigmoid(x W_r + h U_r + b_r)
//   hc = tanh(x W_h + (r . h) U_h + b_h)
//   h' = (1 - z) . h + z . hc
template <typename T>
struct GruParamsT {
  MatT<T> Wz, Uz, bz;
  MatT<T> Wr, Ur, br;
  MatT<T> Wh, Uh, bh;

  GruParamsT() = default;
  GruParamsT(int d_in, int d_h)
      : Wz(d_in, d_h), Uz(d_h, d_h), bz(1, d_h),
        Wr(d_in, d_h), Ur(d_h, d_h), br(1, d_h),
        Wh(d_in, d_h), Uh(d_h, d_h), bh(1, d_h) {}

  int d_in() const { return Wz.rows; }
  int d_h() const { return Wz.cols; }

  void init(T range, std::mt19937_64& rng) {
    fill_uniform(Wz, range, rng);
    fill_uniform(Uz, range, rng);
    fill_uniform(Wr, range, rng);
    fill_uniform(Ur, range, rng);
    fill_uniform(Wh, range, rng);
    fill_uniform(Uh, range, rng);
    // biases stay zero
  }

  void collect(const std::string& prefix, NamedParamsT<T>& out) {
    out.emplace_back(prefix + ".Wz", &Wz);
    out.emplace_back(prefix + ".Uz", &Uz);
    out.emplace_back(prefix + ".bz", &bz);
    out.emplace_back(prefix + ".Wr", &Wr);
    out.emplace_back(prefix + ".Ur", &Ur);
    out.emplace_back(prefix + ".br", &br);
    out.emplace_back(prefix + ".Wh", &Wh);
    out.emplace_back(prefix + ".Uh", &Uh);
    out.emplace_back(prefix + ".bh", &bh);
  }
};

using GruParams = GruParamsT<float>;

// Graph-side handles for one GRU's parameters within one tape.
template <typename T>
struct GruRefsT {
  using Ref = typename GraphT<T>::Ref;
  Ref Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;
};

// Trainable registration: gradients flow into the parameter buffers.
template <typename T>
GruRefsT<T> register_gru(GraphT<T>& g, GruParamsT<T>& p) {
  GruRefsT<T> r;
  r.Wz = g.param(p.Wz); r.Uz = g.param(p.Uz); r.bz = g.param(p.bz);
  r.Wr = g.param(p.Wr); r.Ur = g.param(p.Ur); r.br = g.param(p.br);
  r.Wh = g.param(p.Wh); r.Uh = g.param(p.Uh); r.bh = g.param(p.bh);
  return r;
}

// Frozen registration: read-only views, safe for concurrent inference graphs.
template <typename T>
GruRefsT<T> register_gru(GraphT<T>& g, const GruParamsT<T>& p) {
  GruRefsT<T> r;
  r.Wz = g.view(p.Wz); r.Uz = g.view(p.Uz); r.bz = g.view(p.bz);
  r.Wr = g.view(p.Wr); r.Ur = g.view(p.Ur); r.br = g.view(p.br);
  r.Wh = g.view(p.Wh); r.Uh = g.view(p.Uh); r.bh = g.view(p.bh);
  return r;
}

// One batched GRU step: x is B x d_in, h is B x d_h; returns the new state.
template <typename T>
typename GraphT<T>::Ref gru_cell(GraphT<T>& g, const GruRefsT<T>& p,
                                 typename GraphT<T>::Ref x, typename GraphT<T>::Ref h) {
  auto z = g.sigmoid(g.add_rowvec(g.add(g.matmul(x, p.Wz), g.matmul(h, p.Uz)), p.bz));
  auto r = g.sigmoid(g.add_rowvec(g.add(g.matmul(x, p.Wr), g.matmul(h, p.Ur)), p.br));
  auto hc = g.tanh(g.add_rowvec(g.add(g.matmul(x, p.Wh), g.matmul(g.mul(r, h), p.Uh)), p.bh));
  return g.add(g.mul(g.affine(z, T(-1), T(1)), h), g.mul(z, hc));
}

// Single-vector convenience form: h_prev and x are 1 x d rows.
template <typename T>
MatT<T> gru_cell_forward(const MatT<T>& h_prev, const MatT<T>& x, const GruParamsT<T>& p) {
  if (x.rows != 1 || h_prev.rows != 1)
    throw std::invalid_argument("gru_cell_forward: expects single-row vectors");
  if (x.cols != p.d_in() || h_prev.cols != p.d_h())
    throw std::invalid_argument("gru_cell_forward: vector widths " + shape_str(x.rows, x.cols) +
                                ", " + shape_str(h_prev.rows, h_prev.cols) +
                                " do not match GRU dims (" + std::to_string(p.d_in()) + ", " +
                                std::to_string(p.d_h()) + ")");
  GraphT<T> g;
  auto refs = register_gru(g, p);
  return g.materialize(gru_cell(g, refs, g.input(x), g.input(h_prev)));
}

}  // namespace spellnet
