#include "porogen/layers.hpp"

#include <stdexcept>
#include <string>

namespace porogen::ad {

namespace {

// A strided convolution couples a dense "big" grid to a subsampled "small"
// grid: small position o touches big position o*stride - pad + k for each
// kernel offset k. conv3d reads big (its input) and writes small; the
// transpose runs the same coupling the other way. All three kernels below
// share that index map; weights are laid out [cs, cb, k, k, k] with cs the
// small-side channel count and cb the big-side one.
struct CouplingDims {
  int n;             // batch
  int cs, cb;        // small-side / big-side channels
  int sd, sh, sw;    // small grid extents
  int bd, bh, bw;    // big grid extents
  int k, stride, pad;
};

struct AxisRange {
  int lo, hi;  // inclusive small-grid index range for one kernel offset
};

inline AxisRange axis_range(int koff, int small_extent, int big_extent,
                            int stride, int pad) {
  const int lo_num = pad - koff;
  int lo = lo_num <= 0 ? 0 : (lo_num + stride - 1) / stride;
  const int hi_num = big_extent - 1 + pad - koff;
  int hi = hi_num < 0 ? -1 : hi_num / stride;
  if (hi > small_extent - 1) hi = small_extent - 1;
  return {lo, hi};
}

// small(n,cs,o) += sum_{cb,k} big(n,cb,o*s-p+k) * w(cs,cb,k)
void conv_gather(const double* big, const double* w, double* small,
                 const CouplingDims& d) {
  const std::int64_t s_plane = static_cast<std::int64_t>(d.sh) * d.sw;
  const std::int64_t s_chan = s_plane * d.sd;
  const std::int64_t b_plane = static_cast<std::int64_t>(d.bh) * d.bw;
  const std::int64_t b_chan = b_plane * d.bd;
  for (int n = 0; n < d.n; ++n)
    for (int cs = 0; cs < d.cs; ++cs) {
      double* sm = small + (static_cast<std::int64_t>(n) * d.cs + cs) * s_chan;
      for (int cb = 0; cb < d.cb; ++cb) {
        const double* bg =
            big + (static_cast<std::int64_t>(n) * d.cb + cb) * b_chan;
        const double* wk =
            w + ((static_cast<std::int64_t>(cs) * d.cb + cb) * d.k * d.k * d.k);
        for (int kd = 0; kd < d.k; ++kd) {
          const auto rd = axis_range(kd, d.sd, d.bd, d.stride, d.pad);
          for (int kh = 0; kh < d.k; ++kh) {
            const auto rh = axis_range(kh, d.sh, d.bh, d.stride, d.pad);
            for (int kw = 0; kw < d.k; ++kw) {
              const auto rw = axis_range(kw, d.sw, d.bw, d.stride, d.pad);
              const double wv = wk[(kd * d.k + kh) * d.k + kw];
              if (wv == 0.0) continue;
              for (int od = rd.lo; od <= rd.hi; ++od) {
                const int id = od * d.stride - d.pad + kd;
                for (int oh = rh.lo; oh <= rh.hi; ++oh) {
                  const int ih = oh * d.stride - d.pad + kh;
                  double* srow = sm + od * s_plane + oh * d.sw;
                  const double* brow = bg + id * b_plane + ih * d.bw - d.pad +
                                       kw;
                  for (int ow = rw.lo; ow <= rw.hi; ++ow)
                    srow[ow] += wv * brow[ow * d.stride];
                }
              }
            }
          }
        }
      }
    }
}

// big(n,cb,o*s-p+k) += sum_{cs} small(n,cs,o) * w(cs,cb,k)
void conv_scatter(const double* small, const double* w, double* big,
                  const CouplingDims& d) {
  const std::int64_t s_plane = static_cast<std::int64_t>(d.sh) * d.sw;
  const std::int64_t s_chan = s_plane * d.sd;
  const std::int64_t b_plane = static_cast<std::int64_t>(d.bh) * d.bw;
  const std::int64_t b_chan = b_plane * d.bd;
  for (int n = 0; n < d.n; ++n)
    for (int cs = 0; cs < d.cs; ++cs) {
      const double* sm =
          small + (static_cast<std::int64_t>(n) * d.cs + cs) * s_chan;
      for (int cb = 0; cb < d.cb; ++cb) {
        double* bg = big + (static_cast<std::int64_t>(n) * d.cb + cb) * b_chan;
        const double* wk =
            w + ((static_cast<std::int64_t>(cs) * d.cb + cb) * d.k * d.k * d.k);
        for (int kd = 0; kd < d.k; ++kd) {
          const auto rd = axis_range(kd, d.sd, d.bd, d.stride, d.pad);
          for (int kh = 0; kh < d.k; ++kh) {
            const auto rh = axis_range(kh, d.sh, d.bh, d.stride, d.pad);
            for (int kw = 0; kw < d.k; ++kw) {
              const auto rw = axis_range(kw, d.sw, d.bw, d.stride, d.pad);
              const double wv = wk[(kd * d.k + kh) * d.k + kw];
              if (wv == 0.0) continue;
              for (int od = rd.lo; od <= rd.hi; ++od) {
                const int id = od * d.stride - d.pad + kd;
                for (int oh = rh.lo; oh <= rh.hi; ++oh) {
                  const int ih = oh * d.stride - d.pad + kh;
                  const double* srow = sm + od * s_plane + oh * d.sw;
                  double* brow = bg + id * b_plane + ih * d.bw - d.pad + kw;
                  for (int ow = rw.lo; ow <= rw.hi; ++ow)
                    brow[ow * d.stride] += wv * srow[ow];
                }
              }
            }
          }
        }
      }
    }
}

// gw(cs,cb,k) += sum_{n,o} small(n,cs,o) * big(n,cb,o*s-p+k)
void conv_weight_grad(const double* small, const double* big, double* gw,
                      const CouplingDims& d) {
  const std::int64_t s_plane = static_cast<std::int64_t>(d.sh) * d.sw;
  const std::int64_t s_chan = s_plane * d.sd;
  const std::int64_t b_plane = static_cast<std::int64_t>(d.bh) * d.bw;
  const std::int64_t b_chan = b_plane * d.bd;
  for (int n = 0; n < d.n; ++n)
    for (int cs = 0; cs < d.cs; ++cs) {
      const double* sm =
          small + (static_cast<std::int64_t>(n) * d.cs + cs) * s_chan;
      for (int cb = 0; cb < d.cb; ++cb) {
        const double* bg =
            big + (static_cast<std::int64_t>(n) * d.cb + cb) * b_chan;
        double* wk =
            gw + ((static_cast<std::int64_t>(cs) * d.cb + cb) * d.k * d.k * d.k);
        for (int kd = 0; kd < d.k; ++kd) {
          const auto rd = axis_range(kd, d.sd, d.bd, d.stride, d.pad);
          for (int kh = 0; kh < d.k; ++kh) {
            const auto rh = axis_range(kh, d.sh, d.bh, d.stride, d.pad);
            for (int kw = 0; kw < d.k; ++kw) {
              const auto rw = axis_range(kw, d.sw, d.bw, d.stride, d.pad);
              double acc = 0.0;
              for (int od = rd.lo; od <= rd.hi; ++od) {
                const int id = od * d.stride - d.pad + kd;
                for (int oh = rh.lo; oh <= rh.hi; ++oh) {
                  const int ih = oh * d.stride - d.pad + kh;
                  const double* srow = sm + od * s_plane + oh * d.sw;
                  const double* brow = bg + id * b_plane + ih * d.bw - d.pad +
                                       kw;
                  for (int ow = rw.lo; ow <= rw.hi; ++ow)
                    acc += srow[ow] * brow[ow * d.stride];
                }
              }
              wk[(kd * d.k + kh) * d.k + kw] += acc;
            }
          }
        }
      }
    }
}

int conv_out_extent(int in, int k, int stride, int pad, const char* op) {
  const int num = in + 2 * pad - k;
  if (num < 0 || num % stride != 0)
    throw std::invalid_argument(std::string(op) +
                                ": non-integral output extent");
  return num / stride + 1;
}

void check_conv_args(int stride, int padding, const char* op) {
  if (stride < 1 || padding < 0)
    throw std::invalid_argument(std::string(op) + ": bad stride/padding");
}

}  // namespace

Tensor conv3d(const Tensor& input, const Tensor& weight,
              const std::optional<Tensor>& bias, int stride, int padding) {
  check_conv_args(stride, padding, "conv3d");
  const Shape& si = input.shape();
  const Shape& sw = weight.shape();
  if (si.size() != 5 || sw.size() != 5 || sw[2] != sw[3] || sw[3] != sw[4])
    throw std::invalid_argument("conv3d: expected input [N,C,D,H,W] and "
                                "cubic weight [F,C,k,k,k]");
  if (si[1] != sw[1])
    throw std::invalid_argument("conv3d: channel mismatch " + shape_str(si) +
                                " vs " + shape_str(sw));
  const int k = sw[2];
  CouplingDims d;
  d.n = si[0];
  d.cs = sw[0];
  d.cb = si[1];
  d.bd = si[2];
  d.bh = si[3];
  d.bw = si[4];
  d.sd = conv_out_extent(si[2], k, stride, padding, "conv3d");
  d.sh = conv_out_extent(si[3], k, stride, padding, "conv3d");
  d.sw = conv_out_extent(si[4], k, stride, padding, "conv3d");
  d.k = k;
  d.stride = stride;
  d.pad = padding;

  Shape so{d.n, d.cs, d.sd, d.sh, d.sw};
  std::vector<double> out(shape_size(so), 0.0);
  if (bias) {
    if (bias->shape() != Shape{d.cs})
      throw std::invalid_argument("conv3d: bias must have shape [F]");
    auto bv = bias->values();
    const std::int64_t chan = static_cast<std::int64_t>(d.sd) * d.sh * d.sw;
    for (int n = 0; n < d.n; ++n)
      for (int f = 0; f < d.cs; ++f)
        std::fill_n(out.data() + (static_cast<std::int64_t>(n) * d.cs + f) *
                                     chan,
                    chan, bv[f]);
  }
  conv_gather(input.values().data(), weight.values().data(), out.data(), d);

  detail::Node* pin = input.node();
  detail::Node* pw = weight.node();
  detail::Node* pb = bias ? bias->node() : nullptr;
  std::vector<Tensor> parents{input, weight};
  if (bias) parents.push_back(*bias);
  return make_op(std::move(so), std::move(out), std::move(parents),
                 [pin, pw, pb, d](detail::Node& n) {
                   conv_scatter(n.adjoint.data(), pw->value.data(),
                                pin->adjoint.data(), d);
                   conv_weight_grad(n.adjoint.data(), pin->value.data(),
                                    pw->adjoint.data(), d);
                   if (pb) {
                     const std::int64_t chan =
                         static_cast<std::int64_t>(d.sd) * d.sh * d.sw;
                     for (int b = 0; b < d.n; ++b)
                       for (int f = 0; f < d.cs; ++f) {
                         const double* g =
                             n.adjoint.data() +
                             (static_cast<std::int64_t>(b) * d.cs + f) * chan;
                         double acc = 0.0;
                         for (std::int64_t i = 0; i < chan; ++i) acc += g[i];
                         pb->adjoint[f] += acc;
                       }
                   }
                 });
}

Tensor conv_transpose3d(const Tensor& input, const Tensor& weight,
                        const std::optional<Tensor>& bias, int stride,
                        int padding) {
  check_conv_args(stride, padding, "conv_transpose3d");
  const Shape& si = input.shape();
  const Shape& sw = weight.shape();
  if (si.size() != 5 || sw.size() != 5 || sw[2] != sw[3] || sw[3] != sw[4])
    throw std::invalid_argument(
        "conv_transpose3d: expected input [N,F,D,H,W] and cubic weight "
        "[F,C,k,k,k]");
  if (si[1] != sw[0])
    throw std::invalid_argument("conv_transpose3d: channel mismatch " +
                                shape_str(si) + " vs " + shape_str(sw));
  const int k = sw[2];
  CouplingDims d;
  d.n = si[0];
  d.cs = si[1];
  d.cb = sw[1];
  d.sd = si[2];
  d.sh = si[3];
  d.sw = si[4];
  d.bd = (si[2] - 1) * stride + k - 2 * padding;
  d.bh = (si[3] - 1) * stride + k - 2 * padding;
  d.bw = (si[4] - 1) * stride + k - 2 * padding;
  if (d.bd < 1 || d.bh < 1 || d.bw < 1)
    throw std::invalid_argument("conv_transpose3d: empty output extent");
  d.k = k;
  d.stride = stride;
  d.pad = padding;

  Shape so{d.n, d.cb, d.bd, d.bh, d.bw};
  std::vector<double> out(shape_size(so), 0.0);
  if (bias) {
    if (bias->shape() != Shape{d.cb})
      throw std::invalid_argument("conv_transpose3d: bias must have shape [C]");
    auto bv = bias->values();
    const std::int64_t chan = static_cast<std::int64_t>(d.bd) * d.bh * d.bw;
    for (int n = 0; n < d.n; ++n)
      for (int c = 0; c < d.cb; ++c)
        std::fill_n(out.data() + (static_cast<std::int64_t>(n) * d.cb + c) *
                                     chan,
                    chan, bv[c]);
  }
  conv_scatter(input.values().data(), weight.values().data(), out.data(), d);

  detail::Node* pin = input.node();
  detail::Node* pw = weight.node();
  detail::Node* pb = bias ? bias->node() : nullptr;
  std::vector<Tensor> parents{input, weight};
  if (bias) parents.push_back(*bias);
  return make_op(std::move(so), std::move(out), std::move(parents),
                 [pin, pw, pb, d](detail::Node& n) {
                   conv_gather(n.adjoint.data(), pw->value.data(),
                               pin->adjoint.data(), d);
                   conv_weight_grad(pin->value.data(), n.adjoint.data(),
                                    pw->adjoint.data(), d);
                   if (pb) {
                     const std::int64_t chan =
                         static_cast<std::int64_t>(d.bd) * d.bh * d.bw;
                     for (int b = 0; b < d.n; ++b)
                       for (int c = 0; c < d.cb; ++c) {
                         const double* g =
                             n.adjoint.data() +
                             (static_cast<std::int64_t>(b) * d.cb + c) * chan;
                         double acc = 0.0;
                         for (std::int64_t i = 0; i < chan; ++i) acc += g[i];
                         pb->adjoint[c] += acc;
                       }
                   }
                 });
}

Tensor conv2d(const Tensor& input, const Tensor& weight,
              const std::optional<Tensor>& bias, int stride, int padding) {
  check_conv_args(stride, padding, "conv2d");
  const Shape& si = input.shape();
  const Shape& sw = weight.shape();
  if (si.size() != 4 || sw.size() != 4 || sw[2] != sw[3])
    throw std::invalid_argument("conv2d: expected input [N,C,H,W] and square "
                                "weight [F,C,k,k]");
  if (si[1] != sw[1])
    throw std::invalid_argument("conv2d: channel mismatch " + shape_str(si) +
                                " vs " + shape_str(sw));
  const int k = sw[2];
  CouplingDims d;
  d.n = si[0];
  d.cs = sw[0];
  d.cb = si[1];
  d.bd = 1;
  d.bh = si[2];
  d.bw = si[3];
  d.sd = 1;
  d.sh = conv_out_extent(si[2], k, stride, padding, "conv2d");
  d.sw = conv_out_extent(si[3], k, stride, padding, "conv2d");
  d.k = k;
  d.stride = stride;
  d.pad = padding;

  Shape so{d.n, d.cs, d.sh, d.sw};
  std::vector<double> out(shape_size(so), 0.0);
  if (bias) {
    if (bias->shape() != Shape{d.cs})
      throw std::invalid_argument("conv2d: bias must have shape [F]");
    auto bv = bias->values();
    const std::int64_t chan = static_cast<std::int64_t>(d.sh) * d.sw;
    for (int n = 0; n < d.n; ++n)
      for (int f = 0; f < d.cs; ++f)
        std::fill_n(out.data() + (static_cast<std::int64_t>(n) * d.cs + f) *
                                     chan,
                    chan, bv[f]);
  }

  const double* bg = input.values().data();
  const double* wk0 = weight.values().data();
  double* sm0 = out.data();
  {
    const std::int64_t s_plane = static_cast<std::int64_t>(d.sh) * d.sw;
    const std::int64_t b_plane = static_cast<std::int64_t>(d.bh) * d.bw;
    for (int n = 0; n < d.n; ++n)
      for (int cs = 0; cs < d.cs; ++cs) {
        double* sm = sm0 + (static_cast<std::int64_t>(n) * d.cs + cs) * s_plane;
        for (int cb = 0; cb < d.cb; ++cb) {
          const double* bgc =
              bg + (static_cast<std::int64_t>(n) * d.cb + cb) * b_plane;
          const double* wk =
              wk0 + (static_cast<std::int64_t>(cs) * d.cb + cb) * k * k;
          for (int kh = 0; kh < k; ++kh) {
            const auto rh = axis_range(kh, d.sh, d.bh, stride, padding);
            for (int kw = 0; kw < k; ++kw) {
              const auto rw = axis_range(kw, d.sw, d.bw, stride, padding);
              const double wv = wk[kh * k + kw];
              if (wv == 0.0) continue;
              for (int oh = rh.lo; oh <= rh.hi; ++oh) {
                const int ih = oh * stride - padding + kh;
                double* srow = sm + oh * d.sw;
                const double* brow = bgc + ih * d.bw - padding + kw;
                for (int ow = rw.lo; ow <= rw.hi; ++ow)
                  srow[ow] += wv * brow[ow * stride];
              }
            }
          }
        }
      }
  }

  detail::Node* pin = input.node();
  detail::Node* pw = weight.node();
  detail::Node* pb = bias ? bias->node() : nullptr;
  std::vector<Tensor> parents{input, weight};
  if (bias) parents.push_back(*bias);
  const int kk = k;
  const int stride_ = stride, pad_ = padding;
  return make_op(
      std::move(so), std::move(out), std::move(parents),
      [pin, pw, pb, d, kk, stride_, pad_](detail::Node& n) {
        const std::int64_t s_plane = static_cast<std::int64_t>(d.sh) * d.sw;
        const std::int64_t b_plane = static_cast<std::int64_t>(d.bh) * d.bw;
        for (int b = 0; b < d.n; ++b)
          for (int cs = 0; cs < d.cs; ++cs) {
            const double* sm =
                n.adjoint.data() +
                (static_cast<std::int64_t>(b) * d.cs + cs) * s_plane;
            for (int cb = 0; cb < d.cb; ++cb) {
              double* gin = pin->adjoint.data() +
                            (static_cast<std::int64_t>(b) * d.cb + cb) *
                                b_plane;
              const double* bin = pin->value.data() +
                                  (static_cast<std::int64_t>(b) * d.cb + cb) *
                                      b_plane;
              const double* wk = pw->value.data() +
                                 (static_cast<std::int64_t>(cs) * d.cb + cb) *
                                     kk * kk;
              double* gwk = pw->adjoint.data() +
                            (static_cast<std::int64_t>(cs) * d.cb + cb) * kk *
                                kk;
              for (int kh = 0; kh < kk; ++kh) {
                const auto rh = axis_range(kh, d.sh, d.bh, stride_, pad_);
                for (int kw = 0; kw < kk; ++kw) {
                  const auto rw = axis_range(kw, d.sw, d.bw, stride_, pad_);
                  const double wv = wk[kh * kk + kw];
                  double acc = 0.0;
                  for (int oh = rh.lo; oh <= rh.hi; ++oh) {
                    const int ih = oh * stride_ - pad_ + kh;
                    const double* srow = sm + oh * d.sw;
                    double* grow = gin + ih * d.bw - pad_ + kw;
                    const double* brow = bin + ih * d.bw - pad_ + kw;
                    for (int ow = rw.lo; ow <= rw.hi; ++ow) {
                      grow[ow * stride_] += wv * srow[ow];
                      acc += srow[ow] * brow[ow * stride_];
                    }
                  }
                  gwk[kh * kk + kw] += acc;
                }
              }
            }
          }
        if (pb) {
          const std::int64_t chan = static_cast<std::int64_t>(d.sh) * d.sw;
          for (int b = 0; b < d.n; ++b)
            for (int f = 0; f < d.cs; ++f) {
              const double* g =
                  n.adjoint.data() +
                  (static_cast<std::int64_t>(b) * d.cs + f) * chan;
              double acc = 0.0;
              for (std::int64_t i = 0; i < chan; ++i) acc += g[i];
              pb->adjoint[f] += acc;
            }
        }
      });
}

Tensor dense(const Tensor& input, const Tensor& weight,
             const std::optional<Tensor>& bias) {
  const Shape& si = input.shape();
  const Shape& sw = weight.shape();
  if (si.size() != 2 || sw.size() != 2 || si[1] != sw[1])
    throw std::invalid_argument("dense: expected input [N,I], weight [O,I]");
  const int n = si[0], in_dim = si[1], out_dim = sw[0];
  if (bias && bias->shape() != Shape{out_dim})
    throw std::invalid_argument("dense: bias must have shape [O]");

  std::vector<double> out(static_cast<std::size_t>(n) * out_dim, 0.0);
  auto xv = input.values();
  auto wv = weight.values();
  for (int b = 0; b < n; ++b) {
    const double* xrow = xv.data() + static_cast<std::int64_t>(b) * in_dim;
    double* orow = out.data() + static_cast<std::int64_t>(b) * out_dim;
    for (int o = 0; o < out_dim; ++o) {
      const double* wrow = wv.data() + static_cast<std::int64_t>(o) * in_dim;
      double acc = bias ? bias->values()[o] : 0.0;
      for (int i = 0; i < in_dim; ++i) acc += xrow[i] * wrow[i];
      orow[o] = acc;
    }
  }

  detail::Node* pin = input.node();
  detail::Node* pw = weight.node();
  detail::Node* pb = bias ? bias->node() : nullptr;
  std::vector<Tensor> parents{input, weight};
  if (bias) parents.push_back(*bias);
  return make_op({n, out_dim}, std::move(out), std::move(parents),
                 [pin, pw, pb, n, in_dim, out_dim](detail::Node& nd) {
                   for (int b = 0; b < n; ++b) {
                     const double* g =
                         nd.adjoint.data() +
                         static_cast<std::int64_t>(b) * out_dim;
                     const double* xrow =
                         pin->value.data() +
                         static_cast<std::int64_t>(b) * in_dim;
                     double* gx = pin->adjoint.data() +
                                  static_cast<std::int64_t>(b) * in_dim;
                     for (int o = 0; o < out_dim; ++o) {
                       const double go = g[o];
                       if (go == 0.0) continue;
                       const double* wrow =
                           pw->value.data() +
                           static_cast<std::int64_t>(o) * in_dim;
                       double* gw = pw->adjoint.data() +
                                    static_cast<std::int64_t>(o) * in_dim;
                       for (int i = 0; i < in_dim; ++i) {
                         gx[i] += go * wrow[i];
                         gw[i] += go * xrow[i];
                       }
                       if (pb) pb->adjoint[o] += go;
                     }
                   }
                 });
}

}  // namespace porogen::ad
