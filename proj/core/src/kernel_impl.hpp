#pragma once
// Canonical loop nests. Every kernel is written once over a Probe so that the
// traced and untraced paths execute exactly the same arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "nnbench/error.hpp"
#include "nnbench/kernels.hpp"
#include "nnbench/trace.hpp"

namespace nnbench::detail {

inline constexpr std::uint32_t kIn = 0;
inline constexpr std::uint32_t kOut = 1;
inline constexpr std::uint32_t kParam0 = 2;

inline constexpr std::uint64_t kTileCo = 32;
inline constexpr std::uint64_t kTileW = 32;

struct NullProbe {
  static constexpr bool enabled = false;
  void read(std::uint32_t, std::uint64_t) {}
  void write(std::uint32_t, std::uint64_t) {}
  void branch(BranchSite, bool) {}
  void ops(std::uint64_t) {}
};

struct TraceProbe {
  static constexpr bool enabled = true;
  TraceSink* sink;
  void read(std::uint32_t t, std::uint64_t i) { sink->access(t, i, false); }
  void write(std::uint32_t t, std::uint64_t i) { sink->access(t, i, true); }
  void branch(BranchSite s, bool taken) { sink->branch(s, taken); }
  void ops(std::uint64_t n) { sink->ops(n); }
};

inline void check_input(const Tensor& input, const LayerSpec& spec) {
  if (input.shape != spec.input_shape) {
    throw ShapeError(std::string(to_string(spec.kind)) + ": input tensor " + input.shape.to_string() +
                     " does not match layer input " + spec.input_shape.to_string());
  }
}

inline void check_params(const LayerParams& params, const LayerSpec& spec) {
  const auto layout = param_layout(spec);
  if (params.size() != layout.size()) {
    throw ShapeError(std::string(to_string(spec.kind)) + ": expected " + std::to_string(layout.size()) +
                     " parameter tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (params[i].shape != layout[i].shape) {
      throw ShapeError(std::string(to_string(spec.kind)) + ": parameter " + layout[i].name + " " +
                       params[i].shape.to_string() + " does not match expected " +
                       layout[i].shape.to_string());
    }
  }
}

/// Index map along one spatial axis for conv (o*s - p + k) and for the gather
/// form of deconv (o + p - k must be a multiple of s).
struct AxisMap {
  bool deconv = false;
  std::int64_t in = 0, stride = 1, pad = 0;

  std::int64_t src(std::uint64_t o, std::uint64_t k) const {
    if (!deconv) {
      const std::int64_t i = static_cast<std::int64_t>(o) * stride - pad + static_cast<std::int64_t>(k);
      return (i >= 0 && i < in) ? i : -1;
    }
    const std::int64_t t = static_cast<std::int64_t>(o) + pad - static_cast<std::int64_t>(k);
    if (t < 0 || t % stride != 0) return -1;
    const std::int64_t i = t / stride;
    return i < in ? i : -1;
  }
};

inline AxisMap axis_map(const LayerSpec& spec, bool height) {
  const auto& c = spec.conv();
  AxisMap m;
  m.deconv = spec.kind == LayerKind::Deconv;
  m.in = static_cast<std::int64_t>(spec.input_shape[height ? 2 : 3]);
  m.stride = static_cast<std::int64_t>(height ? c.stride_h : c.stride_w);
  m.pad = static_cast<std::int64_t>(height ? c.pad_h : c.pad_w);
  return m;
}

/// Conv and deconv share one tiled nest:
///   n, co-tile(32), oh, ow-tile(32):
///     acc[co][ow] = bias[co]                      (one bias read per channel)
///     ci, kr (skip invalid rows), kc:
///       read the valid x positions of the tile row (nv reads)
///       if nv > 0: for co in tile: read w; [sparse: branch on zero, skip];
///                  acc[co][pos] += w * x[pos]     (2 ops each)
///     write the tile
template <class P>
Tensor conv_like(const Tensor& input, const LayerParams& params, const LayerSpec& spec, P& probe) {
  check_input(input, spec);
  check_params(params, spec);
  const bool deconv = spec.kind == LayerKind::Deconv;
  const auto& c = spec.conv();
  const TensorShape oshape = output_shape(spec);
  const std::uint64_t N = input.shape[0], C = input.shape[1], H = input.shape[2], W = input.shape[3];
  const std::uint64_t Co = c.out_channels, Ho = oshape[2], Wo = oshape[3];
  const std::uint64_t KH = c.kernel_h, KW = c.kernel_w;
  const AxisMap mh = axis_map(spec, true), mw = axis_map(spec, false);
  const bool sparse = spec.sparsity < 1.0;
  const float* x = input.data.data();
  const float* w = params[0].data.data();
  const float* b = params[1].data.data();
  Tensor out(oshape);
  float* y = out.data.data();

  double acc[kTileCo][kTileW];
  double xv[kTileW];
  for (std::uint64_t n = 0; n < N; ++n) {
    for (std::uint64_t co0 = 0; co0 < Co; co0 += kTileCo) {
      const std::uint64_t tc = std::min(kTileCo, Co - co0);
      for (std::uint64_t oh = 0; oh < Ho; ++oh) {
        for (std::uint64_t ow0 = 0; ow0 < Wo; ow0 += kTileW) {
          const std::uint64_t tw = std::min(kTileW, Wo - ow0);
          for (std::uint64_t t = 0; t < tc; ++t) {
            probe.read(kParam0 + 1, co0 + t);
            const double bv = b[co0 + t];
            for (std::uint64_t j = 0; j < tw; ++j) acc[t][j] = bv;
          }
          for (std::uint64_t ci = 0; ci < C; ++ci) {
            for (std::uint64_t kr = 0; kr < KH; ++kr) {
              const std::int64_t ih = mh.src(oh, kr);
              if (ih < 0) continue;
              const std::uint64_t xrow = ((n * C + ci) * H + static_cast<std::uint64_t>(ih)) * W;
              for (std::uint64_t kc = 0; kc < KW; ++kc) {
                // Valid output columns form an arithmetic progression j0 + i*step.
                std::uint64_t nv = 0, j0 = 0, step = 1, last = 0;
                for (std::uint64_t j = 0; j < tw; ++j) {
                  const std::int64_t iw = mw.src(ow0 + j, kc);
                  if (iw < 0) continue;
                  if (nv == 0) j0 = j;
                  else if (nv == 1) step = j - last;
                  last = j;
                  const std::uint64_t xi = xrow + static_cast<std::uint64_t>(iw);
                  probe.read(kIn, xi);
                  xv[nv++] = x[xi];
                }
                if (nv == 0) continue;
                for (std::uint64_t t = 0; t < tc; ++t) {
                  const std::uint64_t co = co0 + t;
                  const std::uint64_t wi = deconv ? ((ci * Co + co) * KH + kr) * KW + kc
                                                  : ((co * C + ci) * KH + kr) * KW + kc;
                  probe.read(kParam0, wi);
                  const double wd = w[wi];
                  if (sparse) {
                    probe.branch(BranchSite::ConvZeroWeight, wd == 0.0);
                    if (wd == 0.0) continue;
                  }
                  probe.ops(2 * nv);
                  double* a = &acc[t][j0];
                  if (step == 1) {
                    for (std::uint64_t i = 0; i < nv; ++i) a[i] += wd * xv[i];
                  } else {
                    for (std::uint64_t i = 0; i < nv; ++i) a[i * step] += wd * xv[i];
                  }
                }
              }
            }
          }
          for (std::uint64_t t = 0; t < tc; ++t) {
            const std::uint64_t base = ((n * Co + co0 + t) * Ho + oh) * Wo + ow0;
            for (std::uint64_t j = 0; j < tw; ++j) {
              y[base + j] = static_cast<float>(acc[t][j]);
              probe.write(kOut, base + j);
            }
          }
        }
      }
    }
  }
  return out;
}

/// Window bounds along one axis, clipped to valid input elements.
inline void window(std::uint64_t o, std::uint64_t k, std::uint64_t s, std::uint64_t p, std::uint64_t in,
                   std::uint64_t& lo, std::uint64_t& hi) {
  const std::int64_t start = static_cast<std::int64_t>(o * s) - static_cast<std::int64_t>(p);
  lo = static_cast<std::uint64_t>(std::max<std::int64_t>(start, 0));
  hi = static_cast<std::uint64_t>(std::min<std::int64_t>(start + static_cast<std::int64_t>(k),
                                                         static_cast<std::int64_t>(in)));
}

/// Avg: acc over valid elements then one divide (cnt + 1 ops).
/// Max: first valid element seeds the max; each further element is one
/// compare op and one PoolMaxCompare branch.
template <class P>
LayerOutput pool(const Tensor& input, const LayerSpec& spec, P& probe) {
  check_input(input, spec);
  const bool is_max = spec.kind == LayerKind::PoolMax;
  const auto& pp = spec.pool();
  const TensorShape oshape = output_shape(spec);
  const std::uint64_t N = input.shape[0], C = input.shape[1], H = input.shape[2], W = input.shape[3];
  const std::uint64_t Ho = oshape[2], Wo = oshape[3];
  LayerOutput res{Tensor(oshape), std::nullopt};
  if (is_max) res.switches.emplace().index.resize(oshape.element_count());
  const float* x = input.data.data();
  float* y = res.output.data.data();
  std::uint64_t o = 0;
  for (std::uint64_t nc = 0; nc < N * C; ++nc) {
    const std::uint64_t plane = nc * H * W;
    for (std::uint64_t oh = 0; oh < Ho; ++oh) {
      std::uint64_t h0, h1;
      window(oh, pp.kernel_h, pp.stride_h, pp.pad_h, H, h0, h1);
      for (std::uint64_t ow = 0; ow < Wo; ++ow, ++o) {
        std::uint64_t w0, w1;
        window(ow, pp.kernel_w, pp.stride_w, pp.pad_w, W, w0, w1);
        if (is_max) {
          std::uint64_t best = plane + h0 * W + w0;
          probe.read(kIn, best);
          float m = x[best];
          for (std::uint64_t h = h0; h < h1; ++h) {
            for (std::uint64_t w = (h == h0 ? w0 + 1 : w0); w < w1; ++w) {
              const std::uint64_t i = plane + h * W + w;
              probe.read(kIn, i);
              const bool greater = x[i] > m;
              probe.branch(BranchSite::PoolMaxCompare, greater);
              probe.ops(1);
              if (greater) {
                m = x[i];
                best = i;
              }
            }
          }
          y[o] = m;
          res.switches->index[o] = best;
        } else {
          double acc = 0.0;
          for (std::uint64_t h = h0; h < h1; ++h) {
            for (std::uint64_t w = w0; w < w1; ++w) {
              const std::uint64_t i = plane + h * W + w;
              probe.read(kIn, i);
              acc += x[i];
            }
          }
          const std::uint64_t cnt = (h1 - h0) * (w1 - w0);
          probe.ops(cnt + 1);
          y[o] = static_cast<float>(acc / static_cast<double>(cnt));
        }
        probe.write(kOut, o);
      }
    }
  }
  return res;
}

/// n, j: acc = bias[j]; k: read w; [sparse: branch, skip zero]; read x; MAC.
template <class P>
Tensor fc(const Tensor& input, const LayerParams& params, const LayerSpec& spec, P& probe) {
  check_input(input, spec);
  check_params(params, spec);
  const std::uint64_t N = input.shape[0];
  const std::uint64_t K = input.shape.element_count() / N;
  const std::uint64_t M = spec.fc().out_features;
  const bool sparse = spec.sparsity < 1.0;
  const float* x = input.data.data();
  const float* w = params[0].data.data();
  const float* b = params[1].data.data();
  Tensor out(TensorShape{N, M});
  float* y = out.data.data();
  for (std::uint64_t n = 0; n < N; ++n) {
    const float* xn = x + n * K;
    for (std::uint64_t j = 0; j < M; ++j) {
      probe.read(kParam0 + 1, j);
      double acc = b[j];
      const float* wj = w + j * K;
      for (std::uint64_t k = 0; k < K; ++k) {
        probe.read(kParam0, j * K + k);
        const double wd = wj[k];
        if (sparse) {
          probe.branch(BranchSite::FcZeroWeight, wd == 0.0);
          if (wd == 0.0) continue;
        }
        probe.read(kIn, n * K + k);
        probe.ops(2);
        acc += wd * xn[k];
      }
      y[n * M + j] = static_cast<float>(acc);
      probe.write(kOut, n * M + j);
    }
  }
  return out;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// ReLU: one sign test (branch + 1 op). Sigmoid: exp, add, divide (3 ops).
template <class P>
Tensor activation(const Tensor& input, LayerKind kind, P& probe) {
  Tensor out(input.shape);
  const float* x = input.data.data();
  float* y = out.data.data();
  const std::uint64_t n = input.size();
  if (kind == LayerKind::ReLU) {
    for (std::uint64_t i = 0; i < n; ++i) {
      probe.read(kIn, i);
      const bool pos = x[i] > 0.0f;
      probe.branch(BranchSite::ReluSign, pos);
      probe.ops(1);
      y[i] = pos ? x[i] : 0.0f;
      probe.write(kOut, i);
    }
  } else if (kind == LayerKind::Sigmoid) {
    for (std::uint64_t i = 0; i < n; ++i) {
      probe.read(kIn, i);
      probe.ops(3);
      y[i] = static_cast<float>(sigmoid(x[i]));
      probe.write(kOut, i);
    }
  } else {
    throw Error("forward_activation: kind must be relu or sigmoid");
  }
  return out;
}

/// Cross-channel LRN: y = x / (k + alpha/L * sum_{window} x^2)^beta.
/// Per output: cnt reads (center reused), 2*cnt + 4 ops.
template <class P>
Tensor lrn(const Tensor& input, const LayerSpec& spec, P& probe) {
  check_input(input, spec);
  const auto& l = spec.lrn();
  const std::uint64_t N = input.shape[0], C = input.shape[1];
  const std::uint64_t S = input.shape[2] * input.shape[3];
  const std::uint64_t half = l.local_size / 2;
  const double scale = l.alpha / static_cast<double>(l.local_size);
  Tensor out(input.shape);
  const float* x = input.data.data();
  float* y = out.data.data();
  for (std::uint64_t n = 0; n < N; ++n) {
    for (std::uint64_t c = 0; c < C; ++c) {
      const std::uint64_t c0 = c >= half ? c - half : 0;
      const std::uint64_t c1 = std::min(C, c + half + 1);
      for (std::uint64_t s = 0; s < S; ++s) {
        double sum = 0.0, center = 0.0;
        for (std::uint64_t cc = c0; cc < c1; ++cc) {
          const std::uint64_t i = (n * C + cc) * S + s;
          probe.read(kIn, i);
          const double v = x[i];
          if (cc == c) center = v;
          sum += v * v;
        }
        probe.ops(2 * (c1 - c0) + 4);
        const std::uint64_t o = (n * C + c) * S + s;
        y[o] = static_cast<float>(center / std::pow(l.k + scale * sum, l.beta));
        probe.write(kOut, o);
      }
    }
  }
  return out;
}

/// Batch statistics per channel over M = N * spatial elements:
/// mean pass (M reads, M + 1 ops), variance pass (M reads, 3M + 1 ops),
/// gamma/beta (2 reads, 4 ops), apply pass (M reads, 3M ops, M writes).
template <class P>
Tensor bn(const Tensor& input, const LayerParams& params, const LayerSpec& spec, P& probe) {
  check_input(input, spec);
  check_params(params, spec);
  const std::uint64_t N = input.shape[0], C = input.shape[1];
  const std::uint64_t S = input.shape.element_count() / (N * C);
  const double M = static_cast<double>(N * S);
  const float* x = input.data.data();
  const float* gamma = params[0].data.data();
  const float* beta = params[1].data.data();
  Tensor out(input.shape);
  float* y = out.data.data();
  for (std::uint64_t c = 0; c < C; ++c) {
    double sum = 0.0;
    for (std::uint64_t n = 0; n < N; ++n) {
      for (std::uint64_t s = 0; s < S; ++s) {
        const std::uint64_t i = (n * C + c) * S + s;
        probe.read(kIn, i);
        sum += x[i];
      }
    }
    const double mean = sum / M;
    probe.ops(N * S + 1);
    double var = 0.0;
    for (std::uint64_t n = 0; n < N; ++n) {
      for (std::uint64_t s = 0; s < S; ++s) {
        const std::uint64_t i = (n * C + c) * S + s;
        probe.read(kIn, i);
        const double d = x[i] - mean;
        var += d * d;
      }
    }
    var /= M;
    probe.ops(3 * N * S + 1);
    probe.read(kParam0, c);
    probe.read(kParam0 + 1, c);
    const double inv = 1.0 / std::sqrt(var + spec.bn().epsilon);
    const double g = gamma[c] * inv;
    const double bt = beta[c];
    probe.ops(4);
    for (std::uint64_t n = 0; n < N; ++n) {
      for (std::uint64_t s = 0; s < S; ++s) {
        const std::uint64_t i = (n * C + c) * S + s;
        probe.read(kIn, i);
        probe.ops(3);
        y[i] = static_cast<float>((x[i] - mean) * g + bt);
        probe.write(kOut, i);
      }
    }
  }
  return out;
}

/// Per input element: avg writes x / (kh*kw) to the whole window (1 op);
/// max tests each window position against the switch (UnpoolMaxPlace branch
/// and 1 op per position) and writes x there, zero elsewhere.
template <class P>
Tensor unpool(const Tensor& input, const LayerSpec& spec, const PoolSwitches* switches, P& probe) {
  check_input(input, spec);
  const bool is_max = spec.kind == LayerKind::UnpoolMax;
  const auto& pp = spec.pool();
  const TensorShape oshape = output_shape(spec);
  const std::uint64_t NC = input.shape[0] * input.shape[1], H = input.shape[2], W = input.shape[3];
  const std::uint64_t KH = pp.kernel_h, KW = pp.kernel_w, Wo = oshape[3];
  if (is_max && (switches == nullptr || switches->index.size() != input.size())) {
    throw ShapeError("unpool_max: switches missing or sized " +
                     std::to_string(switches ? switches->index.size() : 0) + " for input " +
                     input.shape.to_string());
  }
  Tensor out(oshape);
  const float* x = input.data.data();
  float* y = out.data.data();
  const double inv_area = 1.0 / static_cast<double>(KH * KW);
  std::uint64_t i = 0;
  for (std::uint64_t nc = 0; nc < NC; ++nc) {
    const std::uint64_t plane = nc * oshape[2] * Wo;
    for (std::uint64_t h = 0; h < H; ++h) {
      for (std::uint64_t w = 0; w < W; ++w, ++i) {
        probe.read(kIn, i);
        const float v = x[i];
        if (is_max) {
          const std::uint64_t sw = switches->index[i];
          const std::uint64_t sr = (sw - plane) / Wo, sc = (sw - plane) % Wo;
          if (sw < plane || sr < h * KH || sr >= (h + 1) * KH || sc < w * KW || sc >= (w + 1) * KW) {
            throw ShapeError("unpool_max: switch " + std::to_string(sw) + " lies outside window of input " +
                             std::to_string(i));
          }
        } else {
          probe.ops(1);
        }
        const float avg = static_cast<float>(v * inv_area);
        for (std::uint64_t r = 0; r < KH; ++r) {
          for (std::uint64_t q = 0; q < KW; ++q) {
            const std::uint64_t o = plane + (h * KH + r) * Wo + w * KW + q;
            if (is_max) {
              const bool here = o == switches->index[i];
              probe.branch(BranchSite::UnpoolMaxPlace, here);
              probe.ops(1);
              y[o] = here ? v : 0.0f;
            } else {
              y[o] = avg;
            }
            probe.write(kOut, o);
          }
        }
      }
    }
  }
  return out;
}

/// Standard 4-gate LSTM, gate order i, f, o, g. Input [T, N, I], output
/// [T, N, dirs*H]; cell state lives in a scratch tensor [N, dirs*H] (traced as
/// the tensor after the parameters). Per (t, n): 4H gate rows accumulate
/// bias + W_ih x (+ W_hh h_prev after the first step), then 15 ops per unit.
template <class P>
Tensor lstm(const Tensor& input, const LayerParams& params, const LayerSpec& spec, P& probe) {
  check_input(input, spec);
  check_params(params, spec);
  const auto& l = spec.lstm();
  const std::uint64_t T = input.shape[0], N = input.shape[1], I = input.shape[2], H = l.hidden;
  const std::uint64_t dirs = l.bidirectional ? 2 : 1, DH = dirs * H;
  const std::uint32_t cell_id = kParam0 + static_cast<std::uint32_t>(params.size());
  Tensor out(TensorShape{T, N, DH});
  std::vector<float> cell(N * DH, 0.0f);
  std::vector<double> gate(4 * H);
  const float* x = input.data.data();
  float* y = out.data.data();
  for (std::uint64_t d = 0; d < dirs; ++d) {
    const std::uint32_t wih_id = kParam0 + static_cast<std::uint32_t>(3 * d);
    const float* wih = params[3 * d].data.data();
    const float* whh = params[3 * d + 1].data.data();
    const float* bias = params[3 * d + 2].data.data();
    for (std::uint64_t step = 0; step < T; ++step) {
      const std::uint64_t t = d == 0 ? step : T - 1 - step;
      const std::uint64_t tp = d == 0 ? t - 1 : t + 1;
      for (std::uint64_t n = 0; n < N; ++n) {
        const std::uint64_t xb = (t * N + n) * I;
        const std::uint64_t hb = (tp * N + n) * DH + d * H;
        for (std::uint64_t r = 0; r < 4 * H; ++r) {
          probe.read(wih_id + 2, r);
          double acc = bias[r];
          for (std::uint64_t k = 0; k < I; ++k) {
            probe.read(wih_id, r * I + k);
            probe.read(kIn, xb + k);
            acc += static_cast<double>(wih[r * I + k]) * x[xb + k];
          }
          probe.ops(2 * I);
          if (step > 0) {
            for (std::uint64_t k = 0; k < H; ++k) {
              probe.read(wih_id + 1, r * H + k);
              probe.read(kOut, hb + k);
              acc += static_cast<double>(whh[r * H + k]) * y[hb + k];
            }
            probe.ops(2 * H);
          }
          gate[r] = acc;
        }
        for (std::uint64_t j = 0; j < H; ++j) {
          const double ig = sigmoid(gate[j]);
          const double fg = sigmoid(gate[H + j]);
          const double og = sigmoid(gate[2 * H + j]);
          const double gg = std::tanh(gate[3 * H + j]);
          const std::uint64_t ci = n * DH + d * H + j;
          double cprev = 0.0;
          if (step > 0) {
            probe.read(cell_id, ci);
            cprev = cell[ci];
          }
          const float c = static_cast<float>(fg * cprev + ig * gg);
          cell[ci] = c;
          probe.write(cell_id, ci);
          const std::uint64_t o = (t * N + n) * DH + d * H + j;
          y[o] = static_cast<float>(og * std::tanh(static_cast<double>(c)));
          probe.write(kOut, o);
          probe.ops(15);
        }
      }
    }
  }
  return out;
}

template <class P>
LayerOutput dispatch(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                     const PoolSwitches* switches, P& probe) {
  switch (spec.kind) {
    case LayerKind::Conv:
    case LayerKind::Deconv:
      return {conv_like(input, params, spec, probe), std::nullopt};
    case LayerKind::PoolAvg:
    case LayerKind::PoolMax:
      return pool(input, spec, probe);
    case LayerKind::FC:
      return {fc(input, params, spec, probe), std::nullopt};
    case LayerKind::ReLU:
    case LayerKind::Sigmoid:
      check_input(input, spec);
      return {activation(input, spec.kind, probe), std::nullopt};
    case LayerKind::LRN:
      return {lrn(input, spec, probe), std::nullopt};
    case LayerKind::BN:
      return {bn(input, params, spec, probe), std::nullopt};
    case LayerKind::UnpoolAvg:
    case LayerKind::UnpoolMax:
      return {unpool(input, spec, switches, probe), std::nullopt};
    case LayerKind::LSTM:
      return {lstm(input, params, spec, probe), std::nullopt};
  }
  throw Error("unknown layer kind");
}

}  // namespace nnbench::detail
