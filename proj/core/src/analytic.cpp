#include "nnbench/analytic.hpp"

#include <cmath>
#include <vector>

#include "kernel_impl.hpp"

namespace nnbench {

namespace {

/// Per-axis enumeration of the tiled conv nest; everything in the count
/// formulas factorizes into a height part and a width part.
struct ConvProfile {
  std::vector<std::uint64_t> row_valid;  // per kr: #oh with a valid input row
  std::vector<std::uint64_t> col_valid;  // per kc: sum over ow tiles of valid columns
  std::vector<std::uint64_t> col_tiles;  // per kc: #ow tiles with >= 1 valid column
  std::uint64_t rv = 0, sw = 0, snz = 0;
  std::uint64_t rows_touched = 0, cols_touched = 0;
  std::uint64_t kr_touched = 0, kc_touched = 0;
  std::uint64_t n_ct = 0, n_wt = 0;
};

ConvProfile conv_profile(const LayerSpec& spec) {
  const auto& c = spec.conv();
  const TensorShape out = output_shape(spec);
  const std::uint64_t H = spec.input_shape[2], W = spec.input_shape[3], Ho = out[2], Wo = out[3];
  const auto mh = detail::axis_map(spec, true);
  const auto mw = detail::axis_map(spec, false);
  ConvProfile p;
  p.row_valid.assign(c.kernel_h, 0);
  p.col_valid.assign(c.kernel_w, 0);
  p.col_tiles.assign(c.kernel_w, 0);
  std::vector<bool> rows(H, false), cols(W, false);
  for (std::uint64_t oh = 0; oh < Ho; ++oh) {
    for (std::uint64_t kr = 0; kr < c.kernel_h; ++kr) {
      const auto ih = mh.src(oh, kr);
      if (ih < 0) continue;
      ++p.row_valid[kr];
      rows[static_cast<std::size_t>(ih)] = true;
    }
  }
  p.n_wt = (Wo + detail::kTileW - 1) / detail::kTileW;
  p.n_ct = (c.out_channels + detail::kTileCo - 1) / detail::kTileCo;
  for (std::uint64_t u = 0; u < p.n_wt; ++u) {
    const std::uint64_t ow0 = u * detail::kTileW;
    const std::uint64_t tw = std::min(detail::kTileW, Wo - ow0);
    for (std::uint64_t kc = 0; kc < c.kernel_w; ++kc) {
      std::uint64_t cnt = 0;
      for (std::uint64_t j = 0; j < tw; ++j) {
        const auto iw = mw.src(ow0 + j, kc);
        if (iw < 0) continue;
        ++cnt;
        cols[static_cast<std::size_t>(iw)] = true;
      }
      p.col_valid[kc] += cnt;
      p.col_tiles[kc] += cnt > 0 ? 1 : 0;
    }
  }
  for (auto v : p.row_valid) {
    p.rv += v;
    p.kr_touched += v > 0;
  }
  for (std::size_t kc = 0; kc < p.col_valid.size(); ++kc) {
    p.sw += p.col_valid[kc];
    p.snz += p.col_tiles[kc];
    p.kc_touched += p.col_valid[kc] > 0;
  }
  for (bool b : rows) p.rows_touched += b;
  for (bool b : cols) p.cols_touched += b;
  return p;
}

std::uint64_t conv_macs(const LayerSpec& spec, const ConvProfile& p, const LayerParams* params,
                        bool& exact) {
  const std::uint64_t N = spec.input_shape[0], C = spec.input_shape[1];
  const std::uint64_t Co = spec.conv().out_channels;
  const std::uint64_t dense = N * Co * C * p.rv * p.sw;
  if (spec.sparsity >= 1.0) return dense;
  const auto& c = spec.conv();
  const bool deconv = spec.kind == LayerKind::Deconv;
  if (params != nullptr && params->size() >= 1) {
    const float* w = (*params)[0].data.data();
    std::uint64_t macs = 0;
    for (std::uint64_t co = 0; co < Co; ++co) {
      for (std::uint64_t ci = 0; ci < C; ++ci) {
        for (std::uint64_t kr = 0; kr < c.kernel_h; ++kr) {
          for (std::uint64_t kc = 0; kc < c.kernel_w; ++kc) {
            const std::uint64_t wi = deconv ? ((ci * Co + co) * c.kernel_h + kr) * c.kernel_w + kc
                                            : ((co * C + ci) * c.kernel_h + kr) * c.kernel_w + kc;
            if (w[wi] != 0.0f) macs += p.row_valid[kr] * p.col_valid[kc];
          }
        }
      }
    }
    return N * macs;
  }
  const std::uint64_t size = Co * C * c.kernel_h * c.kernel_w;
  const auto nnz = static_cast<std::uint64_t>(std::llround(spec.sparsity * static_cast<double>(size)));
  bool uniform = true;
  for (auto v : p.row_valid) uniform &= v == p.row_valid[0];
  for (auto v : p.col_valid) uniform &= v == p.col_valid[0];
  if (uniform) return N * nnz * p.row_valid[0] * p.col_valid[0];
  exact = false;
  return static_cast<std::uint64_t>(std::llround(spec.sparsity * static_cast<double>(dense)));
}

std::uint64_t fc_nonzeros(const LayerSpec& spec, const LayerParams* params, std::uint64_t K) {
  const std::uint64_t M = spec.fc().out_features;
  if (spec.sparsity >= 1.0) return M * K;
  if (params != nullptr && params->size() >= 1) return params->nonzero_weights();
  return static_cast<std::uint64_t>(std::llround(spec.sparsity * static_cast<double>(M * K)));
}

struct PoolAxis {
  std::uint64_t sum = 0;  // sum over outputs of valid window extent
  std::uint64_t touched = 0;
};

PoolAxis pool_axis(std::uint64_t in, std::uint64_t out, std::uint64_t k, std::uint64_t s, std::uint64_t p) {
  PoolAxis a;
  std::vector<bool> hit(in, false);
  for (std::uint64_t o = 0; o < out; ++o) {
    std::uint64_t lo, hi;
    detail::window(o, k, s, p, in, lo, hi);
    a.sum += hi - lo;
    for (auto i = lo; i < hi; ++i) hit[i] = true;
  }
  for (bool b : hit) a.touched += b;
  return a;
}

}  // namespace

std::uint64_t analytic_macs(const LayerSpec& spec, const LayerParams* params) {
  validate(spec);
  bool exact = true;
  switch (spec.kind) {
    case LayerKind::Conv:
    case LayerKind::Deconv:
      return conv_macs(spec, conv_profile(spec), params, exact);
    case LayerKind::FC: {
      const std::uint64_t N = spec.input_shape[0];
      return N * fc_nonzeros(spec, params, spec.input_shape.element_count() / N);
    }
    default:
      return 0;
  }
}

LayerCounts analytic_counts(const LayerSpec& spec, const LayerParams* params) {
  validate(spec);
  LayerCounts r;
  const auto& in = spec.input_shape;
  const TensorShape out = output_shape(spec);
  const std::uint64_t n_in = in.element_count(), n_out = out.element_count();
  switch (spec.kind) {
    case LayerKind::Conv:
    case LayerKind::Deconv: {
      const auto p = conv_profile(spec);
      const auto& c = spec.conv();
      const std::uint64_t N = in[0], C = in[1], Co = c.out_channels;
      const std::uint64_t x_reads = N * p.n_ct * C * p.rv * p.sw;
      const std::uint64_t w_reads = N * Co * C * p.rv * p.snz;
      const std::uint64_t b_reads = N * Co * out[2] * p.n_wt;
      r.reads = x_reads + w_reads + b_reads;
      r.writes = n_out;
      r.ops = 2 * conv_macs(spec, p, params, r.exact);
      r.branches = spec.sparsity < 1.0 ? w_reads : 0;
      r.in_mem = N * C * p.rows_touched * p.cols_touched;
      r.wgh_mem = Co * C * p.kr_touched * p.kc_touched + Co;
      r.out_mem = n_out;
      break;
    }
    case LayerKind::PoolAvg:
    case LayerKind::PoolMax: {
      const auto& pp = spec.pool();
      const std::uint64_t NC = in[0] * in[1], Ho = out[2], Wo = out[3];
      const auto ah = pool_axis(in[2], Ho, pp.kernel_h, pp.stride_h, pp.pad_h);
      const auto aw = pool_axis(in[3], Wo, pp.kernel_w, pp.stride_w, pp.pad_w);
      const std::uint64_t elems = NC * ah.sum * aw.sum;
      r.reads = elems;
      r.writes = n_out;
      if (spec.kind == LayerKind::PoolAvg) {
        r.ops = elems + n_out;
      } else {
        r.ops = elems - n_out;
        r.branches = r.ops;
      }
      r.in_mem = NC * ah.touched * aw.touched;
      r.out_mem = n_out;
      break;
    }
    case LayerKind::FC: {
      const std::uint64_t N = in[0], K = n_in / N, M = spec.fc().out_features;
      const std::uint64_t nnz = fc_nonzeros(spec, params, K);
      const bool sparse = spec.sparsity < 1.0;
      r.reads = N * M * (K + 1) + N * nnz;
      r.writes = N * M;
      r.ops = 2 * N * nnz;
      r.branches = sparse ? N * M * K : 0;
      r.in_mem = n_in;
      if (sparse && params != nullptr && params->size() >= 1) {
        const float* w = (*params)[0].data.data();
        std::uint64_t used = 0;
        for (std::uint64_t k = 0; k < K; ++k) {
          for (std::uint64_t j = 0; j < M; ++j) {
            if (w[j * K + k] != 0.0f) {
              ++used;
              break;
            }
          }
        }
        r.in_mem = N * used;
      }
      r.wgh_mem = M * K + M;
      r.out_mem = N * M;
      break;
    }
    case LayerKind::ReLU:
      r.reads = r.writes = r.ops = r.branches = n_in;
      r.in_mem = r.out_mem = n_in;
      break;
    case LayerKind::Sigmoid:
      r.reads = r.writes = n_in;
      r.ops = 3 * n_in;
      r.in_mem = r.out_mem = n_in;
      break;
    case LayerKind::LRN: {
      const std::uint64_t N = in[0], C = in[1], S = in[2] * in[3];
      const std::uint64_t half = spec.lrn().local_size / 2;
      std::uint64_t window_sum = 0;
      for (std::uint64_t c = 0; c < C; ++c) {
        const std::uint64_t c0 = c >= half ? c - half : 0;
        const std::uint64_t c1 = std::min(C, c + half + 1);
        window_sum += c1 - c0;
      }
      r.reads = N * S * window_sum;
      r.ops = N * S * (2 * window_sum + 4 * C);
      r.writes = n_out;
      r.in_mem = r.out_mem = n_in;
      break;
    }
    case LayerKind::BN: {
      const std::uint64_t C = in[1], M = n_in / C;
      r.reads = C * (3 * M + 2);
      r.writes = n_in;
      r.ops = C * (7 * M + 6);
      r.in_mem = r.out_mem = n_in;
      r.wgh_mem = 2 * C;
      break;
    }
    case LayerKind::UnpoolAvg:
    case LayerKind::UnpoolMax: {
      const std::uint64_t area = spec.pool().kernel_h * spec.pool().kernel_w;
      r.reads = n_in;
      r.writes = n_in * area;
      if (spec.kind == LayerKind::UnpoolAvg) {
        r.ops = n_in;
      } else {
        r.ops = r.branches = n_in * area;
      }
      r.in_mem = n_in;
      r.out_mem = n_out;
      break;
    }
    case LayerKind::LSTM: {
      const auto& l = spec.lstm();
      const std::uint64_t T = in[0], N = in[1], I = in[2], H = l.hidden, dirs = l.bidirectional ? 2 : 1;
      const std::uint64_t first = dirs * N, later = dirs * (T - 1) * N;
      r.reads = (first + later) * (4 * H + 8 * H * I) + later * (8 * H * H + H);
      r.writes = (first + later) * 2 * H;
      r.ops = (first + later) * (8 * H * I + 15 * H) + later * 8 * H * H;
      r.in_mem = n_in;
      r.wgh_mem = dirs * (4 * H * I + 4 * H + (T > 1 ? 4 * H * H : 0));
      r.out_mem = n_out + N * dirs * H;
      break;
    }
  }
  return r;
}

double reuse_footprint_bound(const LayerSpec& spec) {
  const LayerCounts c = analytic_counts(spec);
  if (spec.kind != LayerKind::Conv && spec.kind != LayerKind::Deconv) {
    return static_cast<double>(c.in_mem) + static_cast<double>(c.out_mem) + static_cast<double>(c.wgh_mem);
  }
  const auto p = conv_profile(spec);
  const TensorShape out = output_shape(spec);
  const double N = static_cast<double>(spec.input_shape[0]);
  const double C = static_cast<double>(spec.input_shape[1]);
  const double tc = static_cast<double>(std::min<std::uint64_t>(detail::kTileCo, spec.conv().out_channels));
  return static_cast<double>(c.in_mem) / N + tc * C * static_cast<double>(p.kr_touched * p.kc_touched) + tc +
         tc * static_cast<double>(out[2] * out[3]);
}

}  // namespace nnbench
