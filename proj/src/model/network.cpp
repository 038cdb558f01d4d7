// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace lsgd::model::detail {

namespace {

using Eigen::Index;

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstRowMap = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <typename T>
using RowMap = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;

constexpr long double kLayerNormEps = 1e-5L;
constexpr long double kInvSqrt2 = 0.707106781186547524400844362104849039L;
constexpr long double kInvSqrt2Pi = 0.398942280401432677939946059934381868L;

template <typename T>
T gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(kInvSqrt2)));
}

template <typename T>
T gelu_derivative(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(kInvSqrt2)));
  const T pdf = T(kInvSqrt2Pi) * std::exp(T(-0.5) * x * x);
  return cdf + x * pdf;
}

// Read-only and gradient views of one flat buffer.
template <typename T>
struct Views {
  const T* p;
  T* g;

  ConstMatMap<T> mat(std::size_t offset, Index rows, Index cols) const { return {p + offset, rows, cols}; }
  ConstRowMap<T> vec(std::size_t offset, Index len) const { return {p + offset, len}; }
  MatMap<T> dmat(std::size_t offset, Index rows, Index cols) const { return {g + offset, rows, cols}; }
  RowMap<T> dvec(std::size_t offset, Index len) const { return {g + offset, len}; }
};

// Row-ordered column sums; Eigen's vectorised reductions depend on buffer
// alignment, which differs between threads.
template <typename T>
void add_column_sums(const RowMat<T>& m, T* out) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out[j] += m(i, j);
  }
}

template <typename T>
struct LayerNormCache {
  RowMat<T> xhat;
  std::vector<T> rstd;
};

template <typename T>
void layer_norm_forward(const RowMat<T>& x, const T* gain, const T* bias, LayerNormCache<T>& cache, RowMat<T>& out) {
  const Index n = x.rows();
  const Index d = x.cols();
  cache.xhat.resize(n, d);
  cache.rstd.resize(static_cast<std::size_t>(n));
  out.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    T mean = 0;
    for (Index j = 0; j < d; ++j) mean += x(i, j);
    mean /= T(d);
    T var = 0;
    for (Index j = 0; j < d; ++j) {
      const T c = x(i, j) - mean;
      var += c * c;
    }
    var /= T(d);
    const T r = T(1) / std::sqrt(var + T(kLayerNormEps));
    cache.rstd[static_cast<std::size_t>(i)] = r;
    for (Index j = 0; j < d; ++j) {
      const T h = (x(i, j) - mean) * r;
      cache.xhat(i, j) = h;
      out(i, j) = h * gain[j] + bias[j];
    }
  }
}

// Accumulates into dx, dgain and dbias.
template <typename T>
void layer_norm_backward(const RowMat<T>& dout, const T* gain, const LayerNormCache<T>& cache, RowMat<T>& dx,
                         T* dgain, T* dbias) {
  const Index n = dout.rows();
  const Index d = dout.cols();
  std::vector<T> dh(static_cast<std::size_t>(d));
  for (Index i = 0; i < n; ++i) {
    T sum_dh = 0;
    T sum_dh_xhat = 0;
    for (Index j = 0; j < d; ++j) {
      const T xh = cache.xhat(i, j);
      const T v = dout(i, j) * gain[j];
      dh[static_cast<std::size_t>(j)] = v;
      sum_dh += v;
      sum_dh_xhat += v * xh;
      dgain[j] += dout(i, j) * xh;
      dbias[j] += dout(i, j);
    }
    const T r = cache.rstd[static_cast<std::size_t>(i)];
    const T mean_dh = sum_dh / T(d);
    const T mean_dh_xhat = sum_dh_xhat / T(d);
    for (Index j = 0; j < d; ++j) {
      dx(i, j) += r * (dh[static_cast<std::size_t>(j)] - mean_dh - cache.xhat(i, j) * mean_dh_xhat);
    }
  }
}

struct AttentionShape {
  Index rows;
  Index seq;
  Index heads;
  Index head_dim;
  Index d_model;
};

// probs holds one [seq x seq] causal softmax per (row, head), stacked.
template <typename T>
void attention_forward(const RowMat<T>& qkv, const AttentionShape& s, RowMat<T>& probs, RowMat<T>& att) {
  const T scale = T(1) / std::sqrt(T(s.head_dim));
  probs.setZero(s.rows * s.heads * s.seq, s.seq);
  att.resize(s.rows * s.seq, s.d_model);
  RowMat<T> scores(s.seq, s.seq);
  for (Index r = 0; r < s.rows; ++r) {
    for (Index h = 0; h < s.heads; ++h) {
      const auto q = qkv.block(r * s.seq, h * s.head_dim, s.seq, s.head_dim);
      const auto k = qkv.block(r * s.seq, s.d_model + h * s.head_dim, s.seq, s.head_dim);
      const auto v = qkv.block(r * s.seq, 2 * s.d_model + h * s.head_dim, s.seq, s.head_dim);
      auto p = probs.block((r * s.heads + h) * s.seq, 0, s.seq, s.seq);
      scores.noalias() = q * k.transpose();
      for (Index i = 0; i < s.seq; ++i) {
        T max_score = scores(i, 0) * scale;
        for (Index j = 1; j <= i; ++j) max_score = std::max(max_score, scores(i, j) * scale);
        T denom = 0;
        for (Index j = 0; j <= i; ++j) {
          const T e = std::exp(scores(i, j) * scale - max_score);
          p(i, j) = e;
          denom += e;
        }
        for (Index j = 0; j <= i; ++j) p(i, j) /= denom;
      }
      att.block(r * s.seq, h * s.head_dim, s.seq, s.head_dim).noalias() = p * v;
    }
  }
}

template <typename T>
void attention_backward(const RowMat<T>& qkv, const RowMat<T>& probs, const RowMat<T>& datt, const AttentionShape& s,
                        RowMat<T>& dqkv) {
  const T scale = T(1) / std::sqrt(T(s.head_dim));
  dqkv.resize(s.rows * s.seq, 3 * s.d_model);
  RowMat<T> dp(s.seq, s.seq);
  for (Index r = 0; r < s.rows; ++r) {
    for (Index h = 0; h < s.heads; ++h) {
      const auto q = qkv.block(r * s.seq, h * s.head_dim, s.seq, s.head_dim);
      const auto k = qkv.block(r * s.seq, s.d_model + h * s.head_dim, s.seq, s.head_dim);
      const auto v = qkv.block(r * s.seq, 2 * s.d_model + h * s.head_dim, s.seq, s.head_dim);
      const auto p = probs.block((r * s.heads + h) * s.seq, 0, s.seq, s.seq);
      const auto dout = datt.block(r * s.seq, h * s.head_dim, s.seq, s.head_dim);

      dp.noalias() = dout * v.transpose();
      dqkv.block(r * s.seq, 2 * s.d_model + h * s.head_dim, s.seq, s.head_dim).noalias() = p.transpose() * dout;
      // softmax backward, restricted to the causal triangle
      for (Index i = 0; i < s.seq; ++i) {
        T dot = 0;
        for (Index j = 0; j <= i; ++j) dot += p(i, j) * dp(i, j);
        for (Index j = 0; j <= i; ++j) dp(i, j) = p(i, j) * (dp(i, j) - dot) * scale;
        for (Index j = i + 1; j < s.seq; ++j) dp(i, j) = 0;
      }
      dqkv.block(r * s.seq, h * s.head_dim, s.seq, s.head_dim).noalias() = dp * k;
      dqkv.block(r * s.seq, s.d_model + h * s.head_dim, s.seq, s.head_dim).noalias() = dp.transpose() * q;
    }
  }
}

// Mean cross entropy; overwrites logits with dLoss/dlogits when want_grad.
template <typename T>
T cross_entropy(RowMat<T>& logits, const std::vector<std::int32_t>& targets, bool want_grad) {
  const Index n = logits.rows();
  const Index v = logits.cols();
  const T inv_n = T(1) / T(n);
  long double total = 0;
  for (Index i = 0; i < n; ++i) {
    T max_logit = logits(i, 0);
    for (Index j = 1; j < v; ++j) max_logit = std::max(max_logit, logits(i, j));
    T sum = 0;
    for (Index j = 0; j < v; ++j) sum += std::exp(logits(i, j) - max_logit);
    const Index target = targets[static_cast<std::size_t>(i)];
    total += static_cast<long double>(max_logit + std::log(sum) - logits(i, target));
    if (want_grad) {
      for (Index j = 0; j < v; ++j) logits(i, j) = std::exp(logits(i, j) - max_logit) / sum * inv_n;
      logits(i, target) -= inv_n;
    }
  }
  return static_cast<T>(total / static_cast<long double>(n));
}

template <typename T>
struct BlockCache {
  LayerNormCache<T> ln1;
  RowMat<T> normed1;
  RowMat<T> qkv;
  RowMat<T> probs;
  RowMat<T> att;
  LayerNormCache<T> ln2;
  RowMat<T> normed2;
  RowMat<T> pre_act;
  RowMat<T> act;
};

template <typename T>
T transformer_loss(const Views<T>& w, const NetworkLayout& layout, const ModelConfig& config, const TokenBatch& batch,
                   bool want_grad) {
  const Index d = config.d_model;
  const Index vocab = config.vocab_size;
  const AttentionShape shape{batch.rows, batch.seq_len, config.n_heads, d / config.n_heads, d};
  const Index n = shape.rows * shape.seq;

  const auto tok_emb = w.mat(layout.tok_emb, vocab, d);
  const auto pos_emb = w.mat(layout.pos_emb, config.seq_len, d);

  RowMat<T> x(n, d);
  for (Index i = 0; i < n; ++i) {
    x.row(i) = tok_emb.row(batch.inputs[static_cast<std::size_t>(i)]) + pos_emb.row(i % shape.seq);
  }

  std::vector<BlockCache<T>> caches(layout.blocks.size());
  for (std::size_t l = 0; l < layout.blocks.size(); ++l) {
    const auto& o = layout.blocks[l];
    auto& c = caches[l];
    layer_norm_forward(x, w.p + o.ln1_gain, w.p + o.ln1_bias, c.ln1, c.normed1);
    c.qkv.noalias() = c.normed1 * w.mat(o.qkv_weight, d, 3 * d);
    c.qkv.rowwise() += w.vec(o.qkv_bias, 3 * d);
    attention_forward(c.qkv, shape, c.probs, c.att);
    x.noalias() += c.att * w.mat(o.attn_proj_weight, d, d);
    x.rowwise() += w.vec(o.attn_proj_bias, d);

    layer_norm_forward(x, w.p + o.ln2_gain, w.p + o.ln2_bias, c.ln2, c.normed2);
    c.pre_act.noalias() = c.normed2 * w.mat(o.fc_weight, d, 4 * d);
    c.pre_act.rowwise() += w.vec(o.fc_bias, 4 * d);
    c.act = c.pre_act.unaryExpr([](T u) { return gelu(u); });
    x.noalias() += c.act * w.mat(o.mlp_proj_weight, 4 * d, d);
    x.rowwise() += w.vec(o.mlp_proj_bias, d);
  }

  LayerNormCache<T> lnf;
  RowMat<T> final_normed;
  layer_norm_forward(x, w.p + layout.lnf_gain, w.p + layout.lnf_bias, lnf, final_normed);

  RowMat<T> logits;
  if (config.tie_embeddings) {
    logits.noalias() = final_normed * tok_emb.transpose();
  } else {
    logits.noalias() = final_normed * w.mat(layout.lm_head, d, vocab);
  }
  const T loss = cross_entropy(logits, batch.targets, want_grad);
  if (!want_grad) return loss;

  const RowMat<T>& dlogits = logits;
  auto dtok_emb = w.dmat(layout.tok_emb, vocab, d);
  RowMat<T> dfinal;
  if (config.tie_embeddings) {
    dtok_emb.noalias() += dlogits.transpose() * final_normed;
    dfinal.noalias() = dlogits * tok_emb;
  } else {
    w.dmat(layout.lm_head, d, vocab).noalias() += final_normed.transpose() * dlogits;
    dfinal.noalias() = dlogits * w.mat(layout.lm_head, d, vocab).transpose();
  }

  RowMat<T> dx = RowMat<T>::Zero(n, d);
  layer_norm_backward(dfinal, w.p + layout.lnf_gain, lnf, dx, w.g + layout.lnf_gain, w.g + layout.lnf_bias);

  RowMat<T> dact, dnormed, datt, dqkv;
  for (std::size_t l = layout.blocks.size(); l-- > 0;) {
    const auto& o = layout.blocks[l];
    const auto& c = caches[l];

    w.dmat(o.mlp_proj_weight, 4 * d, d).noalias() += c.act.transpose() * dx;
    add_column_sums(dx, w.g + o.mlp_proj_bias);
    dact.noalias() = dx * w.mat(o.mlp_proj_weight, 4 * d, d).transpose();
    for (Index i = 0; i < dact.rows(); ++i) {
      for (Index j = 0; j < dact.cols(); ++j) dact(i, j) *= gelu_derivative(c.pre_act(i, j));
    }
    w.dmat(o.fc_weight, d, 4 * d).noalias() += c.normed2.transpose() * dact;
    add_column_sums(dact, w.g + o.fc_bias);
    dnormed.noalias() = dact * w.mat(o.fc_weight, d, 4 * d).transpose();
    layer_norm_backward(dnormed, w.p + o.ln2_gain, c.ln2, dx, w.g + o.ln2_gain, w.g + o.ln2_bias);

    w.dmat(o.attn_proj_weight, d, d).noalias() += c.att.transpose() * dx;
    add_column_sums(dx, w.g + o.attn_proj_bias);
    datt.noalias() = dx * w.mat(o.attn_proj_weight, d, d).transpose();
    attention_backward(c.qkv, c.probs, datt, shape, dqkv);
    w.dmat(o.qkv_weight, d, 3 * d).noalias() += c.normed1.transpose() * dqkv;
    add_column_sums(dqkv, w.g + o.qkv_bias);
    dnormed.noalias() = dqkv * w.mat(o.qkv_weight, d, 3 * d).transpose();
    layer_norm_backward(dnormed, w.p + o.ln1_gain, c.ln1, dx, w.g + o.ln1_gain, w.g + o.ln1_bias);
  }

  auto dpos_emb = w.dmat(layout.pos_emb, config.seq_len, d);
  for (Index i = 0; i < n; ++i) {
    dtok_emb.row(batch.inputs[static_cast<std::size_t>(i)]) += dx.row(i);
    dpos_emb.row(i % shape.seq) += dx.row(i);
  }
  return loss;
}

template <typename T>
T mlp_loss(const Views<T>& w, const NetworkLayout& layout, const ModelConfig& config, const TokenBatch& batch,
           bool want_grad) {
  const Index d = config.d_model;
  const Index vocab = config.vocab_size;
  const Index n = batch.token_count();
  const auto tok_emb = w.mat(layout.tok_emb, vocab, d);

  // activations[l] feeds hidden layer l; pre_acts[l] is its affine output.
  std::vector<RowMat<T>> activations(layout.hidden.size() + 1);
  std::vector<RowMat<T>> pre_acts(layout.hidden.size());
  activations[0].resize(n, d);
  for (Index i = 0; i < n; ++i) activations[0].row(i) = tok_emb.row(batch.inputs[static_cast<std::size_t>(i)]);
  for (std::size_t l = 0; l < layout.hidden.size(); ++l) {
    pre_acts[l].noalias() = activations[l] * w.mat(layout.hidden[l].weight, d, d);
    pre_acts[l].rowwise() += w.vec(layout.hidden[l].bias, d);
    activations[l + 1] = pre_acts[l].unaryExpr([](T u) { return gelu(u); });
  }

  const RowMat<T>& top = activations.back();
  RowMat<T> logits;
  if (config.tie_embeddings) {
    logits.noalias() = top * tok_emb.transpose();
  } else {
    logits.noalias() = top * w.mat(layout.lm_head, d, vocab);
  }
  const T loss = cross_entropy(logits, batch.targets, want_grad);
  if (!want_grad) return loss;

  auto dtok_emb = w.dmat(layout.tok_emb, vocab, d);
  RowMat<T> dh;
  if (config.tie_embeddings) {
    dtok_emb.noalias() += logits.transpose() * top;
    dh.noalias() = logits * tok_emb;
  } else {
    w.dmat(layout.lm_head, d, vocab).noalias() += top.transpose() * logits;
    dh.noalias() = logits * w.mat(layout.lm_head, d, vocab).transpose();
  }
  for (std::size_t l = layout.hidden.size(); l-- > 0;) {
    for (Index i = 0; i < dh.rows(); ++i) {
      for (Index j = 0; j < d; ++j) dh(i, j) *= gelu_derivative(pre_acts[l](i, j));
    }
    w.dmat(layout.hidden[l].weight, d, d).noalias() += activations[l].transpose() * dh;
    add_column_sums(dh, w.g + layout.hidden[l].bias);
    RowMat<T> next = dh * w.mat(layout.hidden[l].weight, d, d).transpose();
    dh.swap(next);
  }
  for (Index i = 0; i < n; ++i) dtok_emb.row(batch.inputs[static_cast<std::size_t>(i)]) += dh.row(i);
  return loss;
}

class LayoutBuilder {
 public:
  std::size_t add(std::string name, std::size_t length, bool is_embedding = false) {
    const std::size_t offset = next_;
    segments_.push_back({std::move(name), offset, length, is_embedding});
    next_ += length;
    return offset;
  }
  std::vector<Segment> take() { return std::move(segments_); }

 private:
  std::vector<Segment> segments_;
  std::size_t next_ = 0;
};

}  // namespace

NetworkLayout make_network_layout(const ModelConfig& config) {
  config.validate();
  const auto d = static_cast<std::size_t>(config.d_model);
  const auto vocab = static_cast<std::size_t>(config.vocab_size);
  NetworkLayout out;
  LayoutBuilder b;
  out.tok_emb = b.add("tok_emb", vocab * d, true);
  if (config.arch == Architecture::transformer) {
    out.pos_emb = b.add("pos_emb", static_cast<std::size_t>(config.seq_len) * d, true);
    for (int l = 0; l < config.n_layers; ++l) {
      const std::string p = "h" + std::to_string(l) + ".";
      BlockOffsets o{};
      o.ln1_gain = b.add(p + "ln1.gain", d);
      o.ln1_bias = b.add(p + "ln1.bias", d);
      o.qkv_weight = b.add(p + "attn.qkv.weight", d * 3 * d);
      o.qkv_bias = b.add(p + "attn.qkv.bias", 3 * d);
      o.attn_proj_weight = b.add(p + "attn.proj.weight", d * d);
      o.attn_proj_bias = b.add(p + "attn.proj.bias", d);
      o.ln2_gain = b.add(p + "ln2.gain", d);
      o.ln2_bias = b.add(p + "ln2.bias", d);
      o.fc_weight = b.add(p + "mlp.fc.weight", d * 4 * d);
      o.fc_bias = b.add(p + "mlp.fc.bias", 4 * d);
      o.mlp_proj_weight = b.add(p + "mlp.proj.weight", 4 * d * d);
      o.mlp_proj_bias = b.add(p + "mlp.proj.bias", d);
      out.blocks.push_back(o);
    }
    out.lnf_gain = b.add("lnf.gain", d);
    out.lnf_bias = b.add("lnf.bias", d);
  } else {
    for (int l = 0; l < config.n_layers; ++l) {
      const std::string p = "h" + std::to_string(l) + ".";
      HiddenOffsets o{};
      o.weight = b.add(p + "fc.weight", d * d);
      o.bias = b.add(p + "fc.bias", d);
      out.hidden.push_back(o);
    }
  }
  if (!config.tie_embeddings) out.lm_head = b.add("lm_head.weight", d * vocab, true);
  out.segments = b.take();
  return out;
}

template <typename T>
T network_loss(std::span<const T> params, const NetworkLayout& layout, const ModelConfig& config,
               const TokenBatch& batch, std::span<T> grad) {
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), T(0));
  const Views<T> views{params.data(), want_grad ? grad.data() : nullptr};
  if (config.arch == Architecture::transformer) return transformer_loss(views, layout, config, batch, want_grad);
  return mlp_loss(views, layout, config, batch, want_grad);
}

template double network_loss<double>(std::span<const double>, const NetworkLayout&, const ModelConfig&,
                                     const TokenBatch&, std::span<double>);
template long double network_loss<long double>(std::span<const long double>, const NetworkLayout&,
                                               const ModelConfig&, const TokenBatch&, std::span<long double>);

}  // namespace lsgd::model::detail
