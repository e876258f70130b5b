#include "geoptr/model/network.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "geoptr/error.hpp"
#include "geoptr/model/masking.hpp"
#include "geoptr/nn/ops.hpp"

namespace geoptr::model {

using nn::Tensor;

namespace {

struct AttentionCache {
  Tensor q, k, v;
  std::vector<Tensor> probs;  // per instance, m x m
};

// Self-attention applied independently to consecutive blocks of m rows.
Tensor attend_blocks(const Tensor& E, std::size_t B, std::size_t m, const ModelParams& p,
                     AttentionCache* cache) {
  Tensor q = E * p.att_q.value;
  Tensor k = E * p.att_k.value;
  Tensor v = E * p.att_v.value;
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  const auto M = static_cast<Eigen::Index>(m);
  Tensor out = E;
  if (cache) cache->probs.resize(B);
  for (std::size_t b = 0; b < B; ++b) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(b) * M;
    Tensor a = nn::softmax_stable((q.middleRows(r0, M) * k.middleRows(r0, M).transpose()) * scale);
    out.middleRows(r0, M).noalias() += a * v.middleRows(r0, M);
    if (cache) cache->probs[b] = std::move(a);
  }
  if (cache) {
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
  }
  return out;
}

Tensor attend_blocks_backward(const Tensor& E, std::size_t B, std::size_t m, ModelParams& p,
                              const AttentionCache& c, const Tensor& dout) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(c.q.cols()));
  const auto M = static_cast<Eigen::Index>(m);
  Tensor dq(c.q.rows(), c.q.cols());
  Tensor dk(c.k.rows(), c.k.cols());
  Tensor dv(c.v.rows(), c.v.cols());
  for (std::size_t b = 0; b < B; ++b) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(b) * M;
    const Tensor& a = c.probs[b];
    const auto dob = dout.middleRows(r0, M);
    dv.middleRows(r0, M).noalias() = a.transpose() * dob;
    const Tensor da = dob * c.v.middleRows(r0, M).transpose();
    const Eigen::ArrayXd weighted = (da.array() * a.array()).rowwise().sum();
    const Tensor ds = (a.array() * (da.array().colwise() - weighted)) * scale;
    dq.middleRows(r0, M).noalias() = ds * c.k.middleRows(r0, M);
    dk.middleRows(r0, M).noalias() = ds.transpose() * c.q.middleRows(r0, M);
  }
  p.att_q.grad.noalias() += E.transpose() * dq;
  p.att_k.grad.noalias() += E.transpose() * dk;
  p.att_v.grad.noalias() += E.transpose() * dv;
  Tensor dE = dout;
  dE.noalias() += dq * p.att_q.value.transpose();
  dE.noalias() += dk * p.att_k.value.transpose();
  dE.noalias() += dv * p.att_v.value.transpose();
  return dE;
}

struct EncoderCache {
  std::vector<Tensor> coords;  // per step, B x 2
  std::vector<nn::LstmCache> lstm;
  Tensor raw;  // (B * m) x H, instance-major
  AttentionCache attention;
};

struct BatchEncoding {
  Tensor memory;  // (B * (m + 1)) x H
  Tensor projected;
  nn::LstmState final_state;
};

Tensor raw_states(const std::vector<const PointSet*>& points, const ModelParams& p,
                  nn::LstmState& state, EncoderCache* cache) {
  const std::size_t B = points.size();
  const std::size_t m = points.front()->size();
  const Eigen::Index H = p.encoder.recurrent.value.rows();
  state = nn::LstmState::zeros(B, static_cast<std::size_t>(H));
  Tensor raw(static_cast<Eigen::Index>(B * m), H);
  if (cache) {
    cache->coords.resize(m);
    cache->lstm.resize(m);
  }
  for (std::size_t t = 0; t < m; ++t) {
    Tensor coords(static_cast<Eigen::Index>(B), 2);
    for (std::size_t b = 0; b < B; ++b) {
      coords(static_cast<Eigen::Index>(b), 0) = (*points[b])[t].x;
      coords(static_cast<Eigen::Index>(b), 1) = (*points[b])[t].y;
    }
    const Tensor x = nn::linear(coords, p.embed_w, p.embed_b);
    state = nn::lstm_step(p.encoder, x, state, cache ? &cache->lstm[t] : nullptr);
    for (std::size_t b = 0; b < B; ++b) {
      raw.row(static_cast<Eigen::Index>(b * m + t)) = state.h.row(static_cast<Eigen::Index>(b));
    }
    if (cache) cache->coords[t] = std::move(coords);
  }
  return raw;
}

BatchEncoding encode_batch(const std::vector<const PointSet*>& points, const ModelParams& p,
                           const ModelConfig& config, EncoderCache* cache) {
  const std::size_t B = points.size();
  const std::size_t m = points.front()->size();
  const auto M = static_cast<Eigen::Index>(m);
  const auto S = M + 1;
  BatchEncoding enc;
  Tensor raw = raw_states(points, p, enc.final_state, cache);
  const Tensor context = config.self_attention
                             ? attend_blocks(raw, B, m, p, cache ? &cache->attention : nullptr)
                             : raw;
  enc.memory.resize(static_cast<Eigen::Index>(B) * S, raw.cols());
  for (std::size_t b = 0; b < B; ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    enc.memory.middleRows(bi * S, M) = context.middleRows(bi * M, M);
    enc.memory.row(bi * S + M) = p.end_embedding.value.row(0);
  }
  enc.projected = enc.memory * p.ptr_w1.value;
  if (cache) cache->raw = std::move(raw);
  return enc;
}

void encode_batch_backward(std::size_t B, std::size_t m, ModelParams& p, const ModelConfig& config,
                           const EncoderCache& cache, const Tensor& dmemory, Tensor dh, Tensor dc) {
  const auto M = static_cast<Eigen::Index>(m);
  const auto S = M + 1;
  Tensor dcontext(static_cast<Eigen::Index>(B) * M, dmemory.cols());
  for (std::size_t b = 0; b < B; ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    dcontext.middleRows(bi * M, M) = dmemory.middleRows(bi * S, M);
    p.end_embedding.grad.row(0) += dmemory.row(bi * S + M);
  }
  const Tensor draw = config.self_attention
                          ? attend_blocks_backward(cache.raw, B, m, p, cache.attention, dcontext)
                          : dcontext;
  for (std::size_t t = m; t-- > 0;) {
    for (std::size_t b = 0; b < B; ++b) {
      dh.row(static_cast<Eigen::Index>(b)) += draw.row(static_cast<Eigen::Index>(b * m + t));
    }
    nn::LstmStepGrad g = nn::lstm_step_backward(p.encoder, cache.lstm[t], dh, dc);
    nn::linear_backward(cache.coords[t], p.embed_w, p.embed_b, g.dx);
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }
}

Tensor start_input(std::size_t rows, const ModelParams& p, const ModelConfig& config) {
  const Eigen::Index H = p.embed_w.value.cols();
  if (config.start_token == StartToken::Zero) return Tensor::Zero(static_cast<Eigen::Index>(rows), H);
  const Tensor e = nn::linear(p.start_token.value, p.embed_w, p.embed_b);
  return e.replicate(static_cast<Eigen::Index>(rows), 1);
}

struct StepCache {
  Tensor coords;  // B x 2 previous-token coordinates; empty on the first step
  nn::LstmCache lstm;
  Tensor h;       // decoder output
  Tensor z;       // tanh activations, (B * S) x H
  Tensor dscores; // B x S
};

}  // namespace

nn::Tensor encoder_states(const PointSet& points, const ModelParams& params) {
  nn::LstmState state;
  return raw_states({&points}, params, state, nullptr);
}

EncoderOutput encode(const PointSet& points, const ModelParams& params, const ModelConfig& config) {
  if (points.empty()) throw Error(ErrorCode::ShapeMismatch, "encode needs at least one point");
  BatchEncoding b = encode_batch({&points}, params, config, nullptr);
  return {std::move(b.memory), std::move(b.projected), std::move(b.final_state)};
}

nn::Tensor self_attend(const nn::Tensor& E, const ModelParams& params) {
  return attend_blocks(E, 1, static_cast<std::size_t>(E.rows()), params, nullptr);
}

nn::Tensor pointer_scores(const nn::Tensor& h, const EncoderOutput& enc,
                          const ModelParams& params) {
  if (h.cols() != params.ptr_w2.value.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "pointer_scores: hidden size mismatch");
  }
  const Tensor q = h * params.ptr_w2.value;
  Tensor out(h.rows(), enc.projected.rows());
  Tensor z(enc.projected.rows(), enc.projected.cols());
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    z = enc.projected.rowwise() + q.row(r);
    nn::tanh_inplace(z);
    out.row(r).noalias() = params.ptr_v.value * z.transpose();
  }
  return out;
}

nn::Tensor decoder_input(const PointSet& points, std::optional<std::size_t> previous,
                         const ModelParams& params, const ModelConfig& config) {
  if (!previous) return start_input(1, params, config);
  if (*previous >= points.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "decoder input index out of range");
  }
  Tensor coords(1, 2);
  coords << points[*previous].x, points[*previous].y;
  return nn::linear(coords, params.embed_w, params.embed_b);
}

double forward_loss(std::span<const Instance* const> batch, ModelParams& params,
                    const ModelConfig& config, bool with_grad) {
  if (batch.empty()) throw Error(ErrorCode::ShapeMismatch, "empty batch");
  const std::size_t B = batch.size();
  const std::size_t m = batch.front()->points.size();
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "instances need points");
  std::vector<const PointSet*> points;
  std::vector<std::vector<std::size_t>> bodies;
  std::size_t steps = 0;
  for (const Instance* inst : batch) {
    if (inst->points.size() != m) {
      throw Error(ErrorCode::ShapeMismatch, "batch mixes point counts");
    }
    if (inst->task != config.task) throw Error(ErrorCode::ShapeMismatch, "batch task mismatch");
    points.push_back(&inst->points);
    bodies.push_back(inst->label.body());
    for (std::size_t i : bodies.back()) {
      if (i >= m) throw Error(ErrorCode::IndexOutOfRange, "label index out of range");
    }
    steps = std::max(steps, bodies.back().size() + 1);
  }

  const auto Bi = static_cast<Eigen::Index>(B);
  const auto S = static_cast<Eigen::Index>(m + 1);
  EncoderCache enc_cache;
  const BatchEncoding enc = encode_batch(points, params, config, with_grad ? &enc_cache : nullptr);

  std::vector<DecodeState> states(B, DecodeState(config.task, m));
  std::vector<StepCache> caches(with_grad ? steps : 0);
  nn::LstmState state = enc.final_state;
  Tensor z(enc.projected.rows(), enc.projected.cols());
  double total = 0.0;

  for (std::size_t s = 0; s < steps; ++s) {
    Tensor x;
    Tensor coords;
    if (s == 0) {
      x = start_input(B, params, config);
    } else {
      coords = Tensor::Zero(Bi, 2);
      for (std::size_t b = 0; b < B; ++b) {
        if (s - 1 < bodies[b].size()) {
          const Point& pt = points[b]->at(bodies[b][s - 1]);
          coords(static_cast<Eigen::Index>(b), 0) = pt.x;
          coords(static_cast<Eigen::Index>(b), 1) = pt.y;
        }
      }
      x = nn::linear(coords, params.embed_w, params.embed_b);
    }
    nn::LstmCache* lc = with_grad ? &caches[s].lstm : nullptr;
    state = nn::lstm_step(params.decoder, x, state, lc);

    const Tensor q = state.h * params.ptr_w2.value;
    z = enc.projected;
    for (Eigen::Index b = 0; b < Bi; ++b) z.middleRows(b * S, S).rowwise() += q.row(b);
    nn::tanh_inplace(z);
    const Tensor u = z * params.ptr_v.value.transpose();  // (B * S) x 1
    Tensor dscores = Tensor::Zero(Bi, S);

    for (std::size_t b = 0; b < B; ++b) {
      const std::vector<std::size_t>& body = bodies[b];
      if (s > body.size()) continue;
      const std::size_t target = s < body.size() ? body[s] : m;
      const auto bi = static_cast<Eigen::Index>(b);
      Tensor row = u.middleRows(bi * S, S).transpose();
      if (config.mask_enabled) {
        const SlotMask mask = compute_mask(states[b], *points[b]);
        const bool blocked = target == m ? mask.end_blocked : mask.blocked[target] != 0;
        if (blocked) {
          throw Error(ErrorCode::LabelMasked, "label token " + std::to_string(target) +
                                                  " is masked at step " + std::to_string(s + 1));
        }
        apply_mask(mask, std::span<double>(row.data(), static_cast<std::size_t>(S)));
      }
      const nn::CrossEntropy ce = nn::cross_entropy(nn::log_softmax(row), target);
      total += ce.loss;
      dscores.row(bi) = ce.grad / static_cast<double>(B);
      if (target < m) states[b].push(target);
    }

    if (with_grad) {
      caches[s].coords = std::move(coords);
      caches[s].h = state.h;
      caches[s].z = z;
      caches[s].dscores = std::move(dscores);
    }
  }
  const double loss = total / static_cast<double>(B);
  if (!with_grad) return loss;

  const Eigen::Index H = enc.projected.cols();
  Tensor dprojected = Tensor::Zero(enc.projected.rows(), H);
  Tensor dh = Tensor::Zero(Bi, H);
  Tensor dc = Tensor::Zero(Bi, H);
  Tensor dq(Bi, H);
  for (std::size_t s = steps; s-- > 0;) {
    StepCache& c = caches[s];
    const Eigen::Map<const Tensor> du(c.dscores.data(), Bi * S, 1);
    params.ptr_v.grad.noalias() += du.transpose() * c.z;
    Tensor dpre = du * params.ptr_v.value;
    dpre.array() *= 1.0 - c.z.array().square();
    dprojected += dpre;
    for (Eigen::Index b = 0; b < Bi; ++b) dq.row(b) = dpre.middleRows(b * S, S).colwise().sum();
    params.ptr_w2.grad.noalias() += c.h.transpose() * dq;
    dh.noalias() += dq * params.ptr_w2.value.transpose();

    nn::LstmStepGrad g = nn::lstm_step_backward(params.decoder, c.lstm, dh, dc);
    if (s > 0) {
      nn::linear_backward(c.coords, params.embed_w, params.embed_b, g.dx);
    } else if (config.start_token == StartToken::Learned) {
      const Tensor dx = g.dx.colwise().sum();
      params.embed_w.grad.noalias() += params.start_token.value.transpose() * dx;
      params.embed_b.grad += dx;
      params.start_token.grad.noalias() += dx * params.embed_w.value.transpose();
    }
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }

  params.ptr_w1.grad.noalias() += enc.memory.transpose() * dprojected;
  const Tensor dmemory = dprojected * params.ptr_w1.value.transpose();
  encode_batch_backward(B, m, params, config, enc_cache, dmemory, std::move(dh), std::move(dc));
  return loss;
}

double forward_loss(std::span<const Instance> batch, ModelParams& params,
                    const ModelConfig& config, bool with_grad) {
  std::vector<const Instance*> ptrs;
  ptrs.reserve(batch.size());
  for (const Instance& inst : batch) ptrs.push_back(&inst);
  return forward_loss(std::span<const Instance* const>(ptrs), params, config, with_grad);
}

double train_step(std::span<const Instance* const> batch, ModelParams& params,
                  nn::AdamState& adam, const ModelConfig& config) {
  const nn::ParameterList list = params.list();
  nn::zero_grads(list);
  const double loss = forward_loss(batch, params, config, true);
  adam_step(adam, list);
  return loss;
}

}  // namespace geoptr::model
