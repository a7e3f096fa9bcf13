#include "hope/memory.hpp"

#include <algorithm>
#include <cmath>

namespace hope {

double surprise(const Vector& predicted, const Vector& observed) {
  if (predicted.size() != observed.size()) {
    throw Error("surprise: length mismatch");
  }
  return (predicted - observed).squaredNorm();
}

double reliability(double noise_level) {
  if (!(noise_level >= 0.0)) {
    throw Error("noise level must be nonnegative");
  }
  return 1.0 - sigmoid(noise_level);
}

double gate(double s_t, double r_t, const GateParams& params) {
  const double pre = params.w_s * s_t + params.w_r * r_t + params.b;
  if (!std::isfinite(pre)) {
    throw Error("gate: non-finite input");
  }
  return sigmoid(pre);
}

LtmState::LtmState(int key_dim, int value_dim, double norm_cap)
    : w_(Matrix::Zero(value_dim, key_dim)), cap_(norm_cap) {
  if (key_dim < 1 || value_dim < 1) {
    throw Error("LTM dimensions must be positive");
  }
  if (!(norm_cap > 0.0)) {
    throw Error("LTM norm cap must be positive");
  }
}

void LtmState::write(const Vector& key, const Vector& value, double g) {
  if (key.size() != w_.cols() || value.size() != w_.rows()) {
    throw Error("LTM write: key/value shape mismatch");
  }
  if (!(g >= 0.0 && g <= 1.0)) {
    throw Error("LTM write: gate must lie in [0, 1]");
  }
  const double kk = key.squaredNorm();
  if (!(kk > 0.0)) {
    throw Error("degenerate key");
  }
  if (!key.allFinite() || !value.allFinite()) {
    throw Error("LTM write: non-finite key or value");
  }
  if (g == 0.0) {
    return;
  }
  const Vector residual = value - w_ * key;
  Matrix next = w_;
  next.noalias() += (g / kk) * residual * key.transpose();
  if (!(next.norm() <= cap_)) {
    throw Error("LTM weight norm exceeds its cap");
  }
  w_ = std::move(next);
}

Vector LtmState::read(const Vector& key) const {
  if (key.size() != w_.cols()) {
    throw Error("LTM read: key shape mismatch");
  }
  return w_ * key;
}

LtmState ltm_write(LtmState ltm, const Vector& key, const Vector& value,
                   double g) {
  ltm.write(key, value, g);
  return ltm;
}

Vector ltm_read(const LtmState& ltm, const Vector& key) { return ltm.read(key); }

StmBuffer::StmBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) {
    throw Error("STM capacity must be positive");
  }
}

void StmBuffer::push_frame(std::vector<StmEntry> frame) {
  frames_.push_back(std::move(frame));
  while (frames_.size() > capacity_) {
    frames_.pop_front();
  }
}

bool StmBuffer::empty() const {
  return std::all_of(frames_.begin(), frames_.end(),
                     [](const auto& f) { return f.empty(); });
}

std::vector<const StmEntry*> StmBuffer::entries() const {
  std::vector<const StmEntry*> out;
  for (const auto& frame : frames_) {
    for (const auto& e : frame) {
      out.push_back(&e);
    }
  }
  return out;
}

StmRetrieval stm_cross_attend(const Vector& query, const StmBuffer& buffer,
                              double temperature) {
  if (!(temperature > 0.0)) {
    throw Error("attention temperature must be positive");
  }
  StmRetrieval out;
  out.entries = buffer.entries();
  if (out.entries.empty()) {
    throw Error("cold start");
  }
  const double scale =
      1.0 / (std::sqrt(static_cast<double>(query.size())) * temperature);
  std::vector<double> logits(out.entries.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const Vector& f = out.entries[i]->feature;
    if (f.size() != query.size()) {
      throw Error("STM feature length mismatch");
    }
    logits[i] = scale * query.dot(f);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  out.weights.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.weights[i] = std::exp(logits[i] - top);
    z += out.weights[i];
  }
  out.retrieved = Vector::Zero(query.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.weights[i] /= z;
    out.retrieved += out.weights[i] * out.entries[i]->feature;
  }
  return out;
}

}  // namespace hope
