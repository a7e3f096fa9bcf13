#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "hope/common.hpp"

namespace hope {

/// One detection. `id_hint` is ground truth for scoring and is never read by
/// the tracker.
struct ObservedObject {
  std::optional<std::int64_t> id_hint;
  Vector feature;
  Vec2 position = Vec2::Zero();
};

struct FrameObservation {
  double timestamp = 0.0;  // seconds
  std::vector<ObservedObject> objects;
  double noise_level = 0.0;
};

/// s_t = ||y_hat - y||^2.
double surprise(const Vector& predicted, const Vector& observed);

/// r_t = 1 - sigmoid(noise).
double reliability(double noise_level);

struct GateParams {
  double w_s = 2.0;
  double w_r = 4.0;
  double b = -2.0;
};

/// g_t = sigmoid(w_s s_t + w_r r_t + b).
double gate(double s_t, double r_t, const GateParams& params);

/// Linear associative memory read as W k.
class LtmState {
 public:
  LtmState(int key_dim, int value_dim, double norm_cap = 1e6);

  int key_dim() const { return static_cast<int>(w_.cols()); }
  int value_dim() const { return static_cast<int>(w_.rows()); }
  double norm_cap() const { return cap_; }
  const Matrix& weights() const { return w_; }

  /// Gated normalized delta rule W += g (v - W k) k^T / (k^T k).
  /// Throws "degenerate key" for a zero key and if ||W||_F would exceed the
  /// cap.
  void write(const Vector& key, const Vector& value, double g);
  Vector read(const Vector& key) const;

 private:
  Matrix w_;
  double cap_;
};

/// Value-returning forms of LtmState::write / read.
LtmState ltm_write(LtmState ltm, const Vector& key, const Vector& value,
                   double g);
Vector ltm_read(const LtmState& ltm, const Vector& key);

/// What the short-term buffer remembers about one object in one frame.
struct StmEntry {
  std::int64_t track_id = 0;
  std::int64_t frame = 0;
  double timestamp = 0.0;
  Vector feature;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

/// Sliding window over the most recent `capacity` frames; the oldest frame is
/// evicted first.
class StmBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 50;

  explicit StmBuffer(std::size_t capacity = kDefaultCapacity);

  void push_frame(std::vector<StmEntry> frame);
  std::size_t capacity() const { return capacity_; }
  std::size_t frames() const { return frames_.size(); }
  bool empty() const;
  const std::deque<std::vector<StmEntry>>& window() const { return frames_; }

  /// All entries, oldest frame first.
  std::vector<const StmEntry*> entries() const;

 private:
  std::size_t capacity_;
  std::deque<std::vector<StmEntry>> frames_;
};

struct StmRetrieval {
  Vector retrieved;
  std::vector<double> weights;            // aligned with `entries`
  std::vector<const StmEntry*> entries;   // oldest first
};

/// Softmax attention of `query` over every stored feature, logits
/// <query, f_i> / (sqrt(d_f) * temperature); keys and values are the stored
/// features. Throws "cold start" when the buffer holds no entries.
StmRetrieval stm_cross_attend(const Vector& query, const StmBuffer& buffer,
                              double temperature);

}  // namespace hope
