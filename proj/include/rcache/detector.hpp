#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

#include "rcache/config.hpp"

namespace rcache {

/// Non-centered z-score of a per-set eviction histogram:
///   z_i = e_i / sqrt(sum(e^2) / (S - 1)).
/// An all-zero histogram scores zero everywhere.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> noncentered_zscore(
    const Eigen::ArrayBase<Derived>& e) {
  using Scalar = typename Derived::Scalar;
  const Scalar sumsq = e.square().sum();
  if (sumsq == Scalar(0)) return Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(e.size());
  const Scalar scale = std::sqrt(sumsq / Scalar(e.size() - 1));
  return e / scale;
}

/// Eviction-weighted score wz_i = (e_i - mean(e)) * z_i.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> weighted_zscore(
    const Eigen::ArrayBase<Derived>& e) {
  const auto mean = e.mean();
  return (e - mean) * noncentered_zscore(e);
}

/// One-step exponential moving average, az <- (1 - alpha) az + alpha wz.
template <typename DerivedA, typename DerivedW>
void ema_update(Eigen::ArrayBase<DerivedA>& az, const Eigen::ArrayBase<DerivedW>& wz,
                typename DerivedA::Scalar alpha) {
  az.derived() = (1 - alpha) * az.derived() + alpha * wz.derived();
}

struct WindowReport {
  uint64_t window = 0;
  double max_az = 0.0;
  uint32_t argmax = 0;
  bool fired = false;
};

/// Per-set view of one closed window, for heat-map dumps.
struct WindowDump {
  uint64_t window = 0;
  const Eigen::ArrayXd& evictions;
  const Eigen::ArrayXd& wz;
  const Eigen::ArrayXd& az;
};

/// Sampling attack detector over demand evictions in the LLC.
///
/// Windows are measured in LLC accesses. At each window boundary the
/// eviction histogram is standardized, weighted and folded into the per-set
/// EMA; the window fires when any set's EMA reaches the threshold.
class Detector {
 public:
  using DumpFn = std::function<void(const WindowDump&)>;

  Detector(uint32_t sets, const DetectorConfig& cfg);

  const DetectorConfig& config() const { return cfg_; }

  void record_eviction(uint32_t set) { evictions_[set] += 1.0; }

  /// Counts one LLC access; closes the window on the sample_period-th access.
  std::optional<WindowReport> record_access();

  WindowReport end_window();

  /// Clears the histogram, the EMA and the window clock.
  void reset();

  const Eigen::ArrayXd& histogram() const { return evictions_; }
  const Eigen::ArrayXd& scores() const { return az_; }
  uint64_t accesses_in_window() const { return accesses_in_window_; }
  uint64_t windows_closed() const { return windows_; }

  void set_dump(DumpFn fn) { dump_ = std::move(fn); }

 private:
  DetectorConfig cfg_;
  Eigen::ArrayXd evictions_;
  Eigen::ArrayXd az_;
  Eigen::ArrayXd wz_;
  uint64_t accesses_in_window_ = 0;
  uint64_t windows_ = 0;
  DumpFn dump_;
};

}  // namespace rcache
