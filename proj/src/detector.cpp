#include "rcache/detector.hpp"

namespace rcache {

Detector::Detector(uint32_t sets, const DetectorConfig& cfg)
    : cfg_(cfg),
      evictions_(Eigen::ArrayXd::Zero(sets)),
      az_(Eigen::ArrayXd::Zero(sets)),
      wz_(Eigen::ArrayXd::Zero(sets)) {
  cfg_.validate();
}

std::optional<WindowReport> Detector::record_access() {
  if (++accesses_in_window_ < cfg_.sample_period) return std::nullopt;
  return end_window();
}

WindowReport Detector::end_window() {
  wz_ = weighted_zscore(evictions_);
  ema_update(az_, wz_, cfg_.alpha);

  WindowReport r;
  r.window = windows_++;
  Eigen::Index arg = 0;
  r.max_az = az_.maxCoeff(&arg);
  r.argmax = static_cast<uint32_t>(arg);
  r.fired = r.max_az >= cfg_.threshold;

  if (dump_) dump_(WindowDump{r.window, evictions_, wz_, az_});
  evictions_.setZero();
  accesses_in_window_ = 0;
  return r;
}

void Detector::reset() {
  evictions_.setZero();
  az_.setZero();
  wz_.setZero();
  accesses_in_window_ = 0;
}

}  // namespace rcache
