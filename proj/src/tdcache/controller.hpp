#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tdcache/policy.hpp"
#include "tdcache/ratecost.hpp"
#include "tdcache/simulator.hpp"

namespace tdcache {

using LocalCurves = std::span<const std::shared_ptr<const RateCostCurve>>;

struct EpochMeasurement {
  double storage = 0.0;  // bits held in the buffer, time-averaged
  double storage_stderr = 0.0;
  double throughput = 0.0;  // bits per second read from the buffer
  double throughput_stderr = 0.0;
  std::size_t arrivals = 0;
};

// What the controller can observe: it installs per-class policies and measures
// its own buffer. Arrival rate, class mix and arrival variability stay hidden.
class ControllerEnvironment {
 public:
  virtual ~ControllerEnvironment() = default;
  virtual std::size_t num_classes() const = 0;
  virtual EpochMeasurement run_epoch(std::span<const CachePolicy> policies,
                                     std::size_t window) = 0;
};

class SimulatedEnvironment final : public ControllerEnvironment {
 public:
  SimulatedEnvironment(std::vector<SimClass> classes, ArrivalProcess arrivals,
                       std::optional<std::size_t> buffer, std::uint64_t seed,
                       double bits_per_item = 1000.0, double settle_fraction = 0.1);

  std::size_t num_classes() const override { return classes_; }
  EpochMeasurement run_epoch(std::span<const CachePolicy> policies, std::size_t window) override;

 private:
  Simulator sim_;
  std::size_t classes_;
  double bits_;
  double settle_;
};

// Hit ratio a class targets at shadow price beta. A chord of slope k fills
// linearly while beta crosses [k(1 - band/2), k(1 + band/2)], which keeps the
// price response continuous for piecewise-linear envelopes.
double fill_at_price(const RateCostCurve& curve, double beta, double band);
std::vector<CachePolicy> beta_to_policy(LocalCurves curves, double beta, double band = 0.1);

struct ControllerOptions {
  double beta0 = 1.0;
  double step_fraction = 0.1;  // delta_beta as a fraction of beta
  std::size_t window = 10'000;
  std::size_t max_window = 160'000;
  std::size_t max_epochs = 50;
  double tolerance = 0.02;
  std::size_t consecutive = 2;
  double price_band = 0.1;
  double separation_z = 2.0;
  int max_doublings = 40;
  double bracket_tol = 0.01;
  std::size_t final_window = 80'000;
};

struct ControllerStep {
  std::size_t epoch;
  double beta;
  double measured;  // storage or throughput, depending on the mode
  double stderr_;
  std::size_t window;
};

struct ControllerState {
  double beta = 0.0;
  double measured = 0.0;
  double measured_stderr = 0.0;
  bool converged = false;
  std::size_t epochs = 0;
  int k_star = -1;  // finite mode: last doubling exponent before the decrease
  std::vector<ControllerStep> history;
  std::string diagnostic;
};

ControllerState run_infinite(double target_storage, LocalCurves curves,
                             ControllerEnvironment& env, const ControllerOptions& opt = {});
ControllerState run_finite(LocalCurves curves, ControllerEnvironment& env,
                           const ControllerOptions& opt = {});

}  // namespace tdcache
