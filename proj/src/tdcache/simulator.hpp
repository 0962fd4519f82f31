#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "tdcache/allocator.hpp"
#include "tdcache/numeric.hpp"
#include "tdcache/policy.hpp"
#include "tdcache/rdi.hpp"

namespace tdcache {

struct ArrivalProcess {
  enum class Kind { poisson, deterministic, hyperexponential };

  Kind kind = Kind::poisson;
  double rate = 10.0;
  // Hyperexponential phases: weight and rate of each exponential branch.
  double w1 = 0.0, mu1 = 0.0, w2 = 0.0, mu2 = 0.0;

  static ArrivalProcess poisson(double rate);
  static ArrivalProcess deterministic(double rate);
  static ArrivalProcess hyperexponential(double w1, double mu1, double w2, double mu2);
  // Hyperexponential with phase rates rate/2 and 2*rate, weights 1/3 and 2/3: c2 = 2.
  static ArrivalProcess bursty(double rate);

  void validate() const;
  double mean_rate() const;
  double nominal_c2() const;
  double next_gap(Rng& rng) const;
  const char* name() const;
};

struct SimClass {
  double weight;
  std::shared_ptr<const Rdi> rdi;
  CachePolicy policy;
};

std::vector<SimClass> sim_classes(const Flow& flow, std::span<const CachePolicy> policies);

struct SimConfig {
  std::vector<SimClass> classes;
  ArrivalProcess arrivals;
  std::optional<std::size_t> buffer;  // empty: unlimited
  std::size_t n_arrivals = 1'000'000;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.1;
  std::size_t batches = 32;
  double bits_per_item = 1000.0;
  bool record_caching_times = false;

  void validate() const;
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct SimReport {
  Estimate hit_ratio;
  Estimate blocking;
  Estimate occupancy;     // mean items in the buffer, time-weighted
  Estimate caching_time;  // mean realized caching time of admitted items
  Estimate throughput;    // bits per second read from the buffer
  double empirical_c2 = 0.0;
  double measured_rate = 0.0;
  std::size_t measured_arrivals = 0;
  double duration = 0.0;
  // Some item was kept forever (never requested and no deadline); occupancy is
  // then censored at the run length.
  bool censored = false;
  bool recorded = false;
  std::vector<double> caching_times;
};

// Stateful event loop; policies may be swapped between calls.
class Simulator {
 public:
  Simulator(std::vector<SimClass> classes, ArrivalProcess arrivals,
            std::optional<std::size_t> buffer, std::uint64_t seed, double bits_per_item = 1000.0);

  void set_policies(std::span<const CachePolicy> policies);
  // Processes n arrivals without collecting statistics.
  void skip(std::size_t n);
  // Processes n arrivals and reports statistics from batch means.
  SimReport measure(std::size_t n, std::size_t batches, bool record = false);

  double now() const { return now_; }

 private:
  struct Batch {
    std::size_t arrivals = 0, blocked = 0, admitted = 0, hits = 0;
    double caching_time = 0.0;
    double occupancy_area = 0.0;
    double duration = 0.0;
    double gap_sum = 0.0, gap_sq_sum = 0.0;
  };
  void step(Batch* batch, std::vector<double>* record);

  struct Event {
    double time;
    std::uint64_t seq;
    bool operator>(const Event& o) const {
      return time > o.time || (time == o.time && seq > o.seq);
    }
  };

  std::vector<SimClass> classes_;
  std::vector<double> class_cdf_;
  ArrivalProcess arrivals_;
  std::optional<std::size_t> buffer_;
  double bits_;
  Rng rng_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> departures_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  std::size_t in_buffer_ = 0;
  std::size_t permanent_ = 0;
  bool censored_ = false;
};

SimReport run(const SimConfig& config);
// Independent replications with seeds seed, seed+1, ...; estimates merged by
// inverse-variance weighting.
SimReport run_replications(const SimConfig& config, std::size_t replications, unsigned threads);

// Squared coefficient of variation of interarrival gaps; needs >= 1e4 samples.
double empirical_c2(std::span<const double> gaps);

// Empirical cdf of realized caching times; the run must have recorded them.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> sample);
  double operator()(double x) const;
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};
Ecdf caching_time_ecdf(const SimReport& report);

// Kolmogorov-Smirnov distance between a sample and a reference cdf.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

}  // namespace tdcache
