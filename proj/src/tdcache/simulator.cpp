#include "tdcache/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "tdcache/errors.hpp"

namespace tdcache {

ArrivalProcess ArrivalProcess::poisson(double rate) {
  ArrivalProcess a;
  a.kind = Kind::poisson;
  a.rate = rate;
  a.validate();
  return a;
}

ArrivalProcess ArrivalProcess::deterministic(double rate) {
  ArrivalProcess a;
  a.kind = Kind::deterministic;
  a.rate = rate;
  a.validate();
  return a;
}

ArrivalProcess ArrivalProcess::hyperexponential(double w1, double mu1, double w2, double mu2) {
  ArrivalProcess a;
  a.kind = Kind::hyperexponential;
  a.w1 = w1;
  a.mu1 = mu1;
  a.w2 = w2;
  a.mu2 = mu2;
  a.rate = 1.0 / (w1 / mu1 + w2 / mu2);
  a.validate();
  return a;
}

ArrivalProcess ArrivalProcess::bursty(double rate) {
  return hyperexponential(1.0 / 3.0, rate / 2.0, 2.0 / 3.0, 2.0 * rate);
}

void ArrivalProcess::validate() const {
  if (kind == Kind::hyperexponential) {
    if (!(w1 >= 0.0 && w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-9)
      throw InvalidSpec("hyperexponential weights must be >= 0 and sum to 1");
    if (!(mu1 > 0.0 && mu2 > 0.0)) throw InvalidSpec("hyperexponential rates must be positive");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidSpec("arrival rate must be positive");
}

double ArrivalProcess::mean_rate() const { return rate; }

double ArrivalProcess::nominal_c2() const {
  switch (kind) {
    case Kind::poisson: return 1.0;
    case Kind::deterministic: return 0.0;
    case Kind::hyperexponential: {
      const double m1 = w1 / mu1 + w2 / mu2;
      const double m2 = 2.0 * (w1 / (mu1 * mu1) + w2 / (mu2 * mu2));
      return m2 / (m1 * m1) - 1.0;
    }
  }
  return 1.0;
}

double ArrivalProcess::next_gap(Rng& rng) const {
  switch (kind) {
    case Kind::poisson: return -std::log(uniform01(rng)) / rate;
    case Kind::deterministic: return 1.0 / rate;
    case Kind::hyperexponential: {
      const double mu = uniform01(rng) < w1 ? mu1 : mu2;
      return -std::log(uniform01(rng)) / mu;
    }
  }
  return 1.0 / rate;
}

const char* ArrivalProcess::name() const {
  switch (kind) {
    case Kind::poisson: return "poisson";
    case Kind::deterministic: return "deterministic";
    case Kind::hyperexponential: return "hyperexponential";
  }
  return "?";
}

std::vector<SimClass> sim_classes(const Flow& flow, std::span<const CachePolicy> policies) {
  if (policies.size() != flow.size()) throw InvalidSpec("one policy per class is required");
  std::vector<SimClass> out;
  for (std::size_t i = 0; i < flow.size(); ++i)
    out.push_back({flow.weight(i), flow.curve(i).rdi_ptr(), policies[i]});
  return out;
}

void SimConfig::validate() const {
  if (classes.empty()) throw InvalidSpec("simulation needs at least one class");
  double sum = 0.0;
  for (const auto& c : classes) {
    if (!c.rdi) throw InvalidSpec("simulation class has no RDI");
    if (!(c.weight >= 0.0)) throw InvalidSpec("class weight must be >= 0");
    c.policy.validate();
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidSpec("class weights must sum to 1");
  arrivals.validate();
  if (n_arrivals < 10'000) throw InvalidSpec("simulation needs at least 1e4 arrivals");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 0.5))
    throw InvalidSpec("warmup fraction must lie in [0, 0.5)");
  if (batches < 20) throw InvalidSpec("batch means need at least 20 batches");
  if (buffer && *buffer == 0) throw InvalidSpec("buffer must hold at least one item");
}

Simulator::Simulator(std::vector<SimClass> classes, ArrivalProcess arrivals,
                     std::optional<std::size_t> buffer, std::uint64_t seed, double bits_per_item)
    : classes_(std::move(classes)),
      arrivals_(arrivals),
      buffer_(buffer),
      bits_(bits_per_item),
      rng_(seed) {
  double acc = 0.0;
  for (const auto& c : classes_) {
    acc += c.weight;
    class_cdf_.push_back(acc);
  }
}

void Simulator::set_policies(std::span<const CachePolicy> policies) {
  if (policies.size() != classes_.size()) throw InvalidSpec("one policy per class is required");
  for (std::size_t i = 0; i < policies.size(); ++i) {
    policies[i].validate();
    classes_[i].policy = policies[i];
  }
}

void Simulator::step(Batch* batch, std::vector<double>* record) {
  const double gap = arrivals_.next_gap(rng_);
  const double arrival = now_ + gap;
  double last = now_;
  // Departures at or before the arrival instant leave first.
  while (!departures_.empty() && departures_.top().time <= arrival) {
    const double t = departures_.top().time;
    if (batch) batch->occupancy_area += static_cast<double>(in_buffer_) * (t - last);
    last = t;
    --in_buffer_;
    departures_.pop();
  }
  if (batch) {
    batch->occupancy_area += static_cast<double>(in_buffer_) * (arrival - last);
    batch->duration += gap;
    batch->gap_sum += gap;
    batch->gap_sq_sum += gap * gap;
    ++batch->arrivals;
  }
  now_ = arrival;

  const std::size_t occupied = in_buffer_;
  if (buffer_ && occupied >= *buffer_) {
    if (batch) ++batch->blocked;
    return;
  }
  const double u = uniform01(rng_);
  std::size_t k = std::upper_bound(class_cdf_.begin(), class_cdf_.end(), u * class_cdf_.back()) -
                  class_cdf_.begin();
  k = std::min(k, classes_.size() - 1);
  const SimClass& cls = classes_[k];
  const std::optional<double> delay = cls.rdi->sample(rng_);

  double v = uniform01(rng_);
  const PolicyAtom* atom = &cls.policy.atoms.back();
  for (const auto& a : cls.policy.atoms) {
    if (v < a.weight) {
      atom = &a;
      break;
    }
    v -= a.weight;
  }

  double held = 0.0;
  bool hit = false;
  if (!atom->skip()) {
    const double deadline = *atom->max_time;
    hit = delay.has_value() && *delay <= deadline;
    held = delay ? std::min(*delay, deadline) : deadline;
  }
  if (batch) {
    ++batch->admitted;
    if (hit) ++batch->hits;
    if (std::isfinite(held)) batch->caching_time += held;
  }
  if (record) record->push_back(held);
  if (held > 0.0) {
    if (std::isfinite(held)) {
      departures_.push({now_ + held, seq_++});
      ++in_buffer_;
    } else {
      ++in_buffer_;
      ++permanent_;
      censored_ = true;
    }
  }
}

void Simulator::skip(std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) step(nullptr, nullptr);
}

namespace {

Estimate batch_estimate(double total_num, double total_den, const std::vector<double>& values) {
  Estimate e;
  e.mean = total_den > 0.0 ? total_num / total_den : 0.0;
  const std::size_t n = values.size();
  if (n < 2) return e;
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  e.stderr_ = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return e;
}

}  // namespace

SimReport Simulator::measure(std::size_t n, std::size_t batches, bool record) {
  batches = std::max<std::size_t>(1, std::min(batches, n));
  std::vector<Batch> acc(batches);
  SimReport rep;
  rep.recorded = record;
  std::vector<double>* rec = record ? &rep.caching_times : nullptr;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t count = n / batches + (b < n % batches ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) step(&acc[b], rec);
  }

  Batch tot;
  std::vector<double> hit, blk, occ, wait, thr;
  for (const auto& b : acc) {
    tot.arrivals += b.arrivals;
    tot.blocked += b.blocked;
    tot.admitted += b.admitted;
    tot.hits += b.hits;
    tot.caching_time += b.caching_time;
    tot.occupancy_area += b.occupancy_area;
    tot.duration += b.duration;
    tot.gap_sum += b.gap_sum;
    tot.gap_sq_sum += b.gap_sq_sum;
    const double arr = static_cast<double>(std::max<std::size_t>(b.arrivals, 1));
    hit.push_back(b.hits / arr);
    blk.push_back(b.blocked / arr);
    occ.push_back(b.duration > 0.0 ? b.occupancy_area / b.duration : 0.0);
    wait.push_back(b.admitted ? b.caching_time / b.admitted : 0.0);
    thr.push_back(b.duration > 0.0 ? b.hits * bits_ / b.duration : 0.0);
  }
  const double arrivals = static_cast<double>(tot.arrivals);
  rep.hit_ratio = batch_estimate(static_cast<double>(tot.hits), arrivals, hit);
  rep.blocking = batch_estimate(static_cast<double>(tot.blocked), arrivals, blk);
  rep.occupancy = batch_estimate(tot.occupancy_area, tot.duration, occ);
  rep.caching_time =
      batch_estimate(tot.caching_time, static_cast<double>(tot.admitted), wait);
  rep.throughput = batch_estimate(tot.hits * bits_, tot.duration, thr);
  rep.measured_arrivals = tot.arrivals;
  rep.duration = tot.duration;
  rep.measured_rate = tot.duration > 0.0 ? arrivals / tot.duration : 0.0;
  if (tot.arrivals > 1) {
    const double mean = tot.gap_sum / arrivals;
    const double var = tot.gap_sq_sum / arrivals - mean * mean;
    rep.empirical_c2 = std::max(0.0, var) / (mean * mean);
  }
  rep.censored = censored_;
  return rep;
}

SimReport run(const SimConfig& config) {
  config.validate();
  Simulator sim(config.classes, config.arrivals, config.buffer, config.seed, config.bits_per_item);
  const auto warm = static_cast<std::size_t>(config.warmup_fraction *
                                             static_cast<double>(config.n_arrivals));
  sim.skip(warm);
  return sim.measure(config.n_arrivals - warm, config.batches, config.record_caching_times);
}

namespace {

Estimate merge(const std::vector<Estimate>& parts) {
  double wsum = 0.0, acc = 0.0;
  bool all_exact = true;
  for (const auto& e : parts)
    if (e.stderr_ > 0.0) all_exact = false;
  if (all_exact) {
    for (const auto& e : parts) acc += e.mean;
    return {acc / static_cast<double>(parts.size()), 0.0};
  }
  for (const auto& e : parts) {
    const double w = e.stderr_ > 0.0 ? 1.0 / (e.stderr_ * e.stderr_) : 0.0;
    wsum += w;
    acc += w * e.mean;
  }
  return {acc / wsum, std::sqrt(1.0 / wsum)};
}

}  // namespace

SimReport run_replications(const SimConfig& config, std::size_t replications, unsigned threads) {
  if (replications == 0) throw InvalidSpec("need at least one replication");
  std::vector<SimReport> reports(replications);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replications)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t r = t; r < replications; r += threads) {
        SimConfig c = config;
        c.seed = config.seed + r;
        reports[r] = run(c);
      }
    });
  }
  for (auto& th : pool) th.join();
  if (replications == 1) return reports.front();
  SimReport out;
  auto field = [&](auto member) {
    std::vector<Estimate> v;
    for (const auto& r : reports) v.push_back(r.*member);
    return merge(v);
  };
  out.hit_ratio = field(&SimReport::hit_ratio);
  out.blocking = field(&SimReport::blocking);
  out.occupancy = field(&SimReport::occupancy);
  out.caching_time = field(&SimReport::caching_time);
  out.throughput = field(&SimReport::throughput);
  for (const auto& r : reports) {
    out.measured_arrivals += r.measured_arrivals;
    out.duration += r.duration;
    out.empirical_c2 += r.empirical_c2 / static_cast<double>(replications);
    out.censored = out.censored || r.censored;
  }
  out.measured_rate = out.duration > 0.0 ? out.measured_arrivals / out.duration : 0.0;
  return out;
}

double empirical_c2(std::span<const double> gaps) {
  if (gaps.size() < 10'000) throw DomainError("empirical c2 needs at least 1e4 gaps");
  double sum = 0.0, sq = 0.0;
  for (double g : gaps) {
    sum += g;
    sq += g * g;
  }
  const double n = static_cast<double>(gaps.size());
  const double mean = sum / n;
  const double var = (sq - n * mean * mean) / (n - 1.0);
  return std::max(0.0, var) / (mean * mean);
}

Ecdf::Ecdf(std::vector<double> sample) : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw DomainError("empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

Ecdf caching_time_ecdf(const SimReport& report) {
  if (!report.recorded) throw PreconditionError("caching times were not recorded for this run");
  return Ecdf(report.caching_times);
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double x = sample[i];
    // Compare the jump at x against F(x) and F(x-), so atoms are not penalized.
    const double f = cdf(x);
    const double f_left = cdf(std::nextafter(x, -kInf));
    d = std::max(d, std::abs(static_cast<double>(j) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f_left));
    i = j;
  }
  return d;
}

}  // namespace tdcache
