#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "rrflow/graph.hpp"
#include "rrflow/sampling.hpp"
#include "rrflow/selection.hpp"
#include "rrflow/work_pool.hpp"

namespace rrflow {

enum class Strategy { fused, baseline };

inline const char* to_string(Strategy s) {
  return s == Strategy::fused ? "fused" : "baseline";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "fused") return Strategy::fused;
  if (s == "baseline") return Strategy::baseline;
  throw std::invalid_argument("unknown strategy: " + s);
}

struct ImmConfig {
  uint32_t k = 50;
  double epsilon = 0.5;
  DiffusionModel model = DiffusionModel::IC;
  unsigned workers = 1;
  uint64_t rng_seed = 1;
  double ell = 1.0;
  double adaptive_threshold = 0.25;
  Strategy strategy = Strategy::fused;
};

struct ImmTimings {
  double generate_rrrsets = 0.0;
  double find_most_influential = 0.0;
  double total = 0.0;
};

struct ImmResult {
  SeedSet seeds;
  uint64_t theta = 0;
  uint64_t theta_prime = 0;
  double lower_bound = 0.0;
  ImmTimings timings;
  uint64_t sets_generated = 0;
  double mean_set_size = 0.0;
  uint32_t max_set_size = 0;
  double mean_coverage_fraction = 0.0;
};

// ln C(n, k) as sum of logs.
inline double log_binomial(uint64_t n, uint64_t k) {
  if (k > n) throw std::invalid_argument("log_binomial: k > n");
  double sum = 0.0;
  for (uint64_t j = n - k + 1; j <= n; ++j) sum += std::log(static_cast<double>(j));
  for (uint64_t j = 1; j <= k; ++j) sum -= std::log(static_cast<double>(j));
  return sum;
}

// Failure-probability exponent adjusted so both phases jointly hold at n^-l.
inline double effective_ell(double ell, uint64_t n) {
  if (n < 2) return ell;
  return ell * (1.0 + std::log(2.0) / std::log(static_cast<double>(n)));
}

// lambda' of the sampling-phase bound, with eps' = sqrt(2) * eps.
inline double lambda_prime(uint64_t n, uint64_t k, double epsilon, double ell) {
  if (k > n) throw std::invalid_argument("lambda_prime: k > n");
  const double nd = static_cast<double>(n);
  const double eps_prime = std::sqrt(2.0) * epsilon;
  const double log2n = std::max(1.0, std::log2(nd));
  const double terms = log_binomial(n, k) + ell * std::log(nd) + std::log(log2n);
  return (2.0 + (2.0 / 3.0) * eps_prime) * terms * nd / (eps_prime * eps_prime);
}

// Number of estimation rounds: floor(log2 n) - 1, at least one.
inline unsigned sampling_rounds(uint64_t n) {
  if (n <= 4) return 1;
  const auto r = static_cast<int>(std::floor(std::log2(static_cast<double>(n)))) - 1;
  return r < 1 ? 1u : static_cast<unsigned>(r);
}

// Spread target of round i: x_i = n / 2^i (tiny-n guard keeps it >= 1).
inline double round_target(uint64_t n, unsigned i) {
  if (n <= 4) return std::max(1.0, static_cast<double>(n) / 2.0);
  return static_cast<double>(n) / std::exp2(static_cast<double>(i));
}

// Sketch budget of estimation round i: ceil(lambda' / x_i), at least 1.
inline uint64_t theta_for_round(uint64_t n, uint64_t k, double epsilon, double ell,
                                unsigned i) {
  const double theta = std::ceil(lambda_prime(n, k, epsilon, ell) / round_target(n, i));
  if (!(theta >= 1.0)) return 1;
  return static_cast<uint64_t>(theta);
}

// lambda* of the final bound.
inline double lambda_star(uint64_t n, uint64_t k, double epsilon, double ell) {
  if (k > n) throw std::invalid_argument("lambda_star: k > n");
  const double nd = static_cast<double>(n);
  const double one_minus_inv_e = 1.0 - 1.0 / std::exp(1.0);
  const double alpha = std::sqrt(ell * std::log(nd) + std::log(2.0));
  const double beta = std::sqrt(one_minus_inv_e *
                                (log_binomial(n, k) + ell * std::log(nd) + std::log(2.0)));
  const double s = one_minus_inv_e * alpha + beta;
  return 2.0 * nd * s * s / (epsilon * epsilon);
}

// Final sketch budget: ceil(lambda* / LB), at least 1.
inline uint64_t set_theta(uint64_t n, uint64_t k, double epsilon, double ell,
                          double lower_bound) {
  const double theta = std::ceil(lambda_star(n, k, epsilon, ell) / lower_bound);
  if (!(theta >= 1.0)) return 1;
  return static_cast<uint64_t>(theta);
}

namespace detail {

class PhaseTimer {
 public:
  PhaseTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void validate_config(const Graph& g, const ImmConfig& cfg) {
  if (g.num_vertices == 0) throw std::invalid_argument("empty graph");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (cfg.k < 1 || cfg.k > g.num_vertices) {
    throw std::invalid_argument("k must lie in [1, n]");
  }
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
}

inline SeedSet run_selection(const ImmConfig& cfg, RRRStore& store, uint32_t n,
                             WorkPool& pool, const Counter* prebuilt) {
  if (cfg.strategy == Strategy::fused) {
    return select_seeds(store, n, cfg.k, pool, cfg.adaptive_threshold, prebuilt);
  }
  return baseline_select(store, n, cfg.k, pool);
}

}  // namespace detail

struct SamplingPhaseResult {
  RRRStore store;
  Counter counter;
  double lower_bound = 0.0;
  uint64_t theta_prime = 0;
};

// Sampling phase of the two-phase workflow: rounds of top-up generation and
// trial selection until the coverage of the trial seeds certifies the lower
// bound. Sets and the fused counter are reused across rounds; nothing is
// regenerated. Stops at the first round i with n*F >= (1 + eps') * x_i, and
// otherwise falls back to LB = max(n*F_last / (1 + eps'), k).
inline SamplingPhaseResult sampling_phase(const Graph& g, const ImmConfig& cfg,
                                          WorkPool& pool,
                                          ImmTimings* timings = nullptr) {
  detail::validate_config(g, cfg);
  const uint32_t n = g.num_vertices;
  const double ell = effective_ell(cfg.ell, n);
  const double eps_prime = std::sqrt(2.0) * cfg.epsilon;

  SamplingPhaseResult out{RRRStore(n, pool.workers()), Counter(n)};
  const bool fused = cfg.strategy == Strategy::fused;
  const unsigned rounds = sampling_rounds(n);
  double estimated_spread = 0.0;
  bool triggered = false;
  for (unsigned i = 1; i <= rounds; ++i) {
    const uint64_t target = theta_for_round(n, cfg.k, cfg.epsilon, ell, i);
    if (target > out.store.size()) {
      detail::PhaseTimer t;
      generate_batch(g, cfg.model, cfg.rng_seed, target - out.store.size(), pool,
                     out.store, fused ? &out.counter : nullptr);
      if (timings != nullptr) timings->generate_rrrsets += t.seconds();
    }
    detail::PhaseTimer t;
    const SeedSet trial = detail::run_selection(cfg, out.store, n, pool,
                                                fused ? &out.counter : nullptr);
    if (timings != nullptr) timings->find_most_influential += t.seconds();
    const double covered =
        static_cast<double>(out.store.size() - out.store.live_count());
    const double fraction = covered / static_cast<double>(out.store.size());
    estimated_spread = static_cast<double>(n) * fraction;
    if (estimated_spread >= (1.0 + eps_prime) * round_target(n, i)) {
      triggered = true;
      break;
    }
  }
  out.lower_bound = triggered
                        ? estimated_spread / (1.0 + eps_prime)
                        : std::max(estimated_spread / (1.0 + eps_prime),
                                   static_cast<double>(cfg.k));
  out.theta_prime = out.store.size();
  return out;
}

// Full two-phase run: estimate theta, top up the sketch store if needed and
// select the final seed set, recording per-phase wall times and sketch
// statistics.
inline ImmResult run_imm(const Graph& g, const ImmConfig& cfg) {
  detail::PhaseTimer total_timer;
  detail::validate_config(g, cfg);
  const uint32_t n = g.num_vertices;
  const double ell = effective_ell(cfg.ell, n);
  WorkPool pool(cfg.workers);

  ImmResult result;
  SamplingPhaseResult phase = sampling_phase(g, cfg, pool, &result.timings);
  result.theta_prime = phase.theta_prime;
  result.lower_bound = phase.lower_bound;
  result.theta = set_theta(n, cfg.k, cfg.epsilon, ell, phase.lower_bound);

  if (result.theta > phase.store.size()) {
    detail::PhaseTimer t;
    generate_batch(g, cfg.model, cfg.rng_seed, result.theta - phase.store.size(),
                   pool, phase.store,
                   cfg.strategy == Strategy::fused ? &phase.counter : nullptr);
    result.timings.generate_rrrsets += t.seconds();
  }

  {
    detail::PhaseTimer t;
    result.seeds = detail::run_selection(
        cfg, phase.store, n, pool,
        cfg.strategy == Strategy::fused ? &phase.counter : nullptr);
    result.timings.find_most_influential += t.seconds();
  }

  result.sets_generated = phase.store.size();
  const uint64_t member_sum = phase.store.total_member_count();
  result.mean_set_size =
      static_cast<double>(member_sum) / static_cast<double>(phase.store.size());
  result.max_set_size = phase.store.max_set_size();
  result.mean_coverage_fraction = result.mean_set_size / static_cast<double>(n);
  result.timings.total = total_timer.seconds();
  return result;
}

}  // namespace rrflow
