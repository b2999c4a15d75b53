#pragma once

// Literal simulation of a balanced binary relay tree.
//
// Each trial draws 2^h independent leaf bits and folds them pairwise up to
// the root. Bits are packed 64 to a word: leaf sampling compares 64 uniforms
// against p at once, and the lowest six fusion levels run inside each word
// with shift-and-combine before the surviving bits are repacked.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "relaytree/philox.hpp"
#include "relaytree/trajectory.hpp"

namespace relaytree {

enum class Hypothesis { H0, H1 };

inline const char* to_string(Hypothesis h) {
  return h == Hypothesis::H0 ? "H0" : "H1";
}

inline constexpr int kMaxSimHeight = 24;

struct McConfig {
  ErrorPair pair0;
  int height = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  Hypothesis hypothesis = Hypothesis::H0;
  unsigned workers = 1;  // 0 selects the hardware concurrency
};

struct McEstimate {
  double error_rate = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
  double std_err = 0.0;    // sqrt(rate (1 - rate) / trials)
  double predicted = 0.0;  // alpha_h under H0, beta_h under H1

  friend bool operator==(const McEstimate&, const McEstimate&) = default;
};

inline void validate(const McConfig& config) {
  if (config.height < 1 || config.height > kMaxSimHeight) {
    fail(ErrorCode::InvalidArgument,
         "height must lie in [1, " + std::to_string(kMaxSimHeight) + "]");
  }
  if (config.trials == 0) fail(ErrorCode::InvalidArgument, "trials must be positive");
}

/// Gate used at each level k = 0..height-1.
inline std::vector<Gate> gate_schedule(const ErrorPair& pair0, int height) {
  if (height < 1) fail(ErrorCode::InvalidArgument, "height must be >= 1");
  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(height));
  ErrorPair pair = pair0;
  for (int k = 0; k < height; ++k) {
    gates.push_back(gate_for(pair));
    pair = fuse(pair);
  }
  return gates;
}

/// Gates chosen level by level by comparing total error of OR against AND in
/// plain doubles, independently of gate_schedule.
inline std::vector<Gate> oracle_gate_schedule(const ErrorPair& pair0, int height) {
  std::vector<Gate> gates;
  double a = pair0.alpha.value();
  double b = pair0.beta.value();
  for (int k = 0; k < height; ++k) {
    const OracleOutcome out = fuse_oracle(a, b);
    gates.push_back(out.gate);
    a = out.fused.alpha;
    b = out.fused.beta;
  }
  return gates;
}

namespace detail {

/// Binary digits of p in [0, 1), most significant first, up to the last 1.
inline std::vector<bool> binary_digits(double p) {
  std::vector<bool> digits;
  while (p > 0.0) {
    p *= 2.0;  // exact
    const bool bit = p >= 1.0;
    if (bit) p -= 1.0;
    digits.push_back(bit);
  }
  return digits;
}

/// Samples 64 independent Bernoulli(p) lanes: lane is 1 iff a uniform U in
/// [0, 1), drawn bit by bit, falls below p.
class BernoulliWords {
 public:
  explicit BernoulliWords(double p) : all_ones_(p >= 1.0) {
    if (all_ones_) return;
    for (bool d : binary_digits(p)) masks_.push_back(d ? ~std::uint64_t{0} : 0);
  }

  std::uint64_t draw(StreamWords& rng) const {
    if (all_ones_) return ~std::uint64_t{0};
    std::uint64_t undecided = ~std::uint64_t{0};
    std::uint64_t below = 0;
    for (std::uint64_t digit : masks_) {
      // Lanes still tied with p settle where the uniform's bit differs from
      // p's digit: below p when the digit is 1 and the bit is 0.
      const std::uint64_t u = rng.next();
      below |= undecided & digit & ~u;
      undecided &= ~(u ^ digit);
      if (undecided == 0) break;
    }
    return below;
  }

 private:
  bool all_ones_;
  std::vector<std::uint64_t> masks_;  // digit i of p as all-ones or zero
};

inline std::uint64_t combine(Gate gate, std::uint64_t lhs, std::uint64_t rhs) {
  return gate == Gate::Or ? (lhs | rhs) : (lhs & rhs);
}

/// Folds 2^height packed leaf bits to the root bit. Destroys `words`.
inline bool fold_tree(std::vector<std::uint64_t>& words, int height,
                      const std::vector<Gate>& gates) {
  int level = 0;
  std::size_t values = std::size_t{1} << height;
  std::size_t count = words.size();
  while (true) {
    const int in_word = std::min(height - level, 6);
    for (int j = 0; j < in_word; ++j) {
      const Gate gate = gates[static_cast<std::size_t>(level + j)];
      const int shift = 1 << j;
      for (std::size_t i = 0; i < count; ++i) {
        words[i] = combine(gate, words[i], words[i] >> shift);
      }
    }
    level += in_word;
    values >>= in_word;
    if (level == height) return (words[0] & 1u) != 0;
    // One surviving value per word; repack 64 per word.
    const std::size_t packed = (values + 63) / 64;
    for (std::size_t w = 0; w < packed; ++w) {
      std::uint64_t out = 0;
      const std::size_t end = std::min(values, (w + 1) * 64);
      for (std::size_t i = w * 64; i < end; ++i) {
        out |= (words[i] & 1u) << (i - w * 64);
      }
      words[w] = out;
    }
    count = packed;
  }
}

struct TrialSampler {
  TrialSampler(const McConfig& config)
      : height(config.height),
        words(std::max<std::size_t>(1, (std::size_t{1} << config.height) / 64)),
        invert(config.hypothesis == Hypothesis::H1),
        // Under H1 a leaf reports 0 with probability beta: draw that event
        // and invert, which stays exact for tiny beta.
        bits(invert ? config.pair0.beta.value() : config.pair0.alpha.value()) {}

  void sample(std::uint64_t seed, std::uint64_t trial,
              std::vector<std::uint64_t>& out) const {
    StreamWords rng(seed, trial);
    out.resize(words);
    for (auto& w : out) w = invert ? ~bits.draw(rng) : bits.draw(rng);
  }

  int height;
  std::size_t words;
  bool invert;
  BernoulliWords bits;
};

inline bool is_error(Hypothesis h, bool root) {
  return h == Hypothesis::H0 ? root : !root;
}

/// Runs body(begin, end) over disjoint trial ranges on `workers` threads and
/// returns the sum of partials.
template <typename Body>
std::uint64_t parallel_count(std::uint64_t trials, unsigned workers, Body body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));
  if (workers <= 1) return body(0, trials);
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] { partial[w] = body(begin, end); });
  }
  for (auto& t : pool) t.join();
  std::uint64_t total = 0;
  for (auto p : partial) total += p;
  return total;
}

}  // namespace detail

inline McEstimate simulate(const McConfig& config) {
  validate(config);
  const std::vector<Gate> gates = gate_schedule(config.pair0, config.height);
  const detail::TrialSampler sampler(config);
  const std::uint64_t errors = detail::parallel_count(
      config.trials, config.workers,
      [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<std::uint64_t> leaves;
        std::uint64_t count = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
          sampler.sample(config.seed, t, leaves);
          count += detail::is_error(config.hypothesis,
                                    detail::fold_tree(leaves, config.height, gates));
        }
        return count;
      });

  const ErrorPair root = iterate(config.pair0, config.height);
  McEstimate est;
  est.errors = errors;
  est.trials = config.trials;
  est.error_rate = static_cast<double>(errors) / static_cast<double>(config.trials);
  est.std_err = std::sqrt(est.error_rate * (1.0 - est.error_rate) /
                          static_cast<double>(config.trials));
  est.predicted = config.hypothesis == Hypothesis::H0 ? root.alpha.value()
                                                      : root.beta.value();
  return est;
}

/// Folds every trial's leaves twice, once with gate_schedule and once with
/// gates picked by the plain-double minimum-total-error rule, and reports
/// whether the root decisions agree on every trial.
inline bool simulate_lrt_equivalence(const McConfig& config) {
  validate(config);
  if (!in_triangle(side_of(config.pair0))) {
    fail(ErrorCode::NotInTriangle, "equivalence check requires alpha0 + beta0 < 1");
  }
  const std::vector<Gate> gates = gate_schedule(config.pair0, config.height);
  const std::vector<Gate> lrt = oracle_gate_schedule(config.pair0, config.height);
  const detail::TrialSampler sampler(config);
  const std::uint64_t mismatches = detail::parallel_count(
      config.trials, config.workers,
      [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<std::uint64_t> leaves;
        std::vector<std::uint64_t> copy;
        std::uint64_t count = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
          sampler.sample(config.seed, t, leaves);
          copy = leaves;
          const bool a = detail::fold_tree(leaves, config.height, gates);
          const bool b = detail::fold_tree(copy, config.height, lrt);
          count += a != b;
        }
        return count;
      });
  return mismatches == 0;
}

}  // namespace relaytree
