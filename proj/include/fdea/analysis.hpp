#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fdea/config.hpp"
#include "fdea/dataset.hpp"
#include "fdea/error.hpp"
#include "fdea/solver.hpp"

namespace fdea {

enum class Layer : std::size_t { kOverall = 0, kStage1 = 1, kStage2 = 2 };

inline constexpr std::array<Layer, 3> kAllLayers = {Layer::kOverall, Layer::kStage1,
                                                    Layer::kStage2};

/// Rows are DMUs, columns are alpha levels; a cell is nullopt when unsolved.
using ScoreLayer = std::vector<std::vector<std::optional<double>>>;

/// n x |alpha grid| evaluation results.
class EfficiencyMatrix {
public:
  EfficiencyMatrix(std::vector<std::string> names, std::vector<double> alphas)
      : names_(std::move(names)), alphas_(std::move(alphas)),
        cells_(names_.size() * alphas_.size()) {}

  std::size_t dmus() const noexcept { return names_.size(); }
  std::size_t levels() const noexcept { return alphas_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }

  const InstanceResult& cell(std::size_t p, std::size_t a) const {
    return cells_[p * alphas_.size() + a];
  }
  InstanceResult& cell(std::size_t p, std::size_t a) { return cells_[p * alphas_.size() + a]; }

  ScoreLayer layer(Layer which) const {
    ScoreLayer out(dmus(), std::vector<std::optional<double>>(levels()));
    for (std::size_t p = 0; p < dmus(); ++p) {
      for (std::size_t a = 0; a < levels(); ++a) {
        const auto& c = cell(p, a);
        if (!c.solved()) continue;
        switch (which) {
          case Layer::kOverall: out[p][a] = c.overall; break;
          case Layer::kStage1: out[p][a] = c.stage1; break;
          case Layer::kStage2: out[p][a] = c.stage2; break;
        }
      }
    }
    return out;
  }

  std::size_t unsolved() const {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return !c.solved(); }));
  }

private:
  std::vector<std::string> names_;
  std::vector<double> alphas_;
  std::vector<InstanceResult> cells_;
};

struct SweepOptions {
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

namespace detail {

template <typename Eval>
EfficiencyMatrix sweep(const TwoStageDataset& data, const ModelConfig& cfg,
                       const SweepOptions& opts, Eval eval) {
  cfg.validate_for(data);
  EfficiencyMatrix m(data.dmu_names(), cfg.alpha_grid);
  const std::size_t total = m.dmus() * m.levels();
  unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));

  auto run_cell = [&](std::size_t k) {
    const std::size_t p = k / m.levels();
    const std::size_t a = k % m.levels();
    m.cell(p, a) = eval(data, p, m.alphas()[a], cfg);
  };
  if (workers <= 1) {
    for (std::size_t k = 0; k < total; ++k) run_cell(k);
    return m;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = next++; k < total; k = next++) run_cell(k);
        } catch (...) {
          errors[w] = std::current_exception();
          next = total;
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return m;
}

}  // namespace detail

/// Evaluates every (DMU, alpha) cell of the grid with the two-stage model.
/// Infeasible cells are kept as status flags; the sweep never aborts on them.
inline EfficiencyMatrix alpha_sweep(const TwoStageDataset& data, const ModelConfig& cfg,
                                    const SweepOptions& opts = {}) {
  return detail::sweep(data, cfg, opts, evaluate_dmu);
}

/// Same as alpha_sweep with the single-stage model.
inline EfficiencyMatrix blackbox_sweep(const TwoStageDataset& data, const ModelConfig& cfg,
                                       const SweepOptions& opts = {}) {
  return detail::sweep(data, cfg, opts, evaluate_blackbox);
}

struct SccResult {
  std::vector<double> psi;
  double min = 0.0;
  double max = 0.0;
  /// All solved cells share one value; psi is 0.5 everywhere.
  bool degenerate = false;
  std::vector<std::string> warnings;

  double average() const {
    return std::accumulate(psi.begin(), psi.end(), 0.0) / static_cast<double>(psi.size());
  }
};

/// Stochastic closeness coefficient of each DMU:
///   psi_p = (mean_a R_p^a - min_{a,j} R_j^a) / (max_{a,j} R_j^a - min_{a,j} R_j^a).
/// The mean runs over the DMU's solved cells; min and max over all solved cells.
inline SccResult stochastic_closeness(const ScoreLayer& layer) {
  SccResult out;
  bool any = false;
  for (const auto& row : layer) {
    for (const auto& c : row) {
      if (!c) continue;
      if (!std::isfinite(*c)) throw ValidationError("non-finite efficiency score");
      out.min = any ? std::min(out.min, *c) : *c;
      out.max = any ? std::max(out.max, *c) : *c;
      any = true;
    }
  }
  if (!any) throw ValidationError("closeness coefficient needs at least one solved cell");

  out.psi.resize(layer.size(), 0.0);
  const double span = out.max - out.min;
  if (span <= 0.0) {
    out.degenerate = true;
    out.warnings.push_back("all scores are identical; closeness set to 0.5");
  }
  for (std::size_t p = 0; p < layer.size(); ++p) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < layer[p].size(); ++a) {
      if (layer[p][a]) {
        sum += *layer[p][a];
        ++count;
      } else {
        out.warnings.push_back("DMU " + std::to_string(p + 1) + " alpha column " +
                               std::to_string(a) + " unsolved; excluded from its mean");
      }
    }
    if (count == 0) {
      out.warnings.push_back("DMU " + std::to_string(p + 1) +
                             " has no solved cell; closeness set to 0");
      continue;
    }
    out.psi[p] = out.degenerate ? 0.5 : (sum / static_cast<double>(count) - out.min) / span;
  }
  return out;
}

/// Rank 1 goes to the largest value; ties go to the lower index.
inline std::vector<std::size_t> rank(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("cannot rank non-finite values");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<std::size_t> ranks(values.size());
  for (std::size_t k = 0; k < order.size(); ++k) ranks[order[k]] = k + 1;
  return ranks;
}

namespace detail {

inline void check_permutation(std::span<const std::size_t> r) {
  std::vector<bool> seen(r.size() + 1, false);
  for (std::size_t v : r) {
    if (v < 1 || v > r.size() || seen[v]) {
      throw ValidationError("ranks must be a permutation of 1..n");
    }
    seen[v] = true;
  }
}

}  // namespace detail

/// rho = 1 - 6 sum d^2 / (n (n^2 - 1)) for two rank permutations.
inline double spearman(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw ValidationError("rank vectors differ in length");
  if (a.size() < 2) throw ValidationError("rank correlation needs at least 2 items");
  detail::check_permutation(a);
  detail::check_permutation(b);
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    d2 += d * d;
  }
  const double n = static_cast<double>(a.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

/// Sample standard deviation (divisor count - 1).
inline double sample_stddev(std::span<const double> v) {
  if (v.size() < 2) throw ValidationError("standard deviation needs at least 2 values");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Closeness coefficients, ranks and averages for the three score layers.
struct LayerSummary {
  SccResult scc;
  std::vector<std::size_t> ranks;
};

struct AnalysisReport {
  std::vector<std::string> names;
  std::vector<double> alphas;
  std::array<LayerSummary, 3> layers;

  const LayerSummary& layer(Layer l) const { return layers[static_cast<std::size_t>(l)]; }

  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (const auto& l : layers) out.insert(out.end(), l.scc.warnings.begin(), l.scc.warnings.end());
    return out;
  }
};

inline LayerSummary summarize(const ScoreLayer& layer) {
  LayerSummary s;
  s.scc = stochastic_closeness(layer);
  s.ranks = rank(s.scc.psi);
  return s;
}

inline AnalysisReport analyze(const EfficiencyMatrix& m) {
  AnalysisReport r;
  r.names = m.names();
  r.alphas = m.alphas();
  for (Layer l : kAllLayers) r.layers[static_cast<std::size_t>(l)] = summarize(m.layer(l));
  return r;
}

struct WeightCase {
  double w1 = 0.5;
  double w2 = 0.5;
};

struct SensitivityBlock {
  /// Main case first, then the extra cases in input order.
  std::vector<WeightCase> cases;
  /// Overall-SCC ranks per case, indexed [case][dmu].
  std::vector<std::vector<std::size_t>> ranks;
  /// Sample standard deviation of each DMU's ranks across all cases.
  std::vector<double> sensitivity;
  /// Rank correlation of each extra case against the main case.
  std::vector<double> spearman;
};

/// Sensitivity block from precomputed main-case ranks and per-case ranks.
inline SensitivityBlock sensitivity_from_ranks(std::vector<WeightCase> cases,
                                               std::vector<std::vector<std::size_t>> ranks) {
  if (ranks.size() < 2) throw ValidationError("sensitivity needs at least one extra case");
  SensitivityBlock s;
  s.cases = std::move(cases);
  s.ranks = std::move(ranks);
  const std::size_t n = s.ranks.front().size();
  for (std::size_t k = 1; k < s.ranks.size(); ++k) s.spearman.push_back(spearman(s.ranks[0], s.ranks[k]));
  s.sensitivity.resize(n);
  std::vector<double> col(s.ranks.size());
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < s.ranks.size(); ++k) col[k] = static_cast<double>(s.ranks[k][p]);
    s.sensitivity[p] = sample_stddev(col);
  }
  return s;
}

/// Reruns the sweep for each weight case and compares the overall rankings
/// with the main case (the weights in `cfg`).
inline SensitivityBlock weight_sensitivity(const TwoStageDataset& data, const ModelConfig& cfg,
                                           const std::vector<WeightCase>& extra,
                                           const SweepOptions& opts = {}) {
  if (extra.empty()) throw ValidationError("sensitivity needs at least one extra case");
  std::vector<WeightCase> cases{{cfg.w1, cfg.w2}};
  cases.insert(cases.end(), extra.begin(), extra.end());
  for (const auto& c : cases) cfg.with_weights(c.w1, c.w2).validate_for(data);

  std::vector<std::vector<std::size_t>> ranks;
  for (const auto& c : cases) {
    const auto m = alpha_sweep(data, cfg.with_weights(c.w1, c.w2), opts);
    ranks.push_back(summarize(m.layer(Layer::kOverall)).ranks);
  }
  return sensitivity_from_ranks(std::move(cases), std::move(ranks));
}

struct BlackBoxBlock {
  SccResult blackbox;
  std::vector<double> two_stage;
  double blackbox_average = 0.0;
  double two_stage_average = 0.0;
};

/// Black-box closeness coefficients next to given two-stage overall ones.
inline BlackBoxBlock blackbox_comparison(const TwoStageDataset& data, const ModelConfig& cfg,
                                         const SccResult& two_stage_overall,
                                         const SweepOptions& opts = {}) {
  BlackBoxBlock b;
  b.blackbox = stochastic_closeness(blackbox_sweep(data, cfg, opts).layer(Layer::kOverall));
  b.two_stage = two_stage_overall.psi;
  b.blackbox_average = b.blackbox.average();
  b.two_stage_average = two_stage_overall.average();
  return b;
}

inline BlackBoxBlock blackbox_comparison(const TwoStageDataset& data, const ModelConfig& cfg,
                                         const SweepOptions& opts = {}) {
  const auto overall = stochastic_closeness(alpha_sweep(data, cfg, opts).layer(Layer::kOverall));
  return blackbox_comparison(data, cfg, overall, opts);
}

}  // namespace fdea
