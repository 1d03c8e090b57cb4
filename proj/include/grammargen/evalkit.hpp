#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "grammargen/error.hpp"
#include "grammargen/estimator.hpp"
#include "grammargen/graph.hpp"
#include "grammargen/graph_json.hpp"
#include "grammargen/kernel.hpp"
#include "grammargen/rng.hpp"

namespace grammargen {

inline double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorKind::invalid_argument, "median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Sum of (p - q)(log p - log q): D(p||q) + D(q||p), every term >= 0.
inline double symmetric_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorKind::invalid_argument, "distribution sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == q[i]) continue;
    s += (p[i] - q[i]) * (std::log(p[i]) - std::log(q[i]));
  }
  return s;
}

struct KlResult {
  double value = 0.0;
  std::vector<double> per_fold;
};

/// k-fold estimate over feature vectors. Both sets are shuffled by streams
/// seeded identically; fold f holds out the f-th contiguous chunk of each.
/// One model is fit on each training part, the test set is the first m
/// held-out items of each set (m = smaller held-out size), and the fold
/// value is the symmetric divergence of the two softmax distributions over
/// that test set. Returns the median over folds.
inline KlResult symmetrized_kl(std::span<const SparseVector> real, std::span<const SparseVector> gen,
                               const OneClassParams& hp, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 folds");
  if (real.size() < 2 * folds || gen.size() < 2 * folds)
    throw Error(ErrorKind::invalid_argument, "each set needs at least 2 * folds items");

  auto permutation = [seed](std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx.begin(), idx.end());
    return idx;
  };
  const auto pr = permutation(real.size());
  const auto pg = permutation(gen.size());

  auto split = [folds](const std::vector<std::size_t>& perm, std::size_t f, std::span<const SparseVector> set,
                       std::vector<SparseVector>& train, std::vector<SparseVector>& test) {
    const std::size_t n = perm.size();
    const std::size_t lo = f * n / folds, hi = (f + 1) * n / folds;
    for (std::size_t k = 0; k < n; ++k) (k >= lo && k < hi ? test : train).push_back(set[perm[k]]);
  };

  KlResult out;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<SparseVector> real_train, real_test, gen_train, gen_test;
    split(pr, f, real, real_train, real_test);
    split(pg, f, gen, gen_train, gen_test);
    const auto model_r = fit(real_train, hp);
    const auto model_g = fit(gen_train, hp);
    const std::size_t m = std::min(real_test.size(), gen_test.size());
    std::vector<SparseVector> test(real_test.begin(), real_test.begin() + static_cast<std::ptrdiff_t>(m));
    test.insert(test.end(), gen_test.begin(), gen_test.begin() + static_cast<std::ptrdiff_t>(m));
    const auto p_r = probabilities_over(model_r, test);
    const auto p_g = probabilities_over(model_g, test);
    out.per_fold.push_back(symmetric_divergence(p_g, p_r));
  }
  out.value = median(out.per_fold);
  return out;
}

inline KlResult symmetrized_kl(std::span<const LabeledGraph> real, std::span<const LabeledGraph> gen,
                               const KernelParams& kp, const OneClassParams& hp, std::size_t folds,
                               std::uint64_t seed) {
  OneClassParams h = hp;
  h.feature_bits = kp.feature_bits;
  const auto vr = vectorize_all(real, kp);
  const auto vg = vectorize_all(gen, kp);
  return symmetrized_kl(vr, vg, h, folds, seed);
}

// ---------------------------------------------------------------------------
// RNA validity filters

struct FilterResult {
  bool pass = true;
  std::vector<char> failed;  // subset of 'a', 'b', 'c', 'd'
};

inline constexpr std::size_t kChordlessCycleCap = 1'000'000;

/// Calls visit(cycle) once for every chordless cycle (length >= 3). The
/// cycle starts at its smallest node s and runs towards the smaller of s's
/// two cycle neighbours. Throws `exhausted` past `cap` cycles or 64 * cap
/// path extensions.
template <typename Visit>
void for_each_chordless_cycle(const LabeledGraph& g, Visit&& visit, std::size_t cap = kChordlessCycleCap) {
  const std::size_t n = g.node_count();
  std::size_t found = 0, extensions = 0;
  std::vector<NodeId> path;
  std::vector<bool> on_path(n, false);
  std::vector<int> touched(n, 0);  // # interior path nodes (p1..p_{k-1}) adjacent to v

  struct Frame {
    NodeId v;
    std::size_t next;
  };
  std::vector<Frame> stack;
  // Depth-first over chordless paths s = p0, p1, ..., pk with every p_i > s.
  for (NodeId s = 0; s < n; ++s) {
    for (const auto& first : g.neighbors(s)) {
      if (first.node < s) continue;
      path.assign({s, first.node});
      on_path[first.node] = true;
      stack.assign({{first.node, 0}});
      while (!stack.empty()) {
        Frame& top = stack.back();
        const auto nbrs = g.neighbors(top.v);
        if (top.next < nbrs.size()) {
          const NodeId x = nbrs[top.next++].node;
          if (x <= s || on_path[x] || touched[x] > 0) continue;
          if (g.has_edge(x, s)) {
            if (first.node < x) {
              path.push_back(x);
              visit(std::span<const NodeId>(path));
              path.pop_back();
              if (++found > cap) throw Error(ErrorKind::exhausted, "too many chordless cycles");
            }
            continue;
          }
          if (++extensions > 64 * cap) throw Error(ErrorKind::exhausted, "chordless cycle search too large");
          for (const auto& a : nbrs) ++touched[a.node];
          on_path[x] = true;
          path.push_back(x);
          stack.push_back({x, 0});
        } else {
          on_path[top.v] = false;
          path.pop_back();
          stack.pop_back();
          if (!stack.empty())
            for (const auto& a : g.neighbors(stack.back().v)) --touched[a.node];
        }
      }
    }
  }
}

/// a) at most two degree-1 nodes; b) no degree above 3; c) connected;
/// d) on every chordless cycle whose nodes have degree 2 except for
/// degree-3 ones: zero degree-3 nodes fails, exactly two fails unless they
/// are adjacent. Cycles with other degree patterns are not constrained.
inline FilterResult rna_validity_filters(const LabeledGraph& g) {
  FilterResult out;
  auto fail = [&out](char id) {
    out.pass = false;
    out.failed.push_back(id);
  };
  std::size_t leaves = 0;
  bool high = false;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    leaves += g.degree(v) == 1;
    high = high || g.degree(v) > 3;
  }
  if (leaves > 2) fail('a');
  if (high) fail('b');
  if (!is_connected(g)) fail('c');

  bool bad_cycle = false;
  try {
    for_each_chordless_cycle(g, [&](std::span<const NodeId> cycle) {
      if (bad_cycle) return;
      std::vector<NodeId> threes;
      for (NodeId v : cycle) {
        if (g.degree(v) == 3) threes.push_back(v);
        else if (g.degree(v) != 2) return;
      }
      if (threes.empty() || (threes.size() == 2 && !g.has_edge(threes[0], threes[1]))) bad_cycle = true;
    });
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::exhausted) throw;
    bad_cycle = true;
  }
  if (bad_cycle) fail('d');
  return out;
}

// ---------------------------------------------------------------------------

struct EvalConfig {
  KernelParams kernel;
  OneClassParams hp;
  std::size_t folds = 5;
  std::size_t reps = 7;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct EvalReport {
  double symmetrized_kl = 0.0;
  double set_similarity = 0.0;
  double intdiv1 = 0.0;  // generated set
  double intdiv2 = 0.0;
  double real_intdiv1 = 0.0;
  double real_intdiv2 = 0.0;
  double filter_pass_fraction = 0.0;  // generated set
  std::size_t fold_count = 0;
  std::size_t reps = 0;
  std::vector<std::vector<double>> per_fold;  // [rep][fold]
  std::vector<double> per_rep;                // median over folds per rep
  std::size_t real_count = 0;
  std::size_t gen_count = 0;
};

/// Repetition r uses seed derive_seed(cfg.seed, r); the reported KL is the
/// median of the per-repetition medians.
inline EvalReport evaluate(std::span<const LabeledGraph> real, std::span<const LabeledGraph> gen,
                           const EvalConfig& cfg) {
  if (real.empty() || gen.empty()) throw Error(ErrorKind::invalid_argument, "evaluation sets must be non-empty");
  if (cfg.reps == 0) throw Error(ErrorKind::invalid_argument, "reps must be >= 1");
  OneClassParams hp = cfg.hp;
  hp.feature_bits = cfg.kernel.feature_bits;
  const auto vr = vectorize_all(real, cfg.kernel);
  const auto vg = vectorize_all(gen, cfg.kernel);

  EvalReport rep;
  rep.fold_count = cfg.folds;
  rep.reps = cfg.reps;
  rep.real_count = real.size();
  rep.gen_count = gen.size();
  rep.set_similarity = set_similarity(vg, vr, cfg.kernel.dimension());
  const auto dg = internal_diversity(vg);
  const auto dr = internal_diversity(vr);
  rep.intdiv1 = dg.intdiv1;
  rep.intdiv2 = dg.intdiv2;
  rep.real_intdiv1 = dr.intdiv1;
  rep.real_intdiv2 = dr.intdiv2;
  std::size_t passed = 0;
  for (const auto& g : gen) passed += rna_validity_filters(g).pass;
  rep.filter_pass_fraction = static_cast<double>(passed) / static_cast<double>(gen.size());

  std::vector<KlResult> results(cfg.reps);
  std::vector<std::exception_ptr> errors(cfg.reps);
  auto run = [&](std::size_t r) {
    try {
      results[r] = symmetrized_kl(vr, vg, hp, cfg.folds, derive_seed(cfg.seed, r));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, cfg.reps);
  if (workers == 1) {
    for (std::size_t r = 0; r < cfg.reps; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < cfg.reps; r += workers) run(r);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& r : results) {
    rep.per_rep.push_back(r.value);
    rep.per_fold.push_back(std::move(r.per_fold));
  }
  rep.symmetrized_kl = median(rep.per_rep);
  return rep;
}

inline json report_to_json(const EvalReport& r) {
  return json{{"symmetrized_kl", r.symmetrized_kl},
              {"set_similarity", r.set_similarity},
              {"intdiv1", r.intdiv1},
              {"intdiv2", r.intdiv2},
              {"real_intdiv1", r.real_intdiv1},
              {"real_intdiv2", r.real_intdiv2},
              {"filter_pass_fraction", r.filter_pass_fraction},
              {"fold_count", r.fold_count},
              {"reps", r.reps},
              {"per_rep", r.per_rep},
              {"per_fold", r.per_fold},
              {"real_count", r.real_count},
              {"gen_count", r.gen_count}};
}

}  // namespace grammargen
