// Benchmarks the OpenMP metric and clustering kernels against the serial
// reference implementations kept for testing, and checks they agree.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fedsight/evaluate.hpp"
#include "fedsight/personas.hpp"
#include "fedsight/rng.hpp"
#include "support/reference_metrics.hpp"

namespace {

using fedsight::RateDecision;
using fedsight::Rng;

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_ms(F&& f, int repeats = 3) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    double start = now_ms();
    f();
    best = std::min(best, now_ms() - start);
  }
  return best;
}

RateDecision random_decision(Rng& rng) {
  return RateDecision::from_bps(
      25 * static_cast<int>(fedsight::uniform_int(rng, -4, 4)));
}

std::string random_doc(Rng& rng, int words) {
  static const char* kWords[] = {
      "inflation", "rates",    "committee", "growth",   "labor",  "market",
      "policy",    "target",   "range",     "economic", "outlook", "held",
      "steady",    "pressure", "hiring",    "prices",   "basis",  "points"};
  std::string doc;
  for (int w = 0; w < words; ++w) {
    if (w > 0) doc += ' ';
    doc += kWords[fedsight::uniform_int(rng, 0, 17)];
  }
  return doc;
}

bool g_all_ok = true;

void check(bool ok, const char* what) {
  if (!ok) {
    std::fprintf(stderr, "MISMATCH: %s\n", what);
    g_all_ok = false;
  }
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; parallel and serial paths coincide\n");
#endif

  Rng rng(20240814u);

  // --- vote metrics ---------------------------------------------------------
  const std::size_t n = 4000, runs = 5, agents = 3;
  std::vector<std::vector<std::vector<RateDecision>>> votes(n);
  std::vector<RateDecision> actuals(n);
  for (std::size_t i = 0; i < n; ++i) {
    actuals[i] = random_decision(rng);
    votes[i].assign(runs, std::vector<RateDecision>(agents));
    for (std::size_t j = 0; j < runs; ++j) {
      for (std::size_t k = 0; k < agents; ++k) {
        votes[i][j][k] = random_decision(rng);
      }
    }
  }

  double kernel_agent = 0.0, ref_agent = 0.0;
  double t_kernel = time_ms(
      [&] { kernel_agent = fedsight::evaluate::agent_accuracy(votes, actuals); });
  double t_ref = time_ms([&] {
    ref_agent = fedsight::testsupport::ref_agent_accuracy(votes, actuals);
  });
  check(kernel_agent == ref_agent, "agent_accuracy");
  std::printf("agent_accuracy      %8.2f ms kernel | %8.2f ms reference (n=%zu)\n",
              t_kernel, t_ref, n);

  double kernel_stab = 0.0, ref_stab = 0.0;
  t_kernel =
      time_ms([&] { kernel_stab = fedsight::evaluate::voting_stability(votes); });
  t_ref = time_ms(
      [&] { ref_stab = fedsight::testsupport::ref_voting_stability(votes); });
  check(kernel_stab == ref_stab, "voting_stability");
  std::printf("voting_stability    %8.2f ms kernel | %8.2f ms reference (n=%zu)\n",
              t_kernel, t_ref, n);

  // --- statement similarity -------------------------------------------------
  const std::size_t docs = 400;
  std::vector<std::string> predicted(docs), actual_docs(docs);
  for (std::size_t i = 0; i < docs; ++i) {
    predicted[i] = random_doc(rng, 120);
    actual_docs[i] = random_doc(rng, 120);
  }
  double kernel_sim = 0.0, ref_sim = 0.0;
  t_kernel = time_ms([&] {
    kernel_sim = fedsight::evaluate::semantic_similarity(predicted, actual_docs);
  });
  t_ref = time_ms([&] {
    ref_sim = fedsight::testsupport::ref_semantic_similarity(predicted, actual_docs);
  });
  check(kernel_sim == ref_sim, "semantic_similarity");
  std::printf("semantic_similarity %8.2f ms kernel | %8.2f ms reference (pairs=%zu)\n",
              t_kernel, t_ref, docs);

  // --- k-means restarts -------------------------------------------------------
  // The restart loop parallelizes only without an observer, so an empty
  // observer gives the serial path with identical per-restart seeds.
  const std::size_t points = 1200, dim = 8;
  std::vector<std::vector<double>> data(points, std::vector<double>(dim));
  for (std::size_t p = 0; p < points; ++p) {
    double center = static_cast<double>(p % 3) * 25.0;
    for (std::size_t d = 0; d < dim; ++d) {
      data[p][d] = center + fedsight::normal_double(rng);
    }
  }
  fedsight::personas::ClusteringResult parallel_result, serial_result;
  t_kernel = time_ms(
      [&] { parallel_result = fedsight::personas::kmeans(data, 3, 99u); }, 1);
  fedsight::personas::KmeansObserver observer = [](int, int, double) {};
  t_ref = time_ms(
      [&] {
        serial_result = fedsight::personas::kmeans(
            data, 3, 99u, fedsight::personas::kKmeansRestarts,
            fedsight::personas::kKmeansMaxIterations, observer);
      },
      1);
  check(parallel_result.inertia == serial_result.inertia, "kmeans inertia");
  check(parallel_result.assignments == serial_result.assignments,
        "kmeans assignments");
  std::printf("kmeans (10 restarts)%8.2f ms parallel | %8.2f ms serial (points=%zu)\n",
              t_kernel, t_ref, points);

  if (!g_all_ok) {
    std::fprintf(stderr, "kernel/reference disagreement detected\n");
    return 1;
  }
  std::printf("all kernels match their serial references\n");
  return 0;
}
