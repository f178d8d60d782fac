#pragma once

// Random valid, progressive quotient models for randomized testing.

#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydiag/diagnosability.hpp"
#include "hydiag/quotient_model.hpp"

namespace hydiag {

struct GeneratorOptions {
  std::size_t max_classes = 6;
  std::size_t max_external = 2;
  std::size_t max_observables = 2;
  double density = 0.3;        // chance of each same-flag external edge
  double internal_rate = 0.08;  // chance of each internal edge, when the model has one
  double time_rate = 0.08;      // chance of each proper time edge
  std::size_t max_attempts = 10'000;
};

namespace detail {

inline QuotientModel random_candidate(std::mt19937_64& rng, const GeneratorOptions& opt) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  const std::size_t n = pick(2, opt.max_classes);
  const std::size_t healthy = pick(1, n - 1);
  const std::size_t n_obs = pick(1, opt.max_observables);
  const std::size_t n_ext = pick(1, opt.max_external);
  const bool with_internal = coin(0.3);

  std::vector<ActionLabel> actions;
  for (std::size_t a = 0; a < n_ext; ++a) actions.push_back({std::string(1, char('a' + a)), ActionKind::External});
  const ActionId fault{actions.size()};
  actions.push_back({"f", ActionKind::Fault});
  const ActionId internal{actions.size()};
  if (with_internal) actions.push_back({"h", ActionKind::Internal});

  std::vector<std::string> observables;
  for (std::size_t o = 0; o < n_obs; ++o) observables.push_back("o" + std::to_string(o));

  std::vector<ClassInfo> classes;
  for (std::size_t i = 0; i < n; ++i) {
    const bool faulty = i >= healthy;
    ClassInfo c;
    c.name = (faulty ? "f" : "n") + std::to_string(faulty ? i - healthy : i);
    c.faulty = faulty;
    c.initial = !faulty && (i == 0 || coin(0.3));
    c.observable = ObservableId{pick(0, n_obs - 1)};
    classes.push_back(std::move(c));
  }
  auto same_side = [&](std::size_t i) {
    return i < healthy ? std::pair<std::size_t, std::size_t>{0, healthy - 1}
                       : std::pair<std::size_t, std::size_t>{healthy, n - 1};
  };

  std::vector<DiscreteEdge> edges;
  std::vector<TimeEdge> time;
  for (std::size_t i = 0; i < healthy; ++i) {
    edges.push_back({ClassId{i}, fault, ClassId{pick(healthy, n - 1)}});
    if (coin(0.2)) edges.push_back({ClassId{i}, fault, ClassId{pick(healthy, n - 1)}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = same_side(i);
    bool any = false;
    for (std::size_t a = 0; a < n_ext; ++a)
      for (std::size_t j = lo; j <= hi; ++j)
        if (coin(opt.density)) {
          edges.push_back({ClassId{i}, ActionId{a}, ClassId{j}});
          any = true;
        }
    if (!any) edges.push_back({ClassId{i}, ActionId{pick(0, n_ext - 1)}, ClassId{pick(lo, hi)}});
    for (std::size_t j = lo; j <= hi; ++j) {
      if (with_internal && coin(opt.internal_rate)) edges.push_back({ClassId{i}, internal, ClassId{j}});
      if (j != i && coin(opt.time_rate)) time.push_back({ClassId{i}, ClassId{j}});
    }
  }
  return QuotientModel(std::move(classes), std::move(actions), std::move(observables),
                       std::move(edges), std::move(time));
}

}  // namespace detail

// Draws candidates until one passes validation and is progressive.
inline QuotientModel random_model(std::mt19937_64& rng, const GeneratorOptions& opt = {}) {
  if (opt.max_classes < 2 || opt.max_external < 1 || opt.max_observables < 1)
    throw std::invalid_argument("random_model: bounds too small");
  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    auto m = detail::random_candidate(rng, opt);
    if (validate_model(m).ok() && check_progressive(m).progressive()) return m;
  }
  throw std::runtime_error("random_model: no valid progressive model generated");
}

// A fixed-seed corpus of `count` models.
inline std::vector<QuotientModel> random_corpus(std::size_t count, std::uint64_t seed,
                                                const GeneratorOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::vector<QuotientModel> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_model(rng, opt));
  return out;
}

}  // namespace hydiag
