#include "grasp/evaluation.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <thread>
#include <unordered_set>

namespace grasp {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Proposed: return "proposed";
    case Method::ModelI: return "model1";
    case Method::ModelII: return "model2";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) noexcept {
  for (auto m : kAllMethods) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::string_view display_name(Method method) noexcept {
  switch (method) {
    case Method::Proposed: return "Proposed";
    case Method::ModelI: return "Model I";
    case Method::ModelII: return "Model II";
  }
  return "?";
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::EmptyInput, "summarize: no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

EvaluationReport make_report(Method method, Paradigm paradigm, std::vector<double> per_fold_accuracy,
                             std::vector<TrialRecord> records) {
  EvaluationReport r;
  r.method = method;
  r.paradigm = paradigm;
  const auto s = summarize(per_fold_accuracy);
  r.per_fold_accuracy = std::move(per_fold_accuracy);
  r.mean_accuracy = s.mean;
  r.std_accuracy = s.std_dev;
  for (const auto& rec : records) ++r.confusion[class_index(rec.truth)][class_index(rec.predicted)];
  r.per_trial_records = std::move(records);
  return r;
}

std::vector<std::size_t> stratified_folds(std::span<const GraspClass> labels, std::size_t k,
                                          std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::InsufficientData, fmt::format("need at least 2 folds, got {}", k));
  std::vector<std::size_t> fold(labels.size(), 0);
  std::mt19937_64 rng(seed);
  for (auto c : kAllClasses) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < k) {
      fail(ErrorKind::InsufficientData,
           fmt::format("class {} has {} trials, fewer than {} folds", to_string(c), members.size(), k));
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) fold[members[j]] = j % k;
  }
  return fold;
}

namespace {

struct Pool {
  std::vector<const Trial*> trials;
  std::vector<std::size_t> fold;
};

Pool labeled_pool(std::span<const Trial> trials, Paradigm paradigm) {
  Pool p;
  for (const auto& t : trials) {
    if (t.paradigm == paradigm && t.class_label) p.trials.push_back(&t);
  }
  return p;
}

std::vector<GraspClass> labels_of(const Pool& p) {
  std::vector<GraspClass> out;
  out.reserve(p.trials.size());
  for (const auto* t : p.trials) out.push_back(*t->class_label);
  return out;
}

/// Fold 0 is the test set, fold 1 the rest.
std::vector<std::size_t> holdout_split(std::span<const GraspClass> labels, double test_fraction,
                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("test fraction {} outside (0, 1)", test_fraction));
  }
  std::vector<std::size_t> fold(labels.size(), 1);
  std::mt19937_64 rng(seed);
  for (auto c : kAllClasses) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < 2) {
      fail(ErrorKind::InsufficientData, fmt::format("class {} needs 2 trials for a split", to_string(c)));
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(members.size()))), 1,
        members.size() - 1);
    for (std::size_t j = 0; j < n_test; ++j) fold[members[j]] = 0;
  }
  return fold;
}

struct FoldResult {
  double accuracy = 0.0;
  std::vector<TrialRecord> records;
  FoldAudit audit;
};

FoldResult run_fold(const EvaluationConfig& config, Method method, std::vector<Trial> train,
                    const std::vector<const Trial*>& test) {
  FoldResult out;
  for (const auto* t : test) out.audit.test_ids.push_back(t->id);
  auto record = [&](const Trial& t, GraspClass predicted) {
    out.records.push_back({t.id, *t.class_label, predicted});
  };
  if (method == Method::Proposed) {
    const auto model = train_pipeline(train, config.pipeline);
    out.audit.fit_ids = model.training_trial_ids;
    out.audit.library_ids = model.library.trial_ids();
    for (const auto* t : test) record(*t, classify_trial(model, *t, config.matching).predicted);
  } else {
    const auto kind = method == Method::ModelI ? BaselineKind::ModelI : BaselineKind::ModelII;
    const auto& bc = method == Method::ModelI ? config.model1 : config.model2;
    const auto model = train_baseline(kind, train, bc);
    out.audit.fit_ids = model.training_trial_ids;
    for (const auto* t : test) record(*t, predict_baseline(model, *t));
  }
  const auto correct = std::count_if(out.records.begin(), out.records.end(),
                                     [](const TrialRecord& r) { return r.truth == r.predicted; });
  out.accuracy = out.records.empty() ? 0.0
                                     : static_cast<double>(correct) / static_cast<double>(out.records.size());
  return out;
}

EvaluationReport evaluate(std::span<const Trial> trials, const EvaluationConfig& config, Method method,
                          const std::function<std::vector<std::size_t>(std::span<const GraspClass>)>& assign,
                          std::size_t n_run_folds) {
  Pool test_pool = labeled_pool(trials, config.paradigm);
  const bool transfer = config.paradigm == Paradigm::MotorImagery && method == Method::Proposed;
  Pool train_pool = transfer ? labeled_pool(trials, Paradigm::ActualMovement) : test_pool;
  if (test_pool.trials.empty() || train_pool.trials.empty()) {
    fail(ErrorKind::InsufficientData,
         fmt::format("no labeled {} trials to evaluate", to_string(config.paradigm)));
  }
  test_pool.fold = assign(labels_of(test_pool));
  train_pool.fold = transfer ? assign(labels_of(train_pool)) : test_pool.fold;

  std::vector<std::function<FoldResult()>> jobs;
  for (std::size_t f = 0; f < n_run_folds; ++f) {
    std::vector<const Trial*> test;
    for (std::size_t i = 0; i < test_pool.trials.size(); ++i) {
      if (test_pool.fold[i] == f) test.push_back(test_pool.trials[i]);
    }
    jobs.push_back([&config, &train_pool, method, f, test = std::move(test)] {
      std::vector<Trial> train;
      for (std::size_t i = 0; i < train_pool.trials.size(); ++i) {
        if (train_pool.fold[i] != f) train.push_back(*train_pool.trials[i]);
      }
      return run_fold(config, method, std::move(train), test);
    });
  }

  std::size_t parallel = config.max_parallel_folds;
  if (parallel == 0) parallel = std::max(1u, std::thread::hardware_concurrency());
  std::vector<FoldResult> results;
  for (std::size_t begin = 0; begin < jobs.size(); begin += parallel) {
    const auto end = std::min(jobs.size(), begin + parallel);
    if (end - begin == 1) {
      results.push_back(jobs[begin]());
      continue;
    }
    std::vector<std::future<FoldResult>> running;
    for (auto j = begin; j < end; ++j) running.push_back(std::async(std::launch::async, jobs[j]));
    for (auto& r : running) results.push_back(r.get());
  }

  std::vector<double> acc;
  std::vector<TrialRecord> records;
  std::vector<FoldAudit> audits;
  for (auto& r : results) {
    acc.push_back(r.accuracy);
    records.insert(records.end(), r.records.begin(), r.records.end());
    audits.push_back(std::move(r.audit));
  }
  auto report = make_report(method, config.paradigm, std::move(acc), std::move(records));
  report.audits = std::move(audits);
  return report;
}

}  // namespace

EvaluationReport cross_validate(std::span<const Trial> trials, const EvaluationConfig& config,
                                Method method) {
  const auto k = config.k_folds;
  return evaluate(
      trials, config, method,
      [&](std::span<const GraspClass> labels) { return stratified_folds(labels, k, config.fold_seed); },
      k);
}

EvaluationReport holdout_evaluate(std::span<const Trial> trials, const EvaluationConfig& config,
                                  Method method, double test_fraction) {
  return evaluate(
      trials, config, method,
      [&](std::span<const GraspClass> labels) {
        return holdout_split(labels, test_fraction, config.fold_seed);
      },
      1);
}

std::size_t count_leakage_violations(const EvaluationReport& report) {
  std::size_t violations = 0;
  for (const auto& audit : report.audits) {
    std::unordered_set<std::string> used(audit.fit_ids.begin(), audit.fit_ids.end());
    used.insert(audit.library_ids.begin(), audit.library_ids.end());
    for (const auto& id : audit.test_ids) violations += used.count(id);
  }
  return violations;
}

}  // namespace grasp
