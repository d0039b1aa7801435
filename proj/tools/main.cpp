#include "config_file.hpp"

#include <grasp/baselines.hpp>
#include <grasp/dataset_io.hpp>
#include <grasp/errors.hpp>
#include <grasp/evaluation.hpp>
#include <grasp/matching.hpp>
#include <grasp/model_io.hpp>
#include <grasp/pipeline.hpp>
#include <grasp/report.hpp>
#include <grasp/synth.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace grasp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct ModelOptions {
  double window_ms = WindowSpec{}.window_ms;
  double step_ms = WindowSpec{}.step_ms;
  std::optional<std::string> bands;
  int csp_pairs = kDefaultCspPairs;
  std::optional<double> gamma;
  double shrinkage = kDefaultLdaShrinkage;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--window-ms", o.window_ms, "segment window length")->capture_default_str();
  cmd->add_option("--step-ms", o.step_ms, "segment step")->capture_default_str();
  cmd->add_option("--bands", o.bands,
                  "filter bank: default | 4-40-w4-s2 | bands=11 | broadband | low,high,width,step");
  cmd->add_option("--csp-pairs", o.csp_pairs, "CSP filter pairs per band")->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "covariance shrinkage for CSP");
  cmd->add_option("--shrinkage", o.shrinkage, "LDA shrinkage")->capture_default_str();
}

FilterBankSpec bank_or(const std::optional<std::string>& text, FilterBankSpec fallback) {
  if (!text) return fallback;
  const auto bank = parse_filter_bank(*text);
  if (!bank) fail(ErrorKind::InvalidConfig, fmt::format("unknown filter bank '{}'", *text));
  return *bank;
}

double trial_duration(std::span<const Trial> trials) {
  return trials.empty() ? kDefaultTrialDurationMs : trials.front().eeg.duration_ms();
}

PipelineConfig pipeline_config(const ModelOptions& o, double duration_ms) {
  PipelineConfig c;
  c.window.window_ms = o.window_ms;
  c.window.step_ms = o.step_ms;
  c.window.expected_segments = c.window.segment_count(duration_ms);
  c.filter_bank = bank_or(o.bands, c.filter_bank);
  c.csp_pairs = o.csp_pairs;
  c.gamma = o.gamma.value_or(c.gamma);
  c.shrinkage = o.shrinkage;
  return c;
}

BaselineConfig baseline_config(BaselineKind kind, const ModelOptions& o) {
  auto c = BaselineConfig::defaults(kind);
  c.filter_bank = bank_or(o.bands, c.filter_bank);
  c.csp_pairs = o.csp_pairs;
  c.gamma = o.gamma.value_or(c.gamma);
  c.shrinkage = o.shrinkage;
  return c;
}

BaselineKind baseline_kind(Method m) {
  return m == Method::ModelI ? BaselineKind::ModelI : BaselineKind::ModelII;
}

Method method_from(const std::string& text) {
  const auto m = parse_method(text);
  if (!m) fail(ErrorKind::InvalidConfig, fmt::format("unknown method '{}'", text));
  return *m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out << text;
}

int run_synth(const std::optional<std::string>& config_path, const std::string& out,
              const std::optional<std::uint64_t>& seed) {
  SynthConfig config;
  if (config_path) config = cli::synth_config_from(KeyValueDocument::load(*config_path));
  if (seed) config.rng_seed = *seed;
  config.validate();
  const auto trials = generate_dataset(config);
  const auto manifest = write_dataset(trials, out);
  cli::synth_config_document(config).save(fs::path(out) / "synth_config.txt");
  fmt::print("wrote {} trials to {}\n", manifest.trial_entries.size(), out);
  return kExitOk;
}

int run_train(const std::string& data, const std::string& method_text, const std::string& out,
              const ModelOptions& options) {
  const auto method = method_from(method_text);
  const auto all = read_dataset(data);
  std::vector<Trial> movement;
  for (const auto& t : all) {
    if (t.paradigm == Paradigm::ActualMovement && t.class_label) movement.push_back(t);
  }
  if (movement.empty()) fail(ErrorKind::InsufficientData, "no labeled movement trials to train on");
  if (method == Method::Proposed) {
    const auto model = train_pipeline(movement, pipeline_config(options, trial_duration(movement)));
    save_model(model, out);
    fmt::print("trained proposed pipeline: {} channel classifiers, {} library patterns\n",
               model.channel_classifiers.size(), model.library.size());
  } else {
    const auto kind = baseline_kind(method);
    const auto model = train_baseline(kind, movement, baseline_config(kind, options));
    save_model(model, out);
    fmt::print("trained {} on {} trials\n", display_name(method), model.training_trial_ids.size());
  }
  return kExitOk;
}

int run_classify(const std::string& model_path, const std::string& data, const std::string& out,
                 const std::string& format_text) {
  const auto format = parse_report_format(format_text);
  if (!format) fail(ErrorKind::InvalidConfig, fmt::format("unknown report format '{}'", format_text));
  const auto model = load_model(model_path);
  const auto trials = read_dataset(data);
  std::vector<MatchReport> reports;
  std::vector<std::optional<GraspClass>> truth;
  for (const auto& t : trials) {
    if (const auto* p = std::get_if<PipelineModel>(&model)) {
      reports.push_back(classify_trial(*p, t));
    } else {
      MatchReport r;
      r.trial_id = t.id;
      r.per_class_mean_mse.fill(std::numeric_limits<double>::quiet_NaN());
      r.predicted = predict_baseline(std::get<BaselineModel>(model), t);
      reports.push_back(std::move(r));
    }
    truth.push_back(t.class_label);
  }
  write_text(out, emit_match_reports(reports, *format, truth));
  fmt::print("classified {} trials into {}\n", reports.size(), out);
  return kExitOk;
}

struct EvalOptions {
  std::string data;
  std::string method = "proposed";
  std::size_t folds = 5;
  std::string paradigm = "movement";
  std::string report = "table";
  std::uint64_t seed = 0;
  std::optional<double> holdout;
  std::optional<std::string> out;
  ModelOptions model;
};

int run_eval(const EvalOptions& o) {
  const auto format = parse_report_format(o.report);
  if (!format) fail(ErrorKind::InvalidConfig, fmt::format("unknown report format '{}'", o.report));
  const auto paradigm = parse_paradigm(o.paradigm);
  if (!paradigm) fail(ErrorKind::InvalidConfig, fmt::format("unknown paradigm '{}'", o.paradigm));
  std::vector<Method> methods;
  if (o.method == "all") {
    methods.assign(kAllMethods.begin(), kAllMethods.end());
  } else {
    methods.push_back(method_from(o.method));
  }
  const auto trials = read_dataset(o.data);

  EvaluationConfig config;
  config.pipeline = pipeline_config(o.model, trial_duration(trials));
  config.model1 = baseline_config(BaselineKind::ModelI, o.model);
  config.model2 = baseline_config(BaselineKind::ModelII, o.model);
  if (!o.model.bands) config.model1.filter_bank = broadband_filter_bank();
  if (!o.model.gamma) config.model1.gamma = 0.0;
  config.k_folds = o.folds;
  config.paradigm = *paradigm;
  config.fold_seed = o.seed;

  std::vector<EvaluationReport> reports;
  for (auto m : methods) {
    auto r = o.holdout ? holdout_evaluate(trials, config, m, *o.holdout) : cross_validate(trials, config, m);
    if (const auto leaks = count_leakage_violations(r); leaks != 0) {
      fail(ErrorKind::InvalidConfig, fmt::format("{}: {} leaked test trials", to_string(m), leaks));
    }
    reports.push_back(std::move(r));
  }
  const auto text = emit_report(reports, *format);
  if (o.out) {
    write_text(*o.out, text);
  } else {
    fmt::print("{}", text);
  }
  return kExitOk;
}

int run_inspect(const std::string& data) {
  const auto m = read_manifest(data);
  m.validate(data);
  fmt::print("dataset        {}\n", data);
  fmt::print("version        {}\n", m.version);
  fmt::print("sample rate    {} Hz\n", m.sample_rate_hz);
  fmt::print("EEG channels   {} ({})\n", m.eeg_channel_names.size(), join_list(m.eeg_channel_names));
  fmt::print("EMG channels   {} ({})\n", m.emg_channel_names.size(), join_list(m.emg_channel_names));
  fmt::print("reference EMG  {}\n",
             m.reference_emg_channel ? m.emg_channel_names[*m.reference_emg_channel] : "none");
  fmt::print("trials         {}\n", m.trial_entries.size());
  for (auto p : {Paradigm::ActualMovement, Paradigm::MotorImagery}) {
    std::array<std::size_t, kNumClasses> counts{};
    std::size_t unlabeled = 0;
    for (const auto& e : m.trial_entries) {
      if (e.paradigm != p) continue;
      if (e.class_label) {
        ++counts[class_index(*e.class_label)];
      } else {
        ++unlabeled;
      }
    }
    fmt::print("  {:<9} lateral {}  pincer {}  palmar {}  unlabeled {}\n", to_string(p), counts[0],
               counts[1], counts[2], unlabeled);
  }
  return kExitOk;
}

int exit_code(const Error& e) {
  switch (category_of(e.kind())) {
    case ErrorCategory::Usage: return kExitUsage;
    case ErrorCategory::Data: return kExitData;
    case ErrorCategory::Numerical: return kExitNumerical;
  }
  return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG grasp decoding through EMG activation patterns"};
  app.require_subcommand(1);

  std::optional<std::string> synth_config;
  std::string synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--config", synth_config, "key = value synthesis config");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "override rng_seed");

  std::string train_data, train_method = "proposed", train_out;
  ModelOptions train_opts;
  auto* train = app.add_subcommand("train", "fit a model on the labeled movement trials");
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--method", train_method, "proposed | model1 | model2")->capture_default_str();
  train->add_option("--out", train_out, "model file")->required();
  add_model_options(train, train_opts);

  std::string cls_model, cls_data, cls_out, cls_format = "table";
  auto* classify = app.add_subcommand("classify", "classify every trial of a dataset");
  classify->add_option("--model", cls_model, "model file")->required();
  classify->add_option("--data", cls_data, "dataset directory")->required();
  classify->add_option("--out", cls_out, "report file")->required();
  classify->add_option("--format", cls_format, "table | csv")->capture_default_str();

  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "cross-validate one or all methods");
  eval->add_option("--data", eval_opts.data, "dataset directory")->required();
  eval->add_option("--method", eval_opts.method, "proposed | model1 | model2 | all")->capture_default_str();
  eval->add_option("--folds", eval_opts.folds, "number of stratified folds")->capture_default_str();
  eval->add_option("--paradigm", eval_opts.paradigm, "movement | imagery")->capture_default_str();
  eval->add_option("--report", eval_opts.report, "table | csv")->capture_default_str();
  eval->add_option("--seed", eval_opts.seed, "fold assignment seed")->capture_default_str();
  eval->add_option("--holdout", eval_opts.holdout, "single split with this test fraction");
  eval->add_option("--out", eval_opts.out, "write the report here instead of stdout");
  add_model_options(eval, eval_opts.model);

  std::string inspect_data;
  auto* inspect = app.add_subcommand("inspect", "print a manifest summary");
  inspect->add_option("--data", inspect_data, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) return run_synth(synth_config, synth_out, synth_seed);
    if (*train) return run_train(train_data, train_method, train_out, train_opts);
    if (*classify) return run_classify(cls_model, cls_data, cls_out, cls_format);
    if (*eval) return run_eval(eval_opts);
    if (*inspect) return run_inspect(inspect_data);
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.kind()), e.what());
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "error [IoError]: {}\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
