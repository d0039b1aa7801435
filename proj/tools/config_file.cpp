#include "config_file.hpp"

#include <grasp/errors.hpp>

#include <fmt/format.h>

#include <set>

namespace grasp::cli {

namespace {

const std::set<std::string, std::less<>> kSynthKeys = {
    "n_trials_per_class", "eeg_channels", "emg_channels",    "sample_rate_hz",
    "snr_db",             "coupling_gain", "rng_seed",       "duration_ms",
    "jitter_ms",          "emg_burst_ratio", "imagery_coupling_factor", "coding",
    "class_gain"};

std::size_t count_of(const KeyValueDocument& doc, std::string_view key, std::size_t fallback) {
  const auto v = doc.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) fail(ErrorKind::InvalidConfig, fmt::format("{}: '{}' must be non-negative", doc.source(), key));
  return static_cast<std::size_t>(v);
}

}  // namespace

SynthConfig synth_config_from(const KeyValueDocument& doc) {
  for (const auto& e : doc.entries()) {
    if (!kSynthKeys.contains(e.key)) {
      fail(ErrorKind::InvalidConfig, fmt::format("{}:{}: unknown key '{}'", doc.source(), e.line, e.key));
    }
  }
  SynthConfig c;
  c.n_trials_per_class = count_of(doc, "n_trials_per_class", c.n_trials_per_class);
  c.eeg_channels = count_of(doc, "eeg_channels", c.eeg_channels);
  c.emg_channels = count_of(doc, "emg_channels", c.emg_channels);
  c.sample_rate_hz = doc.get_double("sample_rate_hz", c.sample_rate_hz);
  c.snr_db = doc.get_double("snr_db", c.snr_db);
  c.coupling_gain = doc.get_double("coupling_gain", c.coupling_gain);
  c.rng_seed = count_of(doc, "rng_seed", c.rng_seed);
  c.duration_ms = doc.get_double("duration_ms", c.duration_ms);
  c.jitter_ms = doc.get_double("jitter_ms", c.jitter_ms);
  c.emg_burst_ratio = doc.get_double("emg_burst_ratio", c.emg_burst_ratio);
  c.imagery_coupling_factor = doc.get_double("imagery_coupling_factor", c.imagery_coupling_factor);
  if (const auto coding = doc.get("coding")) {
    const auto parsed = parse_class_coding(*coding);
    if (!parsed) fail(ErrorKind::InvalidConfig, fmt::format("{}: unknown coding '{}'", doc.source(), *coding));
    c.coding = *parsed;
  }
  c.class_gain = doc.get_double("class_gain", c.class_gain);
  c.validate();
  return c;
}

KeyValueDocument synth_config_document(const SynthConfig& c) {
  KeyValueDocument doc;
  doc.add("n_trials_per_class", std::to_string(c.n_trials_per_class));
  doc.add("eeg_channels", std::to_string(c.eeg_channels));
  doc.add("emg_channels", std::to_string(c.emg_channels));
  doc.add("sample_rate_hz", fmt::format("{}", c.sample_rate_hz));
  doc.add("snr_db", fmt::format("{}", c.snr_db));
  doc.add("coupling_gain", fmt::format("{}", c.coupling_gain));
  doc.add("rng_seed", std::to_string(c.rng_seed));
  doc.add("duration_ms", fmt::format("{}", c.duration_ms));
  doc.add("jitter_ms", fmt::format("{}", c.jitter_ms));
  doc.add("emg_burst_ratio", fmt::format("{}", c.emg_burst_ratio));
  doc.add("imagery_coupling_factor", fmt::format("{}", c.imagery_coupling_factor));
  doc.add("coding", std::string(to_string(c.coding)));
  doc.add("class_gain", fmt::format("{}", c.class_gain));
  return doc;
}

}  // namespace grasp::cli
