#include "grasp/model_io.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <zlib.h>

#include <fstream>
#include <sstream>

namespace grasp {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatName = "grasp-model";

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    fail(ErrorKind::FormatError, fmt::format("matrix {}x{} has {} values", rows, cols, data.size()));
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json window_to_json(const WindowSpec& w) {
  return {{"window_ms", w.window_ms}, {"step_ms", w.step_ms}, {"expected_segments", w.expected_segments}};
}

WindowSpec window_from_json(const json& j) {
  return {j.at("window_ms").get<double>(), j.at("step_ms").get<double>(),
          j.at("expected_segments").get<std::size_t>()};
}

json bank_to_json(const FilterBankSpec& b) {
  json j = {{"low_hz", b.low_hz},           {"high_hz", b.high_hz},
            {"band_width_hz", b.band_width_hz}, {"band_step_hz", b.band_step_hz},
            {"filter_order", b.filter_order}, {"notch_hz", nullptr}};
  if (b.notch_hz) j["notch_hz"] = *b.notch_hz;
  return j;
}

FilterBankSpec bank_from_json(const json& j) {
  FilterBankSpec b;
  b.low_hz = j.at("low_hz").get<double>();
  b.high_hz = j.at("high_hz").get<double>();
  b.band_width_hz = j.at("band_width_hz").get<double>();
  b.band_step_hz = j.at("band_step_hz").get<double>();
  b.filter_order = j.at("filter_order").get<int>();
  if (!j.at("notch_hz").is_null()) b.notch_hz = j.at("notch_hz").get<double>();
  return b;
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json lda_to_json(const LdaModel& m) {
  return {{"weights", vector_to_json(m.weights)},
          {"bias", m.bias},
          {"mean0", vector_to_json(m.class_means[0])},
          {"mean1", vector_to_json(m.class_means[1])},
          {"shrinkage", m.shrinkage}};
}

LdaModel lda_from_json(const json& j) {
  LdaModel m;
  m.weights = vector_from_json(j.at("weights"));
  m.bias = j.at("bias").get<double>();
  m.class_means = {vector_from_json(j.at("mean0")), vector_from_json(j.at("mean1"))};
  m.shrinkage = j.at("shrinkage").get<double>();
  return m;
}

json spatial_to_json(const SpatialFilterModel& s) {
  json bands = json::array();
  for (const auto& csp : s.per_band) {
    bands.push_back({{"projection", matrix_to_json(csp.projection)},
                     {"eigenvalues", vector_to_json(csp.eigenvalues)},
                     {"m_pairs", csp.m_pairs},
                     {"band_index", csp.band_index}});
  }
  return {{"per_band", std::move(bands)},
          {"filter_bank", bank_to_json(s.filter_bank)},
          {"gamma", s.regularization_gamma}};
}

SpatialFilterModel spatial_from_json(const json& j) {
  SpatialFilterModel s;
  for (const auto& b : j.at("per_band")) {
    CspModel csp;
    csp.projection = matrix_from_json(b.at("projection"));
    csp.eigenvalues = vector_from_json(b.at("eigenvalues"));
    csp.m_pairs = b.at("m_pairs").get<int>();
    csp.band_index = b.at("band_index").get<int>();
    s.per_band.push_back(std::move(csp));
  }
  s.filter_bank = bank_from_json(j.at("filter_bank"));
  s.regularization_gamma = j.at("gamma").get<double>();
  return s;
}

json pipeline_config_to_json(const PipelineConfig& c) {
  return {{"window", window_to_json(c.window)},
          {"filter_bank", bank_to_json(c.filter_bank)},
          {"threshold_scale", c.threshold.scale},
          {"emg_notch_hz", optional_to_json(c.emg.notch_hz)},
          {"emg_highpass_hz", optional_to_json(c.emg.highpass_hz)},
          {"csp_pairs", c.csp_pairs},
          {"gamma", c.gamma},
          {"shrinkage", c.shrinkage},
          {"priors", c.priors == PriorMode::Equal ? "equal" : "empirical"},
          {"n_muscle_channels", c.n_muscle_channels}};
}

PriorMode priors_from_json(const json& j) {
  const auto text = j.get<std::string>();
  if (text == "equal") return PriorMode::Equal;
  if (text == "empirical") return PriorMode::Empirical;
  fail(ErrorKind::FormatError, fmt::format("unknown prior mode '{}'", text));
}

PipelineConfig pipeline_config_from_json(const json& j) {
  PipelineConfig c;
  c.window = window_from_json(j.at("window"));
  c.filter_bank = bank_from_json(j.at("filter_bank"));
  c.threshold.scale = j.at("threshold_scale").get<double>();
  c.emg.notch_hz = optional_from_json(j.at("emg_notch_hz"));
  c.emg.highpass_hz = optional_from_json(j.at("emg_highpass_hz"));
  c.csp_pairs = j.at("csp_pairs").get<int>();
  c.gamma = j.at("gamma").get<double>();
  c.shrinkage = j.at("shrinkage").get<double>();
  c.priors = priors_from_json(j.at("priors"));
  c.n_muscle_channels = j.at("n_muscle_channels").get<std::size_t>();
  return c;
}

json pattern_to_json(const ActivationPattern& p) {
  std::string bits;
  bits.reserve(p.size());
  for (Eigen::Index r = 0; r < p.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.values.cols(); ++c) bits.push_back(p.values(r, c) ? '1' : '0');
  }
  return {{"trial_id", p.trial_id},
          {"class", p.class_label ? json(std::string(to_string(*p.class_label))) : json(nullptr)},
          {"bits", std::move(bits)}};
}

json library_to_json(const PatternLibrary& lib) {
  json patterns = json::array();
  for (auto c : kAllClasses) {
    for (const auto& p : lib.patterns(c)) patterns.push_back(pattern_to_json(p));
  }
  return {{"window", window_to_json(lib.window())},
          {"n_channels", lib.n_channels()},
          {"n_segments", lib.n_segments()},
          {"patterns", std::move(patterns)}};
}

PatternLibrary library_from_json(const json& j) {
  const auto n_channels = j.at("n_channels").get<std::size_t>();
  const auto n_segments = j.at("n_segments").get<std::size_t>();
  PatternLibrary lib(window_from_json(j.at("window")), n_channels, n_segments);
  for (const auto& pj : j.at("patterns")) {
    ActivationPattern p;
    p.trial_id = pj.at("trial_id").get<std::string>();
    if (!pj.at("class").is_null()) {
      const auto label = parse_grasp_class(pj.at("class").get<std::string>());
      if (!label) fail(ErrorKind::FormatError, "unknown class in library pattern");
      p.class_label = *label;
    }
    const auto bits = pj.at("bits").get<std::string>();
    if (bits.size() != n_channels * n_segments) {
      fail(ErrorKind::FormatError, fmt::format("pattern {} has {} bits, expected {}", p.trial_id,
                                               bits.size(), n_channels * n_segments));
    }
    p.values.resize(static_cast<Eigen::Index>(n_channels), static_cast<Eigen::Index>(n_segments));
    for (std::size_t k = 0; k < bits.size(); ++k) {
      if (bits[k] != '0' && bits[k] != '1') fail(ErrorKind::FormatError, "pattern bits must be 0/1");
      p.values.data()[k] = bits[k] == '1' ? 1 : 0;
    }
    lib.add(std::move(p));
  }
  return lib;
}

json pipeline_to_json(const PipelineModel& m) {
  json classifiers = json::array();
  for (const auto& c : m.channel_classifiers) {
    classifiers.push_back({{"emg_channel_index", c.emg_channel_index},
                           {"lda", lda_to_json(c.lda)},
                           {"spatial", spatial_to_json(c.spatial)}});
  }
  return {{"channel_classifiers", std::move(classifiers)},
          {"config", pipeline_config_to_json(m.config)},
          {"library", library_to_json(m.library)},
          {"trained_on", to_string(m.trained_on)},
          {"sample_rate_hz", m.sample_rate_hz},
          {"n_eeg_channels", m.n_eeg_channels},
          {"training_trial_ids", m.training_trial_ids}};
}

Paradigm paradigm_from_json(const json& j) {
  const auto p = parse_paradigm(j.get<std::string>());
  if (!p) fail(ErrorKind::FormatError, "unknown paradigm");
  return *p;
}

PipelineModel pipeline_from_json(const json& j) {
  PipelineModel m;
  for (const auto& c : j.at("channel_classifiers")) {
    m.channel_classifiers.push_back({c.at("emg_channel_index").get<std::size_t>(),
                                     lda_from_json(c.at("lda")), spatial_from_json(c.at("spatial"))});
  }
  m.config = pipeline_config_from_json(j.at("config"));
  m.library = library_from_json(j.at("library"));
  m.trained_on = paradigm_from_json(j.at("trained_on"));
  m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  m.n_eeg_channels = j.at("n_eeg_channels").get<Eigen::Index>();
  m.training_trial_ids = j.at("training_trial_ids").get<std::vector<std::string>>();
  return m;
}

json baseline_to_json(const BaselineModel& m) {
  json spatial = json::array();
  for (const auto& s : m.spatial) spatial.push_back(spatial_to_json(s));
  json heads = json::array();
  for (const auto& h : m.head.one_vs_rest) heads.push_back(lda_to_json(h));
  json pairs = json::array();
  for (const auto& h : m.pair_heads) pairs.push_back(lda_to_json(h));
  return {{"kind", to_string(m.kind)},
          {"config",
           {{"filter_bank", bank_to_json(m.config.filter_bank)},
            {"csp_pairs", m.config.csp_pairs},
            {"gamma", m.config.gamma},
            {"shrinkage", m.config.shrinkage},
            {"scheme", m.config.scheme == MulticlassScheme::OneVsRest ? "one-vs-rest" : "pairwise"}}},
          {"spatial", std::move(spatial)},
          {"one_vs_rest", std::move(heads)},
          {"pair_heads", std::move(pairs)},
          {"sample_rate_hz", m.sample_rate_hz},
          {"n_eeg_channels", m.n_eeg_channels},
          {"training_trial_ids", m.training_trial_ids}};
}

BaselineModel baseline_from_json(const json& j) {
  BaselineModel m;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == to_string(BaselineKind::ModelI)) {
    m.kind = BaselineKind::ModelI;
  } else if (kind == to_string(BaselineKind::ModelII)) {
    m.kind = BaselineKind::ModelII;
  } else {
    fail(ErrorKind::FormatError, fmt::format("unknown baseline kind '{}'", kind));
  }
  const auto& c = j.at("config");
  m.config.filter_bank = bank_from_json(c.at("filter_bank"));
  m.config.csp_pairs = c.at("csp_pairs").get<int>();
  m.config.gamma = c.at("gamma").get<double>();
  m.config.shrinkage = c.at("shrinkage").get<double>();
  const auto scheme = c.at("scheme").get<std::string>();
  if (scheme == "one-vs-rest") {
    m.config.scheme = MulticlassScheme::OneVsRest;
  } else if (scheme == "pairwise") {
    m.config.scheme = MulticlassScheme::Pairwise;
  } else {
    fail(ErrorKind::FormatError, fmt::format("unknown scheme '{}'", scheme));
  }
  for (const auto& s : j.at("spatial")) m.spatial.push_back(spatial_from_json(s));
  const auto& heads = j.at("one_vs_rest");
  const auto& pairs = j.at("pair_heads");
  if (heads.size() != kNumClasses || pairs.size() != m.pair_heads.size()) {
    fail(ErrorKind::FormatError, "baseline head count mismatch");
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) m.head.one_vs_rest[k] = lda_from_json(heads[k]);
  for (std::size_t k = 0; k < m.pair_heads.size(); ++k) m.pair_heads[k] = lda_from_json(pairs[k]);
  m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  m.n_eeg_channels = j.at("n_eeg_channels").get<Eigen::Index>();
  m.training_trial_ids = j.at("training_trial_ids").get<std::vector<std::string>>();
  return m;
}

std::uint32_t payload_crc(const std::string& text) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(text.data()),
            static_cast<uInt>(text.size())));
}

}  // namespace

std::string serialize_model(const AnyModel& model) {
  json payload;
  std::string kind;
  if (const auto* p = std::get_if<PipelineModel>(&model)) {
    kind = "pipeline";
    payload = pipeline_to_json(*p);
  } else {
    kind = "baseline";
    payload = baseline_to_json(std::get<BaselineModel>(model));
  }
  json doc = {{"format", kFormatName},
              {"version", kModelFormatVersion},
              {"kind", kind},
              {"crc32", payload_crc(payload.dump())},
              {"payload", std::move(payload)}};
  return doc.dump(1) + "\n";
}

AnyModel deserialize_model(std::string_view text, const std::string& source) {
  try {
    const json doc = json::parse(text);
    if (!doc.is_object() || doc.value("format", "") != kFormatName) {
      fail(ErrorKind::FormatError, fmt::format("{}: not a grasp model file", source));
    }
    const int version = doc.at("version").get<int>();
    if (version > kModelFormatVersion) {
      fail(ErrorKind::VersionMismatch, fmt::format("{}: model version {} is newer than supported {}",
                                                   source, version, kModelFormatVersion));
    }
    const auto& payload = doc.at("payload");
    if (payload_crc(payload.dump()) != doc.at("crc32").get<std::uint32_t>()) {
      fail(ErrorKind::FormatError, fmt::format("{}: payload checksum mismatch", source));
    }
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "pipeline") return pipeline_from_json(payload);
    if (kind == "baseline") return baseline_from_json(payload);
    fail(ErrorKind::FormatError, fmt::format("{}: unknown model kind '{}'", source, kind));
  } catch (const json::exception& e) {
    fail(ErrorKind::FormatError, fmt::format("{}: {}", source, e.what()));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::VersionMismatch || e.kind() == ErrorKind::FormatError) throw;
    fail(ErrorKind::FormatError, fmt::format("{}: {}", source, e.what()));
  }
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out << serialize_model(model);
  if (!out) fail(ErrorKind::IoError, fmt::format("write to {} failed", path.string()));
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::FormatError, fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str(), path.string());
}

}  // namespace grasp
