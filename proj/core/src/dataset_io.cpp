#include "grasp/dataset_io.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>
#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

namespace grasp {
namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little,
              "signal files are read and written with native little-endian layout");

constexpr std::size_t kHeaderBytes = kSignalMagicBytes + 4 + 4 + 8;

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t offset) {
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  return value;
}

std::uint32_t crc_of(const char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  while (size > 0) {
    const auto n = static_cast<uInt>(std::min(size, kChunk));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), n);
    data += n;
    size -= n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::FormatError, fmt::format("cannot open {}", path.string()));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string_view label_text(const std::optional<GraspClass>& label) {
  return label ? to_string(*label) : std::string_view("unlabeled");
}

}  // namespace

void write_signal_file(const fs::path& path, const SampleMatrix& samples, double sample_rate_hz) {
  std::string out;
  const auto n_values = static_cast<std::size_t>(samples.size());
  out.reserve(kHeaderBytes + 4 * n_values + 4);
  out.append(kSignalMagic);
  out.append(kSignalMagicBytes - kSignalMagic.size(), '\0');
  put<std::uint32_t>(out, static_cast<std::uint32_t>(samples.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(samples.cols()));
  put<double>(out, sample_rate_hz);
  const std::size_t payload_start = out.size();
  for (Eigen::Index c = 0; c < samples.rows(); ++c) {
    for (Eigen::Index i = 0; i < samples.cols(); ++i) put<float>(out, static_cast<float>(samples(c, i)));
  }
  put<std::uint32_t>(out, crc_of(out.data() + payload_start, out.size() - payload_start));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail(ErrorKind::IoError, fmt::format("write to {} failed", path.string()));
}

SignalFile read_signal_file(const fs::path& path) {
  const std::string in = read_file(path);
  const auto name = path.string();
  if (in.size() < kHeaderBytes) {
    fail(ErrorKind::FormatError, fmt::format("{}: truncated header ({} bytes)", name, in.size()));
  }
  if (in.compare(0, kSignalMagic.size(), kSignalMagic) != 0 ||
      in.find_first_not_of('\0', kSignalMagic.size()) < kSignalMagicBytes) {
    fail(ErrorKind::FormatError, fmt::format("{}: bad magic at offset 0", name));
  }
  const auto n_channels = get<std::uint32_t>(in, kSignalMagicBytes);
  const auto n_samples = get<std::uint32_t>(in, kSignalMagicBytes + 4);
  const auto rate = get<double>(in, kSignalMagicBytes + 8);
  const std::size_t payload = 4ull * n_channels * n_samples;
  if (in.size() != kHeaderBytes + payload + 4) {
    fail(ErrorKind::FormatError,
         fmt::format("{}: expected {} bytes for {}x{} samples, found {}", name,
                     kHeaderBytes + payload + 4, n_channels, n_samples, in.size()));
  }
  const auto stored_crc = get<std::uint32_t>(in, kHeaderBytes + payload);
  if (crc_of(in.data() + kHeaderBytes, payload) != stored_crc) {
    fail(ErrorKind::ChecksumMismatch, fmt::format("{}: payload CRC-32 mismatch", name));
  }
  SignalFile out;
  out.sample_rate_hz = rate;
  out.samples.resize(n_channels, n_samples);
  std::size_t offset = kHeaderBytes;
  for (std::uint32_t c = 0; c < n_channels; ++c) {
    for (std::uint32_t i = 0; i < n_samples; ++i, offset += 4) {
      out.samples(c, i) = static_cast<double>(get<float>(in, offset));
    }
  }
  return out;
}

KeyValueDocument DatasetManifest::to_document() const {
  KeyValueDocument doc;
  doc.add("format", "grasp-dataset");
  doc.add("version", std::to_string(version));
  doc.add("sample_rate_hz", fmt::format("{}", sample_rate_hz));
  doc.add("eeg_channels", join_list(eeg_channel_names));
  doc.add("emg_channels", join_list(emg_channel_names));
  doc.add("reference_emg_channel",
          reference_emg_channel ? std::to_string(*reference_emg_channel) : "none");
  doc.add("reference_mode", reference_mode == ReferenceMode::Drop ? "drop" : "subtract");
  doc.add("trial_count", std::to_string(trial_entries.size()));
  for (const auto& t : trial_entries) {
    doc.add("trial", fmt::format("{} {} {} {} {}", t.trial_id, to_string(t.paradigm),
                                 label_text(t.class_label), t.eeg_file,
                                 t.emg_file.value_or("none")));
  }
  return doc;
}

DatasetManifest DatasetManifest::from_document(const KeyValueDocument& doc) {
  const auto& src = doc.source();
  if (doc.require("format") != "grasp-dataset") {
    fail(ErrorKind::FormatError, fmt::format("{}: not a grasp dataset manifest", src));
  }
  DatasetManifest m;
  m.version = static_cast<int>(doc.require_int("version"));
  if (m.version > kDatasetFormatVersion) {
    fail(ErrorKind::VersionMismatch, fmt::format("{}: dataset version {} is newer than supported {}",
                                                 src, m.version, kDatasetFormatVersion));
  }
  m.sample_rate_hz = doc.require_double("sample_rate_hz");
  m.eeg_channel_names = split_list(doc.require("eeg_channels"));
  m.emg_channel_names = split_list(doc.get("emg_channels").value_or(""));
  const auto ref = doc.get("reference_emg_channel").value_or("none");
  if (ref != "none") m.reference_emg_channel = static_cast<std::size_t>(doc.require_int("reference_emg_channel"));
  const auto mode = doc.get("reference_mode").value_or("drop");
  if (mode == "drop") {
    m.reference_mode = ReferenceMode::Drop;
  } else if (mode == "subtract") {
    m.reference_mode = ReferenceMode::Subtract;
  } else {
    fail(ErrorKind::FormatError, fmt::format("{}: unknown reference_mode '{}'", src, mode));
  }
  for (const auto* e : doc.all("trial")) {
    const auto fields = split_list(e->value, ' ');
    std::vector<std::string> parts;
    for (const auto& f : fields) {
      if (!f.empty()) parts.push_back(f);
    }
    if (parts.size() != 5) {
      fail(ErrorKind::FormatError,
           fmt::format("{}:{}: trial entry needs 5 fields, found {}", src, e->line, parts.size()));
    }
    TrialEntry t;
    t.trial_id = parts[0];
    const auto paradigm = parse_paradigm(parts[1]);
    if (!paradigm) {
      fail(ErrorKind::FormatError, fmt::format("{}:{}: unknown paradigm '{}'", src, e->line, parts[1]));
    }
    t.paradigm = *paradigm;
    if (parts[2] != "unlabeled") {
      const auto label = parse_grasp_class(parts[2]);
      if (!label) {
        fail(ErrorKind::FormatError, fmt::format("{}:{}: unknown class '{}'", src, e->line, parts[2]));
      }
      t.class_label = *label;
    }
    t.eeg_file = parts[3];
    if (parts[4] != "none") t.emg_file = parts[4];
    m.trial_entries.push_back(std::move(t));
  }
  if (const auto count = doc.get("trial_count")) {
    if (doc.require_int("trial_count") != static_cast<std::int64_t>(m.trial_entries.size())) {
      fail(ErrorKind::FormatError, fmt::format("{}: trial_count {} but {} trial entries", src,
                                               *count, m.trial_entries.size()));
    }
  }
  return m;
}

void DatasetManifest::validate(const fs::path& directory) const {
  if (eeg_channel_names.empty()) fail(ErrorKind::FormatError, "manifest lists no EEG channels");
  const bool any_emg = std::any_of(trial_entries.begin(), trial_entries.end(),
                                   [](const TrialEntry& t) { return t.emg_file.has_value(); });
  if (any_emg && emg_channel_names.empty()) {
    fail(ErrorKind::FormatError, "manifest references EMG files but lists no EMG channels");
  }
  if (reference_emg_channel && *reference_emg_channel >= emg_channel_names.size()) {
    fail(ErrorKind::FormatError, fmt::format("reference EMG channel {} out of range",
                                             *reference_emg_channel));
  }
  if (!(sample_rate_hz > 0.0)) fail(ErrorKind::FormatError, "manifest sample rate must be positive");
  std::set<std::string> seen;
  for (const auto& t : trial_entries) {
    if (!seen.insert(t.trial_id).second) {
      fail(ErrorKind::FormatError, fmt::format("duplicate trial id '{}'", t.trial_id));
    }
    for (const auto* file : {&t.eeg_file, t.emg_file ? &*t.emg_file : nullptr}) {
      if (file && !fs::exists(directory / *file)) {
        fail(ErrorKind::FormatError,
             fmt::format("trial {}: missing file {}", t.trial_id, (directory / *file).string()));
      }
    }
  }
}

DatasetManifest write_dataset(std::span<const Trial> trials, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) fail(ErrorKind::IoError, fmt::format("cannot create {}: {}", directory.string(), ec.message()));

  DatasetManifest m;
  if (!trials.empty()) {
    m.sample_rate_hz = trials.front().eeg.sample_rate_hz();
    m.eeg_channel_names = trials.front().eeg.channel_names();
  }
  for (const auto& t : trials) {
    if (t.emg) {
      m.emg_channel_names = t.emg->channel_names();
      break;
    }
  }
  std::set<std::string> seen;
  for (const auto& t : trials) {
    if (t.id.empty() || t.id.find_first_of(" \t\n=#") != std::string::npos) {
      fail(ErrorKind::FormatError, fmt::format("trial id '{}' is empty or has reserved characters", t.id));
    }
    if (!seen.insert(t.id).second) fail(ErrorKind::FormatError, fmt::format("duplicate trial id '{}'", t.id));
    if (t.eeg.sample_rate_hz() != m.sample_rate_hz || t.eeg.channel_names() != m.eeg_channel_names) {
      fail(ErrorKind::DimensionMismatch, fmt::format("trial {} EEG layout differs from the first trial", t.id));
    }
    if (t.emg && t.emg->channel_names() != m.emg_channel_names) {
      fail(ErrorKind::DimensionMismatch, fmt::format("trial {} EMG layout differs from the first trial", t.id));
    }
    TrialEntry e;
    e.trial_id = t.id;
    e.paradigm = t.paradigm;
    e.class_label = t.class_label;
    e.eeg_file = t.id + ".eeg.bin";
    write_signal_file(directory / e.eeg_file, t.eeg.samples(), t.eeg.sample_rate_hz());
    if (t.emg) {
      e.emg_file = t.id + ".emg.bin";
      write_signal_file(directory / *e.emg_file, t.emg->samples(), t.emg->sample_rate_hz());
    }
    m.trial_entries.push_back(std::move(e));
  }
  m.to_document().save(directory / kManifestFileName);
  return m;
}

DatasetManifest read_manifest(const fs::path& directory) {
  return DatasetManifest::from_document(KeyValueDocument::load(directory / kManifestFileName));
}

std::vector<Trial> read_dataset(const fs::path& directory) {
  const auto m = read_manifest(directory);
  m.validate(directory);

  auto load = [&](const std::string& file, std::size_t expected_channels) {
    auto sig = read_signal_file(directory / file);
    if (sig.sample_rate_hz != m.sample_rate_hz ||
        static_cast<std::size_t>(sig.samples.rows()) != expected_channels) {
      fail(ErrorKind::FormatError,
           fmt::format("{}: {} channels @ {} Hz, manifest says {} @ {} Hz", file,
                       sig.samples.rows(), sig.sample_rate_hz, expected_channels, m.sample_rate_hz));
    }
    return sig;
  };

  std::vector<Trial> trials;
  trials.reserve(m.trial_entries.size());
  for (const auto& e : m.trial_entries) {
    auto eeg = load(e.eeg_file, m.eeg_channel_names.size());
    Trial t{e.trial_id,
            SignalEpoch(std::move(eeg.samples), m.sample_rate_hz, m.eeg_channel_names),
            std::nullopt, e.paradigm, e.class_label};
    if (e.emg_file) {
      auto emg = load(*e.emg_file, m.emg_channel_names.size());
      SampleMatrix samples = std::move(emg.samples);
      auto names = m.emg_channel_names;
      if (m.reference_emg_channel) {
        const auto ref = static_cast<Eigen::Index>(*m.reference_emg_channel);
        if (m.reference_mode == ReferenceMode::Subtract) {
          const Eigen::RowVectorXd reference = samples.row(ref);
          samples.rowwise() -= reference;
        }
        SampleMatrix kept(samples.rows() - 1, samples.cols());
        for (Eigen::Index r = 0, k = 0; r < samples.rows(); ++r) {
          if (r != ref) kept.row(k++) = samples.row(r);
        }
        samples = std::move(kept);
        names.erase(names.begin() + ref);
      }
      t.emg = SignalEpoch(std::move(samples), m.sample_rate_hz, std::move(names));
    }
    validate_trial(t);
    trials.push_back(std::move(t));
  }
  return trials;
}

}  // namespace grasp
