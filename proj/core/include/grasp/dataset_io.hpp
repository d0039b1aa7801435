#pragma once

#include "grasp/kv_text.hpp"
#include "grasp/signal.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grasp {

/// Per-trial binary signal file:
///   16 bytes  magic "GRSPDAT1" followed by 8 zero bytes
///   u32       n_channels (little-endian)
///   u32       n_samples
///   f64       sample rate in Hz
///   f32 * n_channels * n_samples, channel-major
///   u32       CRC-32 (zlib polynomial) of the sample bytes
inline constexpr std::string_view kSignalMagic = "GRSPDAT1";
inline constexpr std::size_t kSignalMagicBytes = 16;
inline constexpr std::string_view kManifestFileName = "manifest.txt";
inline constexpr int kDatasetFormatVersion = 1;

struct SignalFile {
  SampleMatrix samples;
  double sample_rate_hz = 0.0;
};

/// Samples are narrowed to f32.
void write_signal_file(const std::filesystem::path& path, const SampleMatrix& samples,
                       double sample_rate_hz);
/// Throws FormatError for bad structure or truncation, ChecksumMismatch for
/// payload corruption.
SignalFile read_signal_file(const std::filesystem::path& path);

/// What to do with the reference EMG electrode when loading.
enum class ReferenceMode { Drop, Subtract };

struct TrialEntry {
  std::string trial_id;
  Paradigm paradigm = Paradigm::ActualMovement;
  std::optional<GraspClass> class_label;
  std::string eeg_file;
  std::optional<std::string> emg_file;

  friend bool operator==(const TrialEntry&, const TrialEntry&) = default;
};

struct DatasetManifest {
  int version = kDatasetFormatVersion;
  double sample_rate_hz = 0.0;
  std::vector<std::string> eeg_channel_names;
  /// Channels as stored in EMG files, including the reference if any.
  std::vector<std::string> emg_channel_names;
  std::optional<std::size_t> reference_emg_channel;
  ReferenceMode reference_mode = ReferenceMode::Drop;
  std::vector<TrialEntry> trial_entries;

  KeyValueDocument to_document() const;
  static DatasetManifest from_document(const KeyValueDocument& doc);

  /// Unique ids, non-empty channel lists, and every referenced file present
  /// under `directory`.
  void validate(const std::filesystem::path& directory) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Writes signal files plus manifest.txt into `directory` (created if needed).
DatasetManifest write_dataset(std::span<const Trial> trials, const std::filesystem::path& directory);

DatasetManifest read_manifest(const std::filesystem::path& directory);

/// Loads every trial; the reference EMG channel is dropped or subtracted per
/// the manifest so trials carry muscle channels only.
std::vector<Trial> read_dataset(const std::filesystem::path& directory);

}  // namespace grasp
