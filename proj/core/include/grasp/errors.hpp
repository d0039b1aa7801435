#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grasp {

enum class ErrorKind {
  InvalidBand,
  UnstableDesign,
  WindowTooLong,
  InvalidWindow,
  EmptySegment,
  MissingEMG,
  ChannelCountMismatch,
  UnlabeledTrial,
  WrongParadigm,
  EmptyInput,
  DegenerateSegment,
  SingularComposite,
  DimensionMismatch,
  SingleClassInput,
  SingularCovariance,
  EmptyLibrary,
  InvalidConfig,
  InvalidSignal,
  InsufficientData,
  FormatError,
  ChecksumMismatch,
  VersionMismatch,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Broad grouping used to map failures onto process exit codes.
enum class ErrorCategory { Usage, Data, Numerical };

ErrorCategory category_of(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace grasp
