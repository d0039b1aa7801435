#include "grasp/types.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

namespace grasp {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidBand: return "InvalidBand";
    case ErrorKind::UnstableDesign: return "UnstableDesign";
    case ErrorKind::WindowTooLong: return "WindowTooLong";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::EmptySegment: return "EmptySegment";
    case ErrorKind::MissingEMG: return "MissingEMG";
    case ErrorKind::ChannelCountMismatch: return "ChannelCountMismatch";
    case ErrorKind::UnlabeledTrial: return "UnlabeledTrial";
    case ErrorKind::WrongParadigm: return "WrongParadigm";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DegenerateSegment: return "DegenerateSegment";
    case ErrorKind::SingularComposite: return "SingularComposite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingleClassInput: return "SingleClassInput";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::EmptyLibrary: return "EmptyLibrary";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidSignal: return "InvalidSignal";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnstableDesign:
    case ErrorKind::SingularComposite:
    case ErrorKind::SingularCovariance:
    case ErrorKind::DegenerateSegment:
    case ErrorKind::SingleClassInput:
      return ErrorCategory::Numerical;
    case ErrorKind::InvalidBand:
    case ErrorKind::InvalidWindow:
    case ErrorKind::WindowTooLong:
    case ErrorKind::InvalidConfig:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(kind), message)),
      kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

GraspClass class_from_index(std::size_t index) {
  if (index >= kNumClasses) {
    fail(ErrorKind::InvalidConfig, fmt::format("class index {} out of range", index));
  }
  return static_cast<GraspClass>(index);
}

std::string_view to_string(GraspClass c) noexcept {
  switch (c) {
    case GraspClass::Lateral: return "lateral";
    case GraspClass::Pincer: return "pincer";
    case GraspClass::Palmar: return "palmar";
  }
  return "unknown";
}

std::optional<GraspClass> parse_grasp_class(std::string_view text) noexcept {
  for (auto c : kAllClasses) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Paradigm p) noexcept {
  switch (p) {
    case Paradigm::ActualMovement: return "movement";
    case Paradigm::MotorImagery: return "imagery";
  }
  return "unknown";
}

std::optional<Paradigm> parse_paradigm(std::string_view text) noexcept {
  if (text == "movement") return Paradigm::ActualMovement;
  if (text == "imagery") return Paradigm::MotorImagery;
  return std::nullopt;
}

}  // namespace grasp
