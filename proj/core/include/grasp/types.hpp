#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace grasp {

/// Grasp classes in fixed order; the order doubles as the tie-break rule.
enum class GraspClass : int { Lateral = 0, Pincer = 1, Palmar = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<GraspClass, kNumClasses> kAllClasses = {
    GraspClass::Lateral, GraspClass::Pincer, GraspClass::Palmar};

constexpr std::size_t class_index(GraspClass c) noexcept {
  return static_cast<std::size_t>(c);
}
GraspClass class_from_index(std::size_t index);

std::string_view to_string(GraspClass c) noexcept;
std::optional<GraspClass> parse_grasp_class(std::string_view text) noexcept;

enum class Paradigm { ActualMovement, MotorImagery };

std::string_view to_string(Paradigm p) noexcept;
std::optional<Paradigm> parse_paradigm(std::string_view text) noexcept;

}  // namespace grasp
