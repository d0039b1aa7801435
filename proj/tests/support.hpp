#pragma once

#include <grasp/emg_activation.hpp>
#include <grasp/errors.hpp>
#include <grasp/signal.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace grasp::test {

inline std::vector<double> sine(double freq_hz, double fs, std::size_t n, double amplitude = 1.0,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs + phase);
  }
  return x;
}

inline double naive_rms(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

inline double naive_rms(const std::vector<double>& x) { return naive_rms(x, 0, x.size()); }

inline SignalEpoch epoch_from_rows(const std::vector<std::vector<double>>& rows, double fs) {
  SampleMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  std::vector<std::string> names;
  for (std::size_t r = 0; r < rows.size(); ++r) names.push_back("ch" + std::to_string(r));
  return SignalEpoch(std::move(m), fs, std::move(names));
}

/// Directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("grasp-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

template <class F>
void expect_error(F&& f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

inline ActivationPattern random_pattern(std::mt19937_64& rng, Eigen::Index rows = 6, Eigen::Index cols = 30,
                                        double p_one = 0.5) {
  std::bernoulli_distribution b(p_one);
  ActivationPattern p;
  p.values.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) p.values(r, c) = b(rng) ? 1 : 0;
  }
  return p;
}

}  // namespace grasp::test
