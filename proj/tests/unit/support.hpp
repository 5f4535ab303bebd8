#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "predq/engine/records.hpp"
#include "predq/engine/run_control.hpp"
#include "predq/workload/job.hpp"

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(PREDQ_TEST_DATA_DIR) / name;
}

// Scratch file under the system temp dir, removed on destruction.
class TempFile {
 public:
  TempFile(const std::string& name, const std::string& contents)
      : path_(std::filesystem::temp_directory_path() / ("predq_" + name)) {
    std::ofstream(path_) << contents;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline predq::workload::JobSpec job(std::uint64_t id, double arrival, double size,
                                    std::optional<double> predicted = std::nullopt,
                                    std::optional<predq::workload::SizeClass> bit = std::nullopt) {
  predq::workload::JobSpec j;
  j.id = id;
  j.arrival_time = arrival;
  j.true_size = size;
  j.predicted_size = predicted;
  j.class_bit = bit;
  return j;
}

inline predq::engine::RunControl control(std::uint64_t measured, std::uint64_t warmup = 0,
                                         std::uint64_t max_in_system = 1'000'000) {
  predq::engine::RunControl c;
  c.warmup_jobs = warmup;
  c.measured_jobs = measured;
  c.max_in_system = max_in_system;
  return c;
}

inline double mean_response(const predq::engine::Records& records) {
  double s = 0.0;
  for (const auto& r : records) s += r.response();
  return s / static_cast<double>(records.size());
}

}  // namespace testing
