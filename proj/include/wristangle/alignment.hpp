#pragma once

// Dual-rate stream alignment. Strain frames are the time base: the frame at
// t_i owns every IMU frame with t_i <= t < t_{i+1}, and the mean of those
// angles becomes the frame's label.

#include <cstdint>
#include <deque>
#include <mutex>
#include <span>
#include <vector>

#include "wristangle/acquisition.hpp"

namespace wristangle {

struct AlignedSample {
  std::int64_t t_ms = 0;
  Vector voltages;
  Eigen::Vector3d theta_avg = Eigen::Vector3d::Zero();
  // No IMU frame fell inside the interval; theta_avg repeats the previous one.
  bool imputed = false;
  int imu_count = 0;
};

struct AlignStats {
  std::uint64_t imu_before_first_strain = 0;  // never assignable
  std::uint64_t imu_late = 0;                 // arrived after its interval was emitted
  std::uint64_t dropped_empty = 0;            // leading intervals with no IMU and no prior mean
};

// Thread-safe queue: push_strain / push_imu may come from two producers,
// drain from a single consumer.
class AlignQueue {
 public:
  // Strain timestamps must be strictly increasing, IMU timestamps non-decreasing.
  void push_strain(StrainFrame f);
  void push_imu(const ImuFrame& f);

  // Marks the end of the streams so the last strain interval, open on the
  // right, can be emitted. Pushing after flush is rejected.
  void flush();

  // Emits samples for every closed interval, in strain order.
  std::vector<AlignedSample> drain();

  AlignStats stats() const;

 private:
  mutable std::mutex mu_;
  std::deque<StrainFrame> strain_;
  std::deque<ImuFrame> imu_;
  std::int64_t last_strain_t_ = -1;
  std::int64_t last_imu_t_ = -1;
  // Left edge of the oldest interval that has not been emitted yet.
  std::int64_t emitted_until_ = -1;
  bool have_prev_ = false;
  Eigen::Vector3d prev_avg_ = Eigen::Vector3d::Zero();
  bool flushed_ = false;
  AlignStats stats_;
};

// Batch convenience: push everything, flush, drain.
std::vector<AlignedSample> align_streams(std::span<const StrainFrame> strain,
                                         std::span<const ImuFrame> imu,
                                         AlignStats* stats = nullptr);

// Aligned CSV: t_ms,v1..vm,theta_x,theta_y,theta_z,imputed
void write_aligned_csv(const std::filesystem::path& path, std::span<const AlignedSample> samples);

}  // namespace wristangle
