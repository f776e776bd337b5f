#include "wristangle/alignment.hpp"

#include <fstream>

#include <fmt/format.h>

#include "wristangle/error.hpp"

namespace wristangle {

void AlignQueue::push_strain(StrainFrame f) {
  std::lock_guard lock(mu_);
  if (flushed_) throw Error(ErrorKind::Ordering, "strain frame pushed after flush");
  if (f.t_ms <= last_strain_t_)
    throw Error(ErrorKind::Ordering, fmt::format("strain timestamp {} does not follow {}",
                                                 f.t_ms, last_strain_t_));
  last_strain_t_ = f.t_ms;
  strain_.push_back(std::move(f));
}

void AlignQueue::push_imu(const ImuFrame& f) {
  std::lock_guard lock(mu_);
  if (flushed_) throw Error(ErrorKind::Ordering, "imu frame pushed after flush");
  if (f.t_ms < last_imu_t_)
    throw Error(ErrorKind::Ordering,
                fmt::format("imu timestamp {} precedes {}", f.t_ms, last_imu_t_));
  last_imu_t_ = f.t_ms;
  if (f.t_ms < emitted_until_) {
    ++stats_.imu_late;
    return;
  }
  imu_.push_back(f);
}

void AlignQueue::flush() {
  std::lock_guard lock(mu_);
  flushed_ = true;
}

std::vector<AlignedSample> AlignQueue::drain() {
  std::lock_guard lock(mu_);
  std::vector<AlignedSample> out;
  while (strain_.size() >= 2 || (flushed_ && !strain_.empty())) {
    StrainFrame frame = std::move(strain_.front());
    strain_.pop_front();
    const bool open_right = strain_.empty();
    const std::int64_t t_end = open_right ? 0 : strain_.front().t_ms;

    while (!imu_.empty() && imu_.front().t_ms < frame.t_ms) {
      // Only possible before the first strain frame: later ones are consumed
      // by the previous interval.
      ++stats_.imu_before_first_strain;
      imu_.pop_front();
    }
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    int count = 0;
    while (!imu_.empty() && (open_right || imu_.front().t_ms < t_end)) {
      sum += imu_.front().theta;
      ++count;
      imu_.pop_front();
    }
    emitted_until_ = open_right ? std::numeric_limits<std::int64_t>::max() : t_end;

    AlignedSample s;
    s.t_ms = frame.t_ms;
    s.voltages = std::move(frame.voltages);
    s.imu_count = count;
    if (count > 0) {
      s.theta_avg = sum / count;
      prev_avg_ = s.theta_avg;
      have_prev_ = true;
    } else if (have_prev_) {
      s.theta_avg = prev_avg_;
      s.imputed = true;
    } else {
      ++stats_.dropped_empty;
      continue;
    }
    out.push_back(std::move(s));
  }
  return out;
}

AlignStats AlignQueue::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::vector<AlignedSample> align_streams(std::span<const StrainFrame> strain,
                                         std::span<const ImuFrame> imu, AlignStats* stats) {
  AlignQueue q;
  for (const auto& f : strain) q.push_strain(f);
  for (const auto& f : imu) q.push_imu(f);
  q.flush();
  auto out = q.drain();
  if (stats) *stats = q.stats();
  return out;
}

void write_aligned_csv(const std::filesystem::path& path, std::span<const AlignedSample> samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
  for (const auto& s : samples) {
    out << s.t_ms;
    for (Index i = 0; i < s.voltages.size(); ++i) out << fmt::format(",{:.6f}", s.voltages(i));
    out << fmt::format(",{:.6f},{:.6f},{:.6f},{}\n", s.theta_avg(0), s.theta_avg(1),
                       s.theta_avg(2), s.imputed ? 1 : 0);
  }
  if (!out) throw Error(ErrorKind::Io, fmt::format("write to '{}' failed", path.string()));
}

}  // namespace wristangle
