#include "doctest.h"

#include <random>
#include <thread>

#include "support.hpp"
#include "wristangle/alignment.hpp"

using namespace wristangle;
using testing::kind_of;

namespace {

StrainFrame strain(std::int64_t t, double v = 1.0) { return {t, Vector::Constant(4, v)}; }
ImuFrame imu(std::int64_t t, double y) { return {t, Eigen::Vector3d(0.5 * y, y, -y)}; }

}  // namespace

TEST_CASE("an interval closes when the next strain frame arrives") {
  AlignQueue q;
  q.push_strain(strain(0));
  for (std::int64_t t = 10; t < 200; t += 30) q.push_imu(imu(t, 1.0));
  CHECK(q.drain().empty());
  q.push_strain(strain(200));
  const auto out = q.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].t_ms == 0);
  CHECK(out[0].imu_count == 7);
  q.push_strain(strain(400));
  CHECK(q.drain().size() == 1);
}

TEST_CASE("interval mean") {
  AlignQueue q;
  q.push_strain(strain(0, 1.2));
  for (int k = 0; k < 6; ++k) q.push_imu(imu(10 + 30 * k, 10.0 + k));
  q.push_strain(strain(200));
  const auto out = q.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].theta_avg.y() == 12.5);
  CHECK(out[0].theta_avg.x() == 6.25);
  CHECK(out[0].voltages(0) == 1.2);
  CHECK_FALSE(out[0].imputed);
}

TEST_CASE("single IMU frame, empty interval, and the right-open boundary") {
  AlignQueue q;
  q.push_strain(strain(0));
  q.push_imu(imu(50, 12.5));
  q.push_strain(strain(200));
  // Exactly at the boundary: belongs to the next interval.
  q.push_strain(strain(400));
  q.push_imu(imu(400, 3.0));
  q.push_strain(strain(600));
  const auto out = q.drain();
  REQUIRE(out.size() == 3);
  CHECK(out[0].theta_avg == imu(50, 12.5).theta);
  CHECK(out[1].imputed);
  CHECK(out[1].imu_count == 0);
  CHECK(out[1].theta_avg.y() == 12.5);
  CHECK(out[2].theta_avg.y() == 3.0);
}

TEST_CASE("leading empty interval is dropped") {
  AlignQueue q;
  q.push_strain(strain(0));
  q.push_strain(strain(200));
  q.push_imu(imu(250, 4.0));
  q.push_strain(strain(400));
  const auto out = q.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].t_ms == 200);
  CHECK(q.stats().dropped_empty == 1);
}

TEST_CASE("ordering errors") {
  AlignQueue q;
  q.push_strain(strain(200));
  CHECK(kind_of([&] { q.push_strain(strain(100)); }) == ErrorKind::Ordering);
  CHECK(kind_of([&] { q.push_strain(strain(200)); }) == ErrorKind::Ordering);
  q.push_imu(imu(50, 0));
  CHECK(kind_of([&] { q.push_imu(imu(40, 0)); }) == ErrorKind::Ordering);
  q.flush();
  CHECK(kind_of([&] { q.push_strain(strain(400)); }) == ErrorKind::Ordering);
}

TEST_CASE("IMU alone never emits") {
  AlignQueue q;
  for (int t = 0; t < 3000; t += 30) q.push_imu(imu(t, 1.0));
  q.flush();
  CHECK(q.drain().empty());
}

TEST_CASE("flush emits the open interval; frames before the first strain are discarded") {
  AlignQueue q;
  q.push_imu(imu(0, 99.0));
  q.push_strain(strain(100));
  q.push_imu(imu(150, 2.0));
  q.push_imu(imu(900, 4.0));
  CHECK(q.drain().empty());
  q.flush();
  const auto out = q.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].theta_avg.y() == 3.0);
  CHECK(q.stats().imu_before_first_strain == 1);
}

TEST_CASE("late IMU frames are counted, not double-assigned") {
  AlignQueue q;
  q.push_strain(strain(0));
  q.push_strain(strain(200));
  q.push_imu(imu(10, 1.0));
  CHECK(q.drain().size() == 1);
  q.push_imu(imu(20, 5.0));  // interval [0, 200) already emitted
  q.push_imu(imu(210, 7.0));
  q.flush();
  const auto out = q.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].theta_avg.y() == 7.0);
  CHECK(q.stats().imu_late == 1);
}

TEST_CASE("emission order is independent of interleaving") {
  std::mt19937_64 rng(3);
  std::vector<StrainFrame> s;
  std::vector<ImuFrame> m;
  for (int i = 0; i < 40; ++i) s.push_back(strain(200 * i, i));
  for (int t = 0; t < 8000; t += 30) m.push_back(imu(t, std::sin(t * 0.001)));
  const auto reference = align_streams(s, m);
  REQUIRE(reference.size() == 40);

  for (int trial = 0; trial < 10; ++trial) {
    AlignQueue q;
    std::size_t a = 0, b = 0;
    std::bernoulli_distribution coin(0.3);
    while (a < s.size() || b < m.size()) {
      if (a < s.size() && (b == m.size() || coin(rng)))
        q.push_strain(s[a++]);
      else
        q.push_imu(m[b++]);
    }
    q.flush();
    const auto out = q.drain();
    REQUIRE(out.size() == reference.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].t_ms == reference[i].t_ms);
      CHECK(out[i].theta_avg == reference[i].theta_avg);
    }
  }
}

TEST_CASE("two producer threads") {
  AlignQueue q;
  std::thread strain_producer([&] {
    for (int i = 0; i < 500; ++i) q.push_strain(strain(200 * i));
  });
  std::thread imu_producer([&] {
    for (int t = 0; t < 100'000; t += 30) q.push_imu(imu(t, 1.0));
  });
  strain_producer.join();
  imu_producer.join();
  q.flush();
  const auto out = q.drain();
  CHECK(out.size() == 500);
  int total = 0;
  for (const auto& s : out) total += s.imu_count;
  CHECK(total == 3334);
}
