#include "cv2xdos/receiver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cv2xdos;
using namespace cv2xdos::literals;

namespace {

QueueParams light(std::uint64_t capacity = 256) {
  QueueParams p;
  p.capacity_msgs = capacity;
  p.t_base = 50_us;
  p.c_byte = 1_us;
  p.lambda_pc5 = 2000;
  return p;
}

}  // namespace

TEST(Receiver, ServiceTimes) {
  const auto p = light();
  EXPECT_EQ(processing_time(600, p), 650_us);
  EXPECT_EQ(service_time(600, p), 650_us);
  EXPECT_NEAR(1e6 / static_cast<double>(service_time(600, p).us()), 1538.46, 0.01);
  // A zero-byte filler is bound by the PC5 rate, not the CPU.
  EXPECT_EQ(processing_time(0, p), 50_us);
  EXPECT_EQ(service_time(0, p), 500_us);
  EXPECT_EQ(QueueParams{}.min_service(), 506_us);
}

TEST(Receiver, StepBalance) {
  EXPECT_EQ(step_balance(0, 5, 3), 2u);
  EXPECT_EQ(step_balance(2, 0, 5), 0u);
  EXPECT_EQ(step_balance(250, 10, 0, 256), 256u);
  EXPECT_EQ(step_balance(256, 100, 50, 256), 256u);
  EXPECT_EQ(step_balance(10, 3, 3, 256), 10u);
}

TEST(Receiver, TenInFourOutLeavesSix) {
  ReceiverQueue q(light());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(q.enqueue(build_udp_filler(0, i), 0_us), EnqueueResult::Accepted);
  SimTime t{};
  for (int i = 0; i < 4; ++i) {
    const auto d = q.dispatch_next(t);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->packet.id, static_cast<std::uint64_t>(i));
    t = d->completed_at;
  }
  EXPECT_EQ(q.size(), 6u);
  EXPECT_TRUE(q.conserved());
}

TEST(Receiver, TailDropWhenFull) {
  ReceiverQueue q(light(3));
  for (int i = 0; i < 5; ++i) q.enqueue(build_udp_filler(0, i), 0_us);
  EXPECT_EQ(q.size(), 3u);
  EXPECT_EQ(q.dropped_total(), 2u);
  EXPECT_EQ(q.dispatch_next(0_us)->packet.id, 0u);
  EXPECT_TRUE(q.conserved());
}

TEST(Receiver, DispatchWhileBusyThrows) {
  ReceiverQueue q(light());
  q.enqueue(build_udp_filler(600, 0), 0_us);
  q.enqueue(build_udp_filler(600, 1), 0_us);
  ASSERT_TRUE(q.dispatch_next(0_us));
  EXPECT_THROW(q.dispatch_next(100_us), std::logic_error);
  EXPECT_TRUE(q.dispatch_next(650_us));
  EXPECT_FALSE(q.dispatch_next(1300_us));
}

TEST(Receiver, WindowedBalanceMatchesSimulation) {
  QueueParams p;
  p.capacity_msgs = 64;
  p.t_base = 1_us;
  p.c_byte = 0_us;
  p.lambda_pc5 = 1e6;
  ReceiverQueue q(p);
  std::mt19937_64 gen(19);
  std::uint64_t model = 0;
  SimTime t{};
  for (int w = 0; w < 1000; ++w) {
    const std::uint64_t want = gen() % 40;
    std::uint64_t dispatched = 0;
    for (std::uint64_t k = 0; k < want; ++k) {
      const auto d = q.dispatch_next(t);
      if (!d) break;
      t = d->completed_at;
      ++dispatched;
    }
    const std::uint64_t arrivals = gen() % 40;
    for (std::uint64_t k = 0; k < arrivals; ++k) q.enqueue(build_udp_filler(0, k), t);
    model = step_balance(model, arrivals, dispatched, p.capacity_msgs);
    ASSERT_EQ(q.size(), model) << "window " << w;
    ASSERT_TRUE(q.conserved());
    t += 1_ms;
  }
}

TEST(Receiver, InvalidParams) {
  auto p = light();
  p.capacity_msgs = 0;
  EXPECT_THROW(ReceiverQueue{p}, std::invalid_argument);
  p = light();
  p.lambda_pc5 = 0;
  EXPECT_THROW(ReceiverQueue{p}, std::invalid_argument);
}
