#include "mdseval/remote.hpp"

#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "test_support.hpp"

namespace mdseval {
namespace {

class RemoteProtocol : public ::testing::Test {
 protected:
  void SetUp() override {
    oracle_ = recall::containment_oracle();
    remote::bind_discriminator(server_, *oracle_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  std::unique_ptr<recall::Discriminator> oracle_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(RemoteProtocol, SingleJudgment) {
  remote::HttpDiscriminator client("127.0.0.1", port_);
  EXPECT_EQ(client.judge("灾害已致29人遇难", "29人遇难"), 1);
  EXPECT_EQ(client.judge("灾害已致二十九人遇难", "29人遇难"), 0);
}

TEST_F(RemoteProtocol, BatchJudgment) {
  remote::HttpDiscriminator client("127.0.0.1", port_);
  const auto verdicts = client.judge_batch(
      {"甲乙丙", "甲乙丙", "甲乙丙"}, {"乙", "丁", "甲乙"});
  EXPECT_EQ(verdicts, (std::vector<int>{1, 0, 1}));
}

TEST_F(RemoteProtocol, BatchLengthMismatchRejected) {
  remote::HttpDiscriminator client("127.0.0.1", port_);
  EXPECT_THROW(client.judge_batch({"甲"}, {"甲", "乙"}),
               recall::DiscriminatorError);
}

TEST_F(RemoteProtocol, WorksThroughRecallPath) {
  remote::HttpDiscriminator client("127.0.0.1", port_);
  recall::KeyElementSet set(
      recall::ElementKind::event,
      {recall::KeyElement::event("29人遇难"), recall::KeyElement::event("桥梁倒塌")});
  const auto result = recall::recall_for_kind(
      set, data::GeneratedSummary{"i1", "sys", "已致29人遇难", 0}, client);
  ASSERT_TRUE(result.has_value());
  EXPECT_DOUBLE_EQ(result->recall, 0.5);
}

TEST(RemoteClient, UnreachableBackendPropagates) {
  remote::HttpDiscriminator client("127.0.0.1", 1);
  EXPECT_THROW(client.judge("甲", "乙"), recall::DiscriminatorError);
}

}  // namespace
}  // namespace mdseval
