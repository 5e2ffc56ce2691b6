#include <gtest/gtest.h>

#include "evcoop/model.hpp"
#include "support/gen.hpp"

using namespace evcoop;

namespace {

const QosProfile kQ{{34, 33}, {36, 35}};

}  // namespace

TEST(StationIdTest, OtherIsAnInvolution) {
  EXPECT_EQ(other(StationId::A), StationId::B);
  EXPECT_EQ(other(StationId::B), StationId::A);
  for (StationId i : kStations) EXPECT_EQ(other(other(i)), i);
}

TEST(ModelParamsTest, DefaultsMatchTheExperimentSetup) {
  const ModelParams p;
  EXPECT_EQ(p.w_l, 10.0);
  EXPECT_EQ(p.w_p, 1.0);
  EXPECT_EQ(p.o, PerStation<double>(1.0, 1.0));
  EXPECT_EQ(p.w_c, 0.1);
  EXPECT_EQ(p.q_max, 100.0);
  EXPECT_EQ(p.theta, 10.0);
  EXPECT_EQ(ModelParams::w_d, 1.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(ModelParamsTest, RejectsOutOfDomainValues) {
  auto bad = [](auto mutate) {
    ModelParams p;
    mutate(p);
    return p;
  };
  EXPECT_THROW(bad([](ModelParams& p) { p.w_l = 0; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](ModelParams& p) { p.w_p = -1; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](ModelParams& p) { p.o.b() = -0.5; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](ModelParams& p) { p.w_c = -0.1; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](ModelParams& p) { p.theta = -1; }).validate(), std::invalid_argument);
}

TEST(QosProfileTest, RejectsNegativeQos) {
  EXPECT_NO_THROW(kQ.validate());
  EXPECT_THROW((QosProfile{{-1, 0}, {0, 0}}).validate(), std::invalid_argument);
  EXPECT_THROW((QosProfile{{0, 0}, {0, -1}}).validate(), std::invalid_argument);
}

TEST(EffectiveQosTest, CollaborationNeedsBothStations) {
  EXPECT_EQ(effective_qos({true, true}, kQ), QosVector(36, 35));
  EXPECT_EQ(effective_qos({true, false}, kQ), QosVector(34, 33));
  EXPECT_EQ(effective_qos({false, true}, kQ), QosVector(34, 33));
  EXPECT_EQ(effective_qos({false, false}, kQ), QosVector(34, 33));
}

TEST(EvPayoffTest, Examples) {
  ModelParams p;
  p.w_l = 10;
  p.w_p = 1;
  const PriceProfile price{2, 2};
  const QosVector q{1, 1};
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(ev_payoff(x, EvChoice::None, price, q, p), 0.0);
  EXPECT_DOUBLE_EQ(ev_payoff(0.0, EvChoice::A, price, q, p), 8.0);
  EXPECT_DOUBLE_EQ(ev_payoff(1.0, EvChoice::B, price, q, p), 8.0);
}

TEST(EvPayoffTest, RejectsLocationsOffTheLine) {
  const ModelParams p;
  EXPECT_THROW(ev_payoff(-0.01, EvChoice::A, {1, 1}, {1, 1}, p), std::invalid_argument);
  EXPECT_THROW(ev_payoff(1.01, EvChoice::None, {1, 1}, {1, 1}, p), std::invalid_argument);
}

TEST(FlCostTest, Examples) {
  ModelParams p;
  p.w_c = 0.1;
  EXPECT_EQ(fl_cost({true, false}, p), PerStation<double>(0.1, 0.0));
  EXPECT_EQ(fl_cost({false, false}, p), PerStation<double>(0.0, 0.0));
  p.w_c = 0;
  EXPECT_EQ(fl_cost({true, true}, p), PerStation<double>(0.0, 0.0));
}

TEST(ProfileTest, Labels) {
  EXPECT_EQ(to_string(ParticipationProfile{true, true}), "11");
  EXPECT_EQ(to_string(ParticipationProfile{true, false}), "10");
  EXPECT_EQ(to_string(ParticipationProfile{false, true}), "01");
  EXPECT_EQ(to_string(ParticipationProfile{false, false}), "00");
}

TEST(ModelProperties, EffectiveQosUsesHighIffBothJoin) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    testkit::Gen g(testkit::kPropertySeed, k);
    const QosProfile q{g.qos(), g.qos()};
    for (bool ra : {false, true}) {
      for (bool rb : {false, true}) {
        const QosVector e = effective_qos({ra, rb}, q);
        EXPECT_EQ(e, (ra && rb) ? q.high : q.low);
      }
    }
  }
}

TEST(ModelProperties, SwappingLabelsSwapsOutputs) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    testkit::Gen g(testkit::kPropertySeed, k);
    ModelParams p = g.params();
    const QosProfile q{g.qos(), g.qos()};
    const PriceProfile price = g.prices();
    const ParticipationProfile r{g.coin(), g.coin()};
    ModelParams ps = p;
    ps.o = p.o.swapped();
    const QosProfile qs{q.low.swapped(), q.high.swapped()};
    const ParticipationProfile rs{r.r.b(), r.r.a()};

    EXPECT_EQ(effective_qos(rs, qs), effective_qos(r, q).swapped());
    EXPECT_EQ(fl_cost(rs, ps), fl_cost(r, p).swapped());
    const double x = g.uniform(0, 1);
    const QosVector qe = effective_qos(r, q);
    EXPECT_DOUBLE_EQ(ev_payoff(1 - x, EvChoice::B, price.swapped(), qe.swapped(), ps),
                     ev_payoff(x, EvChoice::A, price, qe, p));
    EXPECT_DOUBLE_EQ(quality_margin(StationId::B, qe.swapped(), ps),
                     quality_margin(StationId::A, qe, p));
  }
}

TEST(ModelProperties, PayoffMonotoneInLocation) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    testkit::Gen g(testkit::kPropertySeed, k);
    const ModelParams p = g.params();
    const QosVector q = g.qos();
    const PriceProfile price = g.prices();
    double x0 = g.uniform(0, 1), x1 = g.uniform(0, 1);
    if (x0 == x1) continue;
    if (x0 > x1) std::swap(x0, x1);
    EXPECT_GT(ev_payoff(x0, EvChoice::A, price, q, p), ev_payoff(x1, EvChoice::A, price, q, p));
    EXPECT_LT(ev_payoff(x0, EvChoice::B, price, q, p), ev_payoff(x1, EvChoice::B, price, q, p));
    EXPECT_EQ(ev_payoff(x0, EvChoice::None, price, q, p), ev_payoff(x1, EvChoice::None, price, q, p));
  }
}
