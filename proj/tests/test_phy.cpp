#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "ndsim/deployment.hpp"
#include "ndsim/phy.hpp"

using namespace ndsim;

namespace {

PhyConfig perfect_phy(double beta = 4.0) {
  PhyConfig phy;
  phy.sir_threshold = beta;
  phy.sic = SicMode::perfect;
  return phy;
}

ArrivingPacket packet(int sender, double power, int modulation = 1) {
  return {sender, power, modulation, PacketKind::hello, {}};
}

std::vector<ArrivingPacket> packets_from_powers(std::initializer_list<double> powers) {
  std::vector<ArrivingPacket> out;
  int id = 0;
  for (double p : powers) out.push_back(packet(id++, p));
  return out;
}

std::vector<ArrivingPacket> random_packet_set(RngStream& rng, const PhyConfig& phy, double r,
                                              int max_count, int modulations = 1) {
  const double d_min = near_field_radius(phy.wavelength);
  const int count = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_count)));
  std::vector<ArrivingPacket> out;
  for (int i = 0; i < count; ++i) {
    const double d = d_min + rng.next_u01() * (r - d_min);
    const int mod = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(modulations)));
    out.push_back(packet(i, received_power(d, phy), mod));
  }
  return out;
}

bool same_outcome(const ReceptionOutcome& a, const ReceptionOutcome& b) {
  return a.decoded == b.decoded && a.dropped == b.dropped;
}

}  // namespace

TEST_SUITE("phy") {

TEST_CASE("free-space power follows the inverse-square law") {
  PhyConfig phy;  // tx_power * gains = 1, wavelength 0.125
  const double bound = near_field_radius(phy.wavelength);
  CHECK(received_power(bound, phy) == doctest::Approx(1.0));
  CHECK(received_power(800.0, phy) == doctest::Approx(1.546e-10).epsilon(1e-3));
  CHECK(received_power(400.0, phy) == doctest::Approx(4.0 * received_power(800.0, phy)));
  CHECK(received_power(200.0, phy) > received_power(201.0, phy));
  CHECK_THROWS_AS(received_power(bound * 0.99, phy), std::domain_error);
}

TEST_CASE("single-packet reception drops any collision") {
  PhyConfig phy;  // sic none
  auto one = packets_from_powers({2.0});
  auto res = sic_decode(one, phy);
  CHECK(res.decoded == std::vector<int>{0});
  CHECK(res.dropped.empty());

  auto two = packets_from_powers({5.0, 1.0});
  res = sic_decode(two, phy);
  CHECK(res.decoded.empty());
  CHECK(res.dropped == std::vector<int>{0, 1});

  CHECK(sic_decode({}, phy).decoded.empty());
}

TEST_CASE("perfect chain decodes strongest-first with inclusive threshold") {
  auto phy = perfect_phy(4.0);

  auto lone = packets_from_powers({0.25});
  CHECK(sic_decode(lone, phy).decoded == std::vector<int>{0});

  // SIR of the 4-packet is exactly at threshold; the lone remainder is free.
  auto pair = packets_from_powers({4.0, 1.0});
  auto res = sic_decode(pair, phy);
  CHECK(res.decoded == std::vector<int>{0, 1});

  // 16/(4+1) = 3.2 < 4: the chain stops at the first packet, all dropped.
  auto triple = packets_from_powers({16.0, 4.0, 1.0});
  res = sic_decode(triple, phy);
  CHECK(res.decoded.empty());
  CHECK(res.dropped == std::vector<int>{0, 1, 2});
}

TEST_CASE("imperfect chain is blocked by cancellation residue") {
  PhyConfig phy = perfect_phy(4.0);
  phy.sic = SicMode::imperfect;
  phy.residual_factor = 0.04;
  phy.noise_floor = 0.0;
  auto pair = packets_from_powers({25.0, 1.0});
  auto res = sic_decode(pair, phy);
  CHECK(res.decoded == std::vector<int>{0});  // 1 / (0.04 * 25) = 1 < 4
  CHECK(res.dropped == std::vector<int>{1});
}

TEST_CASE("power ties break by sender id") {
  auto phy = perfect_phy(0.5);
  std::vector<ArrivingPacket> tied{packet(7, 2.0), packet(3, 2.0)};
  auto res = sic_decode(tied, phy);
  REQUIRE(res.decoded.size() == 2);
  CHECK(res.decoded[0] == 3);
  CHECK(res.decoded[1] == 7);
}

TEST_CASE("modulation groups decode in isolation") {
  PhyConfig phy = perfect_phy(4.0);
  phy.modulation_count = 2;

  // Two packets, different modulations: both decode regardless of power.
  std::vector<ArrivingPacket> separable{packet(0, 1.0, 1), packet(1, 1.0, 2)};
  auto res = mpr_sic_decode(separable, phy);
  CHECK(res.decoded.size() == 2);
  CHECK(res.dropped.empty());

  // Group 1 carries {16, 1}: 16/1 >= 4 so both decode; group 2 is alone.
  std::vector<ArrivingPacket> mixed{packet(0, 16.0, 1), packet(1, 1.0, 1), packet(2, 0.1, 2)};
  res = mpr_sic_decode(mixed, phy);
  CHECK(res.decoded.size() == 3);
  CHECK(res.dropped.empty());
}

TEST_CASE("h=1 collapses MPR decode to the plain chain") {
  for (SicMode mode : {SicMode::none, SicMode::perfect, SicMode::imperfect}) {
    PhyConfig phy;
    phy.sic = mode;
    phy.residual_factor = 0.01;
    phy.modulation_count = 1;
    RngStream rng(17);
    for (int trial = 0; trial < 500; ++trial) {
      auto set = random_packet_set(rng, phy, 800.0, 8);
      CHECK(same_outcome(mpr_sic_decode(set, phy), sic_decode(set, phy)));
    }
  }
}

TEST_CASE("imperfect mode with zero residue and noise equals perfect mode") {
  PhyConfig perfect = perfect_phy(4.0);
  PhyConfig degenerate = perfect;
  degenerate.sic = SicMode::imperfect;
  degenerate.residual_factor = 0.0;
  degenerate.noise_floor = 0.0;
  RngStream rng(23);
  for (int trial = 0; trial < 10000; ++trial) {
    auto set = random_packet_set(rng, perfect, 800.0, 10);
    CHECK(same_outcome(sic_decode(set, degenerate), sic_decode(set, perfect)));
  }
}

TEST_CASE("perfect decode set is a prefix of the power order") {
  auto phy = perfect_phy(4.0);
  RngStream rng(31);
  for (int trial = 0; trial < 5000; ++trial) {
    auto set = random_packet_set(rng, phy, 800.0, 12);
    auto res = sic_decode(set, phy);
    std::vector<const ArrivingPacket*> order;
    for (const auto& p : set) order.push_back(&p);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
      return a->power != b->power ? a->power > b->power : a->sender < b->sender;
    });
    REQUIRE(res.decoded.size() <= order.size());
    for (std::size_t i = 0; i < res.decoded.size(); ++i)
      CHECK(res.decoded[i] == order[i]->sender);
  }
}

TEST_CASE("removing a dropped packet never shrinks the decoded set") {
  auto phy = perfect_phy(2.0);
  RngStream rng(37);
  for (int trial = 0; trial < 2000; ++trial) {
    auto set = random_packet_set(rng, phy, 800.0, 8);
    auto res = sic_decode(set, phy);
    for (int dropped : res.dropped) {
      std::vector<ArrivingPacket> reduced;
      for (const auto& p : set)
        if (p.sender != dropped) reduced.push_back(p);
      auto res2 = sic_decode(reduced, phy);
      for (int id : res.decoded)
        CHECK(std::find(res2.decoded.begin(), res2.decoded.end(), id) != res2.decoded.end());
    }
  }
}

TEST_CASE("joint unpack bound values") {
  PhyConfig phy = perfect_phy(4.0);
  phy.wavelength = 0.125;
  CHECK(max_unpack_count(phy, 800.0) == 15);
  phy.sir_threshold = 1.0;
  CHECK(max_unpack_count(phy, 800.0) == 34);

  // 16*pi^2*r^2 == lambda^2 * beta makes the log term vanish.
  PhyConfig unit;
  unit.sic = SicMode::perfect;
  unit.wavelength = 1.0;
  unit.tx_power = 1.0;
  unit.sir_threshold = 16.0 * kPi * kPi;
  CHECK(max_unpack_count(unit, 1.0) == 2);

  // Enormous threshold: single-packet reception is always possible.
  PhyConfig huge = perfect_phy(1e300);
  CHECK(max_unpack_count(huge, 800.0) == 1);
}

TEST_CASE("perfect decode count never exceeds the bound") {
  auto phy = perfect_phy(4.0);
  const int n0 = max_unpack_count(phy, 800.0);
  RngStream rng(41);
  std::size_t max_seen = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    auto set = random_packet_set(rng, phy, 800.0, 40);
    auto res = sic_decode(set, phy);
    max_seen = std::max(max_seen, res.decoded.size());
    CHECK(res.decoded.size() <= static_cast<std::size_t>(n0));
  }
  CHECK(max_seen >= 2);  // the fuzz actually exercises multi-packet decodes
}

TEST_CASE("unpack probability sample matches the hand-evaluated case") {
  // m = 2 with the far distance pinned at r: the near packet decodes with
  // d2^2/(beta r^2) = 1/4 and the survivor is free, so the sample value is
  // (1/2) * (1/4 + 2 * 1/4) = 0.375 for any d1.
  for (double d1 : {5.0, 100.0, 799.0}) {
    std::vector<double> dists{d1, 800.0};
    CHECK(unpack_prob_sample(dists, 4.0, 800.0) == doctest::Approx(0.375));
  }
  std::vector<double> lone{123.0};
  CHECK(unpack_prob_sample(lone, 4.0, 800.0) == doctest::Approx(1.0));
}

TEST_CASE("expected unpack probability boundary cases") {
  PhyConfig phy = perfect_phy(4.0);
  const int n0 = max_unpack_count(phy, 800.0);
  CHECK(expected_unpack_prob(1, phy, 800.0, RngStream(1)) == 1.0);
  CHECK(expected_unpack_prob(n0 + 1, phy, 800.0, RngStream(1)) == 0.0);
  CHECK_THROWS_AS(expected_unpack_prob(0, phy, 800.0, RngStream(1)), std::domain_error);
}

TEST_CASE("expected unpack probability is in [0,1] and nonincreasing in m") {
  PhyConfig phy = perfect_phy(4.0);
  auto table = PbarTable::compute(phy, 800.0, RngStream(11), 20000);
  REQUIRE(table.n0() == 15);
  double previous = 1.0 + 1e-12;
  for (int m = 1; m <= table.n0(); ++m) {
    const double value = table.at(m);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
    // 3 sigma of the Monte Carlo error at 2e4 samples is ~0.01
    CHECK(value <= previous + 0.011);
    previous = value;
  }
  CHECK(table.at(1) == 1.0);
  CHECK(table.at(table.n0() + 5) == 0.0);
  CHECK(table.at(2) < 1.0);
}

TEST_CASE("pbar table is reproducible for a fixed stream") {
  PhyConfig phy = perfect_phy(4.0);
  auto a = PbarTable::compute(phy, 800.0, RngStream(5), 5000);
  auto b = PbarTable::compute(phy, 800.0, RngStream(5), 5000);
  CHECK(a.values() == b.values());
}

}  // TEST_SUITE
