#include <doctest.h>

#include <map>

#include "invariants.hpp"
#include "mec/auction.hpp"

using namespace mec;
using namespace mec::auction;

TEST_CASE("second-price example") {
  BidSet b{2, {{0, 1, 5.0}, {0, 2, 3.0}, {1, 3, 2.0}}};
  Rng rng(1);
  const auto r = allocate_bands(b, 2, rng);
  CHECK(r.grants.size() == 2);
  CHECK(r.granted(1));
  CHECK(r.granted(2));
  CHECK_FALSE(r.granted(3));
  CHECK(r.clearingPrice == 2.0);
  CHECK(r.payments == std::vector<double>{4.0, 0.0});
  CHECK(r.grants.at(1) == 0);  // bands numbered in rank order
  CHECK(r.grants.at(2) == 1);
}

TEST_CASE("nobody loses means a zero price") {
  BidSet b{2, {{0, 0, 5.0}, {1, 1, 3.0}}};
  Rng rng(1);
  const auto r = allocate_bands(b, 4, rng);
  CHECK(r.grants.size() == 2);
  CHECK(r.clearingPrice == 0.0);
  CHECK(r.payments == std::vector<double>{0.0, 0.0});
}

TEST_CASE("zero valuations win nothing") {
  BidSet b{3, {}};
  for (int k = 0; k < 18; ++k) b.entries.push_back({k / 6, k, 0.0});
  Rng rng(1);
  const auto r = allocate_bands(b, 11, rng);
  CHECK(r.grants.empty());
  CHECK(r.payments == std::vector<double>(3, 0.0));
}

TEST_CASE("eighteen positive bids share eleven bands") {
  BidSet b{3, {}};
  for (int k = 0; k < 18; ++k) b.entries.push_back({k / 6, k, 1.0 + k});
  Rng rng(1);
  const auto r = allocate_bands(b, 11, rng);
  CHECK(r.grants.size() == 11);
  CHECK(r.clearingPrice == 7.0);  // valuations 8..18 win, 7 is the best loser
  for (int k = 7; k < 18; ++k) CHECK(r.granted(k));
}

TEST_CASE("ties resolve by the seeded draw") {
  BidSet b{1, {}};
  for (int k = 0; k < 6; ++k) b.entries.push_back({0, k, 1.0});
  std::map<int, int> wins;
  for (std::uint64_t s = 0; s < 600; ++s) {
    Rng rng = make_stream(s, 2);
    const auto r = allocate_bands(b, 1, rng);
    REQUIRE(r.grants.size() == 1);
    ++wins[r.grants.begin()->first];
    Rng again = make_stream(s, 2);
    CHECK(allocate_bands(b, 1, again) == r);
  }
  CHECK(wins.size() == 6);  // every terminal wins sometimes
}

TEST_CASE("invalid bids are rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(allocate_bands(BidSet{1, {{0, 1, 1.0}, {0, 1, 2.0}}}, 2, rng), std::invalid_argument);
  CHECK_THROWS_AS(allocate_bands(BidSet{1, {{0, 1, -1.0}}}, 2, rng), std::invalid_argument);
  CHECK_THROWS_AS(allocate_bands(BidSet{1, {{0, 1, NAN}}}, 2, rng), std::invalid_argument);
  CHECK_THROWS_AS(allocate_bands(BidSet{1, {{1, 1, 1.0}}}, 2, rng), std::invalid_argument);
}

TEST_CASE("auction invariants on random bid sets") {
  const auto r = checks::auction_invariants(10000, 3);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("provider payoff") {
  const std::vector<double> u{4, 4}, mu{1, 1};
  CHECK(wsp_payoff(u, mu, 0.0) == 8.0);
  CHECK(wsp_payoff(u, mu, 3.0) == 5.0);
  const std::vector<double> mu2{0.5, 2.0};
  CHECK(wsp_payoff(u, mu2, 1.0) == 9.0);
  CHECK_THROWS_AS(wsp_payoff(u, std::vector<double>{1.0}, 0.0), std::invalid_argument);
}
