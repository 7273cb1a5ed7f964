#include <doctest.h>

#include <random>

#include "hcca/error.hpp"
#include "hcca/phy.hpp"
#include "zeroed.hpp"

using namespace hcca;
using namespace hcca::phy;

// Expected values come from tests/oracles/derive_values.py.

TEST_CASE("data_tx_time")
{
  const PhyParams p;
  CHECK(data_tx_time(0, p).count() == 218'182);
  CHECK(data_tx_time(3800, p).count() == 2'981'819);

  PhyParams single = p;
  single.data_rate = single.basic_rate = 1'000'000;
  CHECK(data_tx_time(0, single).count() == 480'000);
}

TEST_CASE("ctrl_tx_time")
{
  const PhyParams p;
  CHECK(ctrl_tx_time(p.ack_frame, p).count() == 304'000);
  CHECK(ctrl_tx_time(p.poll_frame, p).count() == 480'000);

  PhyParams bare = zero_overhead_phy();
  CHECK(ctrl_tx_time(1, bare).count() == 8'000);
}

TEST_CASE("txop_overhead")
{
  const PhyParams p;
  CHECK(txop_overhead(1, p).count() == 1'032'182);
  CHECK(txop_overhead(2, p).count() == 1'574'364);
  CHECK(txop_overhead(1, zero_overhead_phy()).count() == 0);
  CHECK_THROWS_AS(txop_overhead(0, p), Error);

  SUBCASE("lumped overhead ignores the MSDU count")
  {
    CHECK(txop_overhead(5, p, OverheadMode::paper_literal) == txop_overhead(1, p));
    CHECK(txop_overhead(5, p, OverheadMode::per_msdu) == txop_overhead(5, p));
  }
}

TEST_CASE("timing is affine and never below raw payload time")
{
  const PhyParams p;
  std::mt19937_64 rng(7);
  const Duration step = txop_overhead(2, p) - txop_overhead(1, p);
  CHECK(step.count() > 0);
  for (int n = 1; n < 40; ++n) CHECK(txop_overhead(n + 1, p) - txop_overhead(n, p) == step);

  for (int i = 0; i < 500; ++i) {
    const Bytes b = static_cast<Bytes>(rng() % 70000);
    CHECK(data_tx_time(b + 1, p) > data_tx_time(b, p));
    CHECK(data_tx_time(b, p) > airtime(b * 8, p.data_rate));
    // Affine up to the per-division ceiling.
    const auto slope = data_tx_time(b, p) - data_tx_time(0, p) - airtime(b * 8, p.data_rate);
    CHECK(slope.count() >= -1);
    CHECK(slope.count() <= 1);
  }
}

TEST_CASE("PhyParams validation")
{
  PhyParams p;
  CHECK_NOTHROW(p.validate());
  p.basic_rate = 2 * p.data_rate;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("basic_rate_bps"), ConfigError);
  p = PhyParams{};
  p.sifs = Duration{0};
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("sifs_us"), ConfigError);
}
