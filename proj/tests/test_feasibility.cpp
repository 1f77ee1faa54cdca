#include <doctest.h>

#include <sstream>

#include "lendsim/feasibility.hpp"

using namespace lendsim;

namespace {

AssetSnapshot snap(const std::string& asset, const std::string& deposited,
                   const std::string& available, const std::string& cap) {
  return AssetSnapshot{asset, fd(deposited), fd(available), fd(cap), ""};
}

}  // namespace

TEST_CASE("assess computes ratios against market cap") {
  const FeasibilityRow row = assess(snap("AAA", "30", "12", "100"), {});
  CHECK(row.deposit_ratio == fd("0.3"));
  CHECK(row.available_ratio == fd("0.12"));
  CHECK_FALSE(row.squeezable);
  CHECK_FALSE(row.depth_risk);
}

TEST_CASE("flags require strictly exceeding the thresholds") {
  // exactly at the default 0.15 / 0.30 cutoffs: neither flag trips
  const FeasibilityRow at = assess(snap("AAA", "0.30", "0.15", "1"), {});
  CHECK_FALSE(at.squeezable);
  CHECK_FALSE(at.depth_risk);

  // a market cap of 1 makes the ratios equal the values, so one value
  // ulp past each cutoff trips the flag
  AssetSnapshot s = snap("AAA", "0.30", "0.15", "1");
  s.available_value = s.available_value.add(FixedDec::ulp());
  s.deposited_value = s.deposited_value.add(FixedDec::ulp());
  const FeasibilityRow past = assess(s, {});
  CHECK(past.squeezable);
  CHECK(past.depth_risk);
}

TEST_CASE("assess rejects impossible snapshots") {
  CHECK_THROWS_AS(assess(snap("AAA", "30", "12", "0"), {}), SimError);
  CHECK_THROWS_AS(assess(snap("AAA", "-1", "0", "100"), {}), SimError);
  CHECK_THROWS_AS(assess(snap("AAA", "10", "11", "100"), {}), SimError);
}

TEST_CASE("rank orders by available ratio, then deposit ratio, then id") {
  const std::vector<AssetSnapshot> snaps = {
      snap("DDD", "20", "10", "100"),  // avail 0.10, dep 0.20
      snap("AAA", "30", "10", "100"),  // avail 0.10, dep 0.30
      snap("CCC", "30", "10", "100"),  // tie with AAA on both ratios
      snap("BBB", "25", "20", "100"),  // avail 0.20, clear first
  };
  const auto rows = rank(snaps, {});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].snapshot.asset == "BBB");
  CHECK(rows[1].snapshot.asset == "AAA");
  CHECK(rows[2].snapshot.asset == "CCC");
  CHECK(rows[3].snapshot.asset == "DDD");
}

TEST_CASE("snapshot csv round trip") {
  std::istringstream in(
      "asset,deposited_value,available_value,market_cap,status\n"
      "CRV,124000000,62000000,400000000,active\n"
      "\n"
      "REN,33000000,14500000,100000000,frozen\r\n");
  const auto snaps = read_snapshot_csv(in);
  REQUIRE(snaps.size() == 2);
  CHECK(snaps[0].asset == "CRV");
  CHECK(snaps[0].deposited_value == fd("124000000"));
  CHECK(snaps[0].status == "active");
  CHECK(snaps[1].asset == "REN");
  CHECK(snaps[1].status == "frozen");
}

TEST_CASE("snapshot csv rejects malformed input") {
  {
    std::istringstream in("");
    CHECK_THROWS_AS(read_snapshot_csv(in), SimError);
  }
  {
    std::istringstream in("asset,deposited,available,cap,status\n");
    CHECK_THROWS_AS(read_snapshot_csv(in), SimError);  // wrong header names
  }
  {
    std::istringstream in(
        "asset,deposited_value,available_value,market_cap,status\n"
        "CRV,1,2\n");
    CHECK_THROWS_AS(read_snapshot_csv(in), SimError);  // short row
  }
  {
    std::istringstream in(
        "asset,deposited_value,available_value,market_cap,status\n"
        "CRV,one,2,3,x\n");
    CHECK_THROWS_AS(read_snapshot_csv(in), SimError);  // non-decimal field
  }
  {
    std::istringstream in(
        "asset,deposited_value,available_value,market_cap,status\n"
        ",1,1,3,x\n");
    CHECK_THROWS_AS(read_snapshot_csv(in), SimError);  // empty asset id
  }
}

TEST_CASE("missing snapshot file reports the path") {
  try {
    read_snapshot_file("/nonexistent/snap.csv");
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::NotFound);
    CHECK(std::string(e.what()).find("/nonexistent/snap.csv") != std::string::npos);
  }
}

TEST_CASE("rendered table carries flags and status through") {
  const auto rows = rank({snap("CRV", "124000000", "62000000", "400000000")}, {});
  const std::string table = render_feasibility_table(rows);
  CHECK(table.find("asset") == 0);  // header first
  CHECK(table.find("CRV") != std::string::npos);
  CHECK(table.find("0.31") != std::string::npos);
  CHECK(table.find("0.155") != std::string::npos);
  CHECK(table.find("yes") != std::string::npos);
}
