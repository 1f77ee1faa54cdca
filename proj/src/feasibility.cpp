#include "lendsim/feasibility.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lendsim {

FeasibilityRow assess(const AssetSnapshot& snapshot,
                      const FeasibilityThresholds& thresholds) {
  if (snapshot.market_cap <= FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError,
                   "market cap of " + snapshot.asset + " must be positive");
  }
  if (snapshot.deposited_value < FixedDec::zero() ||
      snapshot.available_value < FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError,
                   "snapshot values of " + snapshot.asset + " must be non-negative");
  }
  if (snapshot.available_value > snapshot.deposited_value) {
    throw SimError(ErrorCode::DomainError,
                   snapshot.asset + " has more available than deposited");
  }
  FeasibilityRow row;
  row.snapshot = snapshot;
  row.deposit_ratio = snapshot.deposited_value.div(snapshot.market_cap);
  row.available_ratio = snapshot.available_value.div(snapshot.market_cap);
  row.squeezable = row.available_ratio > thresholds.available_ratio;
  row.depth_risk = row.deposit_ratio > thresholds.deposit_ratio;
  return row;
}

std::vector<FeasibilityRow> rank(const std::vector<AssetSnapshot>& snapshots,
                                 const FeasibilityThresholds& thresholds) {
  std::vector<FeasibilityRow> rows;
  rows.reserve(snapshots.size());
  for (const auto& s : snapshots) rows.push_back(assess(s, thresholds));
  std::sort(rows.begin(), rows.end(),
            [](const FeasibilityRow& a, const FeasibilityRow& b) {
              if (a.available_ratio != b.available_ratio) {
                return a.available_ratio > b.available_ratio;
              }
              if (a.deposit_ratio != b.deposit_ratio) {
                return a.deposit_ratio > b.deposit_ratio;
              }
              return a.snapshot.asset < b.snapshot.asset;
            });
  return rows;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

std::vector<AssetSnapshot> read_snapshot_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw SimError(ErrorCode::ConfigError, "snapshot csv is empty");
  }
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"asset", "deposited_value",
                                             "available_value", "market_cap",
                                             "status"};
  if (header != expected) {
    throw SimError(ErrorCode::ConfigError,
                   "snapshot csv header must be "
                   "asset,deposited_value,available_value,market_cap,status");
  }
  std::vector<AssetSnapshot> out;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != expected.size()) {
      throw SimError(ErrorCode::ConfigError,
                     "snapshot csv line " + std::to_string(line_no) +
                         " has " + std::to_string(fields.size()) + " fields");
    }
    AssetSnapshot s;
    s.asset = fields[0];
    if (s.asset.empty()) {
      throw SimError(ErrorCode::ConfigError,
                     "snapshot csv line " + std::to_string(line_no) +
                         " has an empty asset id");
    }
    try {
      s.deposited_value = fd(fields[1]);
      s.available_value = fd(fields[2]);
      s.market_cap = fd(fields[3]);
    } catch (const SimError& e) {
      throw SimError(ErrorCode::ConfigError,
                     "snapshot csv line " + std::to_string(line_no) + ": " +
                         e.what());
    }
    s.status = fields[4];
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AssetSnapshot> read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw SimError(ErrorCode::NotFound, "cannot open snapshot file " + path);
  }
  return read_snapshot_csv(in);
}

std::string render_feasibility_table(const std::vector<FeasibilityRow>& rows) {
  std::ostringstream out;
  out << "asset        avail_ratio  deposit_ratio  squeezable  depth_risk  status\n";
  for (const auto& r : rows) {
    std::string asset = r.snapshot.asset;
    asset.resize(std::max<size_t>(asset.size(), 12), ' ');
    std::string avail = r.available_ratio.to_string();
    avail.resize(std::max<size_t>(avail.size(), 11), ' ');
    std::string dep = r.deposit_ratio.to_string();
    dep.resize(std::max<size_t>(dep.size(), 13), ' ');
    out << asset << ' ' << avail << "  " << dep << "  "
        << (r.squeezable ? "yes       " : "no        ") << "  "
        << (r.depth_risk ? "yes       " : "no        ") << "  "
        << r.snapshot.status << '\n';
  }
  return out.str();
}

}  // namespace lendsim
