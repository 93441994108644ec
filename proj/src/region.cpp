#include "fcrm/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fcrm {

RegionSet::RegionSet(std::vector<Interval> intervals) {
  for (const Interval& iv : intervals) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw std::invalid_argument("region intervals need finite lo < hi");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

RegionSet RegionSet::interval(double lo, double hi) {
  return RegionSet{std::vector<Interval>{{lo, hi}}};
}

RegionSet RegionSet::parse(const std::string& text) {
  std::vector<Interval> intervals;
  const char* p = text.c_str();
  auto skip_ws = [&] {
    while (*p == ' ' || *p == '\t') ++p;
  };
  skip_ws();
  if (*p == '\0') return RegionSet{};
  while (true) {
    skip_ws();
    if (*p != '[') throw std::invalid_argument("region syntax: expected '[' in " + text);
    ++p;
    char* end = nullptr;
    const double lo = std::strtod(p, &end);
    if (end == p) throw std::invalid_argument("region syntax: bad lower endpoint in " + text);
    p = end;
    skip_ws();
    if (*p != ',') throw std::invalid_argument("region syntax: expected ',' in " + text);
    ++p;
    const double hi = std::strtod(p, &end);
    if (end == p) throw std::invalid_argument("region syntax: bad upper endpoint in " + text);
    p = end;
    skip_ws();
    if (*p != ')') throw std::invalid_argument("region syntax: expected ')' in " + text);
    ++p;
    intervals.push_back({lo, hi});
    skip_ws();
    if (*p == '\0') break;
    if (*p != '+') throw std::invalid_argument("region syntax: expected '+' in " + text);
    ++p;
  }
  return RegionSet{std::move(intervals)};
}

RegionSet RegionSet::union_of(std::span<const RegionSet> parts) {
  std::vector<Interval> all;
  for (const RegionSet& part : parts) {
    all.insert(all.end(), part.intervals().begin(), part.intervals().end());
  }
  return all.empty() ? RegionSet{} : RegionSet{std::move(all)};
}

bool RegionSet::pairwise_disjoint(std::span<const RegionSet> parts) {
  std::vector<Interval> all;
  for (const RegionSet& part : parts) {
    all.insert(all.end(), part.intervals().begin(), part.intervals().end());
  }
  std::sort(all.begin(), all.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double reach = -std::numeric_limits<double>::infinity();
  for (const Interval& iv : all) {
    if (iv.lo < reach) return false;
    reach = std::max(reach, iv.hi);
  }
  return true;
}

bool RegionSet::contains(double x) const {
  for (const Interval& iv : intervals_) {
    if (x >= iv.lo && x < iv.hi) return true;
    if (x < iv.lo) break;
  }
  return false;
}

double RegionSet::total_length() const {
  double len = 0.0;
  for (const Interval& iv : intervals_) len += iv.hi - iv.lo;
  return len;
}

std::string RegionSet::to_string() const {
  if (intervals_.empty()) return "[empty]";
  std::ostringstream os;
  for (size_t i = 0; i < intervals_.size(); ++i) {
    if (i > 0) os << '+';
    os << '[' << intervals_[i].lo << ',' << intervals_[i].hi << ')';
  }
  return os.str();
}

}  // namespace fcrm
