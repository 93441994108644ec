#pragma once

#include <span>
#include <string>
#include <vector>

namespace fcrm {

/// Half-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A finite union of disjoint half-open intervals of the line, kept sorted
/// and normalized (adjacent/overlapping inputs merge). The empty set is a
/// valid region.
class RegionSet {
 public:
  RegionSet() = default;
  explicit RegionSet(std::vector<Interval> intervals);

  static RegionSet empty() { return RegionSet{}; }
  static RegionSet interval(double lo, double hi);
  /// Parses the `[a,b)+[c,d)` grammar (no whitespace sensitivity).
  static RegionSet parse(const std::string& text);
  static RegionSet union_of(std::span<const RegionSet> parts);
  static bool pairwise_disjoint(std::span<const RegionSet> parts);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool is_empty() const { return intervals_.empty(); }
  bool contains(double x) const;
  double total_length() const;
  std::string to_string() const;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace fcrm
