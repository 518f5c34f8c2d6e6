#pragma once

// Least-squares isotonic regression in one dimension.
//
// All indices in this API are 0-based. Mathematical write-ups of isotonic
// regression usually index observations 1..n; index i here corresponds to
// observation i + 1 there.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isolab {

/// A finite, non-empty vector of observations.
class Series {
 public:
  Series() = default;

  explicit Series(std::vector<double> values) : values_(std::move(values)) {
    validate(values_);
  }

  Series(std::initializer_list<double> values) : Series(std::vector<double>(values)) {}

  static void validate(std::span<const double> values) {
    if (values.empty()) {
      throw std::invalid_argument("series must contain at least one value");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw std::invalid_argument("series entry " + std::to_string(i) + " is not finite");
      }
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  friend bool operator==(const Series&, const Series&) = default;

 private:
  std::vector<double> values_;
};

/// A maximal constant run of the fitted vector; `end` is inclusive.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  double value = 0.0;

  std::size_t length() const noexcept { return end - start + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Isotonic fit stored as its exact segment structure.
///
/// Segments partition 0..n-1 in order and their values strictly increase, so
/// a breakpoint is exactly a segment boundary.
class IsotonicFit {
 public:
  IsotonicFit() = default;

  /// Builds a fit from explicit segments, checking the partition and strict
  /// increase invariants.
  static IsotonicFit from_segments(std::vector<Segment> segments, std::size_t n) {
    if (n == 0 || segments.empty()) {
      throw std::invalid_argument("fit must cover at least one index");
    }
    std::size_t next = 0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const Segment& seg = segments[s];
      if (seg.start != next || seg.end < seg.start) {
        throw std::invalid_argument("segments do not partition the index range in order");
      }
      if (!std::isfinite(seg.value)) {
        throw std::invalid_argument("segment value is not finite");
      }
      if (s > 0 && !(segments[s - 1].value < seg.value)) {
        throw std::invalid_argument("segment values must strictly increase");
      }
      next = seg.end + 1;
    }
    if (next != n) {
      throw std::invalid_argument("segments do not cover 0..n-1");
    }
    IsotonicFit fit;
    fit.segments_ = std::move(segments);
    fit.n_ = n;
    return fit;
  }

  std::size_t size() const noexcept { return n_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  /// Position in segments() of the segment containing index i. O(log #segments).
  std::size_t segment_index_of(std::size_t i) const {
    check_index(i);
    auto it = std::lower_bound(segments_.begin(), segments_.end(), i,
                               [](const Segment& s, std::size_t idx) { return s.end < idx; });
    return static_cast<std::size_t>(it - segments_.begin());
  }

  double value_at(std::size_t i) const { return segments_[segment_index_of(i)].value; }

  friend bool operator==(const IsotonicFit&, const IsotonicFit&) = default;

 private:
  friend void iso_into(std::span<const double> y, IsotonicFit& out);

  void check_index(std::size_t i) const {
    if (i >= n_) {
      throw std::invalid_argument("index " + std::to_string(i) + " out of range for fit of length " +
                                  std::to_string(n_));
    }
  }

  std::vector<Segment> segments_;
  std::size_t n_ = 0;
};

/// Pool-adjacent-violators into a reusable fit object.
///
/// `out` keeps its segment storage between calls, so repeated fits of
/// same-length inputs do not allocate. Linear time.
inline void iso_into(std::span<const double> y, IsotonicFit& out) {
  Series::validate(y);
  auto& segs = out.segments_;
  segs.clear();
  segs.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    segs.push_back(Segment{i, i, y[i]});
    // Pool while the previous block is not strictly below the newest one.
    while (segs.size() > 1) {
      Segment& right = segs.back();
      Segment& left = segs[segs.size() - 2];
      if (left.value < right.value) break;
      const double nl = static_cast<double>(left.length());
      const double nr = static_cast<double>(right.length());
      double merged = (nl * left.value + nr * right.value) / (nl + nr);
      // The weighted mean lies between the two block means; rounding must not
      // push it outside (equal blocks would otherwise drift off their value).
      merged = std::clamp(merged, right.value, left.value);
      left.end = right.end;
      left.value = merged;
      segs.pop_back();
    }
  }
  out.n_ = y.size();
}

/// Euclidean projection of y onto the nondecreasing cone.
inline IsotonicFit iso(std::span<const double> y) {
  IsotonicFit fit;
  iso_into(y, fit);
  return fit;
}

inline IsotonicFit iso(const Series& y) { return iso(y.values()); }

/// Max-min characterization of the fitted value at index i:
/// max over j <= i of min over k >= i of mean(y[j..k]).
///
/// Brute force, O(n^2) for one index. Independent of the pooling code path,
/// so it doubles as a verification oracle.
inline double minmax_value(const Series& y, std::size_t i) {
  const auto v = y.values();
  const std::size_t n = v.size();
  if (i >= n) {
    throw std::invalid_argument("index " + std::to_string(i) + " out of range for series of length " +
                                std::to_string(n));
  }
  double best = -std::numeric_limits<double>::infinity();
  double left_sum = 0.0;  // sum of v[j..i]
  for (std::size_t jj = i + 1; jj-- > 0;) {
    left_sum += v[jj];
    double running = left_sum;
    double worst = running / static_cast<double>(i - jj + 1);
    for (std::size_t k = i + 1; k < n; ++k) {
      running += v[k];
      worst = std::min(worst, running / static_cast<double>(k - jj + 1));
    }
    best = std::max(best, worst);
  }
  return best;
}

/// Inclusive endpoints (j, k) of the constant segment containing index i.
inline std::pair<std::size_t, std::size_t> segment_bounds(const IsotonicFit& fit, std::size_t i) {
  const Segment& s = fit.segments()[fit.segment_index_of(i)];
  return {s.start, s.end};
}

/// Number of constant segments, i.e. one more than the number of breakpoints.
inline std::size_t segment_count(const IsotonicFit& fit) noexcept { return fit.segments().size(); }

/// True iff indices i and i+1 fall in different segments.
inline bool has_breakpoint(const IsotonicFit& fit, std::size_t i) {
  if (fit.size() < 2 || i >= fit.size() - 1) {
    throw std::invalid_argument("breakpoint index " + std::to_string(i) + " out of range for fit of length " +
                                std::to_string(fit.size()));
  }
  return fit.segments()[fit.segment_index_of(i)].end == i;
}

inline void expand_into(const IsotonicFit& fit, std::span<double> out) {
  if (out.size() != fit.size()) {
    throw std::invalid_argument("expand_into: output length does not match fit");
  }
  for (const Segment& s : fit.segments()) {
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(s.start),
              out.begin() + static_cast<std::ptrdiff_t>(s.end) + 1, s.value);
  }
}

inline Series expand(const IsotonicFit& fit) {
  std::vector<double> out(fit.size());
  expand_into(fit, out);
  return Series(std::move(out));
}

}  // namespace isolab
