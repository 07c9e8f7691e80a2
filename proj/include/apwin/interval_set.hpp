#pragma once

// Finite unions of closed circle intervals with exact endpoints.
//
// Canonical form: components sorted by left endpoint, pairwise disjoint and
// non-touching, endpoints in [0, 1).  A component may wrap through 0; it is
// stored split internally and re-joined for display/serialization.
// Degenerate (single point) components are allowed; complement() treats them
// as measure-zero and drops them, so complement is an involution on sets all
// of whose components have interior.

#include <algorithm>
#include <vector>

#include "apwin/numbers.hpp"

namespace apwin {

struct Interval {
  Quad lo, hi;  // closed, lo <= hi, as line segment in [0, 2)
  Quad length() const { return hi - lo; }
  bool degenerate() const { return lo == hi; }
};

class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet empty() { return IntervalSet(); }
  static IntervalSet full_circle() {
    IntervalSet s;
    s.comps_.push_back({Quad(0), Quad(1)});
    s.full_ = true;
    return s;
  }

  // single closed arc from lo going clockwise (increasing) to hi; wraps if hi < lo
  static IntervalSet arc(const Quad& lo, const Quad& hi) {
    Quad l = lo.frac();
    Quad h = hi.frac();
    IntervalSet s;
    if (h < l) {
      s.comps_.push_back({Quad(0), h});
      s.comps_.push_back({l, Quad(1)});
    } else {
      s.comps_.push_back({l, h});
    }
    s.normalize();
    return s;
  }

  static IntervalSet from_components(std::vector<Interval> raw) {
    IntervalSet s;
    for (auto& iv : raw) {
      if (iv.hi < iv.lo) throw PreconditionViolated("interval with hi < lo");
      Quad l = iv.lo.frac();
      Quad len = iv.hi - iv.lo;
      if (len >= Quad(1)) return full_circle();
      Quad h = l + len;
      if (h > Quad(1)) {
        s.comps_.push_back({Quad(0), h - Quad(1)});
        s.comps_.push_back({l, Quad(1)});
      } else {
        s.comps_.push_back({l, h});
      }
    }
    s.normalize();
    return s;
  }

  bool is_empty() const { return comps_.empty(); }
  bool is_full() const { return full_; }

  // components in internal (split-at-0) form
  const std::vector<Interval>& pieces() const { return comps_; }

  // components re-joined across 0 for display: each [lo, hi] with hi possibly > 1
  std::vector<Interval> components() const {
    if (full_ || comps_.empty()) return comps_;
    std::vector<Interval> out = comps_;
    bool starts_at_zero = out.front().lo.sign() == 0;
    bool ends_at_one = out.back().hi == Quad(1);
    if (starts_at_zero && ends_at_one && out.size() >= 2) {
      Interval first = out.front();
      Interval last = out.back();
      out.erase(out.begin());
      out.pop_back();
      out.push_back({last.lo, first.hi + Quad(1)});
    }
    return out;
  }

  Quad measure() const {
    Quad m(0);
    for (const auto& iv : comps_) m += iv.length();
    return m;
  }

  size_t piece_count() const { return comps_.size(); }

  bool contains(const Quad& point) const {
    Quad p = point.frac();
    auto it = locate(p);
    return it != comps_.end() && it->lo <= p && p <= it->hi;
  }

  bool contains_interior(const Quad& point) const {
    if (full_) return true;
    Quad p = point.frac();
    auto it = locate(p);
    if (it == comps_.end()) return false;
    if (it->lo < p && p < it->hi) return true;
    // split-at-0 seam: interior may continue across the wrap
    if (p == it->lo && p.sign() == 0 && !comps_.empty() && comps_.back().hi == Quad(1) &&
        it->hi > p)
      return true;
    return false;
  }

  friend IntervalSet set_union(const IntervalSet& A, const IntervalSet& B) {
    IntervalSet s;
    s.comps_ = A.comps_;
    s.comps_.insert(s.comps_.end(), B.comps_.begin(), B.comps_.end());
    s.normalize();
    return s;
  }

  friend IntervalSet set_intersect(const IntervalSet& A, const IntervalSet& B) {
    IntervalSet s;
    size_t i = 0, j = 0;
    while (i < A.comps_.size() && j < B.comps_.size()) {
      const Interval& a = A.comps_[i];
      const Interval& b = B.comps_[j];
      Quad lo = max(a.lo, b.lo);
      Quad hi = min(a.hi, b.hi);
      if (lo <= hi) s.comps_.push_back({lo, hi});
      if (a.hi <= b.hi)
        ++i;
      else
        ++j;
    }
    s.normalize();
    return s;
  }

  // closure of the set complement; degenerate components vanish
  IntervalSet complement() const {
    IntervalSet s;
    if (comps_.empty()) return full_circle();
    Quad cursor(0);
    for (const auto& iv : comps_) {
      if (iv.lo > cursor) s.comps_.push_back({cursor, iv.lo});
      cursor = max(cursor, iv.hi);
    }
    if (cursor < Quad(1)) s.comps_.push_back({cursor, Quad(1)});
    s.normalize();
    return s;
  }

  friend IntervalSet set_difference(const IntervalSet& A, const IntervalSet& B) {
    return set_intersect(A, B.complement());
  }

  IntervalSet translate(const Quad& t) const {
    std::vector<Interval> raw;
    raw.reserve(comps_.size());
    Quad s = t.frac();
    for (const auto& iv : comps_) raw.push_back({iv.lo + s, iv.hi + s});
    return from_components(std::move(raw));
  }

  // B_eps(A): closed eps-neighborhood on the circle
  IntervalSet thicken(const Quad& eps) const {
    if (eps.sign() < 0) throw PreconditionViolated("thicken by negative radius");
    if (eps.sign() == 0) return *this;
    if (Quad(2) * eps >= Quad(1)) return full_circle();
    std::vector<Interval> raw;
    raw.reserve(comps_.size());
    for (const auto& iv : comps_) raw.push_back({iv.lo - eps + Quad(1), iv.hi + eps + Quad(1)});
    return from_components(std::move(raw));
  }

  IntervalSet drop_degenerate() const {
    IntervalSet s;
    for (const auto& iv : comps_)
      if (!iv.degenerate()) s.comps_.push_back(iv);
    s.normalize();
    return s;
  }

  // boundary endpoints (each once, as circle points); empty for the full circle
  std::vector<Quad> boundary_points() const {
    std::vector<Quad> out;
    if (full_) return out;
    for (const auto& iv : components()) {
      out.push_back(iv.lo.frac());
      if (!iv.degenerate()) out.push_back(iv.hi.frac());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool subset_of(const IntervalSet& B) const {
    if (B.full_) return true;
    size_t j = 0;
    for (const auto& a : comps_) {
      while (j < B.comps_.size() && B.comps_[j].hi < a.lo) ++j;
      if (j == B.comps_.size() || B.comps_[j].lo > a.lo || B.comps_[j].hi < a.hi) return false;
    }
    return true;
  }

  friend bool operator==(const IntervalSet& A, const IntervalSet& B) {
    if (A.comps_.size() != B.comps_.size()) return false;
    for (size_t i = 0; i < A.comps_.size(); ++i)
      if (A.comps_[i].lo != B.comps_[i].lo || A.comps_[i].hi != B.comps_[i].hi) return false;
    return true;
  }

  // The local germ at a point: the set restricted to the closed ball
  // B_eps(p), translated so p sits at 0.  Segments in [-eps, eps], sorted.
  std::vector<Interval> germ(const Quad& p0, const Quad& eps) const {
    Quad p = p0.frac();
    std::vector<Interval> out;
    // examine the set on [p-eps, p+eps]; only pieces near p matter, under the
    // three lifts around the seam
    for (int shift = -1; shift <= 1; ++shift) {
      Quad off = Quad(shift);
      Quad need_hi = p - eps - off;  // pieces with hi < this are irrelevant
      auto it = std::lower_bound(comps_.begin(), comps_.end(), need_hi,
                                 [](const Interval& iv, const Quad& v) { return iv.hi < v; });
      for (; it != comps_.end() && it->lo + off <= p + eps; ++it) {
        Quad l = max(it->lo + off - p, -eps);
        Quad h = min(it->hi + off - p, eps);
        if (l <= h) out.push_back({l, h});
      }
    }
    std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) {
      return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    // merge touching
    std::vector<Interval> merged;
    for (auto& iv : out) {
      if (!merged.empty() && iv.lo <= merged.back().hi) {
        if (iv.hi > merged.back().hi) merged.back().hi = iv.hi;
      } else {
        merged.push_back(iv);
      }
    }
    return merged;
  }

 private:
  std::vector<Interval>::const_iterator locate(const Quad& p) const {
    // last component with lo <= p
    auto it = std::upper_bound(comps_.begin(), comps_.end(), p,
                               [](const Quad& v, const Interval& iv) { return v < iv.lo; });
    if (it == comps_.begin()) return comps_.end();
    return std::prev(it);
  }

  void normalize() {
    full_ = false;
    std::sort(comps_.begin(), comps_.end(), [](const Interval& a, const Interval& b) {
      return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> merged;
    for (auto& iv : comps_) {
      if (!merged.empty() && iv.lo <= merged.back().hi) {
        if (iv.hi > merged.back().hi) merged.back().hi = iv.hi;
      } else {
        merged.push_back(iv);
      }
    }
    comps_ = std::move(merged);
    if (comps_.size() == 1 && comps_[0].lo.sign() == 0 && comps_[0].hi == Quad(1)) full_ = true;
  }

  std::vector<Interval> comps_;  // split at 0, sorted, disjoint, non-touching
  bool full_ = false;
};

// equal-germ test: germs (as segment lists) compared exactly
inline bool germs_equal(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].lo != b[i].lo || a[i].hi != b[i].hi) return false;
  return true;
}

}  // namespace apwin
