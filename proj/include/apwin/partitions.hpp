#pragma once

// Closest return times of an irrational rotation, the return intervals I_n,
// the three-distance partitions P_n, and their refinements.  Also the orbit
// search helpers used throughout: exact enumeration of orbit points inside an
// interval, and an exact walk that lands an orbit point inside a target arc.

#include <vector>

#include "apwin/interval_set.hpp"
#include "apwin/numbers.hpp"

namespace apwin {

// Signed displacement chain: err[n] = q_n * omega - p_n with p_n the nearest
// integer, so |err[n]| = ||q_n omega|| = |I_n|.  Signs alternate.
class ReturnTimes {
 public:
  ReturnTimes(Rotation rot, int count, const Int& q_budget = Int(1) << 62)
      : rot_(std::move(rot)) {
    if (count < 1) throw PreconditionViolated("return_times: N >= 1 required");
    extend(count, q_budget);
  }

  const Rotation& rotation() const { return rot_; }
  int count() const { return static_cast<int>(q_.size()); }

  // 1-based, matching q_1, q_2, ...
  const Int& q(int n) const { return q_.at(n - 1); }
  const Quad& err(int n) const { return err_.at(n - 1); }  // signed
  Quad len(int n) const { return err_.at(n - 1).abs(); }   // |I_n|

  // I_n as an interval set: arc between 0 and {q_n w}, on the short side
  IntervalSet interval(int n) const {
    const Quad& e = err_.at(n - 1);
    if (e.sign() > 0) return IntervalSet::arc(Quad(0), e);
    return IntervalSet::arc(e + Quad(1), Quad(1));
  }

  void extend(int count, const Int& q_budget = Int(1) << 62) {
    while (static_cast<int>(q_.size()) < count) {
      step(q_budget);
    }
  }

  // grow until |err| < target (exclusive); returns the first such level n
  int level_below(const Quad& target, const Int& q_budget = Int(1) << 62) {
    for (int n = 1;; ++n) {
      if (n > count()) step(q_budget);
      if (len(n) < target) return n;
    }
  }

 private:
  void step(const Int& q_budget) {
    Quad e_prev, e_cur;
    Int q_prev, q_cur;
    if (q_.empty()) {
      q_prev = 0;
      e_prev = Quad(-1);  // q_{-1} = 0, p = 1
      q_cur = 1;
      e_cur = rot_.omega();  // q_0 = 1, p = 0
    } else if (q_.size() == 1) {
      q_prev = 1;
      e_prev = rot_.omega();
      q_cur = q_[0];
      e_cur = err_[0];
    } else {
      q_prev = q_[q_.size() - 2];
      e_prev = err_[err_.size() - 2];
      q_cur = q_.back();
      e_cur = err_.back();
    }
    // a = floor(-e_prev / e_cur): signs alternate, the ratio is positive
    Quad ratio = -e_prev / e_cur;
    Int a = ratio.floor();
    if (a < 1) throw std::logic_error("return time recursion broke");
    Int q_next = a * q_cur + q_prev;
    if (q_next > q_budget) throw DepthOverflow("return time exceeds integer budget");
    Quad e_next = e_prev + Quad(Rat(a)) * e_cur;
    q_.push_back(q_next);
    err_.push_back(e_next);
  }

  Rotation rot_;
  std::vector<Int> q_;
  std::vector<Quad> err_;
};

// One tile R_w^j(I_base) of the partition P_n.
struct PartitionTile {
  int n = 0;        // partition index the tile belongs to
  bool next = false;  // false: base I_n, true: base I_{n+1}
  Int j;            // rotation index, 1 <= j <= q_{n+1} resp. q_n
  Quad lo, hi;      // arc [lo, lo+len] with lo in [0,1); hi may exceed 1
  Int lo_index, hi_index;  // orbit indices of the endpoints

  int base_level() const { return next ? n + 1 : n; }
  Quad length() const { return hi - lo; }
};

inline PartitionTile make_tile(const ReturnTimes& rt, int n, bool next, const Int& j) {
  const Rotation& rot = rt.rotation();
  int b = next ? n + 1 : n;
  Quad e = rt.err(b);
  Quad p = rot.value(0, j).frac();
  PartitionTile t;
  t.n = n;
  t.next = next;
  t.j = j;
  if (e.sign() > 0) {
    t.lo = p;
    t.hi = p + e;
    t.lo_index = j;
    t.hi_index = j + rt.q(b);
  } else {
    t.lo = (p + e).frac();
    t.hi = t.lo - e;
    t.lo_index = j + rt.q(b);
    t.hi_index = j;
  }
  return t;
}

// P_n = {R^j(I_n) : 1<=j<=q_{n+1}} u {R^j(I_{n+1}) : 1<=j<=q_n}
inline std::vector<PartitionTile> partition(ReturnTimes& rt, int n) {
  rt.extend(n + 2);
  std::vector<PartitionTile> tiles;
  Int qn1 = rt.q(n + 1);
  for (Int j = 1; j <= qn1; ++j) tiles.push_back(make_tile(rt, n, false, j));
  Int qn = rt.q(n);
  for (Int j = 1; j <= qn; ++j) tiles.push_back(make_tile(rt, n, true, j));
  std::sort(tiles.begin(), tiles.end(),
            [](const PartitionTile& a, const PartitionTile& b) { return a.lo < b.lo; });
  return tiles;
}

// ---------------------------------------------------------------------------
// Orbit point enumeration inside an arc, exact with a floating prefilter.
// Positions {j w} for 1 <= j <= j_max are generated incrementally in double
// precision; candidates within a safety margin of [lo, hi] are then verified
// exactly.  The accumulated rounding error is ~ j_max * 1ulp, asserted far
// below the margin.
// ---------------------------------------------------------------------------

struct OrbitHit {
  Int j;
  Quad pos;  // {j w}
};

inline std::vector<OrbitHit> orbit_hits_in(const Rotation& rot, const Quad& lo, const Quad& hi,
                                           long long j_max, bool open_ends = true) {
  double w = rot.omega().to_double();
  double a = lo.frac().to_double();
  double b = a + (hi - lo).to_double();
  double margin = 1e-9 + static_cast<double>(j_max) * 4e-16;
  if (margin > 1e-4) throw DepthOverflow("orbit enumeration: float prefilter margin too large");
  std::vector<long long> cand;
  double x = 0.0;
  for (long long j = 1; j <= j_max; ++j) {
    x += w;
    if (x >= 1.0) x -= 1.0;
    for (int lift = 0; lift <= 1; ++lift) {
      double xx = x + lift;
      if (xx >= a - margin && xx <= b + margin) cand.push_back(j);
    }
  }
  std::vector<OrbitHit> out;
  Quad l = lo.frac();
  Quad span = hi - lo;
  for (long long j : cand) {
    Quad p = rot.value(0, Int(j)).frac();
    Quad d = (p - l).frac();  // offset from lo along the arc
    bool in;
    if (open_ends)
      in = d.sign() > 0 && d < span;
    else
      in = d <= span;
    if (in) out.push_back({Int(j), p});
  }
  std::sort(out.begin(), out.end(), [&](const OrbitHit& u, const OrbitHit& v) {
    Quad du = (u.pos - l).frac(), dv = (v.pos - l).frac();
    return du < dv;
  });
  return out;
}

// Q_{J,m}: the tiles of P_m that tile a given tile J of P_n, m > n.
// Cut points are the orbit points strictly inside J with index up to
// q_m + q_{m+1}; every resulting piece is a P_m tile (checked by length).
inline std::vector<PartitionTile> refine(ReturnTimes& rt, const PartitionTile& J, int m) {
  if (m <= J.n) throw PreconditionViolated("refine: m must exceed the tile level");
  rt.extend(m + 2);
  Int cut_bound = rt.q(m) + rt.q(m + 1);
  if (cut_bound > Int(1) << 48) throw DepthOverflow("refine: partition too fine to enumerate");
  auto hits = orbit_hits_in(rt.rotation(), J.lo, J.hi, cut_bound.convert_to<long long>(), true);

  struct Cut {
    Quad pos;  // lifted to [J.lo, J.hi]
    Int index;
  };
  std::vector<Cut> cuts;
  cuts.push_back({J.lo, J.lo_index});
  for (auto& h : hits) {
    Quad lifted = J.lo + (h.pos - J.lo).frac();
    cuts.push_back({lifted, h.j});
  }
  cuts.push_back({J.hi, J.hi_index});

  Quad em = rt.err(m), em1 = rt.err(m + 1);
  std::vector<PartitionTile> out;
  for (size_t s = 0; s + 1 < cuts.size(); ++s) {
    PartitionTile t;
    t.n = m;
    t.lo = cuts[s].pos;
    t.hi = cuts[s + 1].pos;
    t.lo_index = cuts[s].index;
    t.hi_index = cuts[s + 1].index;
    Quad len = t.hi - t.lo;
    if (len == em.abs()) {
      t.next = false;
      t.j = (em.sign() > 0) ? t.lo_index : t.hi_index;
    } else if (len == em1.abs()) {
      t.next = true;
      t.j = (em1.sign() > 0) ? t.lo_index : t.hi_index;
    } else {
      throw std::logic_error("refine: piece is not a P_m tile (three-distance violated)");
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact orbit landing: find k > 0 with {k w} in the open arc (lo, hi).
// Greedy walk over the return-time ladder (the Ostrowski expansion of the
// displacement).  Deterministic; k is small of order 1/|arc| but not minimal.
// ---------------------------------------------------------------------------

inline Int find_orbit_index_in(ReturnTimes& rt, const Quad& lo, const Quad& hi,
                               const Int& index_budget = Int(1) << 62) {
  Quad span = (hi - lo).frac();
  if (span.sign() <= 0) throw PreconditionViolated("find_orbit_index_in: empty arc");
  Quad center = (lo + span * Quad(Rat(1, 2))).frac();
  Quad half = span * Quad(Rat(1, 2));
  int deep = rt.level_below(half * Quad(Rat(1, 2)), index_budget);
  Int k = rt.q(deep);  // start on a fine return so early steps stay small
  Quad pos = rt.err(deep).frac();
  for (int guard = 0; guard < 4096; ++guard) {
    Quad d = (center - pos).frac();  // forward distance to the target center
    bool forward = d <= Quad(Rat(1, 2));
    Quad dist = forward ? d : Quad(1) - d;
    if (dist < half) return k;
    // largest |err| step not exceeding dist, in the needed direction
    int pick = -1;
    for (int n = 1; n <= rt.count(); ++n) {
      bool step_forward = rt.err(n).sign() > 0;
      if (step_forward == forward && rt.len(n) <= dist) {
        pick = n;
        break;
      }
    }
    if (pick < 0) {
      // need finer ladder
      int n = rt.level_below(dist, index_budget);
      (void)n;
      continue;
    }
    Int reps = (dist / rt.len(pick)).floor();
    if (reps < 1) reps = 1;
    k += reps * rt.q(pick);
    if (k > index_budget) throw SearchExhausted("orbit landing exceeded index budget");
    pos = (pos + Quad(Rat(reps)) * rt.err(pick)).frac();
  }
  throw SearchExhausted("orbit landing did not converge");
}

}  // namespace apwin
