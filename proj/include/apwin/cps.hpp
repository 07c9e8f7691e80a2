#pragma once

// Planar cut-and-project machinery: model sets, symbolic codings, critical
// shifts, similarity classes of boundary hits, and fiber candidate
// enumeration.  The internal line carries the circle window lifted to [0, 1).

#include <algorithm>
#include <map>
#include <vector>

#include "apwin/window.hpp"

namespace apwin {

// lattice (n, m) -> external n*a11 + m*a12, internal n*omega + m
struct PlanarCps {
  Quad a11, a12;
  Rotation rot;

  PlanarCps(Quad a, Quad b, Rotation r) : a11(std::move(a)), a12(std::move(b)), rot(std::move(r)) {
    if (a12.sign() == 0 || a11.sign() == 0)
      throw PreconditionViolated("cps: zero external row entry");
    if ((a11 / a12).is_rational())
      throw PreconditionViolated("cps: external row entries must have irrational ratio");
    if ((a11 - rot.omega() * a12).sign() == 0)
      throw PreconditionViolated("cps: lattice matrix is singular");
  }

  Quad external(const Int& n, const Int& m) const {
    return a11 * Quad(Rat(n)) + a12 * Quad(Rat(m));
  }
  Quad star(const Int& n, const Int& m) const { return rot.value(m, n); }  // n w + m
};

struct LatticePoint {
  Int n, m;
  Quad external;
  bool on_boundary = false;  // star lies on the boundary of the shifted window
};

struct PointPatch {
  Quad radius;
  Quad shift;  // internal shift t
  std::vector<LatticePoint> points;  // sorted by external value

  bool same_points(const PointPatch& o) const {
    if (points.size() != o.points.size()) return false;
    for (size_t i = 0; i < points.size(); ++i)
      if (points[i].n != o.points[i].n || points[i].m != o.points[i].m) return false;
    return true;
  }
};

// Window lifted to line segments in [0, 1]: the wrap component splits.
inline std::vector<Interval> window_lift(const Window& w) {
  std::vector<Interval> segs;
  for (const auto& iv : w.set.pieces()) segs.push_back(iv);
  return segs;
}

namespace detail {

enum class Member { Out, Interior, Boundary };

// The window as a compact subset of the line: the circle set lifted to
// [0, 1] (wrap components span the seam).  Binary search over components.
struct LineWindow {
  std::vector<Interval> comps;  // sorted by lo; hi may exceed 1
  bool full = false;
  bool open_lo = false, open_hi = false;
  bool interval_kind = false;

  explicit LineWindow(const Window& w)
      : comps(w.set.components()),
        full(w.set.is_full()),
        open_lo(w.open_lo),
        open_hi(w.open_hi),
        interval_kind(w.kind == WindowKind::Interval) {
    std::sort(comps.begin(), comps.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  }

  // rel must lie in [0, 1]; tests rel and rel + 1 against the lifted pieces
  Member classify(const Quad& rel) const {
    if (full) return Member::Interior;
    for (int lift = 0; lift <= 1; ++lift) {
      Quad cand = rel + Quad(lift);
      auto it = std::upper_bound(comps.begin(), comps.end(), cand,
                                 [](const Quad& v, const Interval& iv) { return v < iv.lo; });
      if (it == comps.begin()) continue;
      const Interval& c = *std::prev(it);
      if (cand > c.hi) continue;
      bool at_lo = cand == c.lo, at_hi = cand == c.hi;
      if (interval_kind) {
        if (at_lo && open_lo) continue;
        if (at_hi && open_hi) continue;
      }
      return (at_lo || at_hi) ? Member::Boundary : Member::Interior;
    }
    return Member::Out;
  }
};

}  // namespace detail

// All lattice points with |external| <= R and star in W + t (closed window).
inline PointPatch model_set(const PlanarCps& cps, const Window& w, const Quad& t, const Quad& R) {
  if (!w.proper() && !w.set.is_full())
    throw EmptyWindow("model_set: window must be proper (nonempty interior)");
  if (R.sign() <= 0) throw PreconditionViolated("model_set: R > 0 required");

  // external = n (a11 - w a12) + (n w + m) a12; with star bounded in [t, t+1]
  // the n-range follows from |external| <= R
  Quad slope = cps.a11 - cps.rot.omega() * cps.a12;
  double slope_d = std::abs(slope.to_double());
  double a12_d = std::abs(cps.a12.to_double());
  double R_d = R.to_double();
  long long n_bound = static_cast<long long>((R_d + 2.0 * (a12_d + 1.0)) / slope_d) + 2;

  PointPatch patch;
  patch.radius = R;
  patch.shift = t.frac();
  detail::LineWindow lw(w);
  for (long long n = -n_bound; n <= n_bound; ++n) {
    // m candidates: star = n w + m in [t, t+1] up to closure
    Quad base = cps.rot.value(0, Int(n));
    Int m0 = (t.frac() - base).floor();
    for (Int m = m0; m <= m0 + 2; ++m) {
      Quad star = base + Quad(Rat(m));
      Quad rel = star - t.frac();
      if (rel.sign() < 0 || rel > Quad(1)) continue;
      auto mem = lw.classify(rel);
      if (mem == detail::Member::Out) continue;
      Quad ext = cps.external(Int(n), m);
      if (ext.abs() > R) continue;
      LatticePoint lp{Int(n), m, ext, mem == detail::Member::Boundary};
      patch.points.push_back(std::move(lp));
    }
  }
  std::sort(patch.points.begin(), patch.points.end(),
            [](const LatticePoint& a, const LatticePoint& b) { return a.external < b.external; });
  return patch;
}

// w_k = 1 iff {k w} in W + t (window closure/openness flags respected)
inline std::string coding_word(const Window& w, const Quad& t, long long k0, long long k1) {
  if (k0 > k1) throw PreconditionViolated("coding_word: k0 <= k1 required");
  std::string out;
  for (long long k = k0; k <= k1; ++k) {
    Quad p = (w.rot.value(0, Int(k)) - t).frac();
    out.push_back(w.contains(p) ? '1' : '0');
  }
  return out;
}

// all |k| <= K with {k w} in boundary(W) + t, exact (no scan: boundary points
// are orbit points, so each contributes at most one index)
inline std::vector<Int> critical_points(const Window& w, const Quad& t, const Int& K) {
  std::vector<Int> hits;
  for (const auto& b : w.boundary()) {
    Quad p = (b + t).frac();
    auto c = w.rot.orbit_coords(p);
    if (!c) continue;
    const Int& k = c->second;
    if (boost::multiprecision::abs(k) <= K && w.rot.value(0, k).frac() == p) hits.push_back(k);
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

// ---------------------------------------------------------------------------
// Similarity classes: boundary hits grouped by exact equality of the local
// window germ, translated to the hit.  The germ radius is computed, never a
// tolerance: half the distance to the nearest other boundary endpoint.
// ---------------------------------------------------------------------------

struct GermInfo {
  Quad eps;                     // germ radius used
  std::vector<std::vector<Int>> classes;  // partition of the hits
};

inline Quad germ_radius(const Window& w, const Quad& t, const std::vector<Int>& hits) {
  auto bd = w.boundary();
  std::vector<Quad> bd_t;
  for (auto& b : bd) bd_t.push_back((b + t).frac());
  std::sort(bd_t.begin(), bd_t.end());
  Quad best(1);
  for (const auto& k : hits) {
    Quad p = w.rot.value(0, k).frac();
    // nearest boundary point distinct from p (cyclic neighbors in sorted list)
    auto it = std::lower_bound(bd_t.begin(), bd_t.end(), p);
    for (int probe = -2; probe <= 2; ++probe) {
      long idx = (static_cast<long>(it - bd_t.begin()) + probe + 2 * static_cast<long>(bd_t.size())) %
                 static_cast<long>(bd_t.size());
      Quad q = bd_t[idx];
      if (q == p) continue;
      best = min(best, circle_dist(p, q));
    }
  }
  return best * Quad(Rat(1, 2));
}

inline GermInfo similarity_classes(const Window& w, const Quad& t, const std::vector<Int>& hits) {
  GermInfo info;
  if (hits.empty()) return info;
  info.eps = germ_radius(w, t, hits);
  if (w.depth > 0 && w.source) {
    // below the depth resolution the germ is not decidable at this depth
    Quad resolution = w.source->rt->len(w.source->plan.n_seq.back() + 1);
    if (info.eps < resolution)
      throw GermUndecidable("similarity: germ radius under depth resolution; deepen L");
  }
  IntervalSet wt = w.set.translate(t.frac());
  std::vector<std::vector<Interval>> reps;
  for (const auto& k : hits) {
    Quad p = w.rot.value(0, k).frac();
    auto g = wt.germ(p, info.eps);
    bool placed = false;
    for (size_t c = 0; c < reps.size(); ++c) {
      if (germs_equal(reps[c], g)) {
        info.classes[c].push_back(k);
        placed = true;
        break;
      }
    }
    if (!placed) {
      reps.push_back(std::move(g));
      info.classes.emplace_back(std::vector<Int>{k});
    }
  }
  return info;
}

// ---------------------------------------------------------------------------
// Locally disjoint complements at a critical shift: for every pair of hits
// the translated complement germs intersect in measure zero.
// ---------------------------------------------------------------------------

struct LdcReport {
  bool holds = true;
  Quad eps;
  std::vector<std::pair<Int, Int>> failing_pairs;
};

inline Quad segments_overlap_measure(const std::vector<Interval>& A, const std::vector<Interval>& B) {
  Quad total(0);
  for (const auto& a : A)
    for (const auto& b : B) {
      Quad lo = max(a.lo, b.lo), hi = min(a.hi, b.hi);
      if (lo < hi) total += hi - lo;
    }
  return total;
}

inline LdcReport check_ldc(const Window& w, const Quad& t, const std::vector<Int>& hits) {
  LdcReport rep;
  if (hits.size() < 2) {
    rep.eps = Quad(0);
    return rep;  // vacuously true
  }
  rep.eps = germ_radius(w, t, hits);
  if (w.depth > 0 && w.source) {
    Quad resolution = w.source->rt->len(w.source->plan.n_seq.back() + 1);
    if (rep.eps < resolution)
      throw GermUndecidable("ldc: germ radius under depth resolution; deepen L");
  }
  IntervalSet wct = w.set.translate(t.frac()).complement();
  std::vector<std::vector<Interval>> germs;
  for (const auto& k : hits) germs.push_back(wct.germ(w.rot.value(0, k).frac(), rep.eps));
  for (size_t i = 0; i < hits.size() && rep.failing_pairs.size() < 8; ++i)
    for (size_t j = i + 1; j < hits.size() && rep.failing_pairs.size() < 8; ++j) {
      if (segments_overlap_measure(germs[i], germs[j]).sign() > 0) {
        rep.holds = false;
        rep.failing_pairs.emplace_back(hits[i], hits[j]);
      }
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Fiber candidate enumeration via the finite-range combinatorics: candidates
// are subsets of the boundary hits constant on similarity classes, each
// unioned with the interior model set.  For LDC windows the candidates are
// additionally filtered to "all hits minus at most one point".
// ---------------------------------------------------------------------------

struct FiberReport {
  Quad shift;
  bool critical = false;
  std::vector<LatticePoint> hits;          // boundary lattice points in range
  std::vector<std::vector<int>> classes;   // partition of hit indices
  std::vector<PointPatch> candidates;
  Int bound;                               // 2^(#classes)
  bool over_approximation = false;         // custom windows: not exactly realizable
};

inline FiberReport fiber_enumerate(const PlanarCps& cps, const Window& w, const Quad& t,
                                   const Quad& R) {
  FiberReport rep;
  rep.shift = t.frac();
  PointPatch all = model_set(cps, w, t, R);
  PointPatch interior;
  interior.radius = R;
  interior.shift = rep.shift;
  for (auto& p : all.points) {
    if (p.on_boundary)
      rep.hits.push_back(p);
    else
      interior.points.push_back(p);
  }
  rep.critical = !rep.hits.empty();
  if (!rep.critical) {
    rep.bound = 1;
    rep.candidates.push_back(std::move(interior));
    return rep;
  }

  std::vector<Int> hit_indices;
  for (auto& h : rep.hits) hit_indices.push_back(h.n);  // star index: {n w} + m
  std::sort(hit_indices.begin(), hit_indices.end());
  hit_indices.erase(std::unique(hit_indices.begin(), hit_indices.end()), hit_indices.end());
  GermInfo germ = similarity_classes(w, t, hit_indices);
  // map back: class members are star orbit indices = n values of the hits
  for (auto& cls : germ.classes) {
    std::vector<int> ids;
    for (size_t i = 0; i < rep.hits.size(); ++i)
      for (auto& k : cls)
        if (rep.hits[i].n == k) ids.push_back(static_cast<int>(i));
    std::sort(ids.begin(), ids.end());
    rep.classes.push_back(std::move(ids));
  }

  size_t ncls = rep.classes.size();
  if (ncls > 20) throw DepthOverflow("fiber: too many similarity classes to enumerate");
  rep.bound = Int(1) << ncls;

  bool ldc_filter = false;
  if (w.kind == WindowKind::V) {
    auto ldc = check_ldc(w, t, hit_indices);
    ldc_filter = ldc.holds;
  }
  if (w.kind == WindowKind::Custom) rep.over_approximation = true;

  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << ncls); ++mask) {
    size_t chosen = 0;
    for (size_t c = 0; c < ncls; ++c)
      if (mask & (std::uint64_t(1) << c)) chosen += rep.classes[c].size();
    if (ldc_filter && rep.hits.size() - chosen > 1) continue;  // Gamma+ minus at most one
    PointPatch cand = interior;
    for (size_t c = 0; c < ncls; ++c)
      if (mask & (std::uint64_t(1) << c))
        for (int id : rep.classes[c]) cand.points.push_back(rep.hits[id]);
    std::sort(cand.points.begin(), cand.points.end(),
              [](const LatticePoint& a, const LatticePoint& b) { return a.external < b.external; });
    rep.candidates.push_back(std::move(cand));
  }
  return rep;
}

}  // namespace apwin
