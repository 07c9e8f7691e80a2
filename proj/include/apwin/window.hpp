#pragma once

// Depth-L Cantor-type construction over the three-distance partitions, with
// gap/level/accessibility bookkeeping, and the windows built from it:
//   W  : body plus all even-level gaps (perfectly self-similar boundary)
//   V  : circle minus one gap per level (locally disjoint complements)
//   Wx : body plus an arbitrary 0/1 filling of the gaps
// All endpoints are orbit points a + b*omega; everything is exact.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "apwin/interval_set.hpp"
#include "apwin/partitions.hpp"

namespace apwin {

struct ConstructionPlan {
  Rat eps;                 // total removal budget: sum 3 beta_l < eps
  int L = 0;               // depth
  std::vector<Rat> betas;  // beta_1 .. beta_L
  std::vector<int> n_seq;  // n_1 .. n_L, partition levels per stage
};

// beta_l = eps / (6 * 2^l); n_1 = 1; n_{l+1} minimal >= n_l + 6 with
// |I_{n_l + 1}| / |I_{n_{l+1}}| > 1/beta_l (exact).
inline ConstructionPlan plan_parameters(ReturnTimes& rt, const Rat& eps, int L) {
  if (!(eps > 0 && eps < 1)) throw PreconditionViolated("plan: need 0 < eps < 1");
  if (L < 2) throw PreconditionViolated("plan: need L >= 2");
  ConstructionPlan plan;
  plan.eps = eps;
  plan.L = L;
  Rat pow2 = 2;
  for (int l = 1; l <= L; ++l) {
    plan.betas.push_back(eps / (6 * pow2));
    pow2 *= 2;
  }
  plan.n_seq.push_back(1);
  for (int l = 1; l < L; ++l) {
    int n_prev = plan.n_seq.back();
    rt.extend(n_prev + 8);
    Quad target = Quad(plan.betas[l - 1]) * rt.len(n_prev + 1);
    int n_next = n_prev + 6;
    rt.extend(n_next + 2);
    while (!(rt.len(n_next) < target)) {
      ++n_next;
      rt.extend(n_next + 2);
    }
    plan.n_seq.push_back(n_next);
  }
  // invariants, exactly
  Rat total = 0;
  for (auto& b : plan.betas) total += 3 * b;
  if (!(total < eps)) throw std::logic_error("plan: sum 3 beta_l >= eps");
  for (int l = 1; l < L; ++l) {
    if (plan.n_seq[l] < plan.n_seq[l - 1] + 6) throw std::logic_error("plan: n step < 6");
    if (!(rt.len(plan.n_seq[l]) < Quad(plan.betas[l - 1]) * rt.len(plan.n_seq[l - 1] + 1)))
      throw std::logic_error("plan: length ratio constraint violated");
  }
  return plan;
}

struct GapRec {
  Quad lo, hi;          // open arc (lo -> hi clockwise), endpoints in [0,1)
  int level = 0;        // construction stage at which the gap opened (2..L)
  Int lo_index, hi_index;  // orbit indices of the endpoints
  Quad length() const { return (hi - lo).frac(); }
};

struct CompRec {
  Quad lo, hi;             // closed arc [lo, lo+len], hi lifted
  Int lo_index, hi_index;  // orbit indices of the endpoints
  int left_gap = -1, right_gap = -1;
  // tiles at the final partition level: slice of the base refinement table
  Int parent_j;            // rotation index of the parent tile
  bool parent_type = false;
  int kept_from = 0, kept_to = -1;
  long tile_count() const { return kept_to - kept_from + 1; }
};

struct SubTileRow {
  Int j;  // rotation index for parent j = 1
  bool next = false;
  Int lo_index, hi_index;
  Quad lo, hi;  // lifted within the parent arc of parent j = 1
};

struct BaseTables {
  int n_from = 0, n_to = 0;
  std::vector<SubTileRow> sub[2];  // [parent_type]
};

enum class TileAccess { None, Left, Right };

struct CantorOptions {
  bool swap_rule1_sides = false;  // alternative reading of removal rule (1)
  Int q_budget = Int(1) << 48;
};

class CantorApprox {
 public:
  explicit CantorApprox(Rotation r) : rot(std::move(r)) {}

  Rotation rot;
  ConstructionPlan plan;
  std::shared_ptr<ReturnTimes> rt;
  CantorOptions opts;

  IntervalSet body;
  std::vector<GapRec> gaps;    // construction order; ids stable
  std::vector<CompRec> comps;  // circle order
  BaseTables last_tables;      // refinement used at the final stage
  std::vector<Quad> removed_per_step;  // steps 1..L-1

  // canonical gap enumeration: sort ids by (level, lo position)
  std::vector<int> canonical_gap_order() const {
    std::vector<int> ids(gaps.size());
    for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      if (gaps[a].level != gaps[b].level) return gaps[a].level < gaps[b].level;
      return gaps[a].lo < gaps[b].lo;
    });
    return ids;
  }

  TileAccess tile_access(const CompRec& c, long tile_pos) const {
    if (tile_pos == 0 && c.left_gap >= 0) return TileAccess::Left;
    if (tile_pos == c.tile_count() - 1 && c.right_gap >= 0) return TileAccess::Right;
    return TileAccess::None;
  }
};

namespace detail {

enum class Rule { Two, OneLeft, OneRight };

inline std::pair<int, int> kept_range(int N, Rule r, bool swapped) {
  // indices into the subtile list that survive (0-based, inclusive)
  if (r == Rule::Two) return {1, N - 2};
  bool left = (r == Rule::OneLeft) != swapped;
  if (left) return {2, N - 2};  // remove two left-most and the right-most
  return {1, N - 3};            // remove two right-most and the left-most
}

struct LiveTile {
  Int j;
  bool next = false;
};

}  // namespace detail

inline CantorApprox build_cantor(const Rotation& rot, const ConstructionPlan& plan,
                                 CantorOptions opts = {}) {
  CantorApprox C(rot);
  C.plan = plan;
  C.opts = opts;
  C.rt = std::make_shared<ReturnTimes>(rot, plan.n_seq.back() + 2, opts.q_budget);
  ReturnTimes& rt = *C.rt;

  using detail::Rule;

  // stage 1 state: the full circle tiled by P_{n_1}
  int n_cur = plan.n_seq[0];
  auto start_tiles = partition(rt, n_cur);

  for (int stage = 1; stage < plan.L; ++stage) {
    int n_next = plan.n_seq[stage];
    rt.extend(n_next + 2, opts.q_budget);

    BaseTables tables;
    tables.n_from = n_cur;
    tables.n_to = n_next;
    for (int t = 0; t < 2; ++t) {
      PartitionTile base = make_tile(rt, n_cur, t == 1, Int(1));
      auto sub = refine(rt, base, n_next);
      for (auto& s : sub) tables.sub[t].push_back({s.j, s.next, s.lo_index, s.hi_index, s.lo, s.hi});
      if (static_cast<int>(sub.size()) < 8)
        throw std::logic_error("construction: refinement has fewer than 8 subtiles");
    }

    std::vector<CompRec> new_comps;
    std::vector<GapRec>& gaps = C.gaps;
    Quad removed(0);

    // process one parent tile; returns the new component (gap links patched later)
    auto process_tile = [&](const detail::LiveTile& t, Rule rule) {
      int ty = t.next ? 1 : 0;
      const auto& sub = tables.sub[ty];
      int N = static_cast<int>(sub.size());
      auto [from, to] = detail::kept_range(N, rule, opts.swap_rule1_sides);
      if (!(from >= 1 && to <= N - 2 && to - from + 1 >= 2))
        throw std::logic_error("construction: removed chunks not separated by kept tiles");
      Quad shift = rot.value(0, t.j - 1).frac();
      CompRec c;
      c.parent_j = t.j;
      c.parent_type = t.next;
      c.kept_from = from;
      c.kept_to = to;
      c.lo = (sub[from].lo + shift).frac();
      c.hi = c.lo + (sub[to].hi - sub[from].lo);
      c.lo_index = sub[from].lo_index + (t.j - 1);
      c.hi_index = sub[to].hi_index + (t.j - 1);
      Quad parent_len = sub[N - 1].hi - sub[0].lo;
      removed += parent_len - (sub[to].hi - sub[from].lo);
      return c;
    };

    if (stage == 1) {
      // full circle: rule (2) everywhere; every shared endpoint opens a gap
      size_t k = start_tiles.size();
      for (size_t i = 0; i < k; ++i)
        new_comps.push_back(
            process_tile({start_tiles[i].j, start_tiles[i].next}, Rule::Two));
      for (size_t i = 0; i < k; ++i) {
        size_t nx = (i + 1) % k;
        GapRec g;
        g.lo = new_comps[i].hi.frac();
        g.hi = new_comps[nx].lo;
        g.level = stage + 1;
        g.lo_index = new_comps[i].hi_index;
        g.hi_index = new_comps[nx].lo_index;
        int id = static_cast<int>(gaps.size());
        gaps.push_back(g);
        new_comps[i].right_gap = id;
        new_comps[nx].left_gap = id;
      }
    } else {
      const BaseTables& prev = C.last_tables;
      for (auto& comp : C.comps) {
        // materialize the parent tiles of this component
        int ty = comp.parent_type ? 1 : 0;
        std::vector<detail::LiveTile> tiles;
        tiles.reserve(comp.kept_to - comp.kept_from + 1);
        for (int s = comp.kept_from; s <= comp.kept_to; ++s)
          tiles.push_back({prev.sub[ty][s].j + (comp.parent_j - 1), prev.sub[ty][s].next});
        if (tiles.size() < 2)
          throw std::logic_error("construction: component accessible from both sides");

        for (size_t i = 0; i < tiles.size(); ++i) {
          Rule rule = Rule::Two;
          if (i == 0) {
            int k = gaps[comp.left_gap].level;
            if ((stage - k) % 2 == 0) rule = Rule::OneLeft;
          } else if (i + 1 == tiles.size()) {
            int k = gaps[comp.right_gap].level;
            if ((stage - k) % 2 == 0) rule = Rule::OneRight;
          }
          CompRec c = process_tile(tiles[i], rule);
          if (i == 0) {
            c.left_gap = comp.left_gap;
            gaps[comp.left_gap].hi = c.lo;
            gaps[comp.left_gap].hi_index = c.lo_index;
          } else {
            GapRec g;
            g.lo = new_comps.back().hi.frac();
            g.hi = c.lo;
            g.level = stage + 1;
            g.lo_index = new_comps.back().hi_index;
            g.hi_index = c.lo_index;
            int id = static_cast<int>(gaps.size());
            gaps.push_back(g);
            new_comps.back().right_gap = id;
            c.left_gap = id;
          }
          if (i + 1 == tiles.size()) {
            c.right_gap = comp.right_gap;
            gaps[comp.right_gap].lo = c.hi.frac();
            gaps[comp.right_gap].lo_index = c.hi_index;
          }
          new_comps.push_back(std::move(c));
        }
      }
    }

    // exact removal bound: strictly below 3 beta_stage
    if (!(removed < Quad(Rat(3) * plan.betas[stage - 1])))
      throw std::logic_error("construction: step removed more than 3 beta");
    C.removed_per_step.push_back(removed);
    C.comps = std::move(new_comps);
    C.last_tables = std::move(tables);
    n_cur = n_next;
  }

  std::vector<Interval> arcs;
  arcs.reserve(C.comps.size());
  for (auto& c : C.comps) arcs.push_back({c.lo, c.hi});
  C.body = IntervalSet::from_components(std::move(arcs));
  return C;
}

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

enum class WindowKind { W, V, Wx, Interval, Custom };

inline std::string kind_name(WindowKind k) {
  switch (k) {
    case WindowKind::W: return "W";
    case WindowKind::V: return "V";
    case WindowKind::Wx: return "Wx";
    case WindowKind::Interval: return "interval";
    default: return "custom";
  }
}

struct Window {
  WindowKind kind = WindowKind::Custom;
  Rotation rot;
  int depth = 0;
  IntervalSet set;  // closed canonical representation
  bool open_lo = false, open_hi = false;  // interval kind half-open flags
  std::shared_ptr<const CantorApprox> source;
  std::vector<char> filled;    // per gap id: gap subset of the window
  std::string bits_used;       // Wx: resolved bits in canonical gap order
  std::uint64_t seed = 0;

  Window(WindowKind k, Rotation r) : kind(k), rot(std::move(r)) {}

  bool proper() const {
    if (set.is_empty()) return false;
    for (const auto& iv : set.pieces())
      if (iv.degenerate()) return false;
    return true;
  }

  std::vector<Quad> boundary() const { return set.boundary_points(); }

  bool contains(const Quad& p) const {
    if (kind == WindowKind::Interval && (open_lo || open_hi)) {
      Quad q = p.frac();
      for (const auto& iv : set.components()) {
        Quad off = (q - iv.lo).frac();
        Quad len = iv.hi - iv.lo;
        if (off > len) continue;
        if (off.sign() == 0 && open_lo) continue;
        if (off == len && open_hi) continue;
        return true;
      }
      return false;
    }
    return set.contains(p);
  }

  bool contains_interior(const Quad& p) const { return set.contains_interior(p); }
};

inline Window window_W(const std::shared_ptr<const CantorApprox>& C) {
  Window w(WindowKind::W, C->rot);
  w.depth = C->plan.L;
  w.source = C;
  w.filled.assign(C->gaps.size(), 0);
  std::vector<Interval> arcs;
  for (auto& c : C->comps) arcs.push_back({c.lo, c.hi});
  for (size_t g = 0; g < C->gaps.size(); ++g) {
    if (C->gaps[g].level % 2 == 0) {
      w.filled[g] = 1;
      Quad lo = C->gaps[g].lo;
      arcs.push_back({lo, lo + C->gaps[g].length()});
    }
  }
  w.set = IntervalSet::from_components(std::move(arcs));
  return w;
}

inline Window window_V(const std::shared_ptr<const CantorApprox>& C) {
  Window w(WindowKind::V, C->rot);
  w.depth = C->plan.L;
  w.source = C;
  w.filled.assign(C->gaps.size(), 1);
  auto order = C->canonical_gap_order();

  // nearest-endpoint circle distance between two gaps
  auto gap_dist = [&](const GapRec& a, const GapRec& b) {
    Quad d = circle_dist(a.lo, b.lo);
    d = min(d, circle_dist(a.lo, b.hi));
    d = min(d, circle_dist(a.hi, b.lo));
    d = min(d, circle_dist(a.hi, b.hi));
    return d;
  };

  std::vector<Interval> removed_arcs;
  for (int k = 2; k <= C->plan.L; ++k) {
    if (static_cast<size_t>(k - 1) >= order.size())
      throw PreconditionViolated("window_V: fewer gaps than levels");
    const GapRec& Jk = C->gaps[order[k - 1]];  // the k-th gap, canonical order
    int best = -1;
    Quad best_d(0), best_cw(0);
    for (size_t i = 0; i < C->gaps.size(); ++i) {
      if (C->gaps[i].level != k) continue;
      Quad d = gap_dist(C->gaps[i], Jk);
      Quad cw = (C->gaps[i].lo - Jk.hi).frac();  // clockwise tie-break
      if (best < 0 || d < best_d || (d == best_d && cw < best_cw)) {
        best = static_cast<int>(i);
        best_d = d;
        best_cw = cw;
      }
    }
    if (best < 0) throw std::logic_error("window_V: no gap of required level");
    w.filled[best] = 0;
    removed_arcs.push_back({C->gaps[best].lo, C->gaps[best].lo + C->gaps[best].length()});
  }
  w.set = IntervalSet::from_components(std::move(removed_arcs)).complement();
  return w;
}

inline Window window_random(const std::shared_ptr<const CantorApprox>& C, const std::string& bits,
                            std::uint64_t seed) {
  Window w(WindowKind::Wx, C->rot);
  w.depth = C->plan.L;
  w.source = C;
  w.seed = seed;
  auto order = C->canonical_gap_order();
  if (bits.size() > order.size())
    throw PreconditionViolated("window_random: more bits than gaps");
  w.filled.assign(C->gaps.size(), 0);
  std::mt19937_64 rng(seed);
  std::string resolved;
  for (size_t i = 0; i < order.size(); ++i) {
    char b;
    if (i < bits.size()) {
      if (bits[i] != '0' && bits[i] != '1')
        throw PreconditionViolated("window_random: bits must be 0/1");
      b = bits[i];
    } else {
      b = (rng() & 1) ? '1' : '0';
    }
    resolved.push_back(b);
    w.filled[order[i]] = (b == '1');
  }
  w.bits_used = resolved;
  std::vector<Interval> arcs;
  for (auto& c : C->comps) arcs.push_back({c.lo, c.hi});
  for (size_t g = 0; g < C->gaps.size(); ++g)
    if (w.filled[g]) arcs.push_back({C->gaps[g].lo, C->gaps[g].lo + C->gaps[g].length()});
  w.set = IntervalSet::from_components(std::move(arcs));
  return w;
}

inline Window window_interval(const Rotation& rot, const OrbitNumber& lo, const OrbitNumber& hi,
                              bool open_lo = false, bool open_hi = false) {
  Window w(WindowKind::Interval, rot);
  w.set = IntervalSet::arc(orbit_value(rot, lo), orbit_value(rot, hi));
  w.open_lo = open_lo;
  w.open_hi = open_hi;
  return w;
}

// ---------------------------------------------------------------------------
// Irredundance: candidate periods are differences of boundary endpoints with
// orbit index within the bound; h != 0 is a period iff set + h == set.
// ---------------------------------------------------------------------------

struct IrredundanceReport {
  bool degenerate_full_circle = false;
  std::vector<OrbitNumber> periods;  // nonzero periods found (empty = irredundant)
  long candidates_tested = 0;
};

inline IrredundanceReport check_irredundant(const Window& w, const Int& bound) {
  IrredundanceReport rep;
  if (w.set.is_full()) {
    rep.degenerate_full_circle = true;
    return rep;
  }
  auto bps = w.set.boundary_points();
  struct P {
    Int a, b;
    Quad v;
  };
  std::vector<P> pts;
  for (auto& v : bps) {
    auto c = w.rot.orbit_coords(v);
    if (!c) continue;  // non-orbit endpoint: contributes no orbit-indexed difference
    pts.push_back({c->first, c->second, v});
  }
  std::sort(pts.begin(), pts.end(), [](const P& x, const P& y) { return x.b < y.b; });
  std::vector<std::pair<Int, Int>> cands;
  size_t lo = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (lo < i && pts[i].b - pts[lo].b > bound) ++lo;
    for (size_t k = lo; k < i; ++k)
      cands.emplace_back(pts[i].a - pts[k].a, pts[i].b - pts[k].b);
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  // cheap rejection first: a period must map boundary points onto boundary
  // points; probe a few before paying for the full set comparison
  std::vector<Quad> sorted_bd = bps;
  auto on_boundary = [&](const Quad& v) {
    Quad p = v.frac();
    auto it = std::lower_bound(sorted_bd.begin(), sorted_bd.end(), p);
    return it != sorted_bd.end() && *it == p;
  };
  for (auto& [da, db] : cands) {
    if (da == 0 && db == 0) continue;
    Quad h = w.rot.value(da, db).frac();
    if (h.sign() == 0) continue;
    ++rep.candidates_tested;
    bool maybe = true;
    for (size_t probe = 0; probe < sorted_bd.size() && probe < 3; ++probe)
      if (!on_boundary(sorted_bd[probe] + h)) {
        maybe = false;
        break;
      }
    if (maybe && w.set.translate(h) == w.set) rep.periods.push_back(OrbitNumber(da, db));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Validation helpers (used by tests and the acceptance suite).
// ---------------------------------------------------------------------------

// two gaps have equal length iff they have equal level, exactly
inline bool gaps_length_level_equivalence(const CantorApprox& C) {
  std::vector<std::pair<int, Quad>> first_of_level;
  for (auto& g : C.gaps) {
    Quad len = g.length();
    bool seen = false;
    for (auto& [lvl, l] : first_of_level) {
      if (lvl == g.level) {
        seen = true;
        if (!(l == len)) return false;
      } else if (l == len) {
        return false;
      }
    }
    if (!seen) first_of_level.emplace_back(g.level, len);
  }
  return true;
}

// forward orbit points of processed tiles lie outside the body
inline bool processed_endpoints_outside_body(const CantorApprox& C, long long limit = 0) {
  const ReturnTimes& rt = *C.rt;
  int n_last_processed = C.plan.n_seq[C.plan.L - 2];
  Int bound = rt.q(n_last_processed) + rt.q(n_last_processed + 1);
  long long jb = bound.convert_to<long long>();
  if (limit > 0 && jb > limit) jb = limit;
  for (long long j = 1; j <= jb; ++j) {
    if (C.body.contains(C.rot.value(0, Int(j)))) return false;
  }
  return true;
}

}  // namespace apwin
