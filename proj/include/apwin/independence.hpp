#pragma once

// Implementation of the independence-set builder declared in dynamics.hpp.
//
// State per level: the exact arrangement of the circle cut by the translated
// window boundaries (bd - {t_j w}), every open cell tagged with the word it
// realizes (bit j = 1 iff the cell maps into int V1 under + t_j w).  A new
// index k is admissible when every currently realized word extends both
// ways.  Candidates are scanned k = 1, -1, 2, -2, ...; the first admissible
// index wins.
//
// Everything in the search lives on one rotation orbit: every boundary point,
// hence every cell endpoint, is {m w} for a known integer m.  For bounded
// indices the three-distance structure gives a hard positive separation
// between distinct orbit points (|| d w || >= |I_n| whenever |d| < q_{n+1}),
// which is checked to exceed the floating guard; so ordering positions in
// doubles is exact, and coincidence is integer index equality.  The final
// witness intervals are planted with fully exact arithmetic.

#include <functional>

#include "apwin/dynamics.hpp"

namespace apwin {

namespace detail {

struct IdxCell {
  long long lo_idx = 0, hi_idx = 0;  // orbit indices of the endpoints
  double lo_d = 0, hi_d = 0;         // positions; hi_d may exceed 1 (lifted)
  std::uint64_t pattern = 0;
  int parent = -1;
  bool viable = false;
  int child0 = -1, child1 = -1;
};

struct IdxLevel {
  long long k = 0;
  long long scan_pos = 0;
  std::vector<IdxCell> cells;
};

// candidate order 1, -1, 2, -2, ...
inline long long nth_candidate(long long i) { return (i % 2 == 0) ? i / 2 + 1 : -(i / 2 + 1); }

class IndepBuilder {
 public:
  IndepBuilder(const Window& V0, const Window& V1, int n, IndependenceOptions opts)
      : V0_(V0), V1_(V1), n_(n), opts_(opts), rot_(V1.rot), rt_(rot_, 8) {
    if (n < 1 || n > 20) throw PreconditionViolated("independence: need 1 <= n <= 20");
    if (!V0.proper() || !V1.proper())
      throw PreconditionViolated("independence: windows must be proper");
    if (set_intersect(V0.set, V1.set).measure().sign() != 0)
      throw PreconditionViolated("independence: interiors of V0 and V1 must be disjoint");
    if (!set_union(V0.set, V1.set).is_full())
      throw PreconditionViolated(
          "independence: V0 ^ V1 must have positive measure or be the common boundary of a "
          "complementary pair; at finite depth only the complementary case arises");

    // boundary points with orbit indices, sorted by position
    for (const auto& b : V1.boundary()) {
      auto c = rot_.orbit_coords(b);
      if (!c) throw PreconditionViolated("independence: boundary not on the base orbit");
      long long j = c->second.convert_to<long long>();
      bd_.push_back({b.to_double(), j});
      max_bd_idx_ = std::max(max_bd_idx_, std::abs(j));
    }
    if (bd_.empty()) throw PreconditionViolated("independence: windows have no boundary");
    std::sort(bd_.begin(), bd_.end());

    // V1 membership table in doubles (piece endpoints are orbit points, so
    // the guard analysis below applies to probes as well)
    for (const auto& iv : V1.set.pieces()) {
      v1_lo_d_.push_back(iv.lo.to_double());
      v1_hi_d_.push_back(iv.hi.to_double());
    }

    // separation safety: all index differences met by the search are bounded
    // by 2 (max boundary index + total shift budget); distinct orbit points
    // at such distances are separated by at least |I_m| for the first return
    // ladder level with q_{m+1} above the bound, which must dwarf the guard
    long long bound = 2 * (max_bd_idx_ + (n + 1) * opts.candidate_budget) + 2;
    int m = 1;
    rt_.extend(m + 2);
    while (rt_.q(m + 1) <= bound) {
      ++m;
      rt_.extend(m + 2);
    }
    min_sep_ = rt_.len(m).to_double();
    if (min_sep_ < 256 * kGuard)
      throw DepthOverflow("independence: orbit separation too fine for the floating guard");
  }

  IndependenceCertificate run() {
    levels_.resize(static_cast<size_t>(n_) + 1);
    int level = 1;
    long long attempts = 0;
    while (true) {
      if (level >= 2) rebuild_rare_words(level - 1);
      IdxLevel& L = levels_[level];
      bool advanced = false;
      while (L.scan_pos < opts_.candidate_budget) {
        long long k = nth_candidate(L.scan_pos++);
        if (++attempts > 64 * opts_.candidate_budget)
          throw SearchExhausted("independence: global attempt budget exhausted");
        if (used(k, level)) continue;
        if (!prefilter(level, k)) continue;
        if (!try_accept(level, k)) continue;
        L.k = k;
        advanced = true;
        if (opts_.verbose)
          std::fprintf(stderr, "[indep] level %d: k = %lld (scanned %lld, cells %zu)\n", level, k,
                       L.scan_pos, L.cells.size());
        break;
      }
      if (!advanced) {
        if (opts_.verbose) {
          std::fprintf(stderr, "[indep] level %d exhausted, backtracking; worst words:", level);
          for (int rep = 0; rep < 3; ++rep) {
            size_t worst = 0;
            for (size_t w = 0; w < fail_hist_.size(); ++w)
              if (fail_hist_[w] > fail_hist_[worst]) worst = w;
            if (fail_hist_.empty() || fail_hist_[worst] == 0) break;
            std::fprintf(stderr, " w=%zu(%lld)", worst, fail_hist_[worst]);
            fail_hist_[worst] = 0;
          }
          std::fprintf(stderr, "\n");
          // sizes of the rare words' cells
          for (size_t r = 0; r < rare_words_.size() && r < 6; ++r) {
            const auto& [w, ids] = rare_words_[r];
            double len = 0;
            const auto& prev = levels_[level - 1].cells;
            for (int id : ids) len += prev[id].hi_d - prev[id].lo_d;
            std::fprintf(stderr, "[indep]   word %llu: %zu cells, total len %.3g\n",
                         (unsigned long long)w, ids.size(), len);
          }
        }
        fail_hist_.clear();
        L.scan_pos = 0;
        L.cells.clear();
        --level;
        if (level == 0) throw SearchExhausted("independence: no admissible index at some level");
        continue;
      }
      if (level == n_) {
        if (select_tree()) break;
        if (opts_.verbose) std::fprintf(stderr, "[indep] nesting selection failed, retrying\n");
        continue;
      }
      ++level;
    }
    return extract();
  }

 private:
  static constexpr double kGuard = 1e-10;

  struct BdPoint {
    double pos;
    long long idx;
    bool operator<(const BdPoint& o) const { return pos < o.pos; }
  };

  bool used(long long k, int level) const {
    for (int l = 1; l < level; ++l)
      if (levels_[l].k == k) return true;
    return false;
  }

  double shift_of(long long k) {
    auto it = shift_cache_.find(k);
    if (it != shift_cache_.end()) return it->second;
    double s = rot_.value(0, Int(k)).frac().to_double();
    shift_cache_[k] = s;
    return s;
  }

  // count of base boundary points with position in the open range (a, b),
  // both in [0, 1]; positions within the guard of the ends are excluded
  // (they can only be the end indices themselves)
  long count_in_01(double a, double b) const {
    auto i0 = std::lower_bound(bd_.begin(), bd_.end(), BdPoint{a + kGuard, 0});
    auto i1 = std::lower_bound(bd_.begin(), bd_.end(), BdPoint{b - kGuard, 0});
    return i1 > i0 ? static_cast<long>(i1 - i0) : 0;
  }

  // shifted boundary points frac(bd - shift) strictly inside the cell
  long count_bps_in(double shift, const IdxCell& c) const {
    double a = c.lo_d + shift, b = c.hi_d + shift;
    while (a >= 1.0) {
      a -= 1.0;
      b -= 1.0;
    }
    if (b <= 1.0 + 1e-15) return count_in_01(a, std::min(b, 1.0));
    return count_in_01(a, 1.0) + count_in_01(0.0, b - 1.0);
  }

  // sound necessity: a word realized by exactly one cell must have that cell
  // split, i.e. receive an interior breakpoint
  bool prefilter(int level, long long k) {
    if (level == 1) return true;
    double shift = shift_of(k);
    const auto& prev = levels_[level - 1].cells;
    for (const auto& [w, ids] : rare_words_) {
      (void)w;
      if (ids.size() != 1) break;  // sorted by multiplicity: singletons first
      if (count_bps_in(shift, prev[ids[0]]) == 0) return false;
    }
    return true;
  }

  bool v1_contains_d(double y) const {
    auto it = std::upper_bound(v1_lo_d_.begin(), v1_lo_d_.end(), y);
    if (it == v1_lo_d_.begin()) return false;
    size_t idx = static_cast<size_t>(it - v1_lo_d_.begin()) - 1;
    return y <= v1_hi_d_[idx];
  }

  double pos_of_index(long long i) {
    auto it = pos_cache_.find(i);
    if (it != pos_cache_.end()) return it->second;
    double p = rot_.value(0, Int(i)).frac().to_double();
    pos_cache_[i] = p;
    return p;
  }

  // evaluate candidate k at `level` and, if every word extends both ways,
  // install the new cell arrangement
  bool try_accept(int level, long long k) {
    double shift = shift_of(k);
    std::vector<IdxCell> next;
    size_t nw = size_t(1) << level;
    std::vector<char> present(nw, 0);

    auto push_cell = [&](long long lo_idx, long long hi_idx, double lo_d, double hi_d, int parent,
                         std::uint64_t pattern) {
      if (hi_d - lo_d < kGuard) {
        // distinct indices cannot be this close; equal indices mean an empty
        // cell (the candidate point coincides with the cell edge)
        if (lo_idx != hi_idx)
          throw std::logic_error("independence: separation guard violated");
        return;
      }
      IdxCell cell;
      cell.lo_idx = lo_idx;
      cell.hi_idx = hi_idx;
      if (lo_d >= 1.0) {
        lo_d -= 1.0;
        hi_d -= 1.0;
      }
      cell.lo_d = lo_d;
      cell.hi_d = hi_d;
      cell.parent = parent;
      double mid = 0.5 * (lo_d + hi_d) + shift;
      mid -= std::floor(mid);
      cell.pattern = pattern;
      if (v1_contains_d(mid)) cell.pattern |= (std::uint64_t(1) << (level - 1));
      present[cell.pattern] = 1;
      next.push_back(cell);
    };

    if (level == 1) {
      // pieces between the shifted boundary points
      std::vector<BdPoint> pts;
      pts.reserve(bd_.size());
      for (const auto& b : bd_) {
        double p = b.pos - shift;
        if (p < 0) p += 1.0;
        pts.push_back({p, b.idx - k});
      }
      std::sort(pts.begin(), pts.end());
      for (size_t i = 0; i < pts.size(); ++i) {
        const BdPoint& lo = pts[i];
        BdPoint hi = (i + 1 < pts.size()) ? pts[i + 1] : BdPoint{pts[0].pos + 1.0, pts[0].idx};
        push_cell(lo.idx, hi.idx, lo.pos, hi.pos, 0, 0);
      }
    } else {
      const auto& prev = levels_[level - 1].cells;
      // shifted points sorted by position once; per cell a binary range scan
      std::vector<BdPoint> pts;
      pts.reserve(bd_.size());
      for (const auto& b : bd_) {
        double p = b.pos - shift;
        if (p < 0) p += 1.0;
        pts.push_back({p, b.idx - k});
      }
      std::sort(pts.begin(), pts.end());
      std::vector<BdPoint> inner;
      for (size_t ci = 0; ci < prev.size(); ++ci) {
        const IdxCell& c = prev[ci];
        inner.clear();
        auto take = [&](double a, double b, double lift) {
          auto i0 = std::lower_bound(pts.begin(), pts.end(), BdPoint{a + kGuard, 0});
          auto i1 = std::lower_bound(pts.begin(), pts.end(), BdPoint{b - kGuard, 0});
          for (auto it = i0; it < i1; ++it) inner.push_back({it->pos + lift, it->idx});
        };
        if (c.hi_d <= 1.0) {
          take(c.lo_d, c.hi_d, 0.0);
        } else {
          take(c.lo_d, 1.0 + kGuard, 0.0);  // include a point at exactly 1 == 0
          take(0.0 - kGuard, c.hi_d - 1.0, 1.0);
          // dedupe the seam: a point at position 0 appears in both scans
          std::sort(inner.begin(), inner.end());
          inner.erase(std::unique(inner.begin(), inner.end(),
                                  [](const BdPoint& x, const BdPoint& y) { return x.idx == y.idx; }),
                      inner.end());
        }
        long long cursor_idx = c.lo_idx;
        double cursor_d = c.lo_d;
        for (size_t i = 0; i <= inner.size(); ++i) {
          long long hi_idx = (i < inner.size()) ? inner[i].idx : c.hi_idx;
          double hi_d = (i < inner.size()) ? inner[i].pos : c.hi_d;
          if (!(cursor_idx == hi_idx))
            push_cell(cursor_idx, hi_idx, cursor_d, hi_d, static_cast<int>(ci), c.pattern);
          cursor_idx = hi_idx;
          cursor_d = hi_d;
        }
      }
    }

    for (size_t wd = 0; wd < nw; ++wd)
      if (!present[wd]) {
        if (fail_hist_.size() < nw) fail_hist_.assign(nw, 0);
        fail_hist_[wd] += 1;
        return false;
      }
    levels_[level].cells = std::move(next);
    return true;
  }

  void rebuild_rare_words(int level) {
    std::map<std::uint64_t, std::vector<int>> by_word;
    const auto& cells = levels_[level].cells;
    for (size_t i = 0; i < cells.size(); ++i)
      by_word[cells[i].pattern].push_back(static_cast<int>(i));
    rare_words_.assign(by_word.begin(), by_word.end());
    std::sort(rare_words_.begin(), rare_words_.end(),
              [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });
    if (rare_words_.size() > 16) rare_words_.resize(16);
  }

  bool select_tree() {
    for (auto& cell : levels_[n_].cells) cell.viable = true;
    for (int l = n_ - 1; l >= 1; --l) {
      for (auto& cell : levels_[l].cells) {
        cell.viable = false;
        cell.child0 = cell.child1 = -1;
      }
      const auto& kids = levels_[l + 1].cells;
      for (size_t i = 0; i < kids.size(); ++i) {
        if (!kids[i].viable) continue;
        IdxCell& par = levels_[l].cells[kids[i].parent];
        bool bit = (kids[i].pattern >> l) & 1;
        if (bit && par.child1 < 0) par.child1 = static_cast<int>(i);
        if (!bit && par.child0 < 0) par.child0 = static_cast<int>(i);
      }
      for (auto& cell : levels_[l].cells) cell.viable = cell.child0 >= 0 && cell.child1 >= 0;
    }
    root0_ = root1_ = -1;
    for (size_t i = 0; i < levels_[1].cells.size(); ++i) {
      const IdxCell& c = levels_[1].cells[i];
      if (!c.viable) continue;
      if ((c.pattern & 1) && root1_ < 0) root1_ = static_cast<int>(i);
      if (!(c.pattern & 1) && root0_ < 0) root0_ = static_cast<int>(i);
    }
    return root0_ >= 0 && root1_ >= 0;
  }

  std::pair<OrbitNumber, OrbitNumber> orbit_pair(const Quad& a1, const Quad& b1, const Quad& a2,
                                                 const Quad& b2) {
    Int k1 = find_orbit_index_in(rt_, a1, b1, opts_.index_budget);
    Int k2 = find_orbit_index_in(rt_, a2, b2, opts_.index_budget);
    auto c1 = CirclePoint::orbit(rot_, k1).coords(rot_);
    auto c2 = CirclePoint::orbit(rot_, k2).coords(rot_);
    return {*c1, *c2};
  }

  IndependenceCertificate extract() {
    IndependenceCertificate cert(rot_);
    cert.depth = V1_.depth;
    for (int l = 1; l <= n_; ++l) cert.S.push_back(Int(levels_[l].k));

    // exact cell arcs from the endpoint indices
    auto exact_arc = [&](const IdxCell& c) -> std::pair<Quad, Quad> {
      Quad lo = rot_.value(0, Int(c.lo_idx)).frac();
      Quad len = (rot_.value(0, Int(c.hi_idx)).frac() - lo).frac();
      return {lo, lo + len};
    };

    std::function<std::pair<Quad, Quad>(int, int, const std::string&)> walk =
        [&](int level, int cell_id, const std::string& bits) -> std::pair<Quad, Quad> {
      const IdxCell& c = levels_[level].cells[cell_id];
      auto [clo, chi] = exact_arc(c);
      std::pair<OrbitNumber, OrbitNumber> uv;
      if (level == n_) {
        Quad len = chi - clo;
        uv = orbit_pair(clo + len * Quad(Rat(1, 8)), clo + len * Quad(Rat(3, 8)),
                        clo + len * Quad(Rat(5, 8)), clo + len * Quad(Rat(7, 8)));
      } else {
        auto s0 = walk(level + 1, c.child0, bits + "0");
        auto s1 = walk(level + 1, c.child1, bits + "1");
        auto lift = [&](const Quad& x) { return clo + (x - clo).frac(); };
        Quad h_lo = min(min(lift(s0.first), lift(s0.second)), min(lift(s1.first), lift(s1.second)));
        Quad h_hi = max(max(lift(s0.first), lift(s0.second)), max(lift(s1.first), lift(s1.second)));
        uv = orbit_pair(clo, h_lo, h_hi, chi);
      }
      Quad plo = orbit_value(rot_, uv.first).frac();
      Quad phi = orbit_value(rot_, uv.second).frac();
      cert.witnesses[bits] = uv;
      return {plo, phi};
    };
    walk(1, root0_, "0");
    walk(1, root1_, "1");

    for (int l = 1; l <= n_; ++l) {
      double coarse = 0;
      for (auto& [bits, uv] : cert.witnesses) {
        if (static_cast<int>(bits.size()) != l) continue;
        Quad lo = orbit_value(rot_, uv.first).frac();
        Quad hi = orbit_value(rot_, uv.second).frac();
        coarse = std::max(coarse, (hi - lo).frac().to_double());
      }
      long long den = 1LL << 40;
      cert.level_scales.push_back(
          Rat(static_cast<long long>(coarse * static_cast<double>(den)) + 1, den));
    }
    return cert;
  }

  const Window& V0_;
  const Window& V1_;
  int n_;
  IndependenceOptions opts_;
  Rotation rot_;
  ReturnTimes rt_;
  std::vector<BdPoint> bd_;
  long long max_bd_idx_ = 0;
  double min_sep_ = 0;
  std::vector<double> v1_lo_d_, v1_hi_d_;
  std::vector<IdxLevel> levels_;
  std::vector<std::pair<std::uint64_t, std::vector<int>>> rare_words_;
  std::map<long long, double> shift_cache_, pos_cache_;
  std::vector<long long> fail_hist_;
  int root0_ = -1, root1_ = -1;
};

}  // namespace detail

inline IndependenceCertificate build_independence_set(const Window& V0, const Window& V1, int n,
                                                      IndependenceOptions opts) {
  detail::IndepBuilder b(V0, V1, n, opts);
  return b.run();
}

}  // namespace apwin
