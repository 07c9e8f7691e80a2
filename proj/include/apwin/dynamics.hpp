#pragma once

// Dynamical diagnostics over the exact window machinery: word complexity of
// the coding, the entropy semicontinuity experiment, the translate-measure
// estimate, independence-set certificates with a standalone verifier, free
// set checks, and Birkhoff averages across fiber candidates.

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "apwin/cps.hpp"

namespace apwin {

// ---------------------------------------------------------------------------
// Word complexity p(n): the number of distinct length-n words of the coding
// k -> [ {k w} in W + t ] over all shifts t, counted exactly as the cells cut
// into the t-circle by the boundary translates {k w} - beta.
// ---------------------------------------------------------------------------

struct ComplexityTable {
  std::vector<int> n;
  std::vector<std::uint64_t> p;

  std::uint64_t at(int len) const {
    for (size_t i = 0; i < n.size(); ++i)
      if (n[i] == len) return p[i];
    throw PreconditionViolated("complexity table: length not computed");
  }
};

inline ComplexityTable patch_complexity(const Window& w, int n_max) {
  if (n_max < 1) throw PreconditionViolated("complexity: n_max >= 1");
  if (n_max > 64) throw DepthOverflow("complexity: word length capped at 64");
  ComplexityTable table;
  auto bd = w.boundary();
  if (bd.empty()) {
    for (int n = 1; n <= n_max; ++n) {
      table.n.push_back(n);
      table.p.push_back(1);
    }
    return table;
  }

  struct Breakpoint {
    Quad pos;
    int k;
  };
  std::vector<Breakpoint> bps;
  bps.reserve(static_cast<size_t>(n_max) * bd.size());
  for (int k = 0; k < n_max; ++k) {
    Quad ok = w.rot.value(0, Int(k));
    for (const auto& beta : bd) bps.push_back({(ok - beta).frac(), k});
  }
  std::sort(bps.begin(), bps.end(),
            [](const Breakpoint& a, const Breakpoint& b) { return a.pos < b.pos; });

  // initial word just before the first breakpoint (cell between last and first)
  Quad t0 = (bps.front().pos + bps.back().pos + Quad(1)) * Quad(Rat(1, 2));
  std::uint64_t word = 0;
  for (int k = 0; k < n_max; ++k) {
    Quad p = (w.rot.value(0, Int(k)) - t0).frac();
    if (w.contains(p)) word |= (std::uint64_t(1) << k);
  }

  std::vector<std::uint64_t> words;
  words.reserve(bps.size());
  size_t i = 0;
  while (i < bps.size()) {
    size_t j = i;
    while (j < bps.size() && bps[j].pos == bps[i].pos) {
      word ^= (std::uint64_t(1) << bps[j].k);
      ++j;
    }
    words.push_back(word);
    i = j;
  }

  // distinct prefixes for every n at once: sort lexicographically by bit 0,
  // bit 1, ...; adjacent first-difference histogram gives the counts
  std::sort(words.begin(), words.end(), [](std::uint64_t a, std::uint64_t b) {
    std::uint64_t d = a ^ b;
    if (d == 0) return false;
    int bitpos = std::countr_zero(d);
    return ((a >> bitpos) & 1) == 0;
  });
  std::vector<std::uint64_t> diff_hist(65, 0);
  for (size_t c = 0; c + 1 < words.size(); ++c) {
    std::uint64_t d = words[c] ^ words[c + 1];
    if (d != 0) diff_hist[std::countr_zero(d)] += 1;
  }
  std::uint64_t acc = 0;
  for (int n = 1; n <= n_max; ++n) {
    acc += diff_hist[n - 1];
    table.n.push_back(n);
    table.p.push_back(1 + acc);
  }
  return table;
}

// brute-force oracle: enumerate words over a fine shift grid (test use)
inline std::uint64_t brute_force_word_count(const Window& w, int n, int grid) {
  std::unordered_set<std::uint64_t> seen;
  for (int g = 0; g < grid; ++g) {
    Quad t(Rat(2 * g + 1, 2 * grid));
    std::uint64_t word = 0;
    for (int k = 0; k < n; ++k) {
      Quad p = (w.rot.value(0, Int(k)) - t).frac();
      if (w.contains(p)) word |= (std::uint64_t(1) << k);
    }
    seen.insert(word);
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// Entropy semicontinuity experiment: splice a deterministic filling x with a
// seeded random filling y and track p(n_word) as the spliced prefix grows.
// ---------------------------------------------------------------------------

struct SemicontinuityRow {
  int n_prefix;
  std::uint64_t p_xy;  // W(z(n; x, y)): x-prefix, random tail
  std::uint64_t p_yx;  // W(z(n; y, x)): random prefix, x-tail
};

struct SemicontinuityReport {
  std::uint64_t p_x, p_y;  // baselines: the pure fillings at n_word
  std::vector<SemicontinuityRow> rows;
  int n_word = 0;
  std::uint64_t seed = 0;
};

inline std::string w_fill_bits(const CantorApprox& C) {
  auto order = C.canonical_gap_order();
  std::string bits;
  for (int id : order) bits.push_back(C.gaps[id].level % 2 == 0 ? '1' : '0');
  return bits;
}

inline std::string random_fill_bits(const CantorApprox& C, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string bits;
  for (size_t i = 0; i < C.gaps.size(); ++i) bits.push_back((rng() & 1) ? '1' : '0');
  return bits;
}

inline std::string splice_bits(const std::string& x, const std::string& y, int n) {
  std::string z = y;
  for (int i = 0; i < n && i < static_cast<int>(x.size()); ++i) z[i] = x[i];
  return z;
}

inline SemicontinuityReport entropy_semicontinuity_experiment(
    const std::shared_ptr<const CantorApprox>& C, const std::vector<int>& prefixes, int n_word,
    std::uint64_t seed) {
  SemicontinuityReport rep;
  rep.n_word = n_word;
  rep.seed = seed;
  std::string x = w_fill_bits(*C);
  std::string y = random_fill_bits(*C, seed);
  rep.p_x = patch_complexity(window_random(C, x, 0), n_word).at(n_word);
  rep.p_y = patch_complexity(window_random(C, y, 0), n_word).at(n_word);
  for (int n : prefixes) {
    SemicontinuityRow row;
    row.n_prefix = n;
    row.p_xy = patch_complexity(window_random(C, splice_bits(x, y, n), 0), n_word).at(n_word);
    row.p_yx = patch_complexity(window_random(C, splice_bits(y, x, n), 0), n_word).at(n_word);
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Translate-measure estimate: both sides of the 2^n-translate inequality,
// computed exactly.  eta^C(d) = measure(B_d(C)) / measure(C) - 1.
// ---------------------------------------------------------------------------

struct MeasureEstimateReport {
  Quad lhs, rhs;
  bool holds = false;
};

// xi[l][idx]: the family member for the word a of length l+1 encoded by idx
// (bit j-1 of idx = a_j); eps[l] = eps_{l+1}
inline MeasureEstimateReport measure_estimate_check(const IntervalSet& C,
                                                    const std::vector<std::vector<Quad>>& xi,
                                                    const std::vector<Rat>& eps) {
  int n = static_cast<int>(eps.size());
  if (static_cast<int>(xi.size()) != n)
    throw PreconditionViolated("measure estimate: xi and eps sizes differ");
  if (C.measure().sign() <= 0)
    throw PreconditionViolated("measure estimate: C must have positive measure");
  for (int l = 0; l < n; ++l) {
    if (xi[l].size() != (size_t(1) << (l + 1)))
      throw PreconditionViolated("measure estimate: xi level has wrong arity");
    for (const auto& v : xi[l]) {
      if (!(circle_dist(v, Quad(0)) <= Quad(eps[l])))
        throw PreconditionViolated("measure estimate: eps_l < max d(0, xi_a)");
    }
  }

  MeasureEstimateReport rep;
  // lhs: measure of the intersection of C - gamma_a over all words a of length n
  IntervalSet acc = IntervalSet::full_circle();
  for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n); ++idx) {
    Quad gamma(0);
    std::uint64_t prefix = 0;
    for (int j = 1; j <= n; ++j) {
      prefix |= (idx & (std::uint64_t(1) << (j - 1)));
      gamma += xi[j - 1][prefix];
    }
    acc = set_intersect(acc, C.translate((Quad(1) - gamma.frac()).frac()));
    if (acc.is_empty()) break;
  }
  rep.lhs = acc.measure();

  Quad theta = C.measure();
  Quad sum(0);
  Rat two_pow = 1;
  for (int j = 1; j <= n; ++j) {
    Rat delta = 0;
    for (int l = j; l <= n; ++l) delta += eps[l - 1];
    Quad eta = C.thicken(Quad(delta)).measure() / theta - Quad(1);
    sum += Quad(two_pow) * eta;
    two_pow *= 2;
  }
  rep.rhs = theta * (Quad(1) - sum);
  rep.holds = rep.lhs >= rep.rhs;
  return rep;
}

// ---------------------------------------------------------------------------
// Free sets: for every P subset of S check the exact nonemptiness of
//   H(S, P) = ^_{s in P} (int W - {s w})  ^  ^_{s notin P} (int W^c - {s w}),
// via one sweep over the arrangement of the translated boundaries (cells are
// open, so witnesses avoid the finitely many boundary-orbit points).
// ---------------------------------------------------------------------------

struct FreeSetReport {
  bool free = false;
  std::vector<std::uint64_t> missing;  // subset masks with empty intersection
  std::vector<std::pair<std::uint64_t, Quad>> witnesses;  // mask -> cell midpoint
};

inline FreeSetReport verify_free_set(const Window& w, const std::vector<Int>& S) {
  FreeSetReport rep;
  size_t ns = S.size();
  if (ns == 0) {
    rep.free = true;
    return rep;
  }
  if (ns > 20) throw DepthOverflow("free set: subset enumeration capped at 20");
  auto bd = w.boundary();
  if (bd.empty())
    throw PreconditionViolated("free set: window has no boundary (full or empty)");

  struct Breakpoint {
    Quad pos;
    int s;
  };
  std::vector<Breakpoint> bps;
  for (size_t si = 0; si < ns; ++si) {
    Quad shift = w.rot.value(0, S[si]);
    for (const auto& beta : bd) bps.push_back({(beta - shift).frac(), static_cast<int>(si)});
  }
  std::sort(bps.begin(), bps.end(),
            [](const Breakpoint& a, const Breakpoint& b) { return a.pos < b.pos; });

  Quad t0 = (bps.front().pos + bps.back().pos + Quad(1)) * Quad(Rat(1, 2));
  std::uint64_t mask = 0;
  for (size_t si = 0; si < ns; ++si) {
    Quad p = (t0 + w.rot.value(0, S[si])).frac();
    if (w.contains(p)) mask |= (std::uint64_t(1) << si);
  }

  std::vector<char> present(size_t(1) << ns, 0);
  std::vector<Quad> witness(size_t(1) << ns, Quad(0));
  size_t i = 0;
  size_t groups = 0;
  std::vector<size_t> group_start;
  while (i < bps.size()) {
    size_t j = i;
    while (j < bps.size() && bps[j].pos == bps[i].pos) {
      mask ^= (std::uint64_t(1) << bps[j].s);
      ++j;
    }
    // the cell (bps[i..j-1].pos, next position) carries `mask`
    Quad lo = bps[i].pos;
    Quad hi = (j < bps.size()) ? bps[j].pos : bps.front().pos + Quad(1);
    if (!present[mask]) {
      present[mask] = 1;
      witness[mask] = ((lo + hi) * Quad(Rat(1, 2))).frac();
    }
    ++groups;
    i = j;
  }
  (void)groups;
  (void)group_start;

  rep.free = true;
  for (std::uint64_t m = 0; m < (std::uint64_t(1) << ns); ++m) {
    if (present[m])
      rep.witnesses.emplace_back(m, witness[m]);
    else {
      rep.free = false;
      rep.missing.push_back(m);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Independence certificates.
// ---------------------------------------------------------------------------

struct IndependenceCertificate {
  Rotation rot;
  int depth = 0;
  std::vector<Int> S;  // orbit indices t_1..t_n, in construction order
  // witnesses for every prefix word (keys "0", "1", "01", ...): closed
  // intervals [lo, hi] with orbit-number endpoints
  std::map<std::string, std::pair<OrbitNumber, OrbitNumber>> witnesses;
  std::vector<Rat> level_scales;  // coarsest witness length per level (report)

  explicit IndependenceCertificate(Rotation r) : rot(std::move(r)) {}
};

struct IndependenceOptions {
  long long candidate_budget = 20000;  // per level, scan k = 1, 2, ...
  Int index_budget = Int(1) << 60;     // for witness endpoint searches
  bool endpoint_push_candidates = false;  // alternative candidate generator
  bool verbose = false;                   // progress trace on stderr
};

namespace detail {

struct ArrCell {
  double lo_d, hi_d;
  int parent = -1;
  bool bit0_ok = false, bit1_ok = false;  // admissible for the new level's bit
  std::uint64_t pattern = 0;
  Quad lo, hi;  // exact (filled on accepted levels)
  bool viable = false;
  int child0 = -1, child1 = -1;  // filled by the final selection pass
};

}  // namespace detail

// The builder lives in apwin/independence.hpp: level-wise search for t_{l+1}
// such that every realized assignment pattern splits into both extensions,
// tracked on the exact cell arrangement of the translated boundaries; a final
// bottom-up pass selects a nested system of witness cells.

// standalone checker: validates both certificate invariants from the
// serialized data only (no construction state)
struct CertificateCheck {
  bool ok = false;
  std::string failure;
};

inline CertificateCheck verify_certificate(const IndependenceCertificate& cert, const Window& V0,
                                           const Window& V1) {
  CertificateCheck res;
  auto bd0 = V0.boundary();  // sorted
  auto bd1 = V1.boundary();
  auto count_open = [](const std::vector<Quad>& bd, const Quad& a, const Quad& b) -> long {
    // boundary points strictly inside the arc (a, b), b possibly lifted
    auto range = [&](const Quad& x, const Quad& y) -> long {
      auto i0 = std::upper_bound(bd.begin(), bd.end(), x);
      auto i1 = std::lower_bound(bd.begin(), bd.end(), y);
      return i1 > i0 ? static_cast<long>(i1 - i0) : 0;
    };
    if (b <= Quad(1)) return range(a, b);
    return range(a, Quad(1)) + range(Quad(0), b - Quad(1)) +
           ((!bd.empty() && bd.front().sign() == 0) ? 1 : 0);
  };
  auto arc_in_interior = [&](const Window& V, const std::vector<Quad>& bd, const Quad& lo,
                             const Quad& hi) {
    if (!V.contains_interior(lo) || !V.contains_interior(hi)) return false;
    Quad len = (hi - lo).frac();
    return count_open(bd, lo, lo + len) == 0;
  };

  int nlev = static_cast<int>(cert.S.size());
  for (const auto& [bits, uv] : cert.witnesses) {
    const auto& [lo_on, hi_on] = uv;
    Quad lo = orbit_value(cert.rot, lo_on).frac();
    Quad hi = orbit_value(cert.rot, hi_on).frac();
    if (static_cast<int>(bits.size()) > nlev) {
      res.failure = "witness word longer than S";
      return res;
    }
    for (size_t j = 0; j < bits.size(); ++j) {
      Quad shift = cert.rot.value(0, cert.S[j]);
      Quad tlo = (lo + shift).frac(), thi = (hi + shift).frac();
      bool ok = (bits[j] == '1') ? arc_in_interior(V1, bd1, tlo, thi)
                                 : arc_in_interior(V0, bd0, tlo, thi);
      if (!ok) {
        res.failure = "witness " + bits + " violates membership at level " + std::to_string(j + 1);
        return res;
      }
    }
    if (bits.size() > 1) {
      auto parent = cert.witnesses.find(bits.substr(0, bits.size() - 1));
      if (parent == cert.witnesses.end()) {
        res.failure = "missing parent witness for " + bits;
        return res;
      }
      Quad plo = orbit_value(cert.rot, parent->second.first).frac();
      Quad phi = orbit_value(cert.rot, parent->second.second).frac();
      Quad plen = (phi - plo).frac();
      Quad offl = (lo - plo).frac(), offh = (hi - plo).frac();
      if (!(offl <= plen && offh <= plen && offl <= offh)) {
        res.failure = "nesting violated for " + bits;
        return res;
      }
    }
  }
  // completeness: all prefixes present
  std::uint64_t expected = 0;
  for (int l = 1; l <= nlev; ++l) expected += (std::uint64_t(1) << l);
  if (cert.witnesses.size() != expected) {
    res.failure = "witness map incomplete";
    return res;
  }
  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------
// Birkhoff averages across fiber candidates: exact piecewise-linear tent
// envelope integration of f_{g0;eps} over [-N, N].
// ---------------------------------------------------------------------------

struct BirkhoffReport {
  std::vector<Quad> averages;   // per fiber candidate
  Quad max_deviation;
  Quad stated_bound;            // 2 eps sup f / (2N)
  Quad support_bound;           // (support length 4 eps / N) * max point difference
  bool within_stated = false;
  bool within_support = false;
};

namespace detail {

// integral of the tent centered at c (plateau radius eps, support 2 eps,
// height 1) over [a, b]
inline Quad tent_integral(const Quad& c, const Quad& eps, const Quad& a, const Quad& b) {
  // integrate piecewise on [a,b] ^ [c-2e, c+2e]
  auto seg = [&](const Quad& x0, const Quad& x1, int kind) -> Quad {
    // kind 0: rising slope, 1: plateau, 2: falling slope
    if (x1 <= x0) return Quad(0);
    if (kind == 1) return x1 - x0;
    if (kind == 0) {
      // f(s) = (s - (c - 2e)) / e
      Quad y0 = (x0 - (c - Quad(2) * eps)) / eps;
      Quad y1 = (x1 - (c - Quad(2) * eps)) / eps;
      return (y0 + y1) * (x1 - x0) * Quad(Rat(1, 2));
    }
    Quad y0 = ((c + Quad(2) * eps) - x0) / eps;
    Quad y1 = ((c + Quad(2) * eps) - x1) / eps;
    return (y0 + y1) * (x1 - x0) * Quad(Rat(1, 2));
  };
  Quad total(0);
  total += seg(max(a, c - Quad(2) * eps), min(b, c - eps), 0);
  total += seg(max(a, c - eps), min(b, c + eps), 1);
  total += seg(max(a, c + eps), min(b, c + Quad(2) * eps), 2);
  return total;
}

inline Quad envelope_average(const std::vector<Quad>& centers, const Quad& eps, const Quad& N) {
  // identical tents: the upper envelope on each Voronoi cell of the centers
  // is the tent of the nearest center
  Quad total(0);
  for (size_t i = 0; i < centers.size(); ++i) {
    Quad cell_lo = (i == 0) ? centers[i] - Quad(3) * eps
                            : (centers[i - 1] + centers[i]) * Quad(Rat(1, 2));
    Quad cell_hi = (i + 1 == centers.size()) ? centers[i] + Quad(3) * eps
                                             : (centers[i] + centers[i + 1]) * Quad(Rat(1, 2));
    Quad a = max(cell_lo, -N), b = min(cell_hi, N);
    if (a < b) total += tent_integral(centers[i], eps, a, b);
  }
  return total / (Quad(2) * N);
}

}  // namespace detail

inline BirkhoffReport birkhoff_fiber_agreement(const PlanarCps& cps, const Window& V,
                                               const Quad& t, const Quad& g0, const Rat& eps_r,
                                               long long N) {
  Quad eps(eps_r);
  if (eps.sign() <= 0 || N <= 0) throw PreconditionViolated("birkhoff: eps > 0 and N > 0");
  Quad R = Quad(N) + g0.abs() + Quad(4) * eps + Quad(2);
  auto fib = fiber_enumerate(cps, V, t, R);

  BirkhoffReport rep;
  size_t max_diff = 1;
  for (auto& cand : fib.candidates) {
    std::vector<Quad> centers;
    for (auto& p : cand.points) centers.push_back(p.external - g0);
    rep.averages.push_back(detail::envelope_average(centers, eps, Quad(N)));
  }
  rep.max_deviation = Quad(0);
  for (size_t i = 0; i < fib.candidates.size(); ++i)
    for (size_t j = i + 1; j < fib.candidates.size(); ++j) {
      Quad d = (rep.averages[i] - rep.averages[j]).abs();
      if (d > rep.max_deviation) rep.max_deviation = d;
      // point difference count
      size_t diff = fib.candidates[i].points.size() > fib.candidates[j].points.size()
                        ? fib.candidates[i].points.size() - fib.candidates[j].points.size()
                        : fib.candidates[j].points.size() - fib.candidates[i].points.size();
      if (diff > max_diff) max_diff = diff;
    }
  rep.stated_bound = Quad(2) * eps / (Quad(2) * Quad(N));
  rep.support_bound = Quad(4) * eps / Quad(N) * Quad(Rat(max_diff));
  rep.within_stated = rep.max_deviation <= rep.stated_bound;
  rep.within_support = rep.max_deviation <= rep.support_bound;
  return rep;
}

}  // namespace apwin
