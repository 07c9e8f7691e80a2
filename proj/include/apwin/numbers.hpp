#pragma once

// Exact arithmetic in the real quadratic field Q(sqrt(D)) and the ring
// Z + Z*omega for a quadratic irrational rotation number omega.
// Every quantity produced anywhere in this library is a Quad value; there is
// no floating point in any stored state.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace apwin {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Error taxonomy.  The CLI maps precondition failures to exit code 2 and
// resource-style failures (DepthOverflow, SearchExhausted) to exit code 3.
// ---------------------------------------------------------------------------

struct PreconditionViolated : std::runtime_error {
  explicit PreconditionViolated(const std::string& m) : std::runtime_error(m) {}
};
struct RationalRotation : PreconditionViolated {
  explicit RationalRotation(const std::string& m) : PreconditionViolated(m) {}
};
struct ZeroDenominator : PreconditionViolated {
  explicit ZeroDenominator(const std::string& m) : PreconditionViolated(m) {}
};
struct EmptyWindow : PreconditionViolated {
  explicit EmptyWindow(const std::string& m) : PreconditionViolated(m) {}
};
struct DepthOverflow : std::runtime_error {
  explicit DepthOverflow(const std::string& m) : std::runtime_error(m) {}
};
struct SearchExhausted : std::runtime_error {
  explicit SearchExhausted(const std::string& m) : std::runtime_error(m) {}
};
struct GermUndecidable : std::runtime_error {
  explicit GermUndecidable(const std::string& m) : std::runtime_error(m) {}
};

// ---------------------------------------------------------------------------
// Small integer helpers.
// ---------------------------------------------------------------------------

inline Int isqrt_floor(const Int& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative");
  if (n == 0) return 0;
  Int r = boost::multiprecision::sqrt(n);
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool is_perfect_square(const Int& n) {
  if (n < 0) return false;
  Int r = isqrt_floor(n);
  return r * r == n;
}

inline bool is_square_free(const Int& n) {
  if (n < 1) return false;
  Int m = n;
  for (Int p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      m /= p;
      if (m % p == 0) return false;
    }
  }
  return true;
}

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

// floor division for cpp_int (rounds toward minus infinity, d > 0)
inline Int fdiv(const Int& n, const Int& d) {
  Int q = n / d;
  if ((n % d) != 0 && n.sign() < 0) --q;
  return q;
}

// ---------------------------------------------------------------------------
// Quad: (a + b*sqrt(D)) / c with integers a, b and c > 0, always reduced by
// gcd(a, b, c).  D is carried per value; mixing distinct radicands is a
// programming error except when one operand is rational (b == 0).
// ---------------------------------------------------------------------------

class Quad {
 public:
  Quad() : a_(0), b_(0), c_(1), D_(0) {}
  Quad(long x) : a_(x), b_(0), c_(1), D_(0) {}  // NOLINT: implicit integer lift
  Quad(const Int& x) : a_(x), b_(0), c_(1), D_(0) {}
  Quad(const Rat& x)  // NOLINT: implicit rational lift
      : a_(boost::multiprecision::numerator(x)),
        b_(0),
        c_(boost::multiprecision::denominator(x)),
        D_(0) {}
  Quad(const Rat& x, const Rat& y, long D) : D_(D) {
    Int nx = boost::multiprecision::numerator(x), dx = boost::multiprecision::denominator(x);
    Int ny = boost::multiprecision::numerator(y), dy = boost::multiprecision::denominator(y);
    Int g = boost::multiprecision::gcd(dx, dy);
    Int l = dx / g * dy;
    a_ = nx * (l / dx);
    b_ = ny * (l / dy);
    c_ = l;
    if (b_ == 0) D_ = 0;
    reduce();
  }
  static Quad make(Int a, Int b, Int c, long D) {
    Quad q;
    q.a_ = std::move(a);
    q.b_ = std::move(b);
    q.c_ = std::move(c);
    q.D_ = q.b_ == 0 ? 0 : D;
    if (q.c_ == 0) throw ZeroDenominator("Quad with zero denominator");
    if (q.c_ < 0) {
      q.a_ = -q.a_;
      q.b_ = -q.b_;
      q.c_ = -q.c_;
    }
    q.reduce();
    return q;
  }

  Rat x() const { return Rat(a_, c_); }
  Rat y() const { return Rat(b_, c_); }
  long D() const { return D_; }
  bool is_rational() const { return b_ == 0; }

  static long join(long a, long b) {
    if (a == 0) return b;
    if (b == 0) return a;
    if (a != b) throw std::logic_error("Quad: mixing distinct radicands");
    return a;
  }

  friend Quad operator+(const Quad& u, const Quad& v) {
    return make(u.a_ * v.c_ + v.a_ * u.c_, u.b_ * v.c_ + v.b_ * u.c_, u.c_ * v.c_,
                join(u.D_, v.D_));
  }
  friend Quad operator-(const Quad& u, const Quad& v) {
    return make(u.a_ * v.c_ - v.a_ * u.c_, u.b_ * v.c_ - v.b_ * u.c_, u.c_ * v.c_,
                join(u.D_, v.D_));
  }
  friend Quad operator-(const Quad& u) { return make(-u.a_, -u.b_, u.c_, u.D_); }
  friend Quad operator*(const Quad& u, const Quad& v) {
    long D = join(u.D_, v.D_);
    return make(u.a_ * v.a_ + u.b_ * v.b_ * D, u.a_ * v.b_ + u.b_ * v.a_, u.c_ * v.c_, D);
  }
  Quad inverse() const {
    // c/(a + b sqrt D) = c (a - b sqrt D) / (a^2 - b^2 D)
    Int n = a_ * a_ - b_ * b_ * D_;
    if (n == 0) throw ZeroDenominator("Quad::inverse of zero");
    return make(a_ * c_, -b_ * c_, n, D_);
  }
  friend Quad operator/(const Quad& u, const Quad& v) { return u * v.inverse(); }

  Quad& operator+=(const Quad& v) { return *this = *this + v; }
  Quad& operator-=(const Quad& v) { return *this = *this - v; }
  Quad& operator*=(const Quad& v) { return *this = *this * v; }

  // exact sign of a + b sqrt(D) (c > 0 throughout)
  static int signed_pair(const Int& a, const Int& b, long D) {
    int sa = a.sign(), sb = b.sign();
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    Int lhs = a * a, rhs = b * b * D;
    if (lhs == rhs) return 0;
    return lhs > rhs ? sa : sb;
  }

  int sign() const { return signed_pair(a_, b_, D_); }

  friend int cmp(const Quad& u, const Quad& v) {
    long D = join(u.D_, v.D_);
    Int A = u.a_ * v.c_ - v.a_ * u.c_;
    Int B = u.b_ * v.c_ - v.b_ * u.c_;
    return signed_pair(A, B, D);
  }

  friend bool operator==(const Quad& u, const Quad& v) { return cmp(u, v) == 0; }
  friend bool operator!=(const Quad& u, const Quad& v) { return cmp(u, v) != 0; }
  friend bool operator<(const Quad& u, const Quad& v) { return cmp(u, v) < 0; }
  friend bool operator<=(const Quad& u, const Quad& v) { return cmp(u, v) <= 0; }
  friend bool operator>(const Quad& u, const Quad& v) { return cmp(u, v) > 0; }
  friend bool operator>=(const Quad& u, const Quad& v) { return cmp(u, v) >= 0; }

  Quad abs() const { return sign() < 0 ? -*this : *this; }

  double to_double() const {
    double v = a_.convert_to<double>();
    if (b_ != 0) v += b_.convert_to<double>() * std::sqrt(static_cast<double>(D_));
    return v / c_.convert_to<double>();
  }

  // exact floor: floor((a + b sqrt D)/c) = fdiv(a + floor(b sqrt D), c),
  // since no integer multiple of c can separate a + floor(..) from the value
  Int floor() const {
    Int s;
    if (b_ == 0)
      s = 0;
    else if (b_ > 0)
      s = isqrt_floor(b_ * b_ * D_);
    else
      s = -isqrt_floor(b_ * b_ * D_) - 1;  // b^2 D is never a perfect square
    return fdiv(a_ + s, c_);
  }

  Quad frac() const {
    Int f = floor();
    if (f == 0) return *this;
    return make(a_ - f * c_, b_, c_, D_);
  }

  std::string str() const {
    std::string s = "(" + a_.str();
    if (b_ != 0) {
      s += (b_.sign() < 0 ? " - " : " + ");
      Int ab = boost::multiprecision::abs(b_);
      s += ab.str() + "*sqrt(" + std::to_string(D_) + ")";
    }
    s += ")/" + c_.str();
    return s;
  }

 private:
  void reduce() {
    if (c_ == 1) return;
    Int g = boost::multiprecision::gcd(boost::multiprecision::gcd(a_, b_), c_);
    if (g > 1) {
      a_ /= g;
      b_ /= g;
      c_ /= g;
    }
  }

  Int a_, b_, c_;
  long D_;
};

inline Quad abs(const Quad& q) { return q.abs(); }
inline Quad min(const Quad& a, const Quad& b) { return a <= b ? a : b; }
inline Quad max(const Quad& a, const Quad& b) { return a >= b ? a : b; }

// ---------------------------------------------------------------------------
// Rotation: quadratic irrational rotation number omega = (p + q*sqrt(D))/r,
// normalized to 0 < omega < 1/2 (reduce mod 1, reflect if needed).
// ---------------------------------------------------------------------------

class Rotation {
 public:
  Rotation(long D, const Int& p, const Int& q, const Int& r) : D_(D), p_(p), q_(q), r_(r) {
    if (r == 0) throw ZeroDenominator("rotation denominator r = 0");
    if (q == 0) throw RationalRotation("q = 0 gives a rational rotation");
    if (D < 2 || is_perfect_square(Int(D)))
      throw RationalRotation("D must be a non-square integer >= 2");
    if (!is_square_free(Int(D))) throw PreconditionViolated("D must be square-free");
    Quad w = Quad::make(p, q, r, D);
    w = w.frac();
    if (w > Quad(Rat(1, 2))) w = Quad(1) - w;
    if (w.sign() == 0 || w == Quad(Rat(1, 2)))
      throw RationalRotation("rotation reduced to a rational value");
    omega_ = w;
  }

  long D() const { return D_; }
  const Int& p() const { return p_; }
  const Int& q() const { return q_; }
  const Int& r() const { return r_; }
  const Quad& omega() const { return omega_; }

  // a + b*omega as a Quad
  Quad value(const Int& a, const Int& b) const { return Quad(a) + Quad(b) * omega_; }

  // Recover (a, b) with v = a + b*omega if such integers exist.
  std::optional<std::pair<Int, Int>> orbit_coords(const Quad& v) const {
    if (v.D() != 0 && v.D() != D_) return std::nullopt;
    Rat wy = omega_.y();  // != 0 since omega is irrational
    Rat b = v.y() / wy;
    if (boost::multiprecision::denominator(b) != 1) return std::nullopt;
    Rat a = v.x() - b * omega_.x();
    if (boost::multiprecision::denominator(a) != 1) return std::nullopt;
    return std::make_pair(Int(boost::multiprecision::numerator(a)),
                          Int(boost::multiprecision::numerator(b)));
  }

  friend bool operator==(const Rotation& a, const Rotation& b) {
    return a.D_ == b.D_ && a.omega_ == b.omega_;
  }

 private:
  long D_;
  Int p_, q_, r_;
  Quad omega_;
};

// ---------------------------------------------------------------------------
// OrbitNumber: a + b*omega (exact, unique representation), and CirclePoint:
// the canonical representative in [0, 1).
// ---------------------------------------------------------------------------

struct OrbitNumber {
  Int a{0}, b{0};
  OrbitNumber() = default;
  OrbitNumber(Int a_, Int b_) : a(std::move(a_)), b(std::move(b_)) {}
  friend bool operator==(const OrbitNumber& u, const OrbitNumber& v) {
    return u.a == v.a && u.b == v.b;
  }
};

inline Quad orbit_value(const Rotation& rot, const OrbitNumber& z) { return rot.value(z.a, z.b); }

inline int compare(const Rotation& rot, const OrbitNumber& u, const OrbitNumber& v) {
  return cmp(orbit_value(rot, u), orbit_value(rot, v));
}

class CirclePoint {
 public:
  CirclePoint() : v_(0) {}
  // reduce an arbitrary exact value mod 1
  static CirclePoint reduce(const Quad& v) {
    CirclePoint p;
    p.v_ = v.frac();
    return p;
  }
  static CirclePoint orbit(const Rotation& rot, const Int& k) {
    return reduce(rot.value(0, k));  // {k*omega}, rep (-floor(k w), k)
  }
  const Quad& value() const { return v_; }

  // (a, b) of the canonical representative, if it lies in Z + Z*omega
  std::optional<OrbitNumber> coords(const Rotation& rot) const {
    auto c = rot.orbit_coords(v_);
    if (!c) return std::nullopt;
    return OrbitNumber(c->first, c->second);
  }

  friend bool operator==(const CirclePoint& a, const CirclePoint& b) { return a.v_ == b.v_; }
  friend bool operator<(const CirclePoint& a, const CirclePoint& b) { return a.v_ < b.v_; }

 private:
  Quad v_;
};

// circle distance d(x, y) = min({x-y}, {y-x}), exact
inline Quad circle_dist(const Quad& x, const Quad& y) {
  Quad d = (x - y).frac();
  Quad e = Quad(1) - d;
  return min(d, e);
}

// distance of {k*omega} to 0, i.e. ||k*omega||
inline Quad orbit_norm(const Rotation& rot, const Int& k) {
  return circle_dist(rot.value(0, k), Quad(0));
}

}  // namespace apwin
