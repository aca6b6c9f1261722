#pragma once

// Front-chain sibling packing and smallest enclosing circle of circles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "atlas/error.hpp"

namespace atlas {

template <typename Scalar>
struct Circle {
  using Point = Eigen::Matrix<Scalar, 2, 1>;

  Point center = Point::Zero();
  Scalar r = Scalar(1);

  Circle() = default;
  Circle(Scalar x, Scalar y, Scalar radius) : center(x, y), r(radius) {}
  Circle(const Point& c, Scalar radius) : center(c), r(radius) {}

  Scalar x() const { return center.x(); }
  Scalar y() const { return center.y(); }

  bool operator==(const Circle& o) const { return center == o.center && r == o.r; }
};

using Circled = Circle<double>;

/// True when `inner` lies inside `outer` up to `relTol * outer.r`.
template <typename Scalar>
bool contains(const Circle<Scalar>& outer, const Circle<Scalar>& inner, Scalar relTol = Scalar(1e-9)) {
  return (inner.center - outer.center).norm() + inner.r <= outer.r + relTol * outer.r;
}

/// True when the two circles overlap by more than `relTol * max(r)`.
template <typename Scalar>
bool overlaps(const Circle<Scalar>& a, const Circle<Scalar>& b, Scalar relTol = Scalar(1e-9)) {
  return (a.center - b.center).norm() < a.r + b.r - relTol * std::max(a.r, b.r);
}

namespace detail {

template <typename Scalar>
bool encloses_not(const Circle<Scalar>& a, const Circle<Scalar>& b) {
  const Scalar dr = a.r - b.r;
  return dr < 0 || dr * dr < (b.center - a.center).squaredNorm();
}

template <typename Scalar>
bool encloses_weak(const Circle<Scalar>& a, const Circle<Scalar>& b) {
  const Scalar dr = a.r - b.r + std::max({a.r, b.r, Scalar(1)}) * Scalar(1e-9);
  return dr > 0 && dr * dr > (b.center - a.center).squaredNorm();
}

template <typename Scalar>
bool encloses_weak_all(const Circle<Scalar>& a, std::span<const Circle<Scalar>> basis) {
  return std::all_of(basis.begin(), basis.end(),
                     [&](const Circle<Scalar>& b) { return encloses_weak(a, b); });
}

template <typename Scalar>
Circle<Scalar> enclose_basis2(const Circle<Scalar>& a, const Circle<Scalar>& b) {
  const auto d = (b.center - a.center).eval();
  const Scalar l = d.norm();
  return {(a.center + b.center + d / l * (b.r - a.r)) / Scalar(2), (l + a.r + b.r) / Scalar(2)};
}

/// Circle internally tangent to three circles (Apollonius, outer solution).
template <typename Scalar>
Circle<Scalar> enclose_basis3(const Circle<Scalar>& a, const Circle<Scalar>& b,
                              const Circle<Scalar>& c) {
  const Scalar x1 = a.x(), y1 = a.y(), r1 = a.r;
  const Scalar x2 = b.x(), y2 = b.y(), r2 = b.r;
  const Scalar x3 = c.x(), y3 = c.y(), r3 = c.r;
  const Scalar a2 = x1 - x2, a3 = x1 - x3;
  const Scalar b2 = y1 - y2, b3 = y1 - y3;
  const Scalar c2 = r2 - r1, c3 = r3 - r1;
  const Scalar d1 = x1 * x1 + y1 * y1 - r1 * r1;
  const Scalar d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2;
  const Scalar d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3;
  const Scalar ab = a3 * b2 - a2 * b3;
  const Scalar xa = (b2 * d3 - b3 * d2) / (ab * 2) - x1;
  const Scalar xb = (b3 * c2 - b2 * c3) / ab;
  const Scalar ya = (a3 * d2 - a2 * d3) / (ab * 2) - y1;
  const Scalar yb = (a2 * c3 - a3 * c2) / ab;
  const Scalar A = xb * xb + yb * yb - 1;
  const Scalar B = 2 * (r1 + xa * xb + ya * yb);
  const Scalar C = xa * xa + ya * ya - r1 * r1;
  const Scalar r = -(std::abs(A) > Scalar(1e-6) ? (B + std::sqrt(B * B - 4 * A * C)) / (2 * A) : C / B);
  return {x1 + xa + xb * r, y1 + ya + yb * r, r};
}

template <typename Scalar>
Circle<Scalar> enclose_basis(std::span<const Circle<Scalar>> basis) {
  switch (basis.size()) {
    case 1: return basis[0];
    case 2: return enclose_basis2(basis[0], basis[1]);
    default: return enclose_basis3(basis[0], basis[1], basis[2]);
  }
}

template <typename Scalar>
std::vector<Circle<Scalar>> extend_basis(const std::vector<Circle<Scalar>>& basis,
                                         const Circle<Scalar>& p) {
  if (encloses_weak_all<Scalar>(p, basis)) return {p};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (encloses_not(p, basis[i]) && encloses_weak_all<Scalar>(enclose_basis2(basis[i], p), basis))
      return {basis[i], p};
  }
  for (std::size_t i = 0; i + 1 < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      if (encloses_not(enclose_basis2(basis[i], basis[j]), p) &&
          encloses_not(enclose_basis2(basis[i], p), basis[j]) &&
          encloses_not(enclose_basis2(basis[j], p), basis[i]) &&
          encloses_weak_all<Scalar>(enclose_basis3(basis[i], basis[j], p), basis))
        return {basis[i], basis[j], p};
    }
  }
  throw Error(Errc::OutOfRange, "layout", "enclosing circle basis could not be extended");
}

}  // namespace detail

/// Smallest circle containing every input circle (Welzl-style move-to-front
/// over a shuffled copy; the shuffle seed is fixed so results are reproducible).
template <typename Scalar>
Circle<Scalar> enclosing_circle(std::span<const Circle<Scalar>> circles,
                                std::uint64_t seed = 0x5eed) {
  if (circles.empty()) throw Error(Errc::EmptyInput, "layout", "enclosing_circle of nothing");
  std::vector<Circle<Scalar>> shuffled(circles.begin(), circles.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng() % i]);

  std::vector<Circle<Scalar>> basis;
  Circle<Scalar> e;
  bool have = false;
  for (std::size_t i = 0; i < shuffled.size();) {
    const auto& p = shuffled[i];
    if (have && detail::encloses_weak(e, p)) {
      ++i;
    } else {
      basis = detail::extend_basis(basis, p);
      e = detail::enclose_basis<Scalar>(basis);
      have = true;
      i = 0;
    }
  }
  return e;
}

template <typename Scalar>
Circle<Scalar> enclosing_circle(const std::vector<Circle<Scalar>>& circles,
                                std::uint64_t seed = 0x5eed) {
  return enclosing_circle(std::span<const Circle<Scalar>>(circles), seed);
}

namespace detail {

/// Places c tangent to both a and b (on the left of a -> b).
template <typename Scalar>
void place_tangent(const Circle<Scalar>& b, const Circle<Scalar>& a, Circle<Scalar>& c) {
  const Scalar dx = b.x() - a.x(), dy = b.y() - a.y();
  const Scalar d2 = dx * dx + dy * dy;
  if (d2 > 0) {
    Scalar a2 = a.r + c.r;
    a2 *= a2;
    Scalar b2 = b.r + c.r;
    b2 *= b2;
    if (a2 > b2) {
      const Scalar x = (d2 + b2 - a2) / (2 * d2);
      const Scalar y = std::sqrt(std::max(Scalar(0), b2 / d2 - x * x));
      c.center = {b.x() - x * dx - y * dy, b.y() - x * dy + y * dx};
    } else {
      const Scalar x = (d2 + a2 - b2) / (2 * d2);
      const Scalar y = std::sqrt(std::max(Scalar(0), a2 / d2 - x * x));
      c.center = {a.x() + x * dx - y * dy, a.y() + x * dy + y * dx};
    }
  } else {
    c.center = {a.x() + c.r, a.y()};
  }
}

template <typename Scalar>
bool intersects_strictly(const Circle<Scalar>& a, const Circle<Scalar>& b) {
  const Scalar dr = a.r + b.r - Scalar(1e-10) * std::max(a.r, b.r);
  return dr > 0 && dr * dr > (b.center - a.center).squaredNorm();
}

}  // namespace detail

/// Packs circles of the given radii with the front-chain method. The first two
/// sit tangent astride the origin; every later circle is placed tangent to two
/// consecutive front-chain circles, and front circles it would overlap are cut
/// from the chain before retrying. Output order matches input order.
template <typename Scalar>
std::vector<Circle<Scalar>> pack_siblings(std::span<const Scalar> radii) {
  if (radii.empty()) throw Error(Errc::EmptyInput, "layout", "pack_siblings of nothing");
  for (Scalar r : radii)
    if (!(r > 0)) throw Error(Errc::OutOfRange, "layout", "radii must be positive");

  const std::size_t n = radii.size();
  std::vector<Circle<Scalar>> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i].r = radii[i];
  c[0].center.setZero();
  if (n == 1) return c;
  c[0].center = {-c[1].r, Scalar(0)};
  c[1].center = {c[0].r, Scalar(0)};
  if (n == 2) return c;
  detail::place_tangent(c[1], c[0], c[2]);

  // Front chain as a circular doubly linked list over circle indices.
  std::vector<std::size_t> next(n), prev(n);
  std::size_t a = 0, b = 1;
  next[0] = 1; prev[1] = 0;
  next[1] = 2; prev[2] = 1;
  next[2] = 0; prev[0] = 2;

  auto score = [&](std::size_t node) {
    const auto& ca = c[node];
    const auto& cb = c[next[node]];
    const Scalar ab = ca.r + cb.r;
    return ((ca.center * cb.r + cb.center * ca.r) / ab).squaredNorm();
  };

  for (std::size_t i = 3; i < n;) {
    detail::place_tangent(c[a], c[b], c[i]);
    std::size_t j = next[b], k = prev[a];
    Scalar sj = c[b].r, sk = c[a].r;
    bool restarted = false;
    do {
      if (sj <= sk) {
        if (detail::intersects_strictly(c[j], c[i])) {
          b = j;
          next[a] = b;
          prev[b] = a;
          restarted = true;
          break;
        }
        sj += c[j].r;
        j = next[j];
      } else {
        if (detail::intersects_strictly(c[k], c[i])) {
          a = k;
          next[a] = b;
          prev[b] = a;
          restarted = true;
          break;
        }
        sk += c[k].r;
        k = prev[k];
      }
    } while (j != next[k]);
    if (restarted) continue;

    prev[i] = a;
    next[i] = b;
    next[a] = i;
    prev[b] = i;
    b = i;

    // Re-anchor on the chain pair closest to the centroid.
    Scalar best = score(a);
    for (std::size_t node = next[i]; node != b; node = next[node]) {
      const Scalar s = score(node);
      if (s < best) {
        a = node;
        best = s;
      }
    }
    b = next[a];
    ++i;
  }
  return c;
}

template <typename Scalar>
std::vector<Circle<Scalar>> pack_siblings(const std::vector<Scalar>& radii) {
  return pack_siblings(std::span<const Scalar>(radii));
}

}  // namespace atlas
