#pragma once

// Independent reference computations for tests. Nothing here calls into the
// code paths it is used to check.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

using M4 = std::array<std::array<double, 4>, 4>;
using V3 = std::array<double, 3>;
using Q = std::array<double, 4>;  // w, x, y, z

inline M4 matmul(const M4& a, const M4& b) {
  M4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

inline Q hamilton(const Q& a, const Q& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

// v' = q v q*, q unit.
inline V3 rotate(const Q& q, const V3& v) {
  const Q p{0.0, v[0], v[1], v[2]};
  const Q conj{q[0], -q[1], -q[2], -q[3]};
  const Q r = hamilton(hamilton(q, p), conj);
  return {r[1], r[2], r[3]};
}

// Column j of the rotation matrix = image of basis vector e_j.
inline std::array<std::array<double, 3>, 3> rotation_by_basis(const Q& q) {
  std::array<std::array<double, 3>, 3> m{};
  for (int j = 0; j < 3; ++j) {
    V3 e{0, 0, 0};
    e[j] = 1.0;
    const V3 col = rotate(q, e);
    for (int i = 0; i < 3; ++i) m[i][j] = col[i];
  }
  return m;
}

inline M4 T(double x, double y, double z) {
  return {{{1, 0, 0, x}, {0, 1, 0, y}, {0, 0, 1, z}, {0, 0, 0, 1}}};
}
inline M4 S(double x, double y, double z) {
  return {{{x, 0, 0, 0}, {0, y, 0, 0}, {0, 0, z, 0}, {0, 0, 0, 1}}};
}
inline M4 embed(const std::array<std::array<double, 3>, 3>& r) {
  M4 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = r[i][j];
  m[3][3] = 1.0;
  return m;
}

// Azimuth bins by testing each bin's angular interval directly.
inline std::vector<bool> bin_scan(const std::vector<double>& azimuths_deg, std::size_t bins) {
  std::vector<bool> occ(bins, false);
  const double w = 360.0 / static_cast<double>(bins);
  for (double az : azimuths_deg) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double lo = w * static_cast<double>(b) - 1e-9;
      const double hi = w * static_cast<double>(b + 1) - 1e-9;
      if (az >= lo && az < hi) occ[b] = true;
    }
  }
  return occ;
}

// Largest angular gap between occupied bins, by enumerating every pair.
inline double max_gap_bins(const std::vector<bool>& occ) {
  const std::size_t n = occ.size();
  std::size_t best = 0;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!occ[i]) continue;
    any = true;
    std::size_t gap = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (occ[(i + k) % n]) break;
      ++gap;
    }
    if (gap > best) best = gap;
  }
  return any ? static_cast<double>(best) : static_cast<double>(n);
}

inline double mse_loop(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

inline double psnr_loop(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                        std::uint32_t levels) {
  const double m = mse_loop(a, b);
  const double peak = static_cast<double>(levels) - 1.0;
  return 10.0 * std::log10(peak * peak) - 10.0 * std::log10(m);
}

// Best union size over all k-subsets of bin sets.
inline std::size_t best_union(const std::vector<std::vector<bool>>& sets, std::size_t k) {
  const std::size_t n = sets.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<bool> u(sets.empty() ? 0 : sets[0].size(), false);
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i))
        for (std::size_t b = 0; b < u.size(); ++b) u[b] = u[b] || sets[i][b];
    std::size_t c = 0;
    for (bool x : u) c += x;
    if (c > best) best = c;
  }
  return best;
}

// Stepwise offload reference: piecewise-constant rate segments (duration, Mbps).
struct Segment {
  double duration;
  double mbps;
};
inline double drain_time(double megabits, const std::vector<Segment>& segments) {
  double t = 0.0;
  for (const Segment& s : segments) {
    const double can = s.duration * s.mbps;
    if (can >= megabits) return t + megabits / s.mbps;
    megabits -= can;
    t += s.duration;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace oracle
