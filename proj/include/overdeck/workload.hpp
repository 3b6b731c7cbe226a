#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "overdeck/errors.hpp"

namespace overdeck {

constexpr int kBytesPerValue = 8;  // double precision fields

/// Full horizontal grid plus vertical extent and field count.
struct Domain {
  int nx = 1;
  int ny = 1;
  int nz = 1;      // vertical levels, the serial axis of the physics loop
  int fields = 1;  // number of 3D variables

  void validate() const {
    if (nx < 1 || ny < 1 || nz < 1 || fields < 0)
      throw ValidationError("domain dimensions must be >= 1 (fields >= 0)");
  }
  std::int64_t cells() const { return std::int64_t{nx} * ny; }
};

/// Half-open cell ranges of one tile; boundary_cells counts only faces shared
/// with another sub-domain.
struct SubDomain {
  int owner_vp = 0;
  int x_begin = 0, x_end = 0;
  int y_begin = 0, y_end = 0;
  std::int64_t boundary_cells = 0;

  std::int64_t cells() const {
    return std::int64_t{x_end - x_begin} * (y_end - y_begin);
  }
};

/// Per-horizontal-column multiplier driving the physics trip count.
class LoadField {
 public:
  LoadField() = default;
  LoadField(int nx, int ny, double value = 1.0)
      : nx_(nx), ny_(ny), c_(std::size_t(nx) * ny, value) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double at(int x, int y) const { return c_[std::size_t(y) * nx_ + x]; }
  void set(int x, int y, double v) { c_[std::size_t(y) * nx_ + x] = v; }

  double sum() const {
    double s = 0;
    for (double v : c_) s += v;
    return s;
  }

  double mean_over(const SubDomain& sub) const {
    double s = 0;
    for (int y = sub.y_begin; y < sub.y_end; ++y)
      for (int x = sub.x_begin; x < sub.x_end; ++x) s += at(x, y);
    const auto n = sub.cells();
    return n > 0 ? s / static_cast<double>(n) : 0.0;
  }

  bool operator==(const LoadField&) const = default;

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<double> c_;
};

/// Iteration counts of one kernel: parallel items, each running serial_depth
/// sequential iterations.
struct KernelWork {
  double work_items = 0;
  double serial_depth = 0;

  double total() const { return work_items * serial_depth; }
};

namespace detail {

// Splits `extent` into `k` contiguous pieces, remainder to the lowest indices.
inline std::vector<std::pair<int, int>> split_ranges(int extent, int k) {
  std::vector<std::pair<int, int>> out;
  const int base = extent / k, rem = extent % k;
  int at = 0;
  for (int i = 0; i < k; ++i) {
    const int len = base + (i < rem ? 1 : 0);
    out.emplace_back(at, at + len);
    at += len;
  }
  return out;
}

}  // namespace detail

/// k horizontal strips along Y, index 0 on top.
inline std::vector<SubDomain> decompose_1d(const Domain& domain, int k) {
  domain.validate();
  if (k < 1 || k > domain.ny) throw ValidationError("1d decomposition: k must be in [1, ny]");
  const auto ys = detail::split_ranges(domain.ny, k);
  std::vector<SubDomain> subs;
  for (int i = 0; i < k; ++i) {
    SubDomain s{i, 0, domain.nx, ys[i].first, ys[i].second, 0};
    int faces = 0;
    if (i > 0) ++faces;
    if (i + 1 < k) ++faces;
    s.boundary_cells = std::int64_t{faces} * domain.nx;
    subs.push_back(s);
  }
  return subs;
}

/// kx by ky rectangular tiles, row-major VP order.
inline std::vector<SubDomain> decompose_2d(const Domain& domain, int kx, int ky) {
  domain.validate();
  if (kx < 1 || kx > domain.nx || ky < 1 || ky > domain.ny)
    throw ValidationError("2d decomposition: tile counts exceed domain");
  const auto xs = detail::split_ranges(domain.nx, kx);
  const auto ys = detail::split_ranges(domain.ny, ky);
  std::vector<SubDomain> subs;
  for (int iy = 0; iy < ky; ++iy) {
    for (int ix = 0; ix < kx; ++ix) {
      SubDomain s{iy * kx + ix, xs[ix].first, xs[ix].second, ys[iy].first, ys[iy].second, 0};
      std::int64_t b = 0;
      const std::int64_t w = xs[ix].second - xs[ix].first;
      const std::int64_t h = ys[iy].second - ys[iy].first;
      if (ix > 0) b += h;
      if (ix + 1 < kx) b += h;
      if (iy > 0) b += w;
      if (iy + 1 < ky) b += w;
      s.boundary_cells = b;
      subs.push_back(s);
    }
  }
  return subs;
}

enum class LoadPattern { Uniform, StaticNode0, UpperHalfHeavy };

inline LoadPattern load_pattern_from_string(const std::string& s) {
  if (s == "uniform") return LoadPattern::Uniform;
  if (s == "static_node0") return LoadPattern::StaticNode0;
  if (s == "upper_half_heavy") return LoadPattern::UpperHalfHeavy;
  throw ValidationError("unknown load pattern: " + s);
}

inline std::string to_string(LoadPattern p) {
  switch (p) {
    case LoadPattern::Uniform: return "uniform";
    case LoadPattern::StaticNode0: return "static_node0";
    default: return "upper_half_heavy";
  }
}

/// node0_subs: sub-domains whose owner VP is homed on node 0 (used by the
/// static_node0 pattern only; pass empty otherwise).
inline LoadField init_load_field(const Domain& domain, LoadPattern pattern,
                                 double heavy_value, double light_value,
                                 const std::vector<SubDomain>& node0_subs = {}) {
  domain.validate();
  if (light_value < 1.0 || heavy_value < light_value)
    throw ValidationError("load field requires heavy_value >= light_value >= 1");
  LoadField c(domain.nx, domain.ny, light_value);
  switch (pattern) {
    case LoadPattern::Uniform:
      break;
    case LoadPattern::UpperHalfHeavy:
      for (int y = 0; y < domain.ny / 2; ++y)
        for (int x = 0; x < domain.nx; ++x) c.set(x, y, heavy_value);
      break;
    case LoadPattern::StaticNode0:
      for (const SubDomain& s : node0_subs)
        for (int y = s.y_begin; y < s.y_end; ++y)
          for (int x = s.x_begin; x < s.x_end; ++x) c.set(x, y, heavy_value);
      break;
  }
  return c;
}

/// Shift downward (increasing Y) with wrap-around. Preserves the multiset of
/// row values.
inline LoadField advect_load_field(const LoadField& c, int shift_rows) {
  if (shift_rows < 0 || shift_rows > c.ny())
    throw ValidationError("advection shift must be in [0, ny]");
  if (shift_rows == 0 || shift_rows == c.ny()) return c;
  LoadField out(c.nx(), c.ny());
  for (int y = 0; y < c.ny(); ++y) {
    const int src = (y - shift_rows + c.ny()) % c.ny();
    for (int x = 0; x < c.nx(); ++x) out.set(x, y, c.at(x, src));
  }
  return out;
}

/// One parallel item per horizontal column; the serial depth follows the
/// column multiplier, trip count mzp*C - 1.
inline KernelWork physics_work(const SubDomain& sub, const LoadField& c, int mzp) {
  const auto cells = sub.cells();
  if (cells == 0) return {0, 0};
  const double mean_c = c.mean_over(sub);
  return {static_cast<double>(cells), mzp * mean_c - 1.0};
}

/// Fully parallel stencil sweep over the sub-domain volume.
inline KernelWork jacobi_work(const SubDomain& sub, int nz, int fields) {
  const double items = static_cast<double>(sub.cells()) * nz * fields;
  return {items, items > 0 ? 1.0 : 0.0};
}

/// Halo footprint of one exchange, counting only shared faces.
inline std::int64_t halo_bytes(const SubDomain& sub, int nz, int fields) {
  return sub.boundary_cells * nz * fields * kBytesPerValue;
}

/// Full field footprint of one VP, used for migration costing.
inline std::int64_t subdomain_bytes(const SubDomain& sub, int nz, int fields) {
  return sub.cells() * nz * fields * kBytesPerValue;
}

}  // namespace overdeck
