#pragma once

// Tensor-product grids over axis-aligned boxes and scalar fields sampled on
// their nodes. Nodes are stored in row-major order: the last axis varies
// fastest.

#include "carnot/common.hpp"
#include "carnot/format.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace carnot
{

struct Box
{
  Point lo;
  Point hi;

  int dim() const { return static_cast<int>(lo.size()); }

  double volume() const
  {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= hi[k] - lo[k];
    return v;
  }

  double diameter() const { return (hi - lo).norm(); }

  bool contains(const Point& x) const
  {
    for (int k = 0; k < dim(); ++k)
      if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
  }

  void check() const
  {
    require(lo.size() == hi.size() && lo.size() > 0, ErrorCode::dimension_mismatch, "box bounds disagree in dimension");
    for (int k = 0; k < dim(); ++k)
      require(std::isfinite(lo[k]) && std::isfinite(hi[k]) && hi[k] > lo[k], ErrorCode::invalid_argument,
              "degenerate box on axis " + std::to_string(k));
  }
};

// Axis coordinates with spacing refined geometrically toward `center` via a
// sinh map; the spacing at the center is close to `center_spacing`. Falls
// back to uniform spacing when that is already fine enough. The interval must
// be symmetric about the center.
inline std::vector<double> graded_axis(double lo, double hi, int cells, double center_spacing)
{
  require(cells >= 2 && cells % 2 == 0, ErrorCode::invalid_argument, "graded axis needs an even cell count");
  const double c = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double target = center_spacing * cells / (2.0 * half);  // beta / sinh(beta)
  std::vector<double> axis(cells + 1);
  if (target >= 1.0) {
    for (int i = 0; i <= cells; ++i) axis[i] = lo + (hi - lo) * i / cells;
    return axis;
  }
  double a = 1e-9, b = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    (mid / std::sinh(mid) > target ? a : b) = mid;
  }
  const double beta = 0.5 * (a + b);
  for (int i = 0; i <= cells; ++i) {
    const double xi = -1.0 + 2.0 * i / cells;
    axis[i] = c + half * std::sinh(beta * xi) / std::sinh(beta);
  }
  axis.front() = lo;
  axis.back() = hi;
  axis[cells / 2] = c;
  return axis;
}

class Grid
{
 public:
  Grid() = default;

  static Grid uniform(const Box& box, const std::vector<int>& cells)
  {
    box.check();
    require(static_cast<int>(cells.size()) == box.dim(), ErrorCode::dimension_mismatch,
            "resolution has wrong number of axes");
    std::vector<std::vector<double>> axes(box.dim());
    for (int k = 0; k < box.dim(); ++k) {
      require(cells[k] >= 1, ErrorCode::invalid_argument, "resolution must be positive");
      axes[k].resize(cells[k] + 1);
      for (int i = 0; i <= cells[k]; ++i) axes[k][i] = box.lo[k] + (box.hi[k] - box.lo[k]) * i / cells[k];
      axes[k].back() = box.hi[k];
    }
    return Grid(std::move(axes));
  }

  static Grid uniform(const Box& box, int cells) { return uniform(box, std::vector<int>(box.dim(), cells)); }

  static Grid from_axes(std::vector<std::vector<double>> axes)
  {
    require(!axes.empty() && static_cast<int>(axes.size()) <= kMaxDim, ErrorCode::dimension_mismatch,
            "grid dimension out of range");
    for (const auto& a : axes) {
      require(a.size() >= 2, ErrorCode::invalid_argument, "each grid axis needs at least two nodes");
      for (std::size_t i = 1; i < a.size(); ++i)
        require(a[i] > a[i - 1], ErrorCode::invalid_argument, "grid axis must be strictly increasing");
    }
    return Grid(std::move(axes));
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  int cells(int axis) const { return static_cast<int>(axes_[axis].size()) - 1; }
  int nodes(int axis) const { return static_cast<int>(axes_[axis].size()); }
  const std::vector<double>& axis(int a) const { return axes_[a]; }
  std::size_t stride(int a) const { return strides_[a]; }
  std::size_t node_count() const { return node_count_; }

  std::size_t cell_count() const
  {
    std::size_t n = 1;
    for (int k = 0; k < dim(); ++k) n *= static_cast<std::size_t>(cells(k));
    return n;
  }

  int min_cells() const
  {
    int m = cells(0);
    for (int k = 1; k < dim(); ++k) m = std::min(m, cells(k));
    return m;
  }

  std::vector<int> resolution() const
  {
    std::vector<int> r(dim());
    for (int k = 0; k < dim(); ++k) r[k] = cells(k);
    return r;
  }

  Box box() const
  {
    Box b{Point(dim()), Point(dim())};
    for (int k = 0; k < dim(); ++k) {
      b.lo[k] = axes_[k].front();
      b.hi[k] = axes_[k].back();
    }
    return b;
  }

  bool is_uniform() const
  {
    for (const auto& a : axes_) {
      const double h = (a.back() - a.front()) / static_cast<double>(a.size() - 1);
      for (std::size_t i = 1; i < a.size(); ++i)
        if (std::abs(a[i] - a[i - 1] - h) > 1e-9 * h) return false;
    }
    return true;
  }

  // Largest cell edge on any axis.
  double max_spacing() const
  {
    double h = 0.0;
    for (const auto& a : axes_)
      for (std::size_t i = 1; i < a.size(); ++i) h = std::max(h, a[i] - a[i - 1]);
    return h;
  }

  std::size_t index(const int* multi) const
  {
    std::size_t i = 0;
    for (int k = 0; k < dim(); ++k) i += static_cast<std::size_t>(multi[k]) * strides_[k];
    return i;
  }

  void multi_index(std::size_t i, int* multi) const
  {
    for (int k = 0; k < dim(); ++k) {
      multi[k] = static_cast<int>(i / strides_[k]);
      i -= static_cast<std::size_t>(multi[k]) * strides_[k];
    }
  }

  Point node(std::size_t i) const
  {
    int multi[kMaxDim];
    multi_index(i, multi);
    Point x(dim());
    for (int k = 0; k < dim(); ++k) x[k] = axes_[k][multi[k]];
    return x;
  }

  // True when the node lies on the outer boundary of the box.
  bool on_boundary(std::size_t i) const
  {
    int multi[kMaxDim];
    multi_index(i, multi);
    for (int k = 0; k < dim(); ++k)
      if (multi[k] == 0 || multi[k] == cells(k)) return true;
    return false;
  }

  bool can_coarsen() const
  {
    for (int k = 0; k < dim(); ++k)
      if (cells(k) % 2 != 0 || cells(k) < 4) return false;
    return true;
  }

  // Keeps every other coordinate on each axis.
  Grid coarsened() const
  {
    require(can_coarsen(), ErrorCode::invalid_argument, "grid cannot be coarsened");
    std::vector<std::vector<double>> axes(dim());
    for (int k = 0; k < dim(); ++k)
      for (std::size_t i = 0; i < axes_[k].size(); i += 2) axes[k].push_back(axes_[k][i]);
    return Grid(std::move(axes));
  }

  // Cell containing x (clamped into the box) and local coordinates in [0, 1].
  bool locate(const Point& x, int* cell, double* local) const
  {
    bool inside = true;
    for (int k = 0; k < dim(); ++k) {
      const auto& a = axes_[k];
      double xk = x[k];
      if (xk < a.front() || xk > a.back()) inside = false;
      xk = std::clamp(xk, a.front(), a.back());
      auto it = std::upper_bound(a.begin(), a.end(), xk);
      int c = static_cast<int>(it - a.begin()) - 1;
      c = std::clamp(c, 0, cells(k) - 1);
      cell[k] = c;
      local[k] = (xk - a[c]) / (a[c + 1] - a[c]);
    }
    return inside;
  }

  friend bool operator==(const Grid& a, const Grid& b) { return a.axes_ == b.axes_; }

 private:
  explicit Grid(std::vector<std::vector<double>> axes) : axes_(std::move(axes))
  {
    strides_.assign(axes_.size(), 1);
    node_count_ = 1;
    for (int k = dim() - 1; k >= 0; --k) {
      strides_[k] = node_count_;
      node_count_ *= axes_[k].size();
    }
  }

  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  std::size_t node_count_ = 0;
};

class GridFunction
{
 public:
  GridFunction() = default;
  explicit GridFunction(Grid grid, double fill = 0.0) : grid_(std::move(grid)), values_(grid_.node_count(), fill) {}
  GridFunction(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
  {
    require(values_.size() == grid_.node_count(), ErrorCode::dimension_mismatch, "value count does not match grid");
  }

  static GridFunction sample(const Grid& grid, const std::function<double(const Point&)>& f)
  {
    GridFunction u(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) u.values_[i] = f(grid.node(i));
    return u;
  }

  const Grid& grid() const { return grid_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  bool all_finite() const
  {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  // Multilinear interpolation; `outside` is returned for points off the box.
  double interpolate(const Point& x, double outside = 0.0) const
  {
    int cell[kMaxDim];
    double local[kMaxDim];
    if (!grid_.locate(x, cell, local)) return outside;
    const int d = grid_.dim();
    double acc = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = 1.0;
      std::size_t idx = 0;
      for (int k = 0; k < d; ++k) {
        const int bit = (corner >> k) & 1;
        w *= bit ? local[k] : 1.0 - local[k];
        idx += static_cast<std::size_t>(cell[k] + bit) * grid_.stride(k);
      }
      if (w != 0.0) acc += w * values_[idx];
    }
    return acc;
  }

  // Values of this function resampled on another grid.
  GridFunction resampled(const Grid& target, double outside = 0.0) const
  {
    GridFunction out(target);
    for (std::size_t i = 0; i < target.node_count(); ++i) out.values_[i] = interpolate(target.node(i), outside);
    return out;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Text format:
//   # carnot-gridfunction v1
//   # dim D
//   # resolution c_0 ... c_{D-1}
//   # box lo_0 hi_0 ... lo_{D-1} hi_{D-1}
//   # axis k x_0 x_1 ...        (one line per axis)
//   x0,...,x{D-1},value         (header row, then one row per node, last axis fastest)
inline void write_csv(std::ostream& os, const GridFunction& u)
{
  const Grid& g = u.grid();
  os << "# carnot-gridfunction v1\n# dim " << g.dim() << "\n# resolution";
  for (int k = 0; k < g.dim(); ++k) os << ' ' << g.cells(k);
  os << "\n# box";
  for (int k = 0; k < g.dim(); ++k) os << ' ' << format_double(g.axis(k).front()) << ' ' << format_double(g.axis(k).back());
  os << '\n';
  for (int k = 0; k < g.dim(); ++k) {
    os << "# axis " << k;
    for (double c : g.axis(k)) os << ' ' << format_double(c);
    os << '\n';
  }
  for (int k = 0; k < g.dim(); ++k) os << 'x' << k << ',';
  os << "value\n";
  int multi[kMaxDim];
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    g.multi_index(i, multi);
    for (int k = 0; k < g.dim(); ++k) os << format_double(g.axis(k)[multi[k]]) << ',';
    os << format_double(u[i]) << '\n';
  }
}

inline GridFunction read_csv(std::istream& is)
{
  std::string line;
  std::vector<std::vector<double>> axes;
  int dim = -1;
  bool seen_magic = false;
  std::vector<double> values;
  bool header_row = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "carnot-gridfunction") {
        seen_magic = true;
      } else if (key == "dim") {
        ss >> dim;
        axes.assign(std::max(dim, 0), {});
      } else if (key == "axis") {
        int k = -1;
        ss >> k;
        require(k >= 0 && k < dim, ErrorCode::config, "grid csv: axis index out of range");
        std::string tok;
        while (ss >> tok) axes[k].push_back(parse_double(tok));
      }
      continue;
    }
    if (!header_row) {
      header_row = true;
      continue;
    }
    const auto comma = line.rfind(',');
    require(comma != std::string::npos, ErrorCode::config, "grid csv: malformed row");
    values.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  require(seen_magic && dim > 0, ErrorCode::config, "grid csv: missing header");
  return GridFunction(Grid::from_axes(std::move(axes)), std::move(values));
}

// Binary format: "CGF1", u32 dim, per axis (u32 count, f64 coords...), u64
// count, f64 values. Native endianness.
inline void write_binary(std::ostream& os, const GridFunction& u)
{
  const Grid& g = u.grid();
  os.write("CGF1", 4);
  const std::uint32_t dim = static_cast<std::uint32_t>(g.dim());
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  for (int k = 0; k < g.dim(); ++k) {
    const std::uint32_t n = static_cast<std::uint32_t>(g.nodes(k));
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(g.axis(k).data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  const std::uint64_t count = u.size();
  os.write(reinterpret_cast<const char*>(&count), sizeof count);
  os.write(reinterpret_cast<const char*>(u.values().data()), static_cast<std::streamsize>(count * sizeof(double)));
}

inline GridFunction read_binary(std::istream& is)
{
  char magic[4];
  is.read(magic, 4);
  require(is && std::memcmp(magic, "CGF1", 4) == 0, ErrorCode::config, "grid binary: bad magic");
  std::uint32_t dim = 0;
  is.read(reinterpret_cast<char*>(&dim), sizeof dim);
  require(is && dim > 0 && dim <= static_cast<std::uint32_t>(kMaxDim), ErrorCode::config, "grid binary: bad dimension");
  std::vector<std::vector<double>> axes(dim);
  for (auto& a : axes) {
    std::uint32_t n = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    require(is && n >= 2 && n < (1u << 24), ErrorCode::config, "grid binary: bad axis");
    a.resize(n);
    is.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  std::uint64_t count = 0;
  is.read(reinterpret_cast<char*>(&count), sizeof count);
  Grid grid = Grid::from_axes(std::move(axes));
  require(is && count == grid.node_count(), ErrorCode::config, "grid binary: value count mismatch");
  std::vector<double> values(count);
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  require(static_cast<bool>(is), ErrorCode::config, "grid binary: truncated");
  return GridFunction(std::move(grid), std::move(values));
}

}  // namespace carnot
