#include "sinrldp/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace sinrldp {

Box Box::unit(std::size_t dim) {
  return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) v *= std::max(0.0, hi[a] - lo[a]);
  return v;
}

std::vector<double> Box::center() const {
  std::vector<double> c(dim());
  for (std::size_t a = 0; a < dim(); ++a) c[a] = 0.5 * (lo[a] + hi[a]);
  return c;
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (!(x[a] >= lo[a] && x[a] <= hi[a])) return false;
  }
  return true;
}

bool Box::empty() const {
  for (std::size_t a = 0; a < dim(); ++a) {
    if (!(hi[a] > lo[a])) return true;
  }
  return false;
}

Box intersect(const Box& a, const Box& b) {
  assert(a.dim() == b.dim());
  Box out = a;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    out.lo[k] = std::max(a.lo[k], b.lo[k]);
    out.hi[k] = std::min(a.hi[k], b.hi[k]);
  }
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::vector<Box> split_box(const Box& box, const std::vector<std::vector<double>>& breaks) {
  const std::size_t d = box.dim();
  std::vector<std::vector<double>> cuts(d);
  for (std::size_t a = 0; a < d; ++a) {
    cuts[a].push_back(box.lo[a]);
    if (a < breaks.size()) {
      for (double b : breaks[a]) {
        if (b > box.lo[a] && b < box.hi[a]) cuts[a].push_back(b);
      }
    }
    cuts[a].push_back(box.hi[a]);
    std::sort(cuts[a].begin(), cuts[a].end());
    cuts[a].erase(std::unique(cuts[a].begin(), cuts[a].end()), cuts[a].end());
  }

  std::vector<Box> out;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Box b{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t a = 0; a < d; ++a) {
      b.lo[a] = cuts[a][idx[a]];
      b.hi[a] = cuts[a][idx[a] + 1];
    }
    out.push_back(std::move(b));
    std::size_t a = 0;
    for (; a < d; ++a) {
      if (++idx[a] + 1 < cuts[a].size()) break;
      idx[a] = 0;
    }
    if (a == d) break;
  }
  return out;
}

}  // namespace sinrldp
