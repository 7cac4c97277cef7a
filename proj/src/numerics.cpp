#include "sinrldp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace sinrldp::numerics {

namespace {

GaussRule compute_gauss_legendre(std::size_t n) {
  if (n <= 1) return GaussRule{{0.0}, {2.0}};
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Tensor rule on the unit cube [0,1]^d.
struct UnitRule {
  std::size_t dim;
  std::vector<double> coords;
  std::vector<double> weights;
};

UnitRule make_unit_rule(std::size_t dim, std::size_t n) {
  const GaussRule& g = gauss_legendre(n);
  UnitRule r{dim, {}, {}};
  std::size_t total = 1;
  for (std::size_t a = 0; a < dim; ++a) total *= n;
  r.coords.resize(total * dim);
  r.weights.resize(total);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t p = 0; p < total; ++p) {
    double w = 1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      r.coords[p * dim + a] = 0.5 * (g.nodes[idx[a]] + 1.0);
      w *= 0.5 * g.weights[idx[a]];
    }
    r.weights[p] = w;
    for (std::size_t a = 0; a < dim; ++a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
  }
  return r;
}

class BoxRule {
 public:
  BoxRule(std::size_t dim, std::size_t n) : unit_(make_unit_rule(dim, n)), point_(dim) {}

  double apply(const Integrand& f, const Box& box, std::size_t& evals) {
    const std::size_t d = unit_.dim;
    double vol = 1.0;
    for (std::size_t a = 0; a < d; ++a) vol *= box.hi[a] - box.lo[a];
    double s = 0.0;
    for (std::size_t p = 0; p < unit_.weights.size(); ++p) {
      for (std::size_t a = 0; a < d; ++a) {
        point_[a] = box.lo[a] + unit_.coords[p * d + a] * (box.hi[a] - box.lo[a]);
      }
      s += unit_.weights[p] * f(std::span<const double>(point_));
    }
    evals += unit_.weights.size();
    return s * vol;
  }

 private:
  UnitRule unit_;
  std::vector<double> point_;
};

std::vector<Box> dyadic_children(const Box& box) {
  const std::size_t d = box.dim();
  std::vector<Box> out;
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Box c = box;
    for (std::size_t a = 0; a < d; ++a) {
      const double mid = 0.5 * (box.lo[a] + box.hi[a]);
      if (mask & (std::size_t{1} << a)) {
        c.lo[a] = mid;
      } else {
        c.hi[a] = mid;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

struct Leaf {
  Box box;
  int depth = 0;
  std::vector<double> child_q;
  double q2 = 0.0;
  double err = 0.0;
};

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

TensorNodes tensor_nodes(const Box& box, std::size_t points_per_axis) {
  const UnitRule unit = make_unit_rule(box.dim(), points_per_axis);
  TensorNodes out;
  out.dim = box.dim();
  out.coords.resize(unit.coords.size());
  out.weights.resize(unit.weights.size());
  const double vol = box.volume();
  for (std::size_t p = 0; p < unit.weights.size(); ++p) {
    for (std::size_t a = 0; a < out.dim; ++a) {
      out.coords[p * out.dim + a] = box.lo[a] + unit.coords[p * out.dim + a] * box.width(a);
    }
    out.weights[p] = unit.weights[p] * vol;
  }
  return out;
}

QuadResult integrate_adaptive(const Integrand& f, const Box& box, const AdaptiveOptions& opts) {
  return integrate_adaptive(f, std::span<const Box>(&box, 1), opts);
}

QuadResult integrate_adaptive(const Integrand& f, std::span<const Box> pieces,
                              const AdaptiveOptions& opts) {
  QuadResult result;
  if (pieces.empty()) return result;
  const std::size_t d = pieces.front().dim();

  if (d == 0) {
    // Zero-dimensional "box": a single point of unit measure.
    result.value = f(std::span<const double>());
    result.evaluations = 1;
    return result;
  }

  BoxRule rule(d, opts.rule_points);
  std::vector<Leaf> leaves;
  std::vector<std::size_t> frozen;

  auto make_leaf = [&](Box b, int depth, double known_q, bool have_q) {
    Leaf leaf;
    leaf.depth = depth;
    const double q = have_q ? known_q : rule.apply(f, b, result.evaluations);
    for (const Box& c : dyadic_children(b)) {
      leaf.child_q.push_back(rule.apply(f, c, result.evaluations));
    }
    leaf.q2 = 0.0;
    for (double v : leaf.child_q) leaf.q2 += v;
    leaf.err = std::abs(leaf.q2 - q) / 3.0;
    leaf.box = std::move(b);
    return leaf;
  };

  auto cmp = [&](std::size_t a, std::size_t b) { return leaves[a].err < leaves[b].err; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);

  for (const Box& p : pieces) {
    if (p.empty()) continue;
    leaves.push_back(make_leaf(p, 0, 0.0, false));
    heap.push(leaves.size() - 1);
  }

  std::vector<char> alive(leaves.size(), 1);
  auto totals = [&]() {
    double v = 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (!alive[i]) continue;
      v += leaves[i].q2;
      e += leaves[i].err;
    }
    return std::pair{v, e};
  };

  double value = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    value += leaves[i].q2;
    err += leaves[i].err;
  }

  while (true) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    if (err <= target) {
      auto [v, e] = totals();
      value = v;
      err = e;
      if (err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) break;
    }
    if (heap.empty() || result.evaluations > opts.max_evaluations) {
      auto [v, e] = totals();
      throw QuadratureError("adaptive quadrature did not converge: estimate " + std::to_string(v) +
                                ", error bound " + std::to_string(e),
                            v, e);
    }
    const std::size_t top = heap.top();
    heap.pop();
    if (leaves[top].depth >= opts.max_depth) {
      frozen.push_back(top);
      continue;
    }
    // Split: children inherit their single-box estimates from the parent.
    Leaf parent = std::move(leaves[top]);
    alive[top] = 0;
    value -= parent.q2;
    err -= parent.err;
    std::vector<Box> kids = dyadic_children(parent.box);
    for (std::size_t c = 0; c < kids.size(); ++c) {
      Leaf leaf = make_leaf(std::move(kids[c]), parent.depth + 1, parent.child_q[c], true);
      value += leaf.q2;
      err += leaf.err;
      leaves.push_back(std::move(leaf));
      alive.push_back(1);
      heap.push(leaves.size() - 1);
    }
  }

  result.value = value;
  result.error = err;
  return result;
}

Extremum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                 double x_tol, int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > x_tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? Extremum{c, fc} : Extremum{d, fd};
}

Extremum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                 double x_tol, int max_iterations) {
  Extremum e = golden_section_maximize([&](double x) { return -f(x); }, a, b, x_tol,
                                       max_iterations);
  e.value = -e.value;
  return e;
}

}  // namespace sinrldp::numerics
