#include "choquard/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "choquard/errors.hpp"

namespace choquard {

namespace {

void require_dim(std::size_t got, int want, const char* what) {
  if (static_cast<int>(got) != want) {
    throw InputError(std::string(what) + ": dimension mismatch (got " + std::to_string(got) +
                     ", expected " + std::to_string(want) + ")");
  }
}

// Calls fn(site) for every site of the box [-r, r]^dim in row-major order.
template <typename Fn>
void for_each_in_box(int dim, int r, Fn&& fn) {
  Site s(static_cast<std::size_t>(dim), -r);
  while (true) {
    fn(s);
    int axis = dim - 1;
    while (axis >= 0) {
      if (++s[static_cast<std::size_t>(axis)] <= r) break;
      s[static_cast<std::size_t>(axis)] = -r;
      --axis;
    }
    if (axis < 0) return;
  }
}

int l1_norm(std::span<const int> s) {
  int n = 0;
  for (int c : s) n += std::abs(c);
  return n;
}

}  // namespace

int word_distance(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size()) {
    throw InputError("word_distance: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  int d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(x[i] - y[i]);
  return d;
}

SiteSet::SiteSet(int dim, std::initializer_list<Site> sites) : dim_(dim) {
  for (const auto& s : sites) insert(s);
}

bool SiteSet::insert(const Site& s) {
  require_dim(s.size(), dim_, "SiteSet::insert");
  return sites_.insert(s).second;
}

bool SiteSet::contains(std::span<const int> s) const {
  require_dim(s.size(), dim_, "SiteSet::contains");
  return sites_.count(Site(s.begin(), s.end())) > 0;
}

int SiteSet::max_abs_coordinate() const {
  int m = 0;
  for (const auto& s : sites_)
    for (int c : s) m = std::max(m, std::abs(c));
  return m;
}

SiteSet set_union(const SiteSet& a, const SiteSet& b) {
  if (a.dim() != b.dim()) throw InputError("set_union: dimension mismatch");
  SiteSet out = a;
  for (const auto& s : b) out.insert(s);
  return out;
}

SiteSet set_intersection(const SiteSet& a, const SiteSet& b) {
  if (a.dim() != b.dim()) throw InputError("set_intersection: dimension mismatch");
  SiteSet out(a.dim());
  for (const auto& s : a)
    if (b.contains(s)) out.insert(s);
  return out;
}

SiteSet ball(const Site& center, int r) {
  if (r < 0) throw InputError("ball: radius must be >= 0, got " + std::to_string(r));
  const int dim = static_cast<int>(center.size());
  if (dim < 1) throw InputError("ball: empty center coordinates");
  SiteSet out(dim);
  for_each_in_box(dim, r, [&](const Site& off) {
    if (l1_norm(off) > r) return;
    Site s = center;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += off[i];
    out.insert(s);
  });
  return out;
}

SiteSet sphere(const Site& center, int r) {
  if (r < 0) throw InputError("sphere: radius must be >= 0");
  SiteSet out(static_cast<int>(center.size()));
  for (const auto& s : ball(center, r))
    if (word_distance(s, center) == r) out.insert(s);
  return out;
}

std::int64_t growth_function(int r, int dim) {
  if (r < 0) throw InputError("growth_function: r must be >= 0");
  if (dim < 1) throw InputError("growth_function: dim must be >= 1");
  // |B_r| in Z^dim = sum_k 2^k C(dim, k) C(r, k)
  std::int64_t total = 0;
  std::int64_t c_dim = 1;  // C(dim, k)
  std::int64_t c_r = 1;    // C(r, k)
  std::int64_t pow2 = 1;
  for (int k = 0; k <= std::min(dim, r); ++k) {
    total += pow2 * c_dim * c_r;
    c_dim = c_dim * (dim - k) / (k + 1);
    c_r = c_r * (r - k) / (k + 1);
    pow2 *= 2;
  }
  return total;
}

GrowthBracket growth_bracket(int dim, int r_max) {
  if (r_max < 1) throw InputError("growth_bracket: r_max must be >= 1");
  GrowthBracket b{std::numeric_limits<double>::infinity(), 0.0};
  for (int r = 1; r <= r_max; ++r) {
    const double ratio = static_cast<double>(growth_function(r, dim)) / std::pow(r, dim);
    b.c1 = std::min(b.c1, ratio);
    b.c2 = std::max(b.c2, ratio);
  }
  return b;
}

SiteSet vertex_boundary(const SiteSet& region) {
  if (region.empty()) throw InputError("vertex_boundary: region is empty");
  SiteSet out(region.dim());
  for (const auto& x : region) {
    for (int axis = 0; axis < region.dim(); ++axis) {
      for (int step : {1, -1}) {
        Site y = x;
        y[static_cast<std::size_t>(axis)] += step;
        if (!region.contains(y)) out.insert(y);
      }
    }
  }
  return out;
}

SiteSet closure(const SiteSet& region) { return set_union(region, vertex_boundary(region)); }

int distance_to_set(std::span<const int> x, const SiteSet& region) {
  if (region.empty()) throw InputError("distance_to_set: region is empty");
  int best = std::numeric_limits<int>::max();
  for (const auto& s : region) best = std::min(best, word_distance(x, s));
  return best;
}

std::string to_string(WindowShape shape) {
  return shape == WindowShape::box ? "box" : "word_ball";
}

WindowShape parse_window_shape(const std::string& name) {
  if (name == "box") return WindowShape::box;
  if (name == "word_ball" || name == "word-ball" || name == "ball") return WindowShape::word_ball;
  throw InputError("unknown window shape '" + name + "'");
}

LatticeWindow::LatticeWindow(int dim, int radius, WindowShape shape)
    : dim_(dim), radius_(radius), shape_(shape) {
  if (dim < 1) throw InputError("LatticeWindow: dim must be >= 1");
  if (radius < 1) throw InputError("LatticeWindow: radius must be >= 1");
  strides_.assign(static_cast<std::size_t>(dim), 1);
  for (int axis = dim - 2; axis >= 0; --axis) {
    strides_[static_cast<std::size_t>(axis)] =
        strides_[static_cast<std::size_t>(axis) + 1] * static_cast<std::size_t>(extent());
  }
  if (shape == WindowShape::box) {
    count_ = strides_[0] * static_cast<std::size_t>(extent());
  } else {
    for_each_in_box(dim, radius, [&](const Site& s) {
      if (l1_norm(s) <= radius) ball_sites_.push_back(s);
    });
    count_ = ball_sites_.size();
  }
}

bool LatticeWindow::contains(std::span<const int> s) const {
  require_dim(s.size(), dim_, "LatticeWindow::contains");
  if (shape_ == WindowShape::word_ball) return l1_norm(s) <= radius_;
  return std::all_of(s.begin(), s.end(), [&](int c) { return std::abs(c) <= radius_; });
}

std::optional<std::size_t> LatticeWindow::index_of(std::span<const int> s) const {
  if (!contains(s)) return std::nullopt;
  if (shape_ == WindowShape::word_ball) {
    const Site key(s.begin(), s.end());
    auto it = std::lower_bound(ball_sites_.begin(), ball_sites_.end(), key);
    return static_cast<std::size_t>(it - ball_sites_.begin());
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    idx += static_cast<std::size_t>(s[i] + radius_) * strides_[i];
  return idx;
}

Site LatticeWindow::site(std::size_t index) const {
  if (index >= count_) throw InputError("LatticeWindow::site: index out of range");
  if (shape_ == WindowShape::word_ball) return ball_sites_[index];
  Site s(static_cast<std::size_t>(dim_));
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = static_cast<int>(index / strides_[i]) - radius_;
    index %= strides_[i];
  }
  return s;
}

std::vector<std::optional<std::size_t>> LatticeWindow::neighbors(std::size_t index) const {
  const Site x = site(index);
  std::vector<std::optional<std::size_t>> out;
  out.reserve(2 * static_cast<std::size_t>(dim_));
  for (int axis = 0; axis < dim_; ++axis) {
    for (int step : {1, -1}) {
      Site y = x;
      y[static_cast<std::size_t>(axis)] += step;
      out.push_back(index_of(y));
    }
  }
  return out;
}

LatticeWindow LatticeWindow::enlarged(int by) const {
  if (by < 0) throw InputError("LatticeWindow::enlarged: negative growth");
  return LatticeWindow(dim_, radius_ + by, shape_);
}

SiteSet LatticeWindow::sites() const {
  SiteSet out(dim_);
  for (std::size_t i = 0; i < count_; ++i) out.insert(site(i));
  return out;
}

}  // namespace choquard
