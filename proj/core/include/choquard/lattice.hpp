#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace choquard {

/// Integer coordinates of a vertex of Z^N.
using Site = std::vector<int>;

/// Word metric of Z^N for the generators {+-e_i}, i.e. the L1 distance.
int word_distance(std::span<const int> x, std::span<const int> y);

/// Duplicate-free set of sites sharing one dimension.
class SiteSet {
 public:
  explicit SiteSet(int dim) : dim_(dim) {}
  SiteSet(int dim, std::initializer_list<Site> sites);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return sites_.size(); }
  bool empty() const noexcept { return sites_.empty(); }

  /// Returns false if the site was already present.
  bool insert(const Site& s);
  bool contains(std::span<const int> s) const;

  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  /// Largest L-infinity norm over members; 0 for the empty set.
  int max_abs_coordinate() const;

  friend bool operator==(const SiteSet&, const SiteSet&) = default;

 private:
  int dim_;
  std::set<Site> sites_;
};

SiteSet set_union(const SiteSet& a, const SiteSet& b);
SiteSet set_intersection(const SiteSet& a, const SiteSet& b);

/// Closed word ball {x : d(x, center) <= r}.
SiteSet ball(const Site& center, int r);

/// Sphere {x : d(x, center) == r}.
SiteSet sphere(const Site& center, int r);

/// beta(r) = |B_r(e)| for Z^dim, from the closed-form L1 lattice-point count
/// sum_k 2^k C(dim,k) C(r,k).
std::int64_t growth_function(int r, int dim);

/// Measured constants with C1 r^N <= beta(r) <= C2 r^N for r in [1, r_max].
struct GrowthBracket {
  double c1;
  double c2;
};
GrowthBracket growth_bracket(int dim, int r_max);

/// Sites outside `region` adjacent to some member of it.
SiteSet vertex_boundary(const SiteSet& region);

/// region united with its vertex boundary.
SiteSet closure(const SiteSet& region);

/// Word distance from x to the nearest member of `region` (0 inside).
int distance_to_set(std::span<const int> x, const SiteSet& region);

enum class WindowShape { box, word_ball };

std::string to_string(WindowShape shape);
WindowShape parse_window_shape(const std::string& name);

/// Finite window of Z^N centred at the origin: either the box [-R, R]^N or
/// the word ball B_R(e). Box sites are indexed row-major with axis 0 the
/// slowest; word-ball sites are indexed in lexicographic order. Immutable.
class LatticeWindow {
 public:
  LatticeWindow(int dim, int radius, WindowShape shape = WindowShape::box);

  int dim() const noexcept { return dim_; }
  int radius() const noexcept { return radius_; }
  WindowShape shape() const noexcept { return shape_; }
  bool is_box() const noexcept { return shape_ == WindowShape::box; }

  std::size_t size() const noexcept { return count_; }
  /// Number of sites per axis of the bounding box, 2R + 1.
  int extent() const noexcept { return 2 * radius_ + 1; }
  /// Row-major stride of `axis` in the bounding box.
  std::size_t stride(int axis) const { return strides_.at(static_cast<std::size_t>(axis)); }

  bool contains(std::span<const int> s) const;
  std::optional<std::size_t> index_of(std::span<const int> s) const;
  Site site(std::size_t index) const;

  /// Neighbour indices of site `index`; std::nullopt marks an exterior neighbour.
  /// Order: +e_0, -e_0, +e_1, -e_1, ...
  std::vector<std::optional<std::size_t>> neighbors(std::size_t index) const;

  /// Same shape grown by `by` layers.
  LatticeWindow enlarged(int by) const;

  SiteSet sites() const;

  friend bool operator==(const LatticeWindow& a, const LatticeWindow& b) {
    return a.dim_ == b.dim_ && a.radius_ == b.radius_ && a.shape_ == b.shape_;
  }

 private:
  int dim_;
  int radius_;
  WindowShape shape_;
  std::size_t count_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<Site> ball_sites_;  // word-ball shape only, sorted
};

}  // namespace choquard
