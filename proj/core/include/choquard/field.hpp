#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "choquard/lattice.hpp"

namespace choquard {

/// Real function on a box window, extended by zero outside it.
class Field {
 public:
  explicit Field(LatticeWindow window);
  Field(LatticeWindow window, std::vector<double> values);

  static Field delta(const LatticeWindow& window, const Site& at, double value = 1.0);
  static Field indicator(const LatticeWindow& window, const SiteSet& set);

  const LatticeWindow& window() const noexcept { return window_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Value at `s`, zero outside the window.
  double at(std::span<const int> s) const;
  /// Throws InputError if `s` lies outside the window.
  void set(std::span<const int> s, double value);

  /// Same function on another window. Throws InputError if a nonzero value
  /// would fall outside `target`.
  Field on_window(const LatticeWindow& target) const;
  /// Same function on `target`, dropping values outside it.
  Field restricted_to(const LatticeWindow& target) const;

  /// Translate by `shift`: result(x) = this(x - shift), on the same window.
  /// Throws InputError if nonzero values leave the window.
  Field translated(std::span<const int> shift) const;

  SiteSet support() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend bool operator==(const Field& a, const Field& b) {
    return a.window_ == b.window_ && a.values_ == b.values_;
  }

 private:
  void require_same_window(const Field& other, const char* op) const;

  LatticeWindow window_;
  std::vector<double> values_;
};

/// Sum over sites of a(x) b(x); windows must match.
double dot(const Field& a, const Field& b);
/// l^q norm for 1 <= q < inf.
double lp_norm(const Field& u, double q);
double sup_norm(const Field& u);
/// |u|^p pointwise.
Field abs_pow(const Field& u, double p);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Plain-text field file: a header (format, dim, radius, shape) followed by
/// one "x_1 ... x_N value" record per nonzero site.
std::string format_field(const Field& u);
Field parse_field(std::string_view text);
void save_field(const Field& u, const std::filesystem::path& path);
Field load_field(const std::filesystem::path& path);

}  // namespace choquard
