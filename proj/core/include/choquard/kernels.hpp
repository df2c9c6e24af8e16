#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "choquard/field.hpp"
#include "choquard/lattice.hpp"
#include "choquard/quadrature.hpp"

namespace choquard {

/// e^{-z} I_m(z) for z >= 0, from
///   e^{-z} I_m(z) = (1/pi) int_0^pi exp(-z (1 - cos th)) cos(m th) d th
/// with composite 64-point Gauss-Legendre panels. The range of th is cut where
/// the exponential falls below e^-46, which keeps the rule uniform in z.
double scaled_bessel_i(int order, double z);

/// Continuous-time simple random walk kernel on Z: e^{-2t} I_m(2t).
double heat_kernel_1d(double t, int m);

/// Heat kernel of the graph Laplacian of Z^N, the product of 1-D kernels.
double heat_kernel(double t, std::span<const int> v);

/// The same kernel on the discrete torus (Z / L)^N, evaluated from the
/// Fourier sum (1/L^N) sum_theta exp(-t lambda(theta)) cos(theta . v).
/// Warns when wrap-around mass exceeds 1e-8.
double heat_kernel_spectral(double t, std::span<const int> v, int torus_size);

/// Chernoff bound on sum_{|v|_1 > radius} k_t(v) in dimension dim.
double heat_kernel_tail_bound(double t, int radius, int dim);

/// R_alpha(v) = (1/Gamma(alpha/2)) int_0^inf k_t(v) t^{alpha/2 - 1} dt.
double green_function(double alpha, std::span<const int> v, const QuadratureSpec& quad = {});

/// |v|_2^{alpha - N}; the diagonal v = 0 is a DomainError.
double riesz_kernel(double alpha, std::span<const int> v);

enum class KernelKind { green, riesz };
enum class KernelMethod { bessel_product, torus_spectral, closed_form };

std::string to_string(KernelKind kind);
std::string to_string(KernelMethod method);
KernelKind parse_kernel_kind(const std::string& name);
KernelMethod parse_kernel_method(const std::string& name);

/// Translation-invariant kernel tabulated on all offsets in [-2R, 2R]^N,
/// i.e. every difference of two sites of the radius-R box. Values are stored
/// per orbit of the hyperoctahedral group (sign flips and coordinate
/// permutations); orbit representatives are the offsets with coordinates
/// sorted in non-increasing order and all >= 0. Immutable after construction.
class KernelTable {
 public:
  KernelTable(KernelKind kind, double alpha, int dim, int window_radius, KernelMethod method,
              QuadratureSpec quad, std::vector<double> orbit_values);

  KernelKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  int dim() const noexcept { return dim_; }
  int window_radius() const noexcept { return window_radius_; }
  /// Largest coordinate offset held, 2R.
  int range() const noexcept { return 2 * window_radius_; }
  KernelMethod method() const noexcept { return method_; }
  const QuadratureSpec& quadrature() const noexcept { return quad_; }

  std::size_t orbit_count() const noexcept { return orbits_.size(); }
  const std::vector<Site>& orbit_representatives() const noexcept { return orbits_; }
  std::span<const double> orbit_values() const noexcept { return orbit_values_; }

  /// False for the Riesz kernel, whose diagonal is undefined.
  bool has_diagonal() const noexcept { return kind_ == KernelKind::green; }
  double diagonal() const;

  /// Kernel value at offset v; InternalError when v is out of range.
  double operator()(std::span<const int> v) const;
  bool covers(const LatticeWindow& w) const;

  /// Dense row-major storage over [-range, range]^N.
  std::span<const double> dense() const noexcept { return dense_; }
  std::size_t dense_stride(int axis) const { return dense_strides_.at(static_cast<std::size_t>(axis)); }

  /// FNV-1a over header and the bit patterns of all orbit values.
  std::uint64_t content_hash() const;

  friend bool operator==(const KernelTable& a, const KernelTable& b);

 private:
  KernelKind kind_;
  double alpha_;
  int dim_;
  int window_radius_;
  KernelMethod method_;
  QuadratureSpec quad_;
  std::vector<Site> orbits_;
  std::vector<double> orbit_values_;
  std::vector<double> dense_;
  std::vector<std::size_t> dense_strides_;
};

/// Canonical orbit representatives of [-range, range]^dim, sorted.
std::vector<Site> symmetry_orbits(int dim, int range);
/// Representative of the orbit containing v.
Site canonical_offset(std::span<const int> v);

/// Tabulate the kernel for every pair of sites of `window`.
KernelTable build_kernel_table(KernelKind kind, double alpha, const LatticeWindow& window,
                               const QuadratureSpec& quad = {});

/// Text cache format: header lines then "c_1 ... c_N value" per orbit, with
/// shortest round-trip decimal values, so reloads are bit-identical.
std::string format_kernel_table(const KernelTable& table);
KernelTable parse_kernel_table(std::string_view text);
void save_kernel_table(const KernelTable& table, const std::filesystem::path& path);
KernelTable load_kernel_table(const std::filesystem::path& path);

/// Cache file name keyed by (kind, alpha, N, R, quadrature hash).
std::filesystem::path kernel_cache_path(const std::filesystem::path& cache_dir, KernelKind kind,
                                        double alpha, int dim, int radius,
                                        const QuadratureSpec& quad);

struct CachedKernel {
  KernelTable table;
  std::filesystem::path path;
  bool cache_hit;
};

/// Load the table from `cache_dir` if a valid entry exists; otherwise build and
/// store it. A corrupt or mismatched entry is rebuilt with a warning. Throws
/// IoError if the cache cannot be written.
CachedKernel load_or_build_kernel_table(KernelKind kind, double alpha, const LatticeWindow& window,
                                        const QuadratureSpec& quad,
                                        const std::filesystem::path& cache_dir);

/// (K * f)(x) = sum_{y != x} K(x - y) f(y), plus K(0) f(x) when
/// include_diagonal, evaluated on f's window.
Field convolve(const KernelTable& kernel, const Field& f, bool include_diagonal = false);
/// As above, evaluated on `target` (f's window and target must both be
/// covered by the table).
Field convolve(const KernelTable& kernel, const Field& f, const LatticeWindow& target,
               bool include_diagonal);

/// e^{t Delta} u restricted to u's window (u zero-extended).
Field heat_semigroup(const Field& u, double t);

/// (-Delta)^{alpha/2} u restricted to u's window. For alpha in (0, 2) this is
///   (1/Gamma(-alpha/2)) int_0^inf (e^{t Delta} u - u) t^{-1-alpha/2} dt;
/// larger alpha composes exact powers of -Delta with the fractional rest.
Field fractional_laplacian(double alpha, const Field& u, const QuadratureSpec& quad = {});

}  // namespace choquard
