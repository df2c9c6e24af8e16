#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "choquard/errors.hpp"
#include "choquard/kernels.hpp"
#include "choquard/log.hpp"

namespace choquard {

namespace {

void require_alpha(double alpha, int dim) {
  if (!(alpha > 0.0 && alpha < dim)) {
    throw ParameterError("alpha must lie in (0, N): got alpha = " + format_double(alpha) +
                         ", N = " + std::to_string(dim));
  }
}

int max_abs(std::span<const int> v) {
  int m = 0;
  for (int c : v) m = std::max(m, std::abs(c));
  return m;
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << x;
  return os.str();
}

// Orbit values of the subordinated Green's function, all orbits sharing one
// quadrature rule and one table of 1-D heat kernels per node.
std::vector<double> green_orbit_values(double alpha, int dim, int range,
                                       const std::vector<Site>& orbits,
                                       const QuadratureSpec& quad) {
  const double t_tail = effective_tail_start(quad, range, dim);
  const auto rule = subordination_rule(0.5 * alpha, 0.5 * (dim - alpha), quad, t_tail);
  std::vector<double> sums(orbits.size(), 0.0);
  std::vector<double> k1(static_cast<std::size_t>(range) + 1);
  for (const auto& node : rule) {
    for (int m = 0; m <= range; ++m) k1[static_cast<std::size_t>(m)] = heat_kernel_1d(node.t, m);
    const double w = node.weight * std::pow(node.t, 0.5 * alpha - 1.0);
    for (std::size_t o = 0; o < orbits.size(); ++o) {
      double k = 1.0;
      for (int c : orbits[o]) k *= k1[static_cast<std::size_t>(c)];
      sums[o] += w * k;
    }
  }
  const double norm = 1.0 / std::abs(std::tgamma(0.5 * alpha));
  for (double& s : sums) s *= norm;
  return sums;
}

}  // namespace

double green_function(double alpha, std::span<const int> v, const QuadratureSpec& quad) {
  const int dim = static_cast<int>(v.size());
  if (dim < 1) throw InputError("green_function: empty offset");
  require_alpha(alpha, dim);
  const Site rep = canonical_offset(v);
  return green_orbit_values(alpha, dim, std::max(1, max_abs(v)), {rep}, quad).front();
}

double riesz_kernel(double alpha, std::span<const int> v) {
  const int dim = static_cast<int>(v.size());
  if (dim < 1) throw InputError("riesz_kernel: empty offset");
  require_alpha(alpha, dim);
  double r2 = 0.0;
  for (int c : v) r2 += static_cast<double>(c) * c;
  if (r2 == 0.0) throw DomainError("riesz_kernel: the diagonal v = 0 is excluded");
  return std::pow(r2, 0.5 * (alpha - dim));
}

std::string to_string(KernelKind kind) { return kind == KernelKind::green ? "green" : "riesz"; }

std::string to_string(KernelMethod method) {
  switch (method) {
    case KernelMethod::bessel_product: return "bessel_product";
    case KernelMethod::torus_spectral: return "torus_spectral";
    case KernelMethod::closed_form: return "closed_form";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "green") return KernelKind::green;
  if (name == "riesz") return KernelKind::riesz;
  throw InputError("unknown kernel kind '" + name + "' (expected green or riesz)");
}

KernelMethod parse_kernel_method(const std::string& name) {
  if (name == "bessel_product") return KernelMethod::bessel_product;
  if (name == "torus_spectral") return KernelMethod::torus_spectral;
  if (name == "closed_form") return KernelMethod::closed_form;
  throw InputError("unknown kernel method '" + name + "'");
}

Site canonical_offset(std::span<const int> v) {
  Site s(v.begin(), v.end());
  for (int& c : s) c = std::abs(c);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

std::vector<Site> symmetry_orbits(int dim, int range) {
  if (dim < 1 || range < 0) throw InputError("symmetry_orbits: invalid arguments");
  std::vector<Site> out;
  Site s(static_cast<std::size_t>(dim), 0);
  // enumerate non-increasing tuples range >= s_0 >= s_1 >= ... >= 0
  std::function<void(int, int)> rec = [&](int axis, int upper) {
    if (axis == dim) {
      out.push_back(s);
      return;
    }
    for (int c = 0; c <= upper; ++c) {
      s[static_cast<std::size_t>(axis)] = c;
      rec(axis + 1, c);
    }
  };
  rec(0, range);
  std::sort(out.begin(), out.end());
  return out;
}

KernelTable::KernelTable(KernelKind kind, double alpha, int dim, int window_radius,
                         KernelMethod method, QuadratureSpec quad,
                         std::vector<double> orbit_values)
    : kind_(kind),
      alpha_(alpha),
      dim_(dim),
      window_radius_(window_radius),
      method_(method),
      quad_(quad),
      orbits_(symmetry_orbits(dim, 2 * window_radius)),
      orbit_values_(std::move(orbit_values)) {
  require_alpha(alpha, dim);
  if (window_radius < 1) throw InputError("KernelTable: window radius must be >= 1");
  if (orbit_values_.size() != orbits_.size()) {
    throw InputError("KernelTable: expected " + std::to_string(orbits_.size()) +
                     " orbit values, got " + std::to_string(orbit_values_.size()));
  }
  for (double v : orbit_values_)
    if (!std::isfinite(v) || v < 0.0) throw InputError("KernelTable: values must be finite and >= 0");

  std::map<Site, std::size_t> orbit_index;
  for (std::size_t i = 0; i < orbits_.size(); ++i) orbit_index.emplace(orbits_[i], i);

  const int r = range();
  const std::size_t e = static_cast<std::size_t>(2 * r + 1);
  dense_strides_.assign(static_cast<std::size_t>(dim), 1);
  for (int a = dim - 2; a >= 0; --a)
    dense_strides_[static_cast<std::size_t>(a)] = dense_strides_[static_cast<std::size_t>(a) + 1] * e;
  dense_.resize(dense_strides_[0] * e);
  Site v(static_cast<std::size_t>(dim));
  for (std::size_t idx = 0; idx < dense_.size(); ++idx) {
    std::size_t rem = idx;
    for (std::size_t a = 0; a < v.size(); ++a) {
      v[a] = static_cast<int>(rem / dense_strides_[a]) - r;
      rem %= dense_strides_[a];
    }
    dense_[idx] = orbit_values_[orbit_index.at(canonical_offset(v))];
  }
}

double KernelTable::diagonal() const {
  if (!has_diagonal()) throw DomainError("riesz kernel has no diagonal value");
  return orbit_values_.front();
}

double KernelTable::operator()(std::span<const int> v) const {
  if (static_cast<int>(v.size()) != dim_) throw InputError("KernelTable: dimension mismatch");
  if (max_abs(v) > range()) {
    throw InternalError("KernelTable: offset outside the tabulated range " + std::to_string(range()));
  }
  if (kind_ == KernelKind::riesz && max_abs(v) == 0) {
    throw DomainError("riesz kernel has no diagonal value");
  }
  std::size_t idx = 0;
  for (std::size_t a = 0; a < v.size(); ++a)
    idx += static_cast<std::size_t>(v[a] + range()) * dense_strides_[a];
  return dense_[idx];
}

bool KernelTable::covers(const LatticeWindow& w) const {
  return w.dim() == dim_ && w.radius() <= window_radius_;
}

std::uint64_t KernelTable::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  const std::string head = to_string(kind_) + "|" + format_double(alpha_) + "|" +
                           std::to_string(dim_) + "|" + std::to_string(window_radius_) + "|" +
                           to_string(method_) + "|" + quad_.canonical();
  fnv_mix(h, head.data(), head.size());
  for (double v : orbit_values_) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    fnv_mix(h, &bits, sizeof bits);
  }
  return h;
}

bool operator==(const KernelTable& a, const KernelTable& b) {
  if (a.kind_ != b.kind_ || a.dim_ != b.dim_ || a.window_radius_ != b.window_radius_ ||
      a.method_ != b.method_ || !(a.quad_ == b.quad_) ||
      std::bit_cast<std::uint64_t>(a.alpha_) != std::bit_cast<std::uint64_t>(b.alpha_)) {
    return false;
  }
  if (a.orbit_values_.size() != b.orbit_values_.size()) return false;
  for (std::size_t i = 0; i < a.orbit_values_.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.orbit_values_[i]) !=
        std::bit_cast<std::uint64_t>(b.orbit_values_[i])) {
      return false;
    }
  }
  return true;
}

KernelTable build_kernel_table(KernelKind kind, double alpha, const LatticeWindow& window,
                               const QuadratureSpec& quad) {
  if (!window.is_box()) throw InputError("build_kernel_table: box window required");
  require_alpha(alpha, window.dim());
  quad.validate();
  const int range = 2 * window.radius();
  const auto orbits = symmetry_orbits(window.dim(), range);
  if (kind == KernelKind::riesz) {
    std::vector<double> values;
    values.reserve(orbits.size());
    for (const auto& v : orbits) {
      const bool origin = std::all_of(v.begin(), v.end(), [](int c) { return c == 0; });
      values.push_back(origin ? 0.0 : riesz_kernel(alpha, v));
    }
    return KernelTable(kind, alpha, window.dim(), window.radius(), KernelMethod::closed_form, quad,
                       std::move(values));
  }
  return KernelTable(kind, alpha, window.dim(), window.radius(), KernelMethod::bessel_product, quad,
                     green_orbit_values(alpha, window.dim(), range, orbits, quad));
}

std::string format_kernel_table(const KernelTable& table) {
  std::ostringstream os;
  const auto& q = table.quadrature();
  os << "# choquard-kernel 1\n";
  os << "kind " << to_string(table.kind()) << "\n";
  os << "alpha " << format_double(table.alpha()) << "\n";
  os << "dim " << table.dim() << "\n";
  os << "radius " << table.window_radius() << "\n";
  os << "method " << to_string(table.method()) << "\n";
  os << "quad_hash " << hex64(q.hash()) << "\n";
  os << "quad " << format_double(q.t_split) << ' ' << format_double(q.t_tail) << ' ' << q.nodes
     << ' ' << format_double(q.panel_width) << ' ' << format_double(q.eps) << "\n";
  os << "orbits " << table.orbit_count() << "\n";
  const auto values = table.orbit_values();
  for (std::size_t i = 0; i < table.orbit_count(); ++i) {
    for (int c : table.orbit_representatives()[i]) os << c << ' ';
    os << format_double(values[i]) << '\n';
  }
  return os.str();
}

KernelTable parse_kernel_table(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || line != "# choquard-kernel 1")
    throw IoError("kernel file: missing or unsupported header");
  auto next_value = [&](const std::string& key) {
    if (!std::getline(is, line)) throw IoError("kernel file: truncated header");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw IoError("kernel file: expected '" + key + "', found '" + k + "'");
    std::string rest;
    std::getline(ls >> std::ws, rest);
    return rest;
  };
  const KernelKind kind = parse_kernel_kind(next_value("kind"));
  const double alpha = parse_double(next_value("alpha"));
  const int dim = std::stoi(next_value("dim"));
  const int radius = std::stoi(next_value("radius"));
  const KernelMethod method = parse_kernel_method(next_value("method"));
  const std::string qhash = next_value("quad_hash");
  QuadratureSpec q;
  {
    std::istringstream qs(next_value("quad"));
    std::string a, b, c, d, e;
    if (!(qs >> a >> b >> c >> d >> e)) throw IoError("kernel file: malformed quad line");
    q.t_split = parse_double(a);
    q.t_tail = parse_double(b);
    q.nodes = std::stoi(c);
    q.panel_width = parse_double(d);
    q.eps = parse_double(e);
  }
  if (hex64(q.hash()) != qhash) throw IoError("kernel file: quadrature hash mismatch");
  const std::size_t count = std::stoul(next_value("orbits"));
  const auto orbits = symmetry_orbits(dim, 2 * radius);
  if (count != orbits.size()) throw IoError("kernel file: orbit count mismatch");
  std::vector<double> values(count);
  Site s(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw IoError("kernel file: truncated records");
    std::istringstream ls(line);
    for (auto& c : s)
      if (!(ls >> c)) throw IoError("kernel file: malformed record");
    std::string v;
    if (!(ls >> v)) throw IoError("kernel file: missing value");
    if (s != orbits[i]) throw IoError("kernel file: unexpected orbit representative");
    values[i] = parse_double(v);
  }
  try {
    return KernelTable(kind, alpha, dim, radius, method, q, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("kernel file: ") + e.what());
  }
}

void save_kernel_table(const KernelTable& table, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    os << format_kernel_table(table);
    if (!os) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

KernelTable load_kernel_table(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_kernel_table(buf.str());
}

std::filesystem::path kernel_cache_path(const std::filesystem::path& cache_dir, KernelKind kind,
                                        double alpha, int dim, int radius,
                                        const QuadratureSpec& quad) {
  return cache_dir / (to_string(kind) + "_a" + format_double(alpha) + "_N" + std::to_string(dim) +
                      "_R" + std::to_string(radius) + "_q" + hex64(quad.hash()) + ".ktab");
}

CachedKernel load_or_build_kernel_table(KernelKind kind, double alpha, const LatticeWindow& window,
                                        const QuadratureSpec& quad,
                                        const std::filesystem::path& cache_dir) {
  const auto path = kernel_cache_path(cache_dir, kind, alpha, window.dim(), window.radius(), quad);
  if (std::filesystem::exists(path)) {
    try {
      KernelTable t = load_kernel_table(path);
      if (t.kind() == kind && t.alpha() == alpha && t.dim() == window.dim() &&
          t.window_radius() == window.radius() && t.quadrature() == quad) {
        return {std::move(t), path, true};
      }
      warn("kernel cache " + path.string() + " does not match its key; rebuilding");
    } catch (const std::exception& e) {
      warn("kernel cache " + path.string() + " is corrupt (" + e.what() + "); rebuilding");
    }
  }
  KernelTable t = build_kernel_table(kind, alpha, window, quad);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  if (ec) throw IoError("cannot create cache directory " + cache_dir.string() + ": " + ec.message());
  save_kernel_table(t, path);
  return {std::move(t), path, false};
}

}  // namespace choquard
