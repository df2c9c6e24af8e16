#include "choquard/field.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "choquard/errors.hpp"

namespace choquard {

namespace {

void require_box(const LatticeWindow& w) {
  if (!w.is_box()) throw InputError("Field: only box windows are supported");
}

}  // namespace

Field::Field(LatticeWindow window) : window_(window), values_(window.size(), 0.0) {
  require_box(window_);
}

Field::Field(LatticeWindow window, std::vector<double> values)
    : window_(window), values_(std::move(values)) {
  require_box(window_);
  if (values_.size() != window_.size()) {
    throw InputError("Field: " + std::to_string(values_.size()) + " values for a window of " +
                     std::to_string(window_.size()) + " sites");
  }
  for (double v : values_)
    if (!std::isfinite(v)) throw InputError("Field: non-finite value");
}

Field Field::delta(const LatticeWindow& window, const Site& at, double value) {
  Field f(window);
  f.set(at, value);
  return f;
}

Field Field::indicator(const LatticeWindow& window, const SiteSet& set) {
  Field f(window);
  for (const auto& s : set) f.set(s, 1.0);
  return f;
}

double Field::at(std::span<const int> s) const {
  auto idx = window_.index_of(s);
  return idx ? values_[*idx] : 0.0;
}

void Field::set(std::span<const int> s, double value) {
  auto idx = window_.index_of(s);
  if (!idx) throw InputError("Field::set: site outside the window");
  if (!std::isfinite(value)) throw InputError("Field::set: non-finite value");
  values_[*idx] = value;
}

Field Field::on_window(const LatticeWindow& target) const {
  if (target.dim() != window_.dim()) throw InputError("Field::on_window: dimension mismatch");
  Field out(target);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0.0) continue;
    const Site s = window_.site(i);
    auto j = target.index_of(s);
    if (!j) throw InputError("Field::on_window: nonzero value outside the target window");
    out.values_[*j] = values_[i];
  }
  return out;
}

Field Field::restricted_to(const LatticeWindow& target) const {
  if (target.dim() != window_.dim()) throw InputError("Field::restricted_to: dimension mismatch");
  Field out(target);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0.0) continue;
    if (auto j = target.index_of(window_.site(i))) out.values_[*j] = values_[i];
  }
  return out;
}

Field Field::translated(std::span<const int> shift) const {
  if (static_cast<int>(shift.size()) != window_.dim())
    throw InputError("Field::translated: dimension mismatch");
  Field out(window_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0.0) continue;
    Site s = window_.site(i);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += shift[k];
    auto j = window_.index_of(s);
    if (!j) throw InputError("Field::translated: support leaves the window");
    out.values_[*j] = values_[i];
  }
  return out;
}

SiteSet Field::support() const {
  SiteSet out(window_.dim());
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] != 0.0) out.insert(window_.site(i));
  return out;
}

void Field::require_same_window(const Field& other, const char* op) const {
  if (!(window_ == other.window_)) throw InputError(std::string(op) + ": window mismatch");
}

Field& Field::operator+=(const Field& other) {
  require_same_window(other, "Field::operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_window(other, "Field::operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double dot(const Field& a, const Field& b) {
  if (!(a.window() == b.window())) throw InputError("dot: window mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double lp_norm(const Field& u, double q) {
  if (!(q >= 1.0) || std::isinf(q)) throw InputError("lp_norm: q must lie in [1, inf)");
  double s = 0.0;
  for (double v : u.values()) s += std::pow(std::abs(v), q);
  return std::pow(s, 1.0 / q);
}

double sup_norm(const Field& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

Field abs_pow(const Field& u, double p) {
  Field out(u.window());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    out[i] = a == 0.0 ? 0.0 : (p == 2.0 ? a * a : std::pow(a, p));
  }
  return out;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  double x = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError("cannot parse number '" + std::string(text) + "'");
  }
  return x;
}

std::string format_field(const Field& u) {
  const auto& w = u.window();
  std::ostringstream os;
  os << "# choquard-field 1\n";
  os << "dim " << w.dim() << "\n";
  os << "radius " << w.radius() << "\n";
  os << "shape " << to_string(w.shape()) << "\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    for (int c : w.site(i)) os << c << ' ';
    os << format_double(u[i]) << '\n';
  }
  return os.str();
}

Field parse_field(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || line != "# choquard-field 1")
    throw IoError("field file: missing or unsupported header");
  int dim = 0, radius = 0;
  std::string shape;
  std::string key;
  for (int k = 0; k < 3; ++k) {
    if (!std::getline(is, line)) throw IoError("field file: truncated header");
    std::istringstream ls(line);
    ls >> key;
    if (key == "dim") ls >> dim;
    else if (key == "radius") ls >> radius;
    else if (key == "shape") ls >> shape;
    else throw IoError("field file: unexpected header key '" + key + "'");
  }
  Field u(LatticeWindow(dim, radius, parse_window_shape(shape)));
  Site s(static_cast<std::size_t>(dim));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    for (auto& c : s)
      if (!(ls >> c)) throw IoError("field file: malformed record '" + line + "'");
    std::string value;
    if (!(ls >> value)) throw IoError("field file: missing value in '" + line + "'");
    if (!u.window().contains(s)) throw IoError("field file: site outside the window");
    u.set(s, parse_double(value));
  }
  return u;
}

void save_field(const Field& u, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << format_field(u);
  if (!os) throw IoError("write failed: " + path.string());
}

Field load_field(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_field(buf.str());
}

}  // namespace choquard
