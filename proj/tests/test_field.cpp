#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "choquard/errors.hpp"
#include "choquard/field.hpp"

using namespace choquard;

namespace {

Field random_field(const LatticeWindow& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field f(w);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

}  // namespace

TEST(Field, DeltaAndIndicator) {
  const LatticeWindow w(2, 3);
  const Field d = Field::delta(w, {1, -2}, 2.5);
  EXPECT_EQ(d.at(Site{1, -2}), 2.5);
  EXPECT_EQ(d.at(Site{0, 0}), 0.0);
  EXPECT_EQ(d.at(Site{9, 9}), 0.0);
  EXPECT_EQ(d.support().size(), 1u);
  const Field ind = Field::indicator(w, ball({0, 0}, 1));
  EXPECT_EQ(lp_norm(ind, 1.0), 5.0);
}

TEST(Field, RejectsNonFinite) {
  const LatticeWindow w(1, 2);
  EXPECT_THROW(Field(w, std::vector<double>(5, std::nan(""))), InputError);
  EXPECT_THROW(Field(w, std::vector<double>(4, 0.0)), InputError);
  Field f(w);
  EXPECT_THROW(f.set(Site{3}, 1.0), InputError);
}

TEST(Field, WindowChanges) {
  const LatticeWindow small(2, 2), big(2, 4);
  const Field f = random_field(small, 1);
  const Field g = f.on_window(big);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g.at(small.site(i)), f[i]);
  EXPECT_EQ(g.on_window(small), f);
  EXPECT_THROW(Field::delta(big, {4, 0}).on_window(small), InputError);
  EXPECT_EQ(Field::delta(big, {4, 0}).restricted_to(small), Field(small));
}

TEST(Field, Translation) {
  const LatticeWindow w(2, 5);
  const Field f = Field::delta(w, {1, 1}, 3.0);
  const Field g = f.translated(Site{2, -3});
  EXPECT_EQ(g.at(Site{3, -2}), 3.0);
  EXPECT_EQ(lp_norm(g, 1.0), 3.0);
  EXPECT_THROW(f.translated(Site{5, 0}), InputError);
}

TEST(Field, Arithmetic) {
  const LatticeWindow w(1, 3);
  const Field a = random_field(w, 2), b = random_field(w, 3);
  EXPECT_DOUBLE_EQ(dot(a + b, a + b), dot(a, a) + 2 * dot(a, b) + dot(b, b));
  EXPECT_EQ((2.0 * a - a), a);
  EXPECT_THROW(dot(a, Field(LatticeWindow(1, 4))), InputError);
}

TEST(Field, Norms) {
  const LatticeWindow w(1, 2);
  const Field f(w, {0.0, -3.0, 4.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(lp_norm(f, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(lp_norm(f, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(sup_norm(f), 4.0);
  EXPECT_THROW(lp_norm(f, 0.5), InputError);
  const Field p = abs_pow(f, 1.5);
  EXPECT_DOUBLE_EQ(p[1], std::pow(3.0, 1.5));
  EXPECT_DOUBLE_EQ(p[2], 8.0);
  EXPECT_EQ(p[0], 0.0);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int n = 0; n < 2000; ++n) {
    const std::uint64_t b = bits(rng);
    double x;
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    const double y = parse_double(format_double(x));
    EXPECT_EQ(std::memcmp(&x, &y, sizeof x), 0) << format_double(x);
  }
  EXPECT_THROW(parse_double("1.5x"), IoError);
}

TEST(FieldFile, RoundTripIsExact) {
  for (int dim : {1, 2, 3}) {
    const LatticeWindow w(dim, 3);
    Field f = random_field(w, static_cast<std::uint64_t>(dim));
    f[0] = 0.0;
    const Field g = parse_field(format_field(f));
    EXPECT_EQ(g, f);
  }
  const auto path = std::filesystem::temp_directory_path() / "choquard_field_test.field";
  const Field f = random_field(LatticeWindow(2, 4), 9);
  save_field(f, path);
  EXPECT_EQ(load_field(path), f);
  std::filesystem::remove(path);
}

TEST(FieldFile, RejectsMalformed) {
  EXPECT_THROW(parse_field("not a field\n"), IoError);
  std::string text = format_field(Field::delta(LatticeWindow(2, 2), {1, 1}));
  text += "7 7 1\n";
  EXPECT_THROW(parse_field(text), IoError);
  EXPECT_THROW(load_field("/nonexistent/dir/x.field"), IoError);
}
