#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "packetvision/error.hpp"
#include "packetvision/imaging.hpp"

namespace im = packetvision::imaging;
using packetvision::Error;
using packetvision::ErrorCode;
using packetvision::SplitMix64;

namespace {

std::vector<std::uint8_t> random_bytes(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(gen());
  return v;
}

double poisson_pmf(double lambda, int k) {
  return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

struct Moments {
  double mean, variance;
};

Moments sample_moments(double lambda, std::uint64_t seed, int n) {
  SplitMix64 rng(seed);
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<double>(im::poisson_sample(lambda, rng));
    sum += k;
    sum_sq += k * k;
  }
  const double mean = sum / n;
  return {mean, (sum_sq - n * mean * mean) / (n - 1)};
}

}  // namespace

TEST_CASE("to_matrix pads with 0xFF to a multiple of 8") {
  SUBCASE("exact multiple") {
    std::vector<std::uint8_t> bytes(16);
    std::iota(bytes.begin(), bytes.end(), 0);
    const auto m = im::to_matrix(bytes);
    CHECK(m.rows == 2);
    CHECK(m.pad_count == 0);
    CHECK(m.data == bytes);
  }
  SUBCASE("ten bytes") {
    std::vector<std::uint8_t> bytes(10, 0x11);
    const auto m = im::to_matrix(bytes);
    CHECK(m.rows == 2);
    CHECK(m.pad_count == 6);
    CHECK(std::all_of(m.data.end() - 6, m.data.end(), [](auto v) { return v == 255; }));
    CHECK(std::all_of(m.data.begin(), m.data.begin() + 10, [](auto v) { return v == 0x11; }));
  }
  SUBCASE("single byte") {
    const std::vector<std::uint8_t> bytes = {0x2A};
    const auto m = im::to_matrix(bytes);
    CHECK(m.rows == 1);
    CHECK(m.data == std::vector<std::uint8_t>{42, 255, 255, 255, 255, 255, 255, 255});
    CHECK(m.at(0, 0) == 42);
  }
  SUBCASE("empty packet") {
    CHECK_THROWS_AS(im::to_matrix({}), Error);
  }
}

TEST_CASE("shape and padding laws over random lengths") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t len = 1 + gen() % 1514;
    const auto bytes = random_bytes(gen, len);
    const auto m = im::to_matrix(bytes);
    const std::size_t rows = (len + 7) / 8;
    REQUIRE(m.rows == rows);
    REQUIRE(m.pad_count == rows * 8 - len);
    REQUIRE(std::equal(bytes.begin(), bytes.end(), m.data.begin()));
    REQUIRE(std::all_of(m.data.begin() + static_cast<std::ptrdiff_t>(len), m.data.end(),
                        [](auto v) { return v == 0xFF; }));
  }
}

TEST_CASE("poisson_sample") {
  SUBCASE("lambda 0 always yields 0 and leaves the generator alone") {
    SplitMix64 rng(5);
    const auto before = rng.state();
    for (int i = 0; i < 100; ++i) CHECK(im::poisson_sample(0.0, rng) == 0);
    CHECK(rng.state() == before);
  }
  SUBCASE("negative or non-finite lambda is rejected") {
    SplitMix64 rng(5);
    CHECK_THROWS_AS(im::poisson_sample(-1.0, rng), Error);
    CHECK_THROWS_AS(im::poisson_sample(std::nan(""), rng), Error);
    CHECK_THROWS_AS(im::poisson_sample(INFINITY, rng), Error);
  }
  SUBCASE("same seed, same draws") {
    SplitMix64 a(77), b(77);
    for (int i = 0; i < 1000; ++i) REQUIRE(im::poisson_sample(8.0, a) == im::poisson_sample(8.0, b));
  }
  SUBCASE("lambda 8: mean and variance") {
    const auto m = sample_moments(8.0, 1, 1000000);
    CHECK(std::abs(m.mean - 8.0) <= 0.03);
    CHECK(std::abs(m.variance - 8.0) <= 0.15);
  }
  SUBCASE("lambda 1: fraction of zeros") {
    SplitMix64 rng(2);
    int zeros = 0;
    for (int i = 0; i < 1000000; ++i) zeros += im::poisson_sample(1.0, rng) == 0;
    CHECK(std::abs(zeros / 1e6 - std::exp(-1.0)) <= 0.002);
  }
  SUBCASE("rejection branch (lambda >= 10): mean and variance") {
    for (const double lambda : {10.0, 25.0, 300.0}) {
      CAPTURE(lambda);
      const auto m = sample_moments(lambda, 3, 400000);
      // ~6 standard errors of the mean and of the sample variance.
      const double n = 400000;
      CHECK(std::abs(m.mean - lambda) <= 6 * std::sqrt(lambda / n));
      // Var(s^2) ~ (mu4 - sigma^4) / n with mu4 = lambda (1 + 3 lambda).
      const double var_se = std::sqrt((lambda * (1 + 3 * lambda) - lambda * lambda) / n);
      CHECK(std::abs(m.variance - lambda) <= 6 * var_se);
    }
  }
  SUBCASE("empirical pmf matches the analytic pmf") {
    for (const double lambda : {0.5, 3.0, 8.0, 15.0}) {
      CAPTURE(lambda);
      constexpr int n = 500000;
      SplitMix64 rng(4);
      std::vector<int> hist(200, 0);
      for (int i = 0; i < n; ++i) {
        const auto k = im::poisson_sample(lambda, rng);
        ++hist[std::min<std::size_t>(k, hist.size() - 1)];
      }
      for (int k = 0; k < 40; ++k) {
        const double p = poisson_pmf(lambda, k);
        const double sd = std::sqrt(n * p * (1 - p));
        CAPTURE(k);
        CHECK(std::abs(hist[k] - n * p) <= 5 * sd + 1);
      }
    }
  }
}

TEST_CASE("shuffle") {
  std::mt19937_64 gen(21);

  SUBCASE("lambda 0 is the identity") {
    for (int t = 0; t < 100; ++t) {
      const auto m = im::to_matrix(random_bytes(gen, 1 + gen() % 300));
      CHECK(im::shuffle(m, {.lambda = 0.0, .seed = gen()}) == m);
    }
  }
  SUBCASE("output is a permutation with unchanged metadata") {
    for (int t = 0; t < 1000; ++t) {
      const auto m = im::to_matrix(random_bytes(gen, 1 + gen() % 1514));
      const im::ShuffleSpec spec{.lambda = (gen() % 2000) / 100.0, .seed = gen()};
      auto s = im::shuffle(m, spec);
      REQUIRE(s.rows == m.rows);
      REQUIRE(s.pad_count == m.pad_count);
      auto a = m.data, b = s.data;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      REQUIRE(a == b);
    }
  }
  SUBCASE("follows the documented swap pass") {
    // Cells hold their own index, so the output spells out the permutation.
    for (std::size_t rows : {1u, 2u, 5u, 32u}) {
      im::ByteMatrix m{rows, 0, {}};
      m.data.resize(rows * 8);
      std::iota(m.data.begin(), m.data.end(), 0);
      const im::ShuffleSpec spec{.lambda = 8.0, .seed = 1000 + rows};

      std::vector<std::size_t> perm(rows * 8);
      std::iota(perm.begin(), perm.end(), 0);
      SplitMix64 rng(spec.seed);
      for (std::size_t i = 0; i < perm.size(); ++i) {
        const auto d = im::poisson_sample(spec.lambda, rng);
        std::swap(perm[i], perm[(i + d) % perm.size()]);
      }
      const auto s = im::shuffle(m, spec);
      for (std::size_t i = 0; i < perm.size(); ++i) REQUIRE(s.data[i] == perm[i]);
    }
  }
  SUBCASE("deterministic per seed, divergent across seeds") {
    int differing = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto m = im::to_matrix(random_bytes(gen, 64));
      const im::ShuffleSpec spec{.lambda = 8.0, .seed = gen()};
      REQUIRE(im::shuffle(m, spec) == im::shuffle(m, spec));
      differing += im::shuffle(m, spec) != im::shuffle(m, {.lambda = 8.0, .seed = spec.seed + 1});
    }
    CHECK(differing == 1000);
  }
  SUBCASE("padding takes part in the shuffle") {
    const std::vector<std::uint8_t> bytes(58, 0);  // 8 rows, 6 pad cells
    int moved = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto s = im::shuffle(im::to_matrix(bytes), {.lambda = 8.0, .seed = seed});
      moved += !std::all_of(s.data.end() - 6, s.data.end(), [](auto v) { return v == 0xFF; });
    }
    CHECK(moved > 150);
  }
  SUBCASE("header bytes leave their columns") {
    // Average absolute displacement of the first 16 cells must be substantial.
    im::ByteMatrix m{16, 0, std::vector<std::uint8_t>(128)};
    std::iota(m.data.begin(), m.data.end(), 0);
    double total = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto s = im::shuffle(m, {.lambda = 8.0, .seed = seed});
      for (std::size_t i = 0; i < s.data.size(); ++i) {
        if (s.data[i] < 16) total += std::abs(static_cast<double>(i) - s.data[i]);
      }
    }
    CHECK(total / (200 * 16) > 4.0);
  }
  SUBCASE("malformed matrix is rejected") {
    im::ByteMatrix bad{2, 0, std::vector<std::uint8_t>(9)};
    CHECK_THROWS_AS(im::shuffle(bad, {}), Error);
    CHECK_THROWS_AS(im::render(bad), Error);
  }
}

TEST_CASE("render replicates each byte across RGB") {
  SUBCASE("black and white") {
    const std::vector<std::uint8_t> bytes = {0};
    const auto img = im::render(im::to_matrix(bytes));
    CHECK(img.height == 1);
    CHECK(img.pixel(0, 0) == im::Rgb{0, 0, 0});
    for (std::size_t c = 1; c < 8; ++c) CHECK(img.pixel(0, c) == im::Rgb{255, 255, 255});
  }
  SUBCASE("2x8 ramp in row-major order") {
    im::ByteMatrix m{2, 0, {}};
    for (int i = 0; i < 16; ++i) m.data.push_back(static_cast<std::uint8_t>(16 * i));
    const auto img = im::render(m);
    REQUIRE(img.height == 2);
    REQUIRE(img.pixels.size() == 16 * 3);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 8; ++c) {
        const auto v = static_cast<std::uint8_t>(16 * (r * 8 + c));
        CHECK(img.pixels[(r * 8 + c) * 3] == v);
        CHECK(img.pixel(r, c) == im::Rgb{v, v, v});
      }
    }
  }
}

TEST_CASE("packet_to_image") {
  SUBCASE("64 bytes make an 8x8 image") {
    std::vector<std::uint8_t> bytes(64, 3);
    CHECK(im::packet_to_image(bytes, {}).height == 8);
  }
  SUBCASE("full Ethernet frame") {
    std::vector<std::uint8_t> bytes(1514, 1);
    const auto img = im::packet_to_image(bytes, {.lambda = 8.0, .seed = 9});
    CHECK(img.height == 190);
    CHECK(im::to_matrix(bytes).pad_count == 6);
    const auto whites = std::count_if(img.pixels.begin(), img.pixels.end(),
                                      [](auto v) { return v == 255; });
    CHECK(whites == 6 * 3);
  }
  SUBCASE("identity shuffle maps bytes straight to pixels") {
    const std::vector<std::uint8_t> bytes = {0, 1, 2, 3, 4, 5, 6, 7};
    const auto img = im::packet_to_image(bytes, {.lambda = 0.0, .seed = 1});
    REQUIRE(img.height == 1);
    for (std::uint8_t c = 0; c < 8; ++c) CHECK(img.pixel(0, c) == im::Rgb{c, c, c});
  }
  SUBCASE("grayscale law") {
    std::mt19937_64 gen(8);
    for (int t = 0; t < 200; ++t) {
      const auto img = im::packet_to_image(random_bytes(gen, 1 + gen() % 1514),
                                           {.lambda = 8.0, .seed = gen()});
      for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        REQUIRE(img.pixels[i] == img.pixels[i + 1]);
        REQUIRE(img.pixels[i] == img.pixels[i + 2]);
      }
    }
  }
  SUBCASE("empty packet") {
    try {
      im::packet_to_image({}, {});
      FAIL("expected EmptyPacket");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyPacket);
    }
  }
}
