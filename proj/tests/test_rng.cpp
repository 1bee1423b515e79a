#include <cmath>
#include <vector>

#include "doctest.h"
#include "locint/rng.hpp"

using namespace locint;

TEST_CASE("identical (seed, stream) reproduces identical draws") {
  SeededStream a(1234, 7);
  SeededStream b(1234, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams are decorrelated") {
  SeededStream a(1234, 0);
  SeededStream b(1234, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("uniform moments") {
  SeededStream rng(99, 0);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0 / 3).epsilon(0.01));
}

TEST_CASE("poisson mean and variance") {
  SeededStream rng(2024, 3);
  for (const double mean : {0.5, 4.0, 37.0, 480.0}) {
    const int n = mean > 100 ? 4000 : 20000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = double(rng.poisson(mean));
      s += k;
      s2 += k * k;
    }
    const double m = s / n;
    const double var = s2 / n - m * m;
    // 5 sigma bands
    CHECK(std::abs(m - mean) <= 5.0 * std::sqrt(mean / n));
    CHECK(std::abs(var - mean) <= 5.0 * std::sqrt(2.0 * mean * mean / n) + 0.5);
  }
  CHECK(rng.poisson(0.0) == 0);
}
