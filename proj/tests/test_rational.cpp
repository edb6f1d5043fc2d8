#include <catch2/catch_amalgamated.hpp>

#include "graphonlab/interval.hpp"
#include "graphonlab/rational.hpp"

using namespace graphonlab;

TEST_CASE("rational arithmetic is exact and reduced") {
  Rational a = rat(1, 3);
  Rational b = rat(1, 6);
  CHECK(a + b == rat(1, 2));
  CHECK(a - b == rat(1, 6));
  CHECK(a * b == rat(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(rat(2, 4) == rat(1, 2));
  CHECK(rat(-2, -4) == rat(1, 2));
  CHECK(rat(2, -4) == rat(-1, 2));
  CHECK((rat(1, 3) + rat(2, 3)) == Rational(1));
}

TEST_CASE("rational parse and print round-trip") {
  for (const char* s : {"0", "1", "-1", "1/2", "-3/7", "355/113"}) {
    Rational r = Rational::from_string(s);
    CHECK(Rational::from_string(r.str()) == r);
    CHECK(r.str() == s);
  }
  CHECK(Rational::from_string("2/4").str() == "1/2");
  CHECK_THROWS_AS(Rational::from_string("x"), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("rational ordering") {
  CHECK(rat(1, 3) < rat(1, 2));
  CHECK(rat(-1, 2) < rat(-1, 3));
  CHECK(rat(7, 5) > Rational(1));
  CHECK(rat_abs(rat(-3, 4)) == rat(3, 4));
}

TEST_CASE("exact double conversion") {
  CHECK(Rational::from_double_exact(0.5) == rat(1, 2));
  CHECK(Rational::from_double_exact(0.375) == rat(3, 8));
  CHECK(Rational::from_double_exact(0.0) == Rational(0));
  double x = 0.1234567;
  CHECK(Rational::from_double_exact(x).to_double() == x);
}

TEST_CASE("pow2 helper") {
  CHECK(pow2(3) == Rational(8));
  CHECK(pow2(0) == Rational(1));
  CHECK(pow2(-4) == rat(1, 16));
}

TEST_CASE("deep dyadic sums stay exact") {
  // sum_{k=1..40} 4^{-k} = (1 - 4^{-40}) / 3
  Rational sum(0);
  for (int k = 1; k <= 40; ++k) sum += pow2(-2 * k);
  CHECK(sum == (Rational(1) - pow2(-80)) / Rational(3));
}

TEST_CASE("interval basics") {
  Interval i(rat(1, 4), rat(1, 2));
  CHECK(i.length() == rat(1, 4));
  CHECK(i.contains(rat(1, 4)));
  CHECK_FALSE(i.contains(rat(1, 2)));
  CHECK_THROWS(Interval(rat(1, 2), rat(1, 2)));
  CHECK_THROWS(Interval(rat(3, 4), rat(1, 2)));
}

TEST_CASE("dyadic intervals") {
  CHECK(dyadic_interval({3, 2}).lo == rat(1, 4));
  CHECK(dyadic_interval({3, 2}).hi == rat(1, 2));
  CHECK(dyadic_interval({1, 1}).lo == Rational(0));
  CHECK(dyadic_interval({1, 1}).hi == Rational(1));
  CHECK_THROWS_AS(dyadic_interval({3, 5}), IndexError);
  CHECK_THROWS_AS(dyadic_interval({0, 1}), IndexError);

  // For fixed s the 2^{s-1} intervals have length 2^{-(s-1)} and tile [0,1).
  for (int s = 1; s <= 6; ++s) {
    Rational cursor(0);
    for (long long t = 1; t <= (1LL << (s - 1)); ++t) {
      Interval d = dyadic_interval({s, t});
      CHECK(d.lo == cursor);
      CHECK(d.length() == pow2(-(s - 1)));
      cursor = d.hi;
    }
    CHECK(cursor == Rational(1));
  }
}

TEST_CASE("gamma map of a contiguous group") {
  AffineMap gamma = gamma_map({Interval(rat(1, 5), rat(2, 5)), Interval(rat(2, 5), rat(3, 5))});
  CHECK(gamma.fwd(Rational(0)) == rat(1, 5));
  CHECK(gamma.fwd(rat(1, 2)) == rat(2, 5));
  // gamma(0.5) = 0.5*0.4 + 0.2 = 0.4 for the group [0.2, 0.6)
  CHECK(gamma.fwd(0.5) == Catch::Approx(0.4));
  for (double x : {0.0, 0.1, 0.45, 0.99})
    CHECK(gamma.inv(gamma.fwd(x)) == Catch::Approx(x).margin(1e-14));
  CHECK_THROWS_AS(gamma_map({Interval(rat(1, 5), rat(2, 5)), Interval(rat(1, 2), rat(3, 5))}),
                  NonContiguousError);
}
