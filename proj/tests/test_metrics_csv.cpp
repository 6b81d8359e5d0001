#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hybridbn/csv.hpp"
#include "hybridbn/metrics.hpp"

using namespace hbn;

TEST_SUITE("metrics-csv") {

TEST_CASE("kl divergence on a worked example") {
  // 0.5 ln(0.5/0.75) + 0.5 ln(0.5/0.25) = 0.5 ln(4/3) = 0.1438410...
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> q{0.75, 0.25};
  CHECK(kl_divergence(p, q) == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(q, p) > 0.0);
}

TEST_CASE("kl conventions for zeros") {
  // Zero p-entries contribute nothing, even against q = 0.
  CHECK(kl_divergence(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}) == 0.0);
  // Zero q under positive p hits the 1e-12 floor instead of infinity.
  const double kl =
      kl_divergence(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0});
  CHECK(kl == doctest::Approx(std::log(1.0 / 1e-12)));
  CHECK(std::isfinite(kl));
}

TEST_CASE("kl rejects mismatched lengths") {
  CHECK_THROWS_AS(
      kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}),
      std::invalid_argument);
}

TEST_CASE("total variation") {
  CHECK(total_variation(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}) == 0.0);
  CHECK(total_variation(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) ==
        doctest::Approx(1.0));
  CHECK(total_variation(std::vector<double>{0.6, 0.4}, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(
      total_variation(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}),
      std::invalid_argument);
}

TEST_CASE("numbers format at six significant digits, locale-free") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(format_number(0.123456789) == "0.123457");
  CHECK(format_number(123456789.0) == "1.23457e+08");
  CHECK(format_number(1e-9) == "1e-09");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("format_number round-trips to the same six digits") {
  const double vals[] = {0.0517, 3.14159265, 1234.5678, 8.1e-5, 42.0};
  for (double v : vals) {
    const std::string s = format_number(v);
    const double back = std::stod(s);
    // Six significant digits bound the relative error by half an ulp in the
    // sixth digit, i.e. 5e-6.
    CHECK(std::abs(back - v) <= 5e-6 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("csv fields quote only when needed") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("has space") == "has space");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_field("") == "");
}

}  // TEST_SUITE
