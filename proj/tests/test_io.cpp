#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "pbal/io.hpp"
#include "pbal/rng.hpp"

using namespace pbal;

TEST_CASE("formatted reals round-trip exactly") {
  // 17 significant digits reproduce every double bit-for-bit.
  Rng rng(99);
  std::vector<double> values{0.0, 1.0, -1.0, 0.1, 1e-300, 1e300, M_PI,
                             std::log(1.0 / 3.0), -2.0 * std::log(2.0)};
  for (int i = 0; i < 200; ++i)
    values.push_back((rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-30, 30)));
  for (double v : values) {
    const std::string s = format_real(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("label CSV round trip") {
  const SetPartition part({0, 0, 1, 2, 1, 0});
  const std::string path =
      (std::filesystem::temp_directory_path() / "pbal_labels.csv").string();
  write_labels_csv(part, path);
  CHECK(read_labels_csv(path) == part);
}
