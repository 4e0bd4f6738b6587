#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcm/indices.hpp"
#include "pcm/matrix.hpp"
#include "pcm/montecarlo.hpp"

TEST_CASE("splitmix64 matches the reference sequence") {
  std::uint64_t state = 0;
  CHECK(pcm::splitmix64(state) == 0xE220A8397B1DCDAFULL);
  CHECK(pcm::splitmix64(state) == 0x6E789E6AA1B965F4ULL);
  CHECK(pcm::splitmix64(state) == 0x06C45D188009454FULL);
  CHECK(state == 3 * 0x9E3779B97F4A7C15ULL);
}

TEST_CASE("stream seed derivation is deterministic and coordinate-sensitive") {
  CHECK(pcm::derive_stream_seed(1, 1, 0) == 0x5775264A9A7E1B09ULL);
  CHECK(pcm::derive_stream_seed(1, 1, 1) == 0x7095BEEBD76575E4ULL);
  CHECK(pcm::derive_stream_seed(1, 2, 0) == 0xE68E6FC01DF08360ULL);
  CHECK(pcm::derive_stream_seed(2, 1, 0) == 0x90B96B4DD23BD6EBULL);
  CHECK(pcm::derive_stream_seed(7, 3, 11) == pcm::derive_stream_seed(7, 3, 11));
}

TEST_CASE("rng draws") {
  pcm::Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  pcm::Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next_unit() == b.next_unit());

  SUBCASE("uniform and log_uniform ranges") {
    pcm::Rng r(3);
    for (int i = 0; i < 500; ++i) {
      double u = r.uniform(2.0, 5.0);
      CHECK(u >= 2.0);
      CHECK(u <= 5.0);
      double g = r.log_uniform(0.5, 2.0);
      CHECK(g >= 0.5 - 1e-12);
      CHECK(g <= 2.0 + 1e-12);
    }
  }
}

TEST_CASE("generate_consistent") {
  pcm::Rng rng(pcm::derive_stream_seed(9, 1, 5));
  pcm::PCMatrix m = pcm::generate_consistent(5, rng);
  CHECK(m.size() == 5);
  CHECK(m.complete());
  CHECK(pcm::is_consistent(m));
  CHECK(pcm::validate(m).ok());
  CHECK(pcm::mii(m) <= 1e-10);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      CHECK(m.value(i, j) >= 1.0 / 81.0 - 1e-12);
      CHECK(m.value(i, j) <= 81.0 + 1e-9);
    }

  SUBCASE("deterministic for a fixed stream") {
    pcm::Rng r1(pcm::derive_stream_seed(9, 1, 5));
    pcm::Rng r2(pcm::derive_stream_seed(9, 1, 5));
    CHECK(pcm::serialize(pcm::generate_consistent(5, r1)) ==
          pcm::serialize(pcm::generate_consistent(5, r2)));
  }
  SUBCASE("rejects tiny sizes and bad ranges") {
    pcm::Rng r(1);
    CHECK_THROWS_AS(pcm::generate_consistent(1, r), pcm::TooSmallError);
    CHECK_THROWS_AS(pcm::generate_consistent(4, r, 2.0, 1.0), pcm::Error);
    CHECK_THROWS_AS(pcm::generate_consistent(4, r, -1.0, 1.0), pcm::Error);
  }
}

TEST_CASE("perturb") {
  pcm::Rng rng(17);
  pcm::PCMatrix base = pcm::generate_consistent(5, rng);

  SUBCASE("s = 1 collapses to the identity") {
    pcm::Rng r(5);
    pcm::PCMatrix same = pcm::perturb(base, 1, r);
    CHECK(pcm::serialize(same) == pcm::serialize(base));
  }
  SUBCASE("factors stay inside [1/s, s]") {
    for (int s : {2, 7, 30}) {
      pcm::Rng r(100 + s);
      pcm::PCMatrix p = pcm::perturb(base, s, r);
      CHECK(pcm::validate(p).ok());
      for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
          double f = p.value(i, j) / base.value(i, j);
          CHECK(f >= 1.0 / s - 1e-9);
          CHECK(f <= s + 1e-9);
        }
    }
  }
  SUBCASE("uniform factor flag") {
    pcm::Rng r(77);
    pcm::PCMatrix p = pcm::perturb(base, 4, r, true);
    CHECK(pcm::validate(p).ok());
  }
  SUBCASE("requires a complete matrix") {
    pcm::PCMatrix holes = pcm::parse_matrix("1 2 ?\n1/2 1 3\n? 1/3 1\n");
    pcm::Rng r(1);
    CHECK_THROWS_AS(pcm::perturb(holes, 2, r), pcm::IncompleteMatrixError);
  }
}

TEST_CASE("pearson") {
  std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> y{2.0, 4.0, 7.0};
  auto r = pcm::pearson(x, y);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(0.9933993).epsilon(1e-6));

  CHECK(*pcm::pearson(x, x) == doctest::Approx(1.0));
  std::vector<double> neg{-1.0, -2.0, -3.0};
  CHECK(*pcm::pearson(x, neg) == doctest::Approx(-1.0));

  std::vector<double> flat{5.0, 5.0, 5.0};
  CHECK(!pcm::pearson(x, flat).has_value());
  CHECK(!pcm::pearson(flat, x).has_value());

  CHECK_THROWS_AS(pcm::pearson(x, std::vector<double>{1.0}), pcm::LengthMismatchError);
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(pcm::pearson(one, one), pcm::TooSmallError);
}

TEST_CASE("index_row packs the eight indices in CSV column order") {
  pcm::PCMatrix m = pcm::parse_matrix(
      "1 3 5 2\n"
      "1/3 1 2 1/2\n"
      "1/5 1/2 1 1/3\n"
      "1/2 2 3 1\n");
  pcm::IndexRow row = pcm::index_row(m);
  pcm::ClassicalIndices c = pcm::classical_indices(m);
  CHECK(row[0] == c.ci);
  CHECK(row[1] == c.gci);
  CHECK(row[2] == c.hci);
  CHECK(row[3] == c.koczkodaj);
  CHECK(row[4] == c.gw);
  CHECK(row[5] == c.re);
  CHECK(row[6] == pcm::mii(m));
  CHECK(row[7] == pcm::kii(m));
}

TEST_CASE("run_study") {
  pcm::SeriesConfig cfg;
  cfg.series_count = 6;
  cfg.matrices_per_series = 50;
  cfg.seed = 2024;
  cfg.threads = 1;
  pcm::StudyResult serial = pcm::run_study(cfg);

  REQUIRE(serial.rows.size() == 6);
  REQUIRE(serial.series.size() == 6);
  for (const auto& series_rows : serial.rows) REQUIRE(series_rows.size() == 50);

  SUBCASE("series 1 is exactly consistent") {
    for (double mean : serial.series[0].means) CHECK(std::abs(mean) <= 1e-9);
  }
  SUBCASE("thread count does not change the result") {
    pcm::SeriesConfig parallel = cfg;
    parallel.threads = 3;
    pcm::StudyResult threaded = pcm::run_study(parallel);
    CHECK(pcm::per_matrix_csv(serial) == pcm::per_matrix_csv(threaded));
    CHECK(pcm::summary_csv(serial) == pcm::summary_csv(threaded));
  }
  SUBCASE("repeat runs are bit-identical") {
    CHECK(pcm::per_matrix_csv(pcm::run_study(cfg)) == pcm::per_matrix_csv(serial));
  }
  SUBCASE("correlation matrices are symmetric with unit diagonal") {
    for (const pcm::SeriesStats& stats : serial.series)
      for (int a = 0; a < pcm::kIndexCount; ++a) {
        CHECK(stats.correlations[a][a] == 1.0);
        for (int b = 0; b < pcm::kIndexCount; ++b) {
          double r1 = stats.correlations[a][b];
          double r2 = stats.correlations[b][a];
          if (std::isnan(r1)) {
            CHECK(std::isnan(r2));
          } else {
            CHECK(r1 == r2);
            CHECK(std::abs(r1) <= 1.0 + 1e-12);
          }
        }
      }
  }
  SUBCASE("perturbed series have defined gw/mii correlation") {
    for (int s = 1; s < 6; ++s) CHECK(!std::isnan(serial.series[s].correlations[4][6]));
  }
  SUBCASE("csv shapes") {
    std::string matrix_csv = pcm::per_matrix_csv(serial);
    CHECK(matrix_csv.rfind("series,matrix,ci,gci,hci,k,gw,re,mii,kii\n", 0) == 0);
    CHECK(std::count(matrix_csv.begin(), matrix_csv.end(), '\n') == 1 + 6 * 50);
    std::string sum_csv = pcm::summary_csv(serial);
    CHECK(sum_csv.rfind("series,ci,gci,hci,k,gw,re,mii,kii,r_gw_mii\n", 0) == 0);
    CHECK(std::count(sum_csv.begin(), sum_csv.end(), '\n') == 1 + 6);
  }
  SUBCASE("config validation") {
    pcm::SeriesConfig bad = cfg;
    bad.n = 2;
    CHECK_THROWS_AS(pcm::run_study(bad), pcm::Error);
    bad = cfg;
    bad.matrices_per_series = 0;
    CHECK_THROWS_AS(pcm::run_study(bad), pcm::Error);
    bad = cfg;
    bad.weight_low = 0.0;
    CHECK_THROWS_AS(pcm::run_study(bad), pcm::Error);
  }
}

TEST_CASE("every generated matrix in a study is valid") {
  pcm::SeriesConfig cfg;
  cfg.series_count = 4;
  cfg.matrices_per_series = 10;
  cfg.seed = 5;
  for (int s = 1; s <= cfg.series_count; ++s)
    for (int m = 0; m < cfg.matrices_per_series; ++m) {
      pcm::Rng rng(pcm::derive_stream_seed(cfg.seed, s, m));
      pcm::PCMatrix mat = pcm::generate_consistent(cfg.n, rng, cfg.weight_low, cfg.weight_high);
      if (s >= 2) mat = pcm::perturb(mat, s, rng);
      CHECK(pcm::validate(mat).ok());
    }
}
