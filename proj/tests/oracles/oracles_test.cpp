// Brute-force reference implementations checked against the library on
// random inputs.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "scholmig/clustering.hpp"
#include "scholmig/metrics.hpp"
#include "scholmig/random.hpp"
#include "scholmig/taxonomy.hpp"

using namespace scholmig;
using namespace scholmig::testing;

namespace {

// O(n^3) UPGMA: rescan every cluster pair before each merge, averaging the
// original item distances.
struct NaiveHac {
  std::vector<double> merge_distances;
  std::vector<std::size_t> labels;
};

NaiveHac naive_average_linkage(const std::vector<std::vector<double>>& d, double threshold) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < d.size(); ++i) clusters.push_back({i});
  NaiveHac out;
  auto average = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double sum = 0.0;
    for (auto i : a) {
      for (auto j : b) sum += d[i][j];
    }
    return sum / static_cast<double>(a.size() * b.size());
  };
  std::vector<std::vector<std::size_t>> at_cut;
  bool cut_taken = false;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double dist = average(clusters[i], clusters[j]);
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    if (!cut_taken && best > threshold) {
      at_cut = clusters;
      cut_taken = true;
    }
    out.merge_distances.push_back(best);
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  if (!cut_taken) at_cut = clusters;

  std::vector<std::size_t> owner(d.size());
  for (std::size_t c = 0; c < at_cut.size(); ++c) {
    for (auto i : at_cut[c]) owner[i] = c;
  }
  std::map<std::size_t, std::size_t> relabel;
  for (auto o : owner) {
    relabel.emplace(o, relabel.size());
    out.labels.push_back(relabel.at(o));
  }
  return out;
}

std::vector<std::vector<double>> random_distances(Rng& rng, std::size_t n) {
  // Points on a line plus noise, so that clusters exist but ties do not.
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform() < 0.5 ? 0.2 * rng.uniform() : 0.6 + 0.2 * rng.uniform();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i][j] = d[j][i] = std::min(1.0, std::abs(x[i] - x[j]) + 0.05 * rng.uniform());
    }
  }
  return d;
}

// Presence straight from the wording: some focal year p inside the padding
// with every year at least as close as p also holding focal.
bool brute_present(const mobility::YearCountrySeries& s, Country focal, int year, int padding) {
  for (const auto& p : s.years()) {
    const int dp = std::abs(p.year - year);
    if (dp > padding || !p.has_mode(focal)) continue;
    bool clean = true;
    for (const auto& q : s.years()) {
      if (std::abs(q.year - year) <= dp && !q.has_mode(focal)) clean = false;
    }
    if (clean) return true;
  }
  return false;
}

taxonomy::FieldFrequencies random_shares(Rng& rng) {
  std::array<double, 4> w{};
  for (auto& x : w) x = std::pow(rng.uniform(), 2.0);
  double total = 0.0;
  for (double x : w) total += x;
  taxonomy::FieldFrequencies f;
  for (std::size_t m = 0; m < 4; ++m) f.share[m] = w[m] / total;
  return f;
}

double oracle_max_z(const taxonomy::FieldFrequencies& f, const std::vector<taxonomy::FieldFrequencies>& all) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < 4; ++m) {
    double mean = 0.0;
    for (const auto& g : all) mean += g.share[m];
    mean /= static_cast<double>(all.size());
    double var = 0.0;
    for (const auto& g : all) var += (g.share[m] - mean) * (g.share[m] - mean);
    const double sd = std::sqrt(var / static_cast<double>(all.size()));
    best = std::max(best, sd > 0.0 ? (f.share[m] - mean) / sd : 0.0);
  }
  return best;
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("average linkage matches naive UPGMA") {
    Rng rng(901);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t n = 2 + rng.index(40);
      const auto full = random_distances(rng, n);
      const double threshold = 0.1 + 0.8 * rng.uniform();
      const auto naive = naive_average_linkage(full, threshold);
      const auto matrix = disambig::DistanceMatrix::from_full(full);

      const auto steps = disambig::average_linkage(matrix);
      REQUIRE(steps.size() == n - 1);
      std::vector<double> got;
      for (const auto& s : steps) got.push_back(s.distance);
      auto expected = naive.merge_distances;
      std::sort(expected.begin(), expected.end());
      for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(expected[k]).epsilon(1e-12));

      const auto clustering = disambig::cluster_records(matrix, threshold);
      CHECK(clustering.labels == naive.labels);
      CHECK(clustering.cluster_count == std::set<std::size_t>(naive.labels.begin(), naive.labels.end()).size());
    }
  }

  TEST_CASE("population matches per-author brute force") {
    Rng rng(902);
    const Country focal = cc("RU");
    const char* pool[] = {"RU", "RU", "US", "DE"};
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<mobility::YearCountrySeries> population;
      for (int a = 0; a < 60; ++a) {
        std::vector<std::pair<int, std::vector<Country>>> modes;
        for (int year = 2000; year <= 2015; ++year) {
          if (rng.bernoulli(0.5)) continue;
          std::set<Country> set{cc(pool[rng.index(4)])};
          if (rng.bernoulli(0.2)) set.insert(cc(pool[rng.index(4)]));
          modes.push_back({year, {set.begin(), set.end()}});
        }
        population.push_back(mobility::YearCountrySeries::from_modes(modes));
      }
      const int padding = static_cast<int>(rng.index(5));
      for (int year = 1998; year <= 2017; ++year) {
        double expected = 0.0;
        for (const auto& s : population) {
          const bool present = brute_present(s, focal, year, padding);
          CHECK(metrics::present_in_year(s, focal, year, padding) == present);
          expected += present ? 1.0 : 0.0;
        }
        CHECK(metrics::estimate_population(population, focal, year, padding) == expected);
      }
    }
  }

  TEST_CASE("alpha calibration matches an exhaustive grid") {
    Rng rng(903);
    for (int trial = 0; trial < 15; ++trial) {
      std::vector<taxonomy::FieldFrequencies> all;
      for (int i = 0; i < 400; ++i) all.push_back(random_shares(rng));
      std::vector<double> maxima;
      for (const auto& f : all) maxima.push_back(oracle_max_z(f, all));
      const double lo = *std::min_element(maxima.begin(), maxima.end()) - 0.01;
      const double hi = *std::max_element(maxima.begin(), maxima.end()) + 0.01;
      const double target = 0.05 + 0.9 * rng.uniform();

      double grid_alpha = hi;
      for (double alpha = lo; alpha <= hi; alpha += 1e-4) {
        const auto multi = std::count_if(maxima.begin(), maxima.end(), [&](double z) { return z <= alpha; });
        if (static_cast<double>(multi) / static_cast<double>(all.size()) >= target) {
          grid_alpha = alpha;
          break;
        }
      }
      const auto stats = taxonomy::compute_field_stats(all);
      const double alpha = taxonomy::calibrate_alpha(all, stats, target);
      CHECK(std::abs(alpha - grid_alpha) <= 1e-3 + 1e-4);
    }
  }

  TEST_CASE("citation classes match rank tertiles") {
    Rng rng(904);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + rng.index(300);
      std::vector<double> rates(n);
      for (auto& r : rates) r = rng.lognormal_with_mean(2.0, 1.2);
      const auto boundaries = metrics::CitationClassBoundaries::fit(rates);

      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rates[a] < rates[b]; });
      const std::size_t third = static_cast<std::size_t>(std::lround(static_cast<double>(n) / 3.0));
      for (std::size_t rank = 0; rank < n; ++rank) {
        const auto cls = metrics::citation_class(rates[order[rank]], boundaries);
        auto expected = metrics::CitationClass::kModerate;
        if (rank < third) expected = metrics::CitationClass::kLow;
        // With n = 2 the single upper member sits on the boundary.
        if (rank >= n - third && n - third > third) expected = metrics::CitationClass::kHigh;
        CHECK(cls == expected);
      }
    }
  }
}
