#include <doctest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "scholmig/random.hpp"
#include "scholmig/taxonomy.hpp"

using namespace scholmig;
using namespace scholmig::taxonomy;
using namespace scholmig::testing;

namespace {

const AsjcTable& table() {
  static const auto t = AsjcTable::standard();
  return t;
}

FieldFrequencies freq(double life, double social, double physical, double health) {
  return FieldFrequencies{{life, social, physical, health}};
}

constexpr int kAgri = 1102;
constexpr int kSocialSci = 3301;
constexpr int kMedicine = 2701;
constexpr int kPsychology = 3202;

}  // namespace

TEST_SUITE("taxonomy") {
  TEST_CASE("standard table partitions 26 subfields as 5 life, 6 social, 10 physical, 5 health") {
    std::array<int, kMajorFieldCount> per_field{};
    for (std::size_t i = 0; i < kSubfieldCount; ++i) ++per_field[index(major_field_of(subfield_at(i)))];
    CHECK(per_field[index(MajorField::kLife)] == 5);
    CHECK(per_field[index(MajorField::kSocial)] == 6);
    CHECK(per_field[index(MajorField::kPhysical)] == 10);
    CHECK(per_field[index(MajorField::kHealth)] == 5);
    CHECK_FALSE(table().lookup(1000));
    CHECK(table().lookup(kMaths) == Subfield::kMathematics);
    CHECK(table().lookup(kChemistry) == Subfield::kChemistry);
    CHECK(table().lookup(kEnergy) == Subfield::kEnergy);
  }

  TEST_CASE("shipped asjc_map.csv equals the built-in table") {
    CHECK(AsjcTable::load(data_dir() / "asjc_map.csv") == table());
  }

  TEST_CASE("table CSV rejects a major field that disagrees with the subfield") {
    std::istringstream in("code,subfield,major_field\n2604,mathematics,health\n");
    CHECK_THROWS_AS(AsjcTable::parse(in), DataError);
  }

  TEST_CASE("names round trip") {
    for (std::size_t i = 0; i < kSubfieldCount; ++i) {
      CHECK(subfield_from_string(to_string(subfield_at(i))) == subfield_at(i));
    }
    for (auto f : kFieldClasses) CHECK(field_class_from_string(to_string(f)) == f);
  }

  TEST_CASE("field frequency examples") {
    auto f = field_frequencies(dossier_of({rec("a", "p1", 2000, "RU", {kMaths}),
                                           rec("a", "p2", 2001, "RU", {kMaths, kChemistry})}),
                               table());
    CHECK(f[MajorField::kPhysical] == 1.0);
    CHECK(f[MajorField::kLife] == 0.0);

    f = field_frequencies(
        dossier_of({rec("a", "p1", 2000, "RU", {kAgri}), rec("a", "p2", 2001, "RU", {kSocialSci})}), table());
    CHECK(f[MajorField::kLife] == 0.5);
    CHECK(f[MajorField::kSocial] == 0.5);

    CHECK_THROWS_AS(field_frequencies(dossier_of({rec("a", "p1", 2000, "RU", {1000})}), table()), NoSubjectData);
    CHECK_THROWS_AS(field_frequencies(dossier_of({rec("a", "p1", 2000, "RU")}), table()), NoSubjectData);
  }

  TEST_CASE("field stats examples") {
    const std::vector<FieldFrequencies> same(3, freq(0.2, 0.3, 0.4, 0.1));
    const auto s = compute_field_stats(same);
    for (double sd : s.stddev) CHECK(sd == doctest::Approx(0.0));

    const std::vector<FieldFrequencies> two{freq(0, 1, 0, 0), freq(1, 0, 0, 0)};
    const auto t = compute_field_stats(two);
    CHECK(t.mean[index(MajorField::kLife)] == doctest::Approx(0.5));
    CHECK(t.stddev[index(MajorField::kLife)] == doctest::Approx(0.5));

    const std::vector<FieldFrequencies> one{freq(0.1, 0.2, 0.3, 0.4)};
    const auto u = compute_field_stats(one);
    CHECK(u.mean[index(MajorField::kHealth)] == doctest::Approx(0.4));
    CHECK(u.stddev[index(MajorField::kHealth)] == 0.0);

    CHECK_THROWS_AS(compute_field_stats(std::vector<FieldFrequencies>{}), std::invalid_argument);
  }

  TEST_CASE("major field classification") {
    FieldStats stats;
    stats.mean = {0.25, 0.25, 0.25, 0.25};
    stats.stddev = {0.1, 0.1, 0.1, 0.1};

    const auto multi = classify_major_field(freq(0.3, 0.2, 0.3, 0.2), stats, 1.0);
    CHECK(multi.field == FieldClass::kMultidisciplinary);

    const auto social = classify_major_field(freq(0.25, 0.6, 0.25, 0.25), stats, 1.0);
    CHECK(social.field == FieldClass::kSocial);
    CHECK(social.max_z == doctest::Approx(3.5));

    const auto tied = classify_major_field(freq(0.5, 0.0, 0.0, 0.5), stats, 1.0);
    CHECK(tied.tie);
    CHECK(tied.field == FieldClass::kLife);
    CHECK(classify_major_field(freq(0.0, 0.5, 0.5, 0.0), stats, 1.0).field == FieldClass::kPhysical);

    stats.stddev[index(MajorField::kHealth)] = 0.0;
    const auto flat = classify_major_field(freq(0.0, 0.0, 0.0, 1.0), stats, 1.0);
    CHECK(flat.z[index(MajorField::kHealth)] == 0.0);
    CHECK(flat.field == FieldClass::kMultidisciplinary);
  }

  TEST_CASE("alpha calibration boundaries") {
    Rng rng(3);
    std::vector<FieldFrequencies> all;
    for (int i = 0; i < 500; ++i) {
      std::array<double, 4> w{};
      for (auto& x : w) x = rng.uniform();
      const double s = std::accumulate(w.begin(), w.end(), 0.0);
      all.push_back(freq(w[0] / s, w[1] / s, w[2] / s, w[3] / s));
    }
    const auto stats = compute_field_stats(all);
    CHECK(multidisciplinary_share(all, stats, calibrate_alpha(all, stats, 0.0)) == 0.0);
    CHECK(multidisciplinary_share(all, stats, calibrate_alpha(all, stats, 1.0)) == 1.0);
    const double alpha = calibrate_alpha(all, stats, 0.1);
    CHECK(multidisciplinary_share(all, stats, alpha) == doctest::Approx(0.1).epsilon(0.01));
    CHECK_THROWS_AS(calibrate_alpha(all, stats, 1.5), std::invalid_argument);

    const std::vector<FieldFrequencies> degenerate(10, freq(0.25, 0.25, 0.25, 0.25));
    const auto flat = compute_field_stats(degenerate);
    CHECK_THROWS_AS(calibrate_alpha(degenerate, flat, 0.5), DataError);
  }

  TEST_CASE("normalized contribution of the worked example") {
    const auto nc = normalized_contribution(dossier_of(worked_example_records()), table());
    CHECK(nc[Subfield::kChemistry] == 2.0 / 5.0);
    CHECK(nc[Subfield::kEnergy] == 1.0 / 5.0);
    CHECK(nc[Subfield::kMathematics] == 2.0 / 5.0);
  }

  TEST_CASE("normalized contribution examples") {
    auto nc = normalized_contribution(dossier_of({rec("a", "p1", 2000, "RU", {kMedicine})}), table());
    CHECK(nc[Subfield::kMedicine] == 1.0);
    nc = normalized_contribution(dossier_of({rec("a", "p1", 2000, "RU", {kMedicine, kPsychology}),
                                             rec("a", "p2", 2001, "RU", {kMedicine, kPsychology})}),
                                 table());
    CHECK(nc[Subfield::kMedicine] == 0.5);
    CHECK(nc[Subfield::kPsychology] == 0.5);
  }

  TEST_CASE("normalized count examples") {
    CHECK(normalized_count(std::vector<DisciplineVector>{}, Subfield::kEnergy) == 0.0);
    DisciplineVector a, b;
    a.nc[index(Subfield::kEnergy)] = 0.4;
    a.nc[index(Subfield::kMathematics)] = 0.6;
    b.nc[index(Subfield::kEnergy)] = 0.6;
    b.nc[index(Subfield::kChemistry)] = 0.4;
    const std::vector<DisciplineVector> v{a, b};
    CHECK(normalized_count(v, Subfield::kEnergy) == doctest::Approx(1.0));
  }
}

TEST_SUITE("taxonomy.properties") {
  AuthorDossier random_dossier(Rng& rng, const std::string& id) {
    std::vector<AuthorshipRecord> rs;
    const int n = 1 + static_cast<int>(rng.index(12));
    for (int i = 0; i < n; ++i) {
      std::vector<int> codes;
      const int k = 1 + static_cast<int>(rng.index(3));
      for (int c = 0; c < k; ++c) {
        const auto s = rng.index(kSubfieldCount);
        codes.push_back(1100 + 100 * static_cast<int>(s) + 1);
      }
      rs.push_back(rec(id, id + "_" + std::to_string(i), 2000 + i, "RU", codes));
    }
    return dossier_of(rs);
  }

  TEST_CASE("contributions sum to one and counts sum to the set size") {
    Rng rng(31);
    std::vector<DisciplineVector> vs;
    for (int i = 0; i < 200; ++i) {
      const auto v = normalized_contribution(random_dossier(rng, "a" + std::to_string(i)), table());
      double sum = 0.0;
      for (double x : v.nc) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      vs.push_back(v);
    }
    double total = 0.0;
    for (std::size_t d = 0; d < kSubfieldCount; ++d) total += normalized_count(vs, subfield_at(d));
    CHECK(total == doctest::Approx(200.0).epsilon(1e-9));
  }

  TEST_CASE("duplicating every record leaves the contribution vector unchanged") {
    Rng rng(32);
    for (int i = 0; i < 100; ++i) {
      const auto d = random_dossier(rng, "a");
      auto rs = d.records;
      for (const auto& r : d.records) {
        auto copy = r;
        copy.pub_id += "_dup";
        rs.push_back(copy);
        rs.push_back(r);
      }
      const auto a = normalized_contribution(d, table());
      const auto b = normalized_contribution(dossier_of(rs), table());
      for (std::size_t s = 0; s < kSubfieldCount; ++s) CHECK(b.nc[s] == doctest::Approx(a.nc[s]));
    }
  }

  TEST_CASE("shifting every researcher's frequencies identically keeps Z and labels") {
    Rng rng(33);
    std::vector<FieldFrequencies> all;
    for (int i = 0; i < 300; ++i) {
      std::array<double, 4> w{};
      for (auto& x : w) x = rng.uniform();
      all.push_back(freq(w[0], w[1], w[2], w[3]));
    }
    auto shifted = all;
    for (auto& f : shifted) {
      for (std::size_t m = 0; m < kMajorFieldCount; ++m) f.share[m] += 0.125 * static_cast<double>(m + 1);
    }
    const auto s0 = compute_field_stats(all);
    const auto s1 = compute_field_stats(shifted);
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto a = classify_major_field(all[i], s0, 0.8);
      const auto b = classify_major_field(shifted[i], s1, 0.8);
      CHECK(a.field == b.field);
      for (std::size_t m = 0; m < kMajorFieldCount; ++m) CHECK(b.z[m] == doctest::Approx(a.z[m]).epsilon(1e-9));
    }
  }

  TEST_CASE("frequencies are shares summing to one") {
    Rng rng(34);
    for (int i = 0; i < 200; ++i) {
      const auto f = field_frequencies(random_dossier(rng, "a"), table());
      CHECK(std::accumulate(f.share.begin(), f.share.end(), 0.0) == doctest::Approx(1.0));
    }
  }
}
