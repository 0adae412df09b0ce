#include <doctest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "scholmig/geoinfer.hpp"
#include "scholmig/random.hpp"
#include "scholmig/synth.hpp"
#include "scholmig/text.hpp"

using namespace scholmig;
using namespace scholmig::geoinfer;
using namespace scholmig::testing;

namespace {

constexpr int kCity = static_cast<int>(EntryClass::kCity);
constexpr int kCountryName = static_cast<int>(EntryClass::kCountryName);
constexpr int kInstitution = static_cast<int>(EntryClass::kInstitution);

Gazetteer small_gazetteer() {
  Gazetteer g;
  g.add("moscow", cc("RU"), kCity);
  g.add("paris", cc("FR"), kCity);
  g.add("texas", cc("US"), kCity);
  g.add("russia", cc("RU"), kCountryName);
  g.add("new york", cc("US"), kCity);
  g.add("york", cc("GB"), kCity);
  g.add("eth", cc("CH"), kInstitution);
  return g;
}

}  // namespace

TEST_SUITE("geoinfer") {
  TEST_CASE("city token resolves the country") {
    const auto r = infer_country("Lomonosov Moscow State Univ., Moscow", small_gazetteer());
    CHECK(r.country == cc("RU"));
    CHECK(r.confidence > 0.0);
    REQUIRE(r.matched_token);
    CHECK(*r.matched_token == "moscow");
  }

  TEST_CASE("empty text is unknown with zero confidence") {
    const auto r = infer_country("", small_gazetteer());
    CHECK_FALSE(r.country.known());
    CHECK(r.confidence == 0.0);
    CHECK_FALSE(r.matched_token);
  }

  TEST_CASE("equal-priority conflict yields unknown") {
    const auto r = infer_country("Joint lab, Paris and Texas", small_gazetteer());
    CHECK_FALSE(r.country.known());
    CHECK(r.confidence == 0.0);
  }

  TEST_CASE("higher priority wins over a conflicting city") {
    CHECK(infer_country("Paris office, Russia", small_gazetteer()).country == cc("RU"));
  }

  TEST_CASE("longest match consumes multi-word tokens") {
    CHECK(infer_country("Columbia University, New York", small_gazetteer()).country == cc("US"));
    CHECK(infer_country("University of York", small_gazetteer()).country == cc("GB"));
  }

  TEST_CASE("same token at the same priority for two countries is rejected") {
    Gazetteer g;
    g.add("georgia", cc("GE"), kCountryName);
    CHECK_NOTHROW(g.add("georgia", cc("GE"), kCountryName));
    CHECK_THROWS_AS(g.add("georgia", cc("US"), kCountryName), DataError);
    CHECK_NOTHROW(g.add("georgia", cc("US"), kCity));
  }

  TEST_CASE("gazetteer CSV round trip") {
    std::ostringstream out;
    small_gazetteer().write_csv(out);
    std::istringstream in(out.str());
    const auto g = Gazetteer::parse(in);
    CHECK(g.size() == small_gazetteer().size());
    CHECK(infer_country("moscow", g).country == cc("RU"));
  }

  TEST_CASE("shipped gazetteer covers at least sixty countries") {
    std::set<Country> countries;
    for (const auto& e : shipped_gazetteer().entries()) countries.insert(e.country);
    CHECK(countries.size() >= 60);
  }

  TEST_CASE("fill leaves known rows alone") {
    const auto corpus = corpus_of({rec("a", "p1", 2010, "RU", {}, 0, "Paris"), rec("a", "p2", 2011, "DE")});
    const auto gazetteer = small_gazetteer();
    const GazetteerInferrer inferrer(gazetteer);
    const auto [filled, report] = fill_missing_countries(corpus, inferrer);
    CHECK(filled == corpus);
    CHECK(report.unknown_before == 0);
    CHECK(report.filled == 0);
    CHECK(report.unfilled == 0);
  }

  TEST_CASE("fill resolves what it can and keeps the rest unknown") {
    const auto corpus = corpus_of({
        rec("a", "p1", 2010, "RU"),
        rec("a", "p2", 2011, "", {}, 0, "Moscow Institute"),
        rec("a", "p3", 2012, "DE"),
        rec("a", "p4", 2013, "", {}, 0, "ETH"),
        rec("a", "p5", 2014, "", {}, 0, "Nowhere Lab"),
    });
    const auto gazetteer = small_gazetteer();
    const GazetteerInferrer inferrer(gazetteer);
    const auto [filled, report] = fill_missing_countries(corpus, inferrer);
    CHECK(report.unknown_before == 3);
    CHECK(report.filled == 2);
    CHECK(report.unfilled == 1);
    CHECK(filled.records[1].country == cc("RU"));
    CHECK(filled.records[3].country == cc("CH"));
    CHECK_FALSE(filled.records[4].country.known());
  }

  TEST_CASE("evaluate_inference") {
    const auto gazetteer = small_gazetteer();
    const GazetteerInferrer inferrer(gazetteer);
    const std::vector<LabeledAffiliation> all_right{{"Moscow", cc("RU")}, {"Paris", cc("FR")}};
    CHECK(evaluate_inference(all_right, inferrer) == 1.0);
    const std::vector<LabeledAffiliation> half{{"Moscow", cc("RU")}, {"Somewhere", cc("FR")}};
    CHECK(evaluate_inference(half, inferrer) == 0.5);
    const Gazetteer empty;
    const GazetteerInferrer none(empty);
    CHECK(evaluate_inference(all_right, none) == 0.0);
    CHECK_THROWS_AS(evaluate_inference(std::vector<LabeledAffiliation>{}, inferrer), std::invalid_argument);
  }
}

TEST_SUITE("geoinfer.properties") {
  TEST_CASE("inference is deterministic and confidence is zero exactly when unknown") {
    const auto& g = shipped_gazetteer();
    for (const auto& item : synth::labeled_affiliations(g, 300, 5)) {
      const auto a = infer_country(item.text, g);
      const auto b = infer_country(item.text, g);
      CHECK(a.country == b.country);
      CHECK(a.confidence == b.confidence);
      CHECK((a.country.known() == (a.confidence > 0.0)));
      CHECK(a.confidence <= 1.0);
    }
  }

  TEST_CASE("adding agreeing entries never loses a correct match") {
    const auto& base = shipped_gazetteer();
    Rng rng(9);
    for (const auto& item : synth::labeled_affiliations(base, 200, 9)) {
      if (infer_country(item.text, base).country != item.country) continue;
      const auto words = tokenize(item.text);
      REQUIRE_FALSE(words.empty());
      Gazetteer extended = base;
      const auto& word = words[rng.index(words.size())];
      const int priority = 1 + static_cast<int>(rng.index(3));
      try {
        extended.add(word, item.country, priority);
      } catch (const DataError&) {
        continue;  // the word already names another country at that priority
      }
      CHECK(infer_country(item.text, extended).country == item.country);
    }
  }
}
