#include <doctest.h>

#include "fixtures.hpp"
#include "scholmig/analysis.hpp"

using namespace scholmig;
using namespace scholmig::testing;

TEST_SUITE("analysis") {
  TEST_CASE("worked example end to end") {
    const auto result = analyze_corpus(corpus_of(worked_example_records()), taxonomy::AsjcTable::standard(),
                                       AnalysisConfig{});
    REQUIRE(result.author_ids.size() == 1);
    CHECK(result.profiles().at(0).label == mobility::MobilityLabel::kEmigrant);
    CHECK(result.field_classes().size() == 1);
    REQUIRE(result.window);
    CHECK(*result.window == YearWindow{2012, 2015});
    std::size_t labeled = 0;
    for (auto n : result.label_counts) labeled += n;
    CHECK(labeled == 1);
    CHECK(result.fields.without_subjects == 0);
  }

  TEST_CASE("explicit window overrides the active span") {
    AnalysisConfig config;
    config.window = YearWindow{2013, 2014};
    const auto result =
        analyze_corpus(corpus_of(worked_example_records()), taxonomy::AsjcTable::standard(), config);
    REQUIRE_FALSE(result.nmr.empty());
    for (const auto& p : result.nmr) {
      CHECK(p.year >= 2013);
      CHECK(p.year <= 2014);
    }
  }

  TEST_CASE("researchers without subjects stay unclassified") {
    const auto result = analyze_corpus(
        corpus_of({rec("a", "p1", 2000, "RU", {kMaths}), rec("b", "p2", 2001, "RU")}),
        taxonomy::AsjcTable::standard(), AnalysisConfig{});
    CHECK(result.fields.without_subjects == 1);
    const auto fields = result.field_classes();
    CHECK(fields[0].has_value());
    CHECK_FALSE(fields[1].has_value());
  }

  TEST_CASE("empty corpus has no window") {
    const auto result = analyze_corpus(Corpus{}, taxonomy::AsjcTable::standard(), AnalysisConfig{});
    CHECK_FALSE(result.window);
    CHECK(result.nmr.empty());
  }
}
