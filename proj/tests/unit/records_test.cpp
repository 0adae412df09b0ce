#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "scholmig/error.hpp"
#include "scholmig/random.hpp"
#include "scholmig/records.hpp"

using namespace scholmig;
using namespace scholmig::testing;

namespace {

ParsedCorpus parse_csv(const std::string& text, ParseOptions options = {}) {
  std::istringstream in(text);
  return parse_corpus(in, InputFormat::kCsv, options);
}

const std::string kHeader = "author_id,pub_id,year,affiliation_text,country,asjc_codes,citation_count\n";

}  // namespace

TEST_SUITE("records") {
  TEST_CASE("well-formed rows parse one record each") {
    const auto parsed = parse_csv(kHeader +
                                  "a,p1,2010,\"Dept. of Physics, MSU\",RU,3100,4\n"
                                  "a,p2,2011,,,,0\n"
                                  "b,p3,2012,ETH Zurich,CH,1605;2604,9\n");
    REQUIRE(parsed.corpus.records.size() == 3);
    CHECK(parsed.report.errors.empty());
    const auto& r = parsed.corpus.records[0];
    CHECK(r.affiliation_text == "Dept. of Physics, MSU");
    CHECK(r.country == cc("RU"));
    CHECK(r.asjc_codes == std::vector<int>{3100});
    CHECK_FALSE(parsed.corpus.records[1].country.known());
    CHECK(parsed.corpus.records[2].asjc_codes == std::vector<int>{1605, 2604});
  }

  TEST_CASE("out-of-range year is rejected into the report") {
    const auto parsed = parse_csv(kHeader + "a,p1,3000,,RU,,0\na,p2,2010,,RU,,0\na,p3,2011,,RU,,0\n");
    CHECK(parsed.corpus.records.size() == 2);
    REQUIRE(parsed.report.errors.size() == 1);
    CHECK(parsed.report.errors[0].line == 2);
    CHECK(parsed.report.errors[0].message.find("3000") != std::string::npos);
  }

  TEST_CASE("malformed fields are reported, not dropped silently") {
    const auto parsed = parse_csv(kHeader +
                                  "a,p1,2010,,RUS,,0\n"
                                  "a,p2,2010,,RU,12345,0\n"
                                  "a,p3,2010,,RU,,-1\n"
                                  "a,p4,2010,,RU,,1\n"
                                  "a,p5,2010,,RU,,1\n"
                                  "a,p6,2010,,RU,,1\n"
                                  "a,p7,2010,,RU,,1\n");
    CHECK(parsed.corpus.records.size() == 4);
    CHECK(parsed.report.errors.size() == 3);
  }

  TEST_CASE("more than half malformed rows aborts with SchemaMismatch") {
    CHECK_THROWS_AS(parse_csv(kHeader + "a,p1,x,,RU,,0\na,p2,y,,RU,,0\na,p3,2010,,RU,,0\n"), SchemaMismatch);
  }

  TEST_CASE("wrong header aborts") {
    CHECK_THROWS_AS(parse_csv("author,pub,year\na,p1,2010\n"), SchemaMismatch);
  }

  TEST_CASE("exact duplicates are removed and counted") {
    const auto parsed = parse_csv(kHeader + "a,p1,2010,MSU,RU,,3\na,p1,2010,MSU,RU,,3\na,p1,2010,MSU,US,,3\n");
    CHECK(parsed.corpus.records.size() == 2);
    CHECK(parsed.report.duplicates_removed == 1);
  }

  TEST_CASE("citation counts must agree within a publication") {
    const auto parsed = parse_csv(kHeader + "a,p1,2010,MSU,RU,,3\nb,p1,2010,MIT,US,,4\nc,p2,2010,,RU,,0\n");
    CHECK(parsed.corpus.records.size() == 2);
    CHECK(parsed.report.errors.size() == 1);
  }

  TEST_CASE("worked example parses to three publications of author x") {
    const auto parsed = parse_csv(worked_example_csv());
    const auto dossiers = group_by_author(parsed.corpus);
    REQUIRE(dossiers.size() == 1);
    CHECK(dossiers[0].author_id == "x");
    CHECK(dossiers[0].publication_count() == 3);
    CHECK(dossiers[0].first_year == 2012);
    CHECK(dossiers[0].last_year == 2015);
  }

  TEST_CASE("JSON lines input matches CSV input") {
    std::ostringstream jl;
    const auto csv = parse_csv(worked_example_csv()).corpus;
    write_corpus_jsonl(csv, jl);
    std::istringstream in(jl.str());
    const auto json = parse_corpus(in, InputFormat::kJsonLines).corpus;
    CHECK(json == csv);
  }

  TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(parse_corpus("/nonexistent/corpus.csv"), IoError);
  }

  TEST_CASE("grouping examples") {
    CHECK(group_by_author(Corpus{}).empty());
    std::vector<AuthorshipRecord> rs;
    const char* authors[] = {"a", "b", "c", "d", "a", "b", "a", "c", "a", "d"};
    for (int i = 0; i < 10; ++i) rs.push_back(rec(authors[i], "p" + std::to_string(i), 2000 + i, "RU"));
    const auto dossiers = group_by_author(corpus_of(rs));
    CHECK(dossiers.size() == 4);
    std::size_t total = 0;
    for (const auto& d : dossiers) total += d.records.size();
    CHECK(total == 10);
    CHECK(dossiers[0].records.size() == 4);
  }
}

TEST_SUITE("records.properties") {
  std::vector<AuthorshipRecord> random_records(Rng& rng, int n) {
    static const char* countries[] = {"RU", "US", "DE", ""};
    std::vector<AuthorshipRecord> out;
    for (int i = 0; i < n; ++i) {
      const auto author = "a" + std::to_string(rng.index(12));
      const auto pub = "p" + std::to_string(i);
      const int year = rng.uniform_int(1990, 2020);
      const auto* country = countries[rng.index(4)];
      std::vector<int> codes;
      const auto k = rng.index(3);
      for (std::uint64_t c = 0; c < k; ++c) codes.push_back(1000 + static_cast<int>(rng.index(3000)));
      const auto cites = static_cast<std::int64_t>(rng.index(50));
      out.push_back(rec(author, pub, year, country, codes, cites, "Inst, \"quoted\" " + std::to_string(i)));
    }
    return out;
  }

  TEST_CASE("CSV round trip reproduces the corpus") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const auto corpus = corpus_of(random_records(rng, 60));
      std::ostringstream out;
      write_corpus_csv(corpus, out);
      std::istringstream in(out.str());
      CHECK(parse_corpus(in, InputFormat::kCsv).corpus == corpus);
    }
  }

  TEST_CASE("dossier sizes sum to the corpus size and grouping ignores row order") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
      auto rs = random_records(rng, 80);
      const auto base = group_by_author(corpus_of(rs));
      std::size_t total = 0;
      for (const auto& d : base) total += d.records.size();
      CHECK(total == rs.size());
      for (std::size_t i = rs.size(); i > 1; --i) std::swap(rs[i - 1], rs[rng.index(i)]);
      const auto shuffled = group_by_author(corpus_of(rs));
      REQUIRE(shuffled.size() == base.size());
      for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(shuffled[i].author_id == base[i].author_id);
        CHECK(shuffled[i].records == base[i].records);
      }
    }
  }
}
