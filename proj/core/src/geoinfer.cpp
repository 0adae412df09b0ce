#include "scholmig/geoinfer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "scholmig/csv.hpp"
#include "scholmig/error.hpp"
#include "scholmig/text.hpp"

namespace scholmig::geoinfer {

namespace {

double priority_weight(int priority) {
  switch (priority) {
    case 3: return 1.0;
    case 2: return 0.8;
    default: return 0.6;
  }
}

}  // namespace

void Gazetteer::add(std::string_view token, Country country, int priority) {
  if (!country.known()) throw DataError("gazetteer entry '" + std::string(token) + "' has no country");
  if (priority < 1 || priority > 3) {
    throw DataError("gazetteer entry '" + std::string(token) + "' has priority outside 1..3");
  }
  const auto words = tokenize(token);
  if (words.empty()) throw DataError("gazetteer token '" + std::string(token) + "' is empty after normalization");
  std::string key;
  for (const auto& w : words) key += (key.empty() ? "" : " ") + w;

  auto& matches = index_[key];
  for (const auto& m : matches) {
    if (m.priority != priority) continue;
    if (m.country == country) return;
    throw DataError("gazetteer token '" + key + "' maps to both " + m.country.str() + " and " +
                    country.str() + " at priority " + std::to_string(priority));
  }
  matches.push_back({country, priority});
  std::sort(matches.begin(), matches.end(),
            [](const Match& a, const Match& b) { return a.priority > b.priority; });
  entries_.push_back({key, country, priority});
  max_words_ = std::max(max_words_, words.size());
}

Gazetteer Gazetteer::parse(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f) || f.size() != 3 || f[0] != "token" || f[1] != "country" || f[2] != "priority") {
    throw SchemaMismatch("gazetteer header must be token,country,priority");
  }
  Gazetteer g;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    const auto where = "gazetteer line " + std::to_string(reader.line()) + ": ";
    if (f.size() != 3) throw DataError(where + "expected 3 fields");
    auto country = Country::parse(f[1]);
    if (!country || !country->known()) throw DataError(where + "bad country '" + f[1] + "'");
    int priority = 0;
    auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), priority);
    if (ec != std::errc() || p != f[2].data() + f[2].size()) throw DataError(where + "bad priority");
    try {
      g.add(f[0], *country, priority);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open gazetteer " + path.string());
  return parse(in);
}

void Gazetteer::write_csv(std::ostream& out) const {
  CsvWriter w(out);
  w.row("token", "country", "priority");
  for (const auto& e : entries_) w.row(e.token, e.country.str(), std::to_string(e.priority));
}

std::span<const Gazetteer::Match> Gazetteer::lookup(std::string_view normalized_token) const {
  auto it = index_.find(std::string(normalized_token));
  if (it == index_.end()) return {};
  return it->second;
}

InferenceResult infer_country(std::string_view affiliation_text, const Gazetteer& gazetteer) {
  InferenceResult result;
  if (gazetteer.empty()) return result;
  const auto words = tokenize(affiliation_text);

  struct Hit {
    std::string token;
    Gazetteer::Match match;
  };
  std::vector<Hit> hits;
  std::string gram;
  for (std::size_t i = 0; i < words.size();) {
    std::size_t taken = 0;
    const std::size_t longest = std::min(gazetteer.max_words(), words.size() - i);
    for (std::size_t n = longest; n >= 1 && taken == 0; --n) {
      gram = words[i];
      for (std::size_t k = 1; k < n; ++k) gram += " " + words[i + k];
      auto matches = gazetteer.lookup(gram);
      if (matches.empty()) continue;
      // Several priorities for one token: only the strongest reading counts.
      hits.push_back({gram, matches.front()});
      taken = n;
    }
    i += taken ? taken : 1;
  }
  if (hits.empty()) return result;

  int best = 0;
  for (const auto& h : hits) best = std::max(best, h.match.priority);
  const Hit* winner = nullptr;
  for (const auto& h : hits) {
    if (h.match.priority != best) continue;
    if (winner && winner->match.country != h.match.country) return result;  // tie: UNKNOWN
    if (!winner) winner = &h;
  }
  const auto agreeing = std::count_if(hits.begin(), hits.end(), [&](const Hit& h) {
    return h.match.country == winner->match.country;
  });
  result.country = winner->match.country;
  result.confidence =
      priority_weight(best) * static_cast<double>(agreeing) / static_cast<double>(hits.size());
  result.matched_token = winner->token;
  return result;
}

std::pair<Corpus, FillReport> fill_missing_countries(const Corpus& corpus, const CountryInferrer& inferrer) {
  Corpus out = corpus;
  FillReport report;
  for (auto& r : out.records) {
    if (r.country.known()) continue;
    ++report.unknown_before;
    const auto inferred = inferrer.infer(r.affiliation_text);
    if (inferred.country.known()) {
      r.country = inferred.country;
      ++report.filled;
    } else {
      ++report.unfilled;
    }
  }
  return {std::move(out), report};
}

double evaluate_inference(std::span<const LabeledAffiliation> labeled, const CountryInferrer& inferrer) {
  if (labeled.empty()) throw std::invalid_argument("evaluate_inference: labeled set is empty");
  std::size_t hits = 0;
  for (const auto& item : labeled) {
    const auto r = inferrer.infer(item.text);
    if (r.country.known() && r.country == item.country) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labeled.size());
}

}  // namespace scholmig::geoinfer
