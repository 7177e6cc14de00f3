#include "noiselab/toy_corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string_view>

#include "noiselab/annotation.hpp"
#include "noiselab/random.hpp"

namespace noiselab {
namespace {

constexpr std::size_t kSentencesPerDocument = 8;

const std::vector<std::string_view> kFirstNames = {
    "John",  "Maria", "Peter",  "Anna", "David", "Laura", "Michael",
    "Sarah", "Thomas", "Elena", "Carlos", "Yuki", "Ahmed", "Olga",
    "Jordan", "Paul", "Irene", "Victor", "Nina", "Omar"};
const std::vector<std::string_view> kSurnames = {
    "Smith",  "Garcia", "Muller", "Rossi", "Tanaka", "Novak",   "Kowalski",
    "Silva",  "Dubois", "Jensen", "Petrov", "Haddad", "Kim",    "Larsen",
    "Costa",  "Weber",  "Moreau", "Olsen", "Ivanova", "Brennan"};
const std::vector<std::string_view> kOrgNames = {
    "Acme",   "Globex", "Initech", "Vandelay", "Stark",   "Wayne",
    "Tyrell", "Umbrella", "Cyberdyne", "Soylent", "Hooli", "Massive",
    "Oscorp", "Nakatomi", "Wonka", "Gringotts"};
const std::vector<std::string_view> kOrgSuffixes = {"Corp", "Group", "Bank", "Union",
                                                    "Industries"};
const std::vector<std::string_view> kLocations = {
    "Paris",   "Berlin", "Tokyo",   "Lima",   "Cairo",  "Oslo",    "Madrid",
    "Rome",    "Vienna", "Dublin",  "Lisbon", "Prague", "Nairobi", "Seoul",
    "Toronto", "Sydney", "Boston",  "Denver", "France", "Germany", "Japan",
    "Peru",    "Egypt",  "Norway",  "Jordan", "New York"};
const std::vector<std::string_view> kMisc = {
    "French", "German",  "Japanese", "Italian", "Spanish", "Dutch",   "Olympics",
    "Euro",   "Nobel",   "Grammy",   "Christian", "Marathon", "World Cup", "Oscar",
    "Muslim"};
const std::vector<std::string_view> kDays = {"Monday", "Tuesday", "Wednesday", "Thursday",
                                             "Friday", "Saturday", "Sunday"};
const std::vector<std::string_view> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};
const std::vector<std::string_view> kNumbers = {"3", "5", "10", "12", "40", "two", "three"};

// Slots in braces; every other word is O. No template puts two slots of one
// class next to each other, so spans never merge.
const std::vector<std::string_view> kTemplates = {
    "{PER} said on {DAY} that {ORG} will open an office in {LOC} .",
    "{ORG} shares rose {NUM} percent in {LOC} on {DAY} .",
    "{PER} , chief executive of {ORG} , visited {LOC} in {MONTH} .",
    "The {MISC} team won the match against {LOC} on {DAY} .",
    "{PER} won the {MISC} prize in {MONTH} .",
    "Police in {LOC} said {PER} was arrested after the {MISC} festival .",
    "{ORG} signed a deal with {LOC} officials and {ORG} last week .",
    "{PER} met the president of {ORG} in {LOC} .",
    "{LOC} officials told {ORG} about the {MISC} event .",
    "The {MISC} minister {PER} arrived in {LOC} on {DAY} .",
    "Fans of {ORG} celebrated in {LOC} after the {MISC} game .",
    "{PER} joined {ORG} from a rival in {MONTH} .",
    "In {MONTH} , {PER} told reporters that {LOC} will host the {MISC} .",
    "{ORG} reported a record year in {LOC} .",
    "The talks between {LOC} and {PER} ended on {DAY} .",
    "{PER} played for {LOC} against {ORG} in {MONTH} .",
    "Workers at {ORG} in {LOC} went on strike on {DAY} .",
    "{PER} 's {MISC} award was announced in {MONTH} .",
    "The election in {LOC} was won by {PER} .",
    "{ORG} bought {NUM} million shares of a company in {LOC} .",
    "Prices fell {NUM} percent on {DAY} , the market said .",
    "{PER} will lead the {MISC} delegation to {LOC} .",
};

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

void push_words(std::string_view text, Label label, Sentence& out) {
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    out.tokens.push_back(word);
    out.labels.push_back(label);
  }
}

struct ClassIds {
  Label o, per, org, loc, misc;
};

Sentence make_sentence(std::string_view pattern, const ClassIds& ids, Rng& rng) {
  Sentence s;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::istringstream in{std::string(pattern)};
  std::string slot;
  while (in >> slot) {
    if (slot == "{PER}") {
      const double r = u(rng);
      std::string name;
      if (r < 0.5) {
        name = std::string(pick(kFirstNames, rng)) + " " + std::string(pick(kSurnames, rng));
      } else if (r < 0.75) {
        name = pick(kFirstNames, rng);
      } else {
        name = pick(kSurnames, rng);
      }
      push_words(name, ids.per, s);
    } else if (slot == "{ORG}") {
      std::string name(pick(kOrgNames, rng));
      if (u(rng) < 0.4) name += " " + std::string(pick(kOrgSuffixes, rng));
      push_words(name, ids.org, s);
    } else if (slot == "{LOC}") {
      push_words(pick(kLocations, rng), ids.loc, s);
    } else if (slot == "{MISC}") {
      push_words(pick(kMisc, rng), ids.misc, s);
    } else if (slot == "{DAY}") {
      push_words(pick(kDays, rng), ids.o, s);
    } else if (slot == "{MONTH}") {
      push_words(pick(kMonths, rng), ids.o, s);
    } else if (slot == "{NUM}") {
      push_words(pick(kNumbers, rng), ids.o, s);
    } else {
      push_words(slot, ids.o, s);
    }
  }
  return s;
}

Corpus make_split(std::size_t tokens, const ClassIds& ids, std::uint64_t seed,
                  std::string_view name) {
  Rng rng = substream(seed, name);
  Corpus corpus;
  std::size_t count = 0;
  while (count < tokens) {
    if (corpus.sentences.size() % kSentencesPerDocument == 0) {
      corpus.document_starts.push_back(corpus.sentences.size());
    }
    corpus.sentences.push_back(make_sentence(pick(kTemplates, rng), ids, rng));
    count += corpus.sentences.back().tokens.size();
  }
  return corpus;
}

std::string gazetteer_text() {
  std::ostringstream out;
  out << "# toy gazetteer: partial coverage, no MISC entries\n";
  // Every other first name and every third surname.
  for (std::size_t i = 0; i < kFirstNames.size(); i += 2) out << kFirstNames[i] << "\tPER\n";
  for (std::size_t i = 1; i < kSurnames.size(); i += 3) out << kSurnames[i] << "\tPER\n";
  out << "John Smith\tPER\nMaria Garcia\tPER\n";
  // A blocked weekday listed as a name.
  out << "Friday\tPER\n";
  for (std::size_t i = 0; i < kOrgNames.size(); i += 3) {
    out << kOrgNames[i] << ' ' << kOrgSuffixes[i % kOrgSuffixes.size()] << "\tORG\n";
  }
  out << "Acme\tORG\nHooli\tORG\n";
  for (std::size_t i = 0; i < kLocations.size(); ++i) {
    if (i % 4 != 3) out << kLocations[i] << "\tLOC\n";
  }
  return out.str();
}

std::string blocklist_text() {
  std::string out;
  for (const auto& w : Gazetteer::default_blocklist()) out += w + "\n";
  return out;
}

}  // namespace

ToyCorpus generate_toy_corpus(const ToyCorpusConfig& config, const LabelSet& labels) {
  const ClassIds ids{labels.index("O"), labels.index("PER"), labels.index("ORG"),
                     labels.index("LOC"), labels.index("MISC")};
  ToyCorpus toy;
  toy.train = make_split(config.train_tokens, ids, config.seed, "toy-train");
  toy.dev = make_split(config.dev_tokens, ids, config.seed, "toy-dev");
  toy.test = make_split(config.test_tokens, ids, config.seed, "toy-test");
  toy.gazetteer = gazetteer_text();
  toy.blocklist = blocklist_text();

  std::set<std::string> words;
  for (const Corpus* c : {&toy.train, &toy.dev, &toy.test}) {
    for (const auto& s : c->sentences) words.insert(s.tokens.begin(), s.tokens.end());
  }
  toy.vocabulary.assign(words.begin(), words.end());
  return toy;
}

}  // namespace noiselab
