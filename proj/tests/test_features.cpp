#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "laso/edt/features.hpp"
#include "laso/edt/problem.hpp"

using namespace laso;
using namespace laso::edt;

namespace {

using mt = mention_type;

document tagged_doc(const std::vector<std::pair<std::string, std::string>>& words) {
  document d;
  d.id = "t";
  for (const auto& [w, p] : words) d.tokens.push_back({w, p, ""});
  return d;
}

prefix_view view(std::vector<prior_mention> ms) {
  prefix_view v;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i].chain >= v.chains.size()) v.chains.resize(ms[i].chain + 1);
    v.chains[ms[i].chain].push_back(i);
  }
  v.mentions = std::move(ms);
  return v;
}

label per(mt m = mt::nam) { return {0, -1, m}; }
label org(mt m = mt::nam) { return {1, -1, m}; }

// Every resource kind populated, tagged and chunked tokens: each class can fire.
struct rich_fixture {
  resource_bundle res;
  document doc;
  rich_fixture() {
    res.add_gazetteer("country", {"russia", "england"});
    res.add_knowledge_pair("bill clinton", "president");
    res.add_cluster("clinton", "c17");
    res.add_cluster("president", "c17");
    res.add_collocation("bill", "clinton");
    res.add_gender_number("clinton", {gender::male, number::singular});
    res.add_coref_pattern({{"said"}, true, 1.0});
    res.add_pleonastic("[it] is|was raining");
    res.add_hypernym_entry("president", {"president.n.01"}, {"leader.n.01"});
    res.add_hypernym_entry("clinton", {"clinton.n.01"}, {"leader.n.01"});
    res.add_hypernym_entry("said", {"say.v.01"}, {"communicate.v.01"});
    const std::vector<std::array<const char*, 3>> t{
        {"Bill", "NNP", "B-NP"},   {"Clinton", "NNP", "I-NP"}, {"said", "VBD", "O"},
        {"he", "PRP", "B-NP"},     {"visited", "VBD", "O"},    {"Russia", "NNP", "B-NP"},
        {".", ".", "O"},           {"The", "DT", "B-NP"},      {"president", "NN", "I-NP"},
        {"said", "VBD", "O"},      {"it", "PRP", "B-NP"},      {"was", "VBD", "O"},
        {"raining", "VBG", "O"},   {"in", "IN", "O"},          {"England", "NNP", "B-NP"},
        {".", ".", "O"},           {"Clinton", "NNP", "B-NP"}};
    doc.id = "rich";
    for (const auto& [w, p, c] : t) doc.tokens.push_back({w, p, c});
    doc.sentence_ends = {7, 16, 17};
    doc.mentions = {{0, 2, "PER", "", mt::nam, "a"},  {3, 4, "PER", "", mt::pro, "a"},
                    {5, 6, "GPE", "", mt::nam, "r"},  {7, 9, "PER", "", mt::nom, "a"},
                    {14, 15, "GPE", "", mt::nam, "e"}, {16, 17, "PER", "", mt::nam, "a"}};
    validate_document(doc);
  }
};

// Every base name interned while expanding the gold path of `doc`.
std::set<std::string> names_fired(const rich_fixture& f, class_set classes) {
  model_spec spec;
  spec.labels = fixtures::types_of({"PER", "GPE"});
  spec.classes = classes;
  edt_model model(spec, f.res);
  auto gold = make_gold(f.doc, spec.labels, spec.max_length);
  search_space space;
  edt_problem p(model, f.doc, space, &gold);
  weight_vector w;
  for (const auto& n : p.gold_path()) {
    if (n->parent) p.step_features(*n, w);
    for (const auto& c : p.successors(n, w)) p.step_features(*c, w);
  }
  std::set<std::string> out;
  for (feature_id i = 0; i < model.registry.size(); ++i) out.insert(model.registry.name(i));
  return out;
}

bool any_with_prefix(const std::set<std::string>& names, std::string_view prefix) {
  const std::string p = std::string(prefix) + "|";
  return std::any_of(names.begin(), names.end(), [&](const std::string& n) { return n.starts_with(p); });
}

}  // namespace

TEST(Lexical, BillClinton) {
  auto doc = fixtures::clinton();
  auto fs = extract_lexical(doc, {0, 2});
  EXPECT_TRUE(contains_feature(fs, "lex|len=2"));
  EXPECT_TRUE(contains_feature(fs, "lex|w=bill"));
  EXPECT_TRUE(contains_feature(fs, "lex|w=clinton"));
  EXPECT_TRUE(contains_feature(fs, "lex|bg=bill_clinton"));
  EXPECT_TRUE(contains_feature(fs, "lex|shape=Xx_Xx"));
  EXPECT_TRUE(contains_feature(fs, "lex|head=clinton"));
  EXPECT_TRUE(contains_feature(fs, "lex|bikel=firstWord"));
  EXPECT_TRUE(contains_feature(fs, "lex|bikel=initCap"));
  EXPECT_FALSE(contains_feature(fs, "lex|person=3"));
}

TEST(Lexical, PronounPerson) {
  auto doc = fixtures::clinton();
  EXPECT_TRUE(contains_feature(extract_lexical(doc, {13, 14}), "lex|person=3"));
}

TEST(Syntactic, NeedsTags) {
  EXPECT_TRUE(extract_syntactic(fixtures::clinton(), {0, 2}).empty());
  auto doc = tagged_doc({{"Bill", "NNP"}, {"Clinton", "NNP"}});
  auto fs = extract_syntactic(doc, {0, 2});
  EXPECT_TRUE(contains_feature(fs, "syn|pbg=NNP_NNP"));
  EXPECT_TRUE(contains_feature(fs, "syn|hpos=NNP"));
}

TEST(Pattern, Pleonastic) {
  resource_bundle res;
  res.add_pleonastic("[it] is|was raining|snowing");
  auto doc = fixtures::make_doc("p", {"It", "is", "raining", "."});
  EXPECT_TRUE(contains_feature(extract_pattern(doc, {0, 1}, res), "pat|pleonastic"));
  auto other = fixtures::make_doc("q", {"It", "is", "red", "."});
  EXPECT_FALSE(contains_feature(extract_pattern(other, {0, 1}, res), "pat|pleonastic"));
}

TEST(Pattern, ShippedPleonasticTemplates) {
  resource_bundle res;
  res.load_pleonastic(std::string(EDT_DATA_DIR) + "/pleonastic.txt");
  EXPECT_EQ(res.pleonastic_patterns().size(), 8u);
  auto fires = [&](std::vector<std::string> words) {
    auto doc = fixtures::make_doc("p", words);
    return contains_feature(extract_pattern(doc, {0, 1}, res), "pat|pleonastic");
  };
  EXPECT_TRUE(fires({"It", "is", "raining", "."}));
  EXPECT_TRUE(fires({"It", "seems", "to", "be", "the", "case", "that"}));
  EXPECT_TRUE(fires({"It", "appears", "that", "he", "left"}));
  EXPECT_TRUE(fires({"It", "is", "clear", "that", "he", "left"}));
  EXPECT_TRUE(fires({"It", "was", "hard", "to", "say"}));
  EXPECT_TRUE(fires({"That", "is", "why", "we", "left"}));
  EXPECT_FALSE(fires({"It", "is", "red", "."}));
  EXPECT_FALSE(fires({"It", "left", "early", "."}));
  EXPECT_FALSE(fires({"He", "is", "raining", "."}));
}

TEST(Pattern, IntermediateSaid) {
  resource_bundle res;
  res.add_coref_pattern({{"said"}, true, 1.0});
  res.add_coref_pattern({{"met"}, false, 1.0});
  auto doc = fixtures::make_doc("s", {"Smith", "said", "he", "met", "Jones"});
  EXPECT_TRUE(contains_feature(pair_pattern(doc, {2, 3}, {0, 1}, res), "pat|ip+=said"));
  EXPECT_TRUE(contains_feature(pair_pattern(doc, {4, 5}, {2, 3}, res), "pat|ip-=met"));
  EXPECT_TRUE(pair_pattern(doc, {4, 5}, {0, 1}, res).empty());
}

TEST(Pattern, Possessive) {
  resource_bundle res;
  auto doc = fixtures::make_doc("s", {"the", "president", "'s", "speech"});
  EXPECT_TRUE(contains_feature(extract_pattern(doc, {3, 4}, res), "pat|possessor=president"));
  EXPECT_TRUE(contains_feature(extract_pattern(doc, {1, 2}, res), "pat|possessed=speech"));
  EXPECT_TRUE(contains_feature(pair_pattern(doc, {3, 4}, {1, 2}, res), "pat|posspair"));
}

TEST(Count, FirstMention) {
  auto doc = fixtures::clinton();
  auto fs = extract_count(doc, prefix_view{}, {0, 2}, std::nullopt);
  EXPECT_TRUE(contains_feature(fs, "cnt|ents=1"));
  EXPECT_TRUE(contains_feature(fs, "cnt|ments=1"));
  EXPECT_DOUBLE_EQ(feature_value(fs, "cnt|epm"), 1.0);
}

TEST(Count, EntitiesPerMention) {
  auto doc = fixtures::clinton();
  auto v = view({{{0, 2}, per(), 0}, {{7, 9}, org(), 1}, {{10, 12}, per(mt::nom), 0}});
  auto fs = extract_count(doc, v, {13, 14}, 0);
  EXPECT_DOUBLE_EQ(feature_value(fs, "cnt|epm"), 0.5);
  EXPECT_TRUE(contains_feature(fs, "cnt|epm_dec=5"));
  EXPECT_TRUE(contains_feature(fs, "cnt|csize=3"));
  EXPECT_TRUE(contains_feature(fs, "cnt|isent=0"));
  EXPECT_DOUBLE_EQ(feature_value(fs, "cnt|imen_r"), 1.0);
  EXPECT_DOUBLE_EQ(feature_value(fs, "cnt|epw"), 2.0 / 14.0);
}

TEST(Count, DecayedDensity) {
  const std::vector<std::size_t> chain{0, 2};
  EXPECT_DOUBLE_EQ(decayed_density(chain, 3), 5.0 / 7.0);
  EXPECT_THROW(decayed_density(chain, 0), contract_violation);
}

TEST(Count, DensitiesOverChainsSumToOne) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t mentions = 1 + rng() % 12;
    std::vector<std::vector<std::size_t>> chains;
    for (std::size_t m = 0; m < mentions; ++m) {
      const std::size_t c = rng() % (chains.size() + 1);
      if (c == chains.size()) chains.emplace_back();
      chains[c].push_back(m);
    }
    double total = 0.0;
    for (const auto& c : chains) total += decayed_density(c, mentions);
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(RealValued, DecileIndicator) {
  feature_list fs;
  emit_real(fs, "x", 0.55);
  emit_real(fs, "y", 1.0);
  emit_real(fs, "z", 0.0);
  EXPECT_TRUE(contains_feature(fs, "x_dec=5"));
  EXPECT_TRUE(contains_feature(fs, "y_dec=9"));
  EXPECT_TRUE(contains_feature(fs, "z_dec=0"));
}

TEST(Semantic, SynsetsAndHypernyms) {
  resource_bundle res;
  res.add_hypernym_entry("senate", {"senate.n.01", "senate.n.02", "senate.n.03"}, {"legislature.n.01"});
  auto doc = fixtures::clinton();
  auto fs = extract_semantic(doc, {7, 9}, res);
  EXPECT_EQ(fs.size(), 3u);
  EXPECT_TRUE(contains_feature(fs, "sem|hyp=legislature.n.01"));
}

TEST(Semantic, PartOfAndDistance) {
  resource_bundle res;
  res.add_hypernym_entry("wheel", {"wheel.n.01"}, {"part.n.01"}, {"car"});
  res.add_hypernym_entry("car", {"car.n.01"}, {"part.n.01"});
  auto doc = fixtures::make_doc("s", {"the", "car", "and", "wheel"});
  auto fs = pair_semantic(doc, {3, 4}, {1, 2}, res);
  EXPECT_TRUE(contains_feature(fs, "sem|partof"));
  // wheel - wheel.n.01 - part.n.01 - car.n.01 - car
  EXPECT_TRUE(contains_feature(fs, "sem|dist=4"));
}

TEST(Knowledge, EitherOrder) {
  resource_bundle res;
  res.add_knowledge_pair("bill clinton", "president");
  auto doc = fixtures::clinton();
  EXPECT_TRUE(contains_feature(extract_knowledge(doc, {10, 12}, {0, 2}, res), "kno|pair"));
  EXPECT_TRUE(contains_feature(extract_knowledge(doc, {0, 2}, {10, 12}, res), "kno|pair"));
  EXPECT_TRUE(extract_knowledge(doc, {7, 9}, {0, 2}, res).empty());
}

TEST(ClassBased, ClusterAndCollocation) {
  resource_bundle res;
  res.add_cluster("clinton", "c17");
  res.add_collocation("bill", "clinton");
  auto doc = fixtures::clinton();
  auto whole = extract_class(doc, {0, 2}, res);
  EXPECT_TRUE(contains_feature(whole, "cls|c=c17"));
  EXPECT_TRUE(contains_feature(whole, "cls|mwe"));
  EXPECT_FALSE(contains_feature(whole, "cls|mwe_split"));
  EXPECT_TRUE(contains_feature(extract_class(doc, {1, 2}, res), "cls|mwe_split"));
}

TEST(List, SameList) {
  resource_bundle res;
  res.add_gazetteer("country", {"Russia", "England"});
  auto doc = fixtures::make_doc("l", {"Russia", "and", "England", "and", "Russia", ",", "the", "country"});
  EXPECT_TRUE(contains_feature(pair_list(doc, {2, 3}, {0, 1}, res), "lst|same=country"));
  EXPECT_FALSE(contains_feature(pair_list(doc, {4, 5}, {0, 1}, res), "lst|same=country"));
  EXPECT_TRUE(contains_feature(pair_list(doc, {6, 8}, {4, 5}, res), "lst|headlist"));
  EXPECT_TRUE(contains_feature(extract_list(doc, {0, 1}, res), "lst|in=country"));
}

TEST(Inference, GroupIsPlural) {
  resource_bundle res;
  res.add_gender_number("group", {gender::unknown, number::plural});
  auto doc = fixtures::make_doc("i", {"the", "group", "said", "it", "would", "and", "they", "did"});
  EXPECT_TRUE(contains_feature(extract_inference(doc, {0, 2}, res), "inf|number=plural"));
  auto mis = pair_inference(doc, {3, 4}, {0, 2}, res);
  EXPECT_TRUE(contains_feature(mis, "inf|nmis"));
  EXPECT_FALSE(contains_feature(mis, "inf|gmis"));
  EXPECT_TRUE(contains_feature(pair_inference(doc, {6, 7}, {0, 2}, res), "inf|nmatch"));
}

TEST(History, EarlierLabelsOfTheSameWord) {
  inventory inv;
  auto doc = fixtures::make_doc("h", {"Arafat", "met", "Arafat", "aides", "and", "Arafat"});
  auto v = view({{{0, 1}, per(), 0}});
  EXPECT_EQ(extract_history(doc, {5, 6}, v, inv), (feature_list{{"his|prev=PER/NAM"}}));
  auto both = view({{{0, 1}, per(), 0}, {{2, 3}, org(), 1}});
  auto fs = extract_history(doc, {5, 6}, both, inv);
  EXPECT_TRUE(contains_feature(fs, "his|prev=PER/NAM"));
  EXPECT_TRUE(contains_feature(fs, "his|prev=ORG/NAM"));
  EXPECT_TRUE(extract_history(doc, {1, 2}, both, inv).empty());
}

TEST(StringMatch, Basics) {
  auto doc = fixtures::make_doc("s", {"Israel", "and", "the", "Israeli", "army", "and", "Israel"});
  EXPECT_TRUE(contains_feature(extract_string_match(doc, {6, 7}, {0, 1}), "str|exact"));
  EXPECT_TRUE(contains_feature(extract_string_match(doc, {3, 5}, {0, 1}), "str|nat"));
  EXPECT_DOUBLE_EQ(feature_value(extract_string_match(doc, {6, 7}, {0, 1}), "str|jaro"), 1.0);
}

TEST(DecisionNames, SimpleAndCoref) {
  inventory inv;
  EXPECT_EQ(simple_decision_names(inv, mention_decision::nae()), std::vector<std::string>{"ent=no"});
  EXPECT_TRUE(coref_decision_names(inv, mention_decision::nae(), std::nullopt).empty());
  const mention_decision d{2, true, per(), new_chain};
  EXPECT_EQ(simple_decision_names(inv, d),
            (std::vector<std::string>{"ent=yes", "type=PER", "mtype=NAM", "pair=PER+NAM"}));
  EXPECT_EQ(coref_decision_names(inv, d, std::nullopt),
            (std::vector<std::string>{"chain=start", "stype=PER", "smt=NAM"}));
  EXPECT_EQ(boundary_decision_name(inv, d), "lab=PER/NAM");
  const mention_decision pro{1, true, per(mt::pro), 0};
  auto cont = coref_decision_names(inv, pro, chain_summary{per(), mt::nom});
  EXPECT_NE(std::find(cont.begin(), cont.end(), "cpair=NOM>PRO"), cont.end());
  EXPECT_NE(std::find(cont.begin(), cont.end(), "ctt=PER>PER"), cont.end());
  for (const auto& n : cont) EXPECT_TRUE(is_coref_decision_name(n)) << n;
  EXPECT_FALSE(is_coref_decision_name("type=PER"));
}

TEST(Locality, DetectionIgnoresFarTokens) {
  rich_fixture f;
  const token_span s{7, 9};
  const auto base = detection_features(f.doc, s, f.res, class_set::all());
  const auto bnd = boundary_span_features(f.doc, s);
  for (std::size_t i = 0; i < f.doc.size(); ++i) {
    if (i + 3 >= s.start && i <= s.end + 2) continue;
    auto d = f.doc;
    d.tokens[i] = {"zzz", "FW", "O"};
    EXPECT_EQ(detection_features(d, s, f.res, class_set::all()), base) << i;
    EXPECT_EQ(boundary_span_features(d, s), bnd) << i;
  }
}

TEST(Ablation, RemovedClassNeverFires) {
  rich_fixture f;
  const auto all = names_fired(f, class_set::all());
  for (auto c : all_feature_classes) EXPECT_TRUE(any_with_prefix(all, class_prefix(c))) << class_name(c);
  for (auto c : all_feature_classes) {
    auto without = names_fired(f, class_set::all().remove(c));
    EXPECT_FALSE(any_with_prefix(without, class_prefix(c))) << class_name(c);
  }
}

TEST(ClassSet, Members) {
  auto s = class_set::none().add(feature_class::lexical).add(feature_class::count);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.members(), (std::vector<feature_class>{feature_class::lexical, feature_class::count}));
  EXPECT_EQ(class_set::all().size(), feature_class_count);
  for (auto c : all_feature_classes) EXPECT_EQ(parse_feature_class(class_name(c)), c);
}
