#include <gtest/gtest.h>

#include <fcntl.h>
#include <signal.h>

#include <thread>

#include "support.hpp"

using namespace gapforge;
using gftest::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gapforge::Error thrown";
  return ErrorCode::kInvalidArgument;
}

const PromptLibrary& prompts() {
  static const auto lib = PromptLibrary::load(gftest::data_dir() / "prompts");
  return lib;
}

Article fixture_article(const std::string& lang, const std::string& title) {
  FixtureWikiSource source(gftest::fixtures() / "wiki");
  const auto page = source.fetch_page(lang, title);
  return assemble_article(lang, page.title, page.revision_id, page.canonical_url, page.plain_text,
                          gftest::shipped_abbreviations()[lang]);
}

// Golden builds are shared across tests; the pipeline runs once per topic.
const BuildResult& built(const std::string& topic) {
  static std::map<std::string, BuildResult> results;
  static TempDir work;
  if (!results.count(topic))
    results.emplace(topic, gftest::mock_build(topic, work.path(), topic == "Oolong" ? std::vector<std::string>{"fr"}
                                                                                     : std::vector<std::string>{"fr", "ru", "zh"}));
  return results.at(topic);
}

PresentedFact sample_fact(const std::string& lang, const std::string& id) {
  PresentedFact f;
  f.id = id;
  f.language_code = lang;
  f.text_en = "[" + lang + "] x";
  f.text_src = "x";
  f.source_title = "X";
  f.source_link_url = "https://" + lang + ".wikipedia.org/wiki/X#:~:text=x";
  f.anchor_sentence_en = "X.";
  return f;
}

std::vector<PresentedFact> sample_facts(const std::string& lang, int n) {
  std::vector<PresentedFact> out;
  for (int i = 0; i < n; ++i) out.push_back(sample_fact(lang, lang + "-" + std::to_string(i)));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- links

TEST(Link, PlainSentence) {
  EXPECT_EQ(build_highlight_link("https://fr.wikipedia.org/wiki/X", "Bonjour le monde"),
            "https://fr.wikipedia.org/wiki/X#:~:text=Bonjour%20le%20monde");
}

// Expected URL from an independent percent-encoder (RFC 3986 unreserved set
// minus '-', uppercase hex), frozen here.
TEST(Link, ChineseFixtureSentenceMatchesOracle) {
  const auto a = fixture_article("zh", "北京烤鸭");
  const auto& sentence = a.paragraphs.at(0).sentences.at(0).text;
  ASSERT_EQ(sentence, "北京烤鸭是北京著名的传统菜肴，以色泽红艳、肉质细嫩、味道醇厚而闻名。");
  EXPECT_EQ(build_highlight_link(a.canonical_url, sentence),
            "https://zh.wikipedia.org/wiki/%E5%8C%97%E4%BA%AC%E7%83%A4%E9%B8%AD#:~:text="
            "%E5%8C%97%E4%BA%AC%E7%83%A4%E9%B8%AD%E6%98%AF%E5%8C%97%E4%BA%AC%E8%91%97%E5%90%8D%E7%9A%84"
            "%E4%BC%A0%E7%BB%9F%E8%8F%9C%E8%82%B4%EF%BC%8C%E4%BB%A5%E8%89%B2%E6%B3%BD%E7%BA%A2%E8%89%B3"
            "%E3%80%81%E8%82%89%E8%B4%A8%E7%BB%86%E5%AB%A9%E3%80%81%E5%91%B3%E9%81%93%E9%86%87%E5%8E%9A"
            "%E8%80%8C%E9%97%BB%E5%90%8D%E3%80%82");
}

TEST(Link, DirectiveDelimitersAreEscaped) {
  EXPECT_EQ(encode_text_directive("Gâteau, café & thé - 1.5"),
            "G%C3%A2teau%2C%20caf%C3%A9%20%26%20th%C3%A9%20%2D%201.5");
  EXPECT_EQ(encode_text_directive("a_b.c~d"), "a_b.c~d");
}

TEST(Link, LongSentenceUsesWordBoundaryPrefix) {
  std::string s;
  while (s.size() <= kFullFragmentLimit) s += "roasted duck skin ";
  s += "end.";
  const auto link = build_highlight_link("https://en.wikipedia.org/wiki/Peking_duck", s);
  const auto start = text_fragment_of(link);
  ASSERT_TRUE(start);
  EXPECT_LE(start->size(), kPrefixFragmentBytes);
  EXPECT_EQ(s.rfind(*start, 0), 0u);
  EXPECT_TRUE(s[start->size()] == ' ');
  EXPECT_NE(start->back(), ' ');
}

TEST(Link, LongUnspacedSentenceCutsOnCodePoint) {
  std::string s;
  while (s.size() <= kFullFragmentLimit) s += "北京烤鸭";
  const auto start = *text_fragment_of(build_highlight_link("https://zh.wikipedia.org/wiki/X", s));
  EXPECT_EQ(start.size(), 150u);
  EXPECT_EQ(s.rfind(start, 0), 0u);
}

TEST(Link, ExistingFragmentAndErrors) {
  EXPECT_EQ(build_highlight_link("https://fr.wikipedia.org/wiki/X#Histoire", "a b"),
            "https://fr.wikipedia.org/wiki/X#Histoire:~:text=a%20b");
  EXPECT_EQ(code_of([] { build_highlight_link("/wiki/X", "a"); }), ErrorCode::kInvalidUrl);
  EXPECT_EQ(code_of([] { build_highlight_link("ftp://fr.wikipedia.org/X", "a"); }), ErrorCode::kInvalidUrl);
  EXPECT_EQ(code_of([] { build_highlight_link("https://fr.wikipedia.org/wiki/X", "  "); }), ErrorCode::kInvalidArgument);
}

// ---------------------------------------------------------------- enrich

TEST(Translate, MockMarkerAndErrors) {
  MockLlmProvider mock;
  EXPECT_EQ(translate("Peking duck is roasted.", "en", mock, prompts()), "[en] Peking duck is roasted.");
  EXPECT_EQ(translate("Le canard laqué de Pékin est une spécialité culinaire de la capitale chinoise, célèbre pour sa peau brillante et croustillante.",
                      "fr", mock, prompts()),
            "[fr] Le canard laqué de Pékin est une spécialité culinaire de la capitale chinoise, célèbre pour sa peau brillante et croustillante.");
  EXPECT_EQ(code_of([&] { translate("", "fr", mock, prompts()); }), ErrorCode::kInvalidArgument);
  gftest::ScriptedProvider blank({"", " \n "});
  EXPECT_EQ(code_of([&] { translate("Bonjour.", "fr", blank, prompts()); }), ErrorCode::kFormatError);
  EXPECT_EQ(blank.requests.size(), 2u);
  gftest::ScriptedProvider late({"", "Hello."});
  EXPECT_EQ(translate("Bonjour.", "fr", late, prompts()), "Hello.");
}

TEST(Anchor, CixiFactAnchorsToTheMingSentence) {
  const auto* fr = built("Peking duck").dataset.facts_for("fr");
  ASSERT_TRUE(fr);
  const auto cixi = std::find_if(fr->begin(), fr->end(), [](const PresentedFact& f) {
    return f.text_src.find("Cixi") != std::string::npos;
  });
  ASSERT_NE(cixi, fr->end());
  EXPECT_EQ(cixi->anchor_sentence_en,
            "The Peking roast duck that came to be associated with the term was fully developed during the later Ming dynasty.");
}

TEST(Anchor, SingleSentenceParagraphEmptyNeighborsAndStaleIndex) {
  const auto english = fixture_article("en", "Peking duck");
  MockLlmProvider mock;
  DecomposeContext dctx{mock, prompts(), english.title, {}};
  const auto facts = decompose_article(english, dctx);
  MockEmbeddingProvider emb;

  AtomicFact target;
  target.id = "fr-x";
  target.text = "Un fait.";
  const Paragraph* single = nullptr;
  for (const auto& p : english.paragraphs)
    if (p.sentences.size() == 1) single = &p;
  Article one = english;
  if (!single) {
    one.paragraphs.push_back({static_cast<int>(one.paragraphs.size()), 0, "Only one.", {{0, "Only one.", {0, 9}}}});
    single = &one.paragraphs.back();
  }
  std::vector<AtomicFact> with_single = facts;
  AtomicFact lone;
  lone.id = "en-lone";
  lone.language_code = "en";
  lone.text = single->sentences[0].text;
  lone.paragraph_index = single->index;
  with_single.push_back(lone);
  GapEntry g{target, {target.id, {{"en-lone", 0.5}}}};
  EXPECT_EQ(anchor_for(g, one, with_single, emb), (Anchor{single->sentences[0].text, single->index}));

  GapEntry none{target, {target.id, {}}};
  EXPECT_EQ(anchor_for(none, english, facts, emb), (Anchor{english.paragraphs[0].sentences[0].text, 0}));

  AtomicFact stale = lone;
  stale.id = "en-stale";
  stale.paragraph_index = 999;
  with_single.push_back(stale);
  GapEntry bad{target, {target.id, {{"en-stale", 0.5}}}};
  EXPECT_EQ(code_of([&] { anchor_for(bad, english, with_single, emb); }), ErrorCode::kMissingParagraph);
}

TEST(Enrich, InjeraSelectionHas28PresentedFacts) {
  const auto& ds = built("Injera").dataset;
  EXPECT_EQ(ds.fact_count(), 28u);
  EXPECT_EQ(ds.facts_for("fr")->size(), 10u);
  EXPECT_EQ(ds.facts_for("ru")->size(), 10u);
  EXPECT_EQ(ds.facts_for("zh")->size(), 8u);
}

TEST(Enrich, EmptySelectionIsEmpty) {
  const auto english = fixture_article("en", "Oolong");
  MockLlmProvider mock;
  MockEmbeddingProvider emb;
  EnrichContext ctx{mock, emb, prompts()};
  const std::vector<AtomicFact> facts;
  const std::map<std::string, Article> targets;
  EXPECT_TRUE(enrich_selection({}, {english, facts, targets}, ctx).empty());
}

// Every shipped fact links into its pinned source article and anchors on a
// verbatim English sentence.
TEST(Enrich, PresentedFactInvariantsOnAllFixtures) {
  for (const std::string topic : {"Peking duck", "Injera", "Oolong"}) {
    const auto& r = built(topic);
    const auto english = fixture_article("en", topic);
    for (const auto& group : r.dataset.facts) {
      const auto source = fixture_article(group.language_code, r.dataset.provenance.at("title." + group.language_code));
      std::string source_text;
      for (const auto& p : source.paragraphs) source_text += p.text + "\n";
      for (const auto& f : group.facts) {
        EXPECT_FALSE(f.text_en.empty());
        EXPECT_TRUE(url::parse(f.source_link_url).has_value());
        const auto fragment = text_fragment_of(f.source_link_url);
        ASSERT_TRUE(fragment) << f.source_link_url;
        EXPECT_NE(source_text.find(*fragment), std::string::npos) << *fragment;
        ASSERT_GE(f.anchor_paragraph_index, 0);
        ASSERT_LT(static_cast<std::size_t>(f.anchor_paragraph_index), english.paragraphs.size());
        const auto& para = english.paragraphs[static_cast<std::size_t>(f.anchor_paragraph_index)];
        const bool verbatim = std::any_of(para.sentences.begin(), para.sentences.end(),
                                          [&](const Sentence& s) { return s.text == f.anchor_sentence_en; });
        EXPECT_TRUE(verbatim) << f.anchor_sentence_en;
        EXPECT_EQ(f.language_code, group.language_code);
      }
    }
  }
}

// ---------------------------------------------------------------- datastore

TEST(Merge, ThirtyFactsInConfiguredOrder) {
  DatasetMetadata meta;
  meta.generated_at = gftest::kFakeNow;
  const auto ds = merge_language_outputs("Peking duck", "1",
                                         {{"zh", "Peking duck", "1", sample_facts("zh", 10)},
                                          {"fr", "Peking duck", "1", sample_facts("fr", 10)},
                                          {"ru", "Peking duck", "1", sample_facts("ru", 10)}},
                                         meta);
  EXPECT_EQ(ds.fact_count(), 30u);
  EXPECT_EQ(ds.languages, (std::vector<std::string>{"fr", "ru", "zh"}));
  EXPECT_EQ(validate_dataset(ds), "");
}

TEST(Merge, EmptyLanguageStaysAndErrorsAreTyped) {
  DatasetMetadata meta;
  const auto ds = merge_language_outputs("T", "1", {{"fr", "T", "1", {}}, {"ru", "T", "1", sample_facts("ru", 2)}}, meta);
  EXPECT_EQ(ds.languages, (std::vector<std::string>{"fr", "ru"}));
  ASSERT_TRUE(ds.facts_for("fr"));
  EXPECT_TRUE(ds.facts_for("fr")->empty());

  auto dup = sample_facts("ru", 1);
  dup[0].id = "fr-0";
  EXPECT_EQ(code_of([&] { merge_language_outputs("T", "1", {{"fr", "T", "1", sample_facts("fr", 1)}, {"ru", "T", "1", dup}}, meta); }),
            ErrorCode::kDuplicateFactId);
  EXPECT_EQ(code_of([&] { merge_language_outputs("T", "1", {{"fr", "T", "2", {}}}, meta); }), ErrorCode::kRevisionMismatch);
  EXPECT_EQ(code_of([&] { merge_language_outputs("T", "1", {{"fr", "U", "1", {}}}, meta); }), ErrorCode::kTopicMismatch);
  EXPECT_EQ(code_of([&] { merge_language_outputs("T", "1", {{"fr", "T", "1", sample_facts("fr", 11)}}, meta); }),
            ErrorCode::kSchemaError);
}

TEST(DatasetFile, NamingRoundTripAndCanonicalBytes) {
  TempDir tmp;
  EXPECT_EQ(dataset_file_name("Peking duck"), "Peking_duck.json");
  for (const char* name : {"Peking_duck.json", "Injera.json", "Oolong.json"}) {
    const auto golden_path = gftest::golden_dir() / name;
    const auto ds = read_dataset(golden_path);
    const auto written = write_dataset(ds, tmp.path());
    EXPECT_EQ(written.filename(), name);
    EXPECT_EQ(read_dataset(written), ds);
    EXPECT_EQ(gftest::slurp(written), gftest::slurp(golden_path));
  }
}

TEST(DatasetFile, SchemaViolationsAreRejected) {
  const auto golden = nlohmann::json::parse(gftest::slurp(gftest::golden_dir() / "Peking_duck.json"));
  auto expect_schema_error = [&](const std::function<void(nlohmann::json&)>& tamper, const char* what) {
    auto j = golden;
    tamper(j);
    EXPECT_EQ(code_of([&] { parse_dataset(j.dump()); }), ErrorCode::kSchemaError) << what;
  };
  expect_schema_error([](auto& j) { j.erase("facts"); }, "missing facts");
  expect_schema_error([](auto& j) { j["schema_version"] = 2; }, "future version");
  expect_schema_error([](auto& j) { j["languages"].push_back("de"); }, "language without facts");
  expect_schema_error([](auto& j) { j["facts"]["fr"][0]["language_code"] = "ru"; }, "wrong language");
  expect_schema_error([](auto& j) { j["facts"]["fr"].push_back(j["facts"]["fr"][0]); }, "over cap");
  expect_schema_error([](auto& j) { j["facts"]["fr"][0]["text_en"] = ""; }, "empty translation");
  expect_schema_error([](auto& j) { j["facts"]["fr"][0]["source_link_url"] = "not a url"; }, "bad url");
  expect_schema_error([](auto& j) { j["facts"]["zh"][0]["id"] = j["facts"]["fr"][0]["id"]; }, "duplicate id");
  EXPECT_EQ(code_of([] { parse_dataset("{not json"); }), ErrorCode::kSchemaError);
  EXPECT_EQ(code_of([] { read_dataset("/nonexistent/x.json"); }), ErrorCode::kIoError);
}

// ---------------------------------------------------------------- server

namespace {

class ServerTest : public ::testing::Test {
 protected:
  void start(const std::filesystem::path& dir) {
    server_ = std::make_unique<DatasetServer>(DatasetCatalog::load(dir, [this](const std::string& m) { warnings_.push_back(m); }));
    port_ = server_->start_background("127.0.0.1", 0);
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    if (server_) server_->stop();
  }

  std::unique_ptr<DatasetServer> server_;
  std::unique_ptr<httplib::Client> client_;
  std::vector<std::string> warnings_;
  int port_ = 0;
};

}  // namespace

TEST_F(ServerTest, ServesGoldenDatasetsByteForByte) {
  TempDir tmp;
  for (const auto& e : std::filesystem::directory_iterator(gftest::golden_dir()))
    std::filesystem::copy(e.path(), tmp / e.path().filename().string());
  gftest::spit(tmp / "broken.json", "{\"schema_version\": 1");
  start(tmp.path());
  EXPECT_EQ(warnings_.size(), 1u);

  const auto topics = client_->Get("/api/topics");
  ASSERT_TRUE(topics);
  EXPECT_EQ(topics->status, 200);
  EXPECT_EQ(nlohmann::json::parse(topics->body), nlohmann::json::parse(R"(["Injera","Oolong","Peking duck"])"));
  EXPECT_EQ(topics->get_header_value("Access-Control-Allow-Origin"), "*");

  const auto duck = client_->Get("/api/datasets/Peking_duck");
  ASSERT_TRUE(duck);
  EXPECT_EQ(duck->status, 200);
  EXPECT_EQ(duck->body, gftest::slurp(tmp / "Peking_duck.json"));
  EXPECT_EQ(parse_dataset(duck->body).fact_count(), 30u);
  EXPECT_EQ(client_->Get("/api/datasets/Peking%20duck")->body, duck->body);

  const auto nope = client_->Get("/api/datasets/Nope");
  ASSERT_TRUE(nope);
  EXPECT_EQ(nope->status, 404);
  EXPECT_EQ(client_->Options("/api/topics")->status, 204);
}

TEST_F(ServerTest, EmptyDirectoryHasNoTopics) {
  TempDir tmp;
  start(tmp.path());
  const auto topics = client_->Get("/api/topics");
  ASSERT_TRUE(topics);
  EXPECT_EQ(topics->status, 200);
  EXPECT_EQ(topics->body, "[]");
}

TEST_F(ServerTest, ConcurrentReadsAgree) {
  start(gftest::golden_dir());
  std::vector<std::string> bodies(8);
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < bodies.size(); ++i)
      threads.emplace_back([&, i] {
        httplib::Client c("127.0.0.1", port_);
        if (auto r = c.Get("/api/datasets/Injera")) bodies[i] = r->body;
      });
  }
  for (const auto& b : bodies) EXPECT_EQ(b, bodies[0]);
  EXPECT_FALSE(bodies[0].empty());
}

TEST(Server, PortInUseIsBindError) {
  DatasetServer a(DatasetCatalog::load(gftest::golden_dir()));
  const int port = a.start_background("127.0.0.1", 0);
  DatasetServer b(DatasetCatalog::load(gftest::golden_dir()));
  EXPECT_EQ(code_of([&] { b.bind("127.0.0.1", port); }), ErrorCode::kBindError);
  EXPECT_EQ(code_of([&] { b.bind("127.0.0.1", 70000); }), ErrorCode::kBindError);
  a.stop();
}

// ---------------------------------------------------------------- config

TEST(Config, DefaultsAndValidation) {
  PipelineConfig cfg;
  EXPECT_EQ(cfg.k, 3);
  EXPECT_EQ(cfg.cap, 10);
  EXPECT_EQ(cfg.target_langs, (std::vector<std::string>{"fr", "ru", "zh"}));
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.k = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kConfigError);
  bad = cfg;
  bad.target_langs = {"fr", "en"};
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kConfigError);
  bad = cfg;
  bad.cap = -1;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kConfigError);
}

TEST(Config, FileThenEnvOverrides) {
  TempDir tmp;
  gftest::spit(tmp / "gapforge.conf", "# comment\ncap = 5\nk=2\nllm_model = file-model\ntarget_langs = ru, zh\n");
  PipelineConfig cfg;
  apply_config_file(cfg, tmp / "gapforge.conf");
  EXPECT_EQ(cfg.cap, 5);
  EXPECT_EQ(cfg.target_langs, (std::vector<std::string>{"ru", "zh"}));
  apply_env(cfg, [](const char* name) -> std::optional<std::string> {
    if (std::string(name) == "GAPFORGE_LLM_MODEL") return "env-model";
    if (std::string(name) == "GAPFORGE_FAKE_NOW") return "2030-01-01T00:00:00Z";
    return std::nullopt;
  });
  EXPECT_EQ(cfg.llm.model, "env-model");
  EXPECT_EQ(cfg.generated_at, "2030-01-01T00:00:00Z");
  fill_provider_defaults(cfg);
  EXPECT_EQ(cfg.translate.model, "env-model");
  gftest::spit(tmp / "bad.conf", "colour = blue\n");
  EXPECT_EQ(code_of([&] { apply_config_file(cfg, tmp / "bad.conf"); }), ErrorCode::kConfigError);
  gftest::spit(tmp / "bad2.conf", "cap = ten\n");
  EXPECT_EQ(code_of([&] { apply_config_file(cfg, tmp / "bad2.conf"); }), ErrorCode::kConfigError);
}

// ---------------------------------------------------------------- pipeline + CLI

TEST(Pipeline, AllEditionsMissingGivesEmptyDatasetWithWarning) {
  TempDir tmp;
  const auto r = gftest::mock_build("Oolong", tmp.path(), {"ru", "zh"});
  EXPECT_TRUE(r.dataset.languages.empty());
  EXPECT_EQ(r.dataset.fact_count(), 0u);
  EXPECT_EQ(r.warnings.size(), 2u);
}

TEST(Pipeline, CapZeroGivesZeroFacts) {
  TempDir tmp;
  auto cfg = gftest::mock_config(tmp.path());
  cfg.cap = 0;
  Runtime rt(cfg);
  const auto r = build_topic("Peking duck", cfg, rt.services());
  EXPECT_EQ(r.dataset.fact_count(), 0u);
  EXPECT_EQ(r.dataset.languages.size(), 3u);
}

TEST(Pipeline, StageFailureNamesTheStage) {
  TempDir tmp;
  auto cfg = gftest::mock_config(tmp.path());
  Runtime rt(cfg);
  try {
    build_topic("No such dish", cfg, rt.services());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    EXPECT_NE(std::string(e.what()).find("stage corpus"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, RebuildFromWarmCacheIsIdentical) {
  TempDir tmp;
  const auto first = gftest::mock_build("Injera", tmp.path());
  const auto bytes = gftest::slurp(first.path);
  const auto second = gftest::mock_build("Injera", tmp.path());
  EXPECT_EQ(gftest::slurp(second.path), bytes);
  EXPECT_EQ(bytes, gftest::slurp(gftest::golden_dir() / "Injera.json"));
}

TEST(Cli, MockBuildMatchesGoldenAndInspectSummarizes) {
  TempDir tmp;
  const auto dirs = "--cache-dir '" + (tmp / "cache").string() + "' --output-dir '" + (tmp / "out").string() + "'";
  auto r = gftest::run_cli("build --topic Oolong --langs fr --mock " + dirs, tmp.path());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("fr: 7 gaps of 7 facts, 7 selected"), std::string::npos) << r.out;
  EXPECT_EQ(gftest::slurp(tmp / "out/Oolong.json"), gftest::slurp(gftest::golden_dir() / "Oolong.json"));

  r = gftest::run_cli("inspect '" + (gftest::golden_dir() / "Injera.json").string() + "'", tmp.path());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("fr 10 / ru 10 / zh 8"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  gftest::spit(tmp / "corrupt.json", "{\"schema_version\": 1, \"topic\": \"X\"}");
  EXPECT_EQ(gftest::run_cli("inspect '" + (tmp / "corrupt.json").string() + "'", tmp.path()).exit_code, 4);
  EXPECT_EQ(gftest::run_cli("inspect '" + (tmp / "missing.json").string() + "'", tmp.path()).exit_code, 4);
  EXPECT_EQ(gftest::run_cli("build --topic Oolong --mock --bogus", tmp.path()).exit_code, 2);
  EXPECT_EQ(gftest::run_cli("build --mock", tmp.path()).exit_code, 2);
  EXPECT_EQ(gftest::run_cli("build --topic Oolong --mock --k 0 --cache-dir '" + (tmp / "c").string() + "'", tmp.path()).exit_code, 2);
  EXPECT_EQ(gftest::run_cli("serve --datasets '" + tmp.path().string() + "' --port 70000", tmp.path()).exit_code, 4);
  const auto no_llm = gftest::run_cli("build --topic Oolong --cache-dir '" + (tmp / "c").string() + "'", tmp.path(),
                                      "GAPFORGE_LLM_URL= GAPFORGE_LLM_MODEL=");
  EXPECT_EQ(no_llm.exit_code, 2) << no_llm.out;
}

TEST(Cli, FlagsBeatEnvBeatFile) {
  TempDir tmp;
  gftest::spit(tmp / "c.conf", "cap = 1\ncache_dir = " + (tmp / "file-cache").string() + "\noutput_dir = " + (tmp / "file-out").string() + "\n");
  const auto r = gftest::run_cli("build --topic Injera --mock --config '" + (tmp / "c.conf").string() + "' --cap 2",
                                 tmp.path(), std::string("GAPFORGE_FAKE_NOW=") + gftest::kFakeNow +
                                                 " GAPFORGE_CACHE_DIR='" + (tmp / "env-cache").string() + "'");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_TRUE(std::filesystem::exists(tmp / "env-cache/en/Injera"));
  EXPECT_FALSE(std::filesystem::exists(tmp / "file-cache"));
  EXPECT_EQ(read_dataset(tmp / "file-out/Injera.json").fact_count(), 6u);
}

TEST(Cli, ServeAnswersTopicsUntilSignalled) {
  TempDir tmp;
  int out_pipe[2];
  ASSERT_EQ(pipe(out_pipe), 0);
  const pid_t pid = fork();
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    close(out_pipe[0]);
    execl(GAPFORGE_CLI_PATH, "gapforge", "serve", "--datasets", gftest::golden_dir().c_str(), "--port", "0",
          static_cast<char*>(nullptr));
    _exit(127);
  }
  close(out_pipe[1]);
  std::string line;
  char c;
  while (read(out_pipe[0], &c, 1) == 1 && c != '\n') line += c;
  close(out_pipe[0]);
  const auto colon = line.rfind(':');
  ASSERT_NE(colon, std::string::npos) << line;
  const int port = std::stoi(line.substr(colon + 1));
  httplib::Client client("127.0.0.1", port);
  const auto topics = client.Get("/api/topics");
  ASSERT_TRUE(topics);
  EXPECT_NE(topics->body.find("Peking duck"), std::string::npos);
  const auto duck = client.Get("/api/datasets/Peking_duck");
  ASSERT_TRUE(duck);
  EXPECT_EQ(duck->body, gftest::slurp(gftest::golden_dir() / "Peking_duck.json"));
  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}
