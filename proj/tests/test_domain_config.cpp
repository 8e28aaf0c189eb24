#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "mrkit/domain_config.hpp"

using namespace mrkit;

static std::string config_path(const char* name) {
  return std::string(MRKIT_CONFIG_DIR) + "/" + name;
}

TEST_CASE("shipped reminder config carries the expected rules") {
  DomainConfig cfg = load_config(config_path("reminder.json"));
  CHECK(cfg.name == "reminder");
  CHECK(cfg.rule_for("todo").kind == ArgRuleKind::Delex);
  CHECK(cfg.rule_for("time").kind == ArgRuleKind::Delex);
  CHECK(cfg.rule_for("colloquial").kind == ArgRuleKind::Retain);
  CHECK(cfg.rule_for("amount").kind == ArgRuleKind::NumericGroup);
  CHECK(cfg.rule_for("amount_remaining").kind == ArgRuleKind::NumericGroup);
  CHECK(cfg.vocab.is_act("INFORM"));
  CHECK(cfg.vocab.is_relation("CONTRAST"));
  CHECK(cfg.mb_value_retaining.count("colloquial") == 1);
}

TEST_CASE("all shipped configs load") {
  for (const char* name :
       {"weather.json", "reminder.json", "time.json", "alarm.json"}) {
    DomainConfig cfg = load_config(config_path(name));
    CHECK_FALSE(cfg.name.empty());
    CHECK_FALSE(cfg.vocab.act_labels.empty());
  }
}

TEST_CASE("rule_for falls back to the default rule") {
  DomainConfig cfg = load_config(config_path("reminder.json"));
  CHECK(cfg.rule_for("never_seen_before").kind == ArgRuleKind::Delex);
}

TEST_CASE("a label in both relation and act sets is rejected") {
  nlohmann::json j = {{"name", "broken"},
                      {"relation_labels", {"CONTRAST"}},
                      {"act_labels", {"INFORM", "CONTRAST"}}};
  CHECK_THROWS_AS(config_from_json(j), ConflictingLabel);
}

TEST_CASE("schema violations are reported with the offending field") {
  nlohmann::json base = {{"name", "d"},
                         {"relation_labels", nlohmann::json::array()},
                         {"act_labels", {"INFORM"}}};

  SECTION("missing name") {
    nlohmann::json j = base;
    j.erase("name");
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
  }
  SECTION("unknown rule kind") {
    nlohmann::json j = base;
    j["rules"] = {{"todo", {{"kind", "shout"}}}};
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
  }
  SECTION("reversed int_range") {
    nlohmann::json j = base;
    j["value_pools"] = {{"amount", {{{"int_range", {5, 2}}}}}};
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
  }
  SECTION("empty pool") {
    nlohmann::json j = base;
    j["value_pools"] = {{"todo", nlohmann::json::array()}};
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
  }
  SECTION("mb retention of a delexicalized argument") {
    nlohmann::json j = base;
    j["rules"] = {{"todo", {{"kind", "delex"}}}};
    j["mb_value_retaining"] = {"todo"};
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
  }
}

TEST_CASE("configs round trip through emission") {
  for (const char* name :
       {"weather.json", "reminder.json", "time.json", "alarm.json"}) {
    DomainConfig cfg = load_config(config_path(name));
    DomainConfig again = config_from_json(config_to_json(cfg));
    CHECK(cfg == again);
    CHECK(config_digest(cfg) == config_digest(again));
  }
}

TEST_CASE("digest changes when the config changes") {
  DomainConfig a = load_config(config_path("reminder.json"));
  DomainConfig b = a;
  b.rules["todo"].kind = ArgRuleKind::Retain;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("numeric grouping splits singular, plural and non-numeric") {
  CHECK(numeric_group_of("1") == "eq1");
  CHECK(numeric_group_of("2") == "gr1");
  CHECK(numeric_group_of("20") == "gr1");
  CHECK(numeric_group_of("0") == "other");
  CHECK(numeric_group_of("") == "other");
  CHECK(numeric_group_of("-3") == "other");
  CHECK(numeric_group_of("3.5") == "other");
  CHECK(numeric_group_of("tomorrow") == "other");
}

TEST_CASE("value pools enumerate literals then ranges") {
  ValuePool pool;
  pool.literals = {"noon", "dawn"};
  pool.ranges = {{1, 3}, {10, 10}};
  REQUIRE(pool.size() == 6);
  CHECK(pool.value_at(0) == "noon");
  CHECK(pool.value_at(1) == "dawn");
  CHECK(pool.value_at(2) == "1");
  CHECK(pool.value_at(4) == "3");
  CHECK(pool.value_at(5) == "10");
}

TEST_CASE("group restriction clips ranges and filters literals") {
  ValuePool pool;
  pool.literals = {"1", "7", "many"};
  pool.ranges = {{1, 5}};

  ValuePool eq1 = pool.restricted_to_group("eq1");
  CHECK(eq1.size() == 2);  // literal "1" and range [1,1]
  for (std::uint64_t i = 0; i < eq1.size(); ++i)
    CHECK(numeric_group_of(eq1.value_at(i)) == "eq1");

  ValuePool gr1 = pool.restricted_to_group("gr1");
  CHECK(gr1.size() == 5);  // "7" and [2,5]
  for (std::uint64_t i = 0; i < gr1.size(); ++i)
    CHECK(numeric_group_of(gr1.value_at(i)) == "gr1");

  ValuePool other = pool.restricted_to_group("other");
  CHECK(other.size() == 1);
  CHECK(other.value_at(0) == "many");
}

TEST_CASE("pool draws are uniform over the combined size") {
  ValuePool pool;
  pool.literals = {"x"};
  pool.ranges = {{1, 3}};
  SplitMix64 rng(5);
  std::set<std::string> seen;
  for (int i = 0; i < 400; ++i) seen.insert(pool.draw(rng));
  CHECK(seen == std::set<std::string>{"x", "1", "2", "3"});
}
