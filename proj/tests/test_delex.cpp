#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "mrkit/delex.hpp"
#include "support/fixtures.hpp"

using namespace mrkit;

namespace {

DomainConfig reminder_config() {
  static DomainConfig cfg =
      load_config(std::string(MRKIT_CONFIG_DIR) + "/reminder.json");
  return cfg;
}

DomainConfig weather_config() {
  static DomainConfig cfg =
      load_config(std::string(MRKIT_CONFIG_DIR) + "/weather.json");
  return cfg;
}

Example reminder_example(bool with_reference = true) {
  Example e;
  e.id = "rem-1";
  e.domain = "reminder";
  e.query = fixtures::reminder_query;
  e.scenario = fixtures::reminder_scenario;
  if (with_reference) e.reference = fixtures::reminder_reference;
  return e;
}

const std::map<std::string, std::string> epoch1_values = {
    {"todo__a", "go shopping"},
    {"amount__gr1", "8"},
    {"time__a", "10 AM"},
    {"amount_remaining__eq1", "1"}};

}  // namespace

TEST_CASE("uniqueness suffixes run a..z then aa, ab, ...") {
  CHECK(uniqueness_suffix(0) == "a");
  CHECK(uniqueness_suffix(1) == "b");
  CHECK(uniqueness_suffix(25) == "z");
  CHECK(uniqueness_suffix(26) == "aa");
  CHECK(uniqueness_suffix(27) == "ab");
  CHECK(uniqueness_suffix(51) == "az");
  CHECK(uniqueness_suffix(52) == "ba");
  CHECK(uniqueness_suffix(701) == "zz");
  CHECK(uniqueness_suffix(702) == "aaa");
}

TEST_CASE("the reminder example delexicalizes to its known form") {
  DelexExample dex = delexicalize(reminder_example(false), reminder_config());
  CHECK(serialize(dex.delex_scenario) == fixtures::reminder_fb_text);
  CHECK(dex.delex_query == fixtures::reminder_delex_query);
  CHECK(dex.bindings.size() == 4);
  CHECK(dex.unmatched_reference_leaves.empty());
}

TEST_CASE("repeated values share a placeholder, distinct values get new ones") {
  Example e = reminder_example(false);
  DelexExample same = delexicalize(e, reminder_config());
  std::size_t todo_bindings = 0;
  for (const Binding& b : same.bindings)
    if (b.arg_name == "todo") ++todo_bindings;
  CHECK(todo_bindings == 1);

  e.scenario =
      "INFORM_1[ todo[ buy milk ] ] INFORM_2[ todo[ buy eggs ] ]";
  e.query = "any reminders ?";
  DelexExample two = delexicalize(e, reminder_config());
  REQUIRE(two.bindings.size() == 2);
  CHECK(two.bindings[0].placeholder == "todo__a");
  CHECK(two.bindings[0].original_value == "buy milk");
  CHECK(two.bindings[1].placeholder == "todo__b");
  CHECK(two.bindings[1].original_value == "buy eggs");
}

TEST_CASE("suffix order follows scenario pre-order, not value order") {
  Example e = reminder_example(false);
  e.scenario = "INFORM_1[ todo[ zebra ] ] INFORM_2[ todo[ apple ] ]";
  e.query = "ok ?";
  DelexExample dex = delexicalize(e, reminder_config());
  REQUIRE(dex.bindings.size() == 2);
  CHECK(dex.bindings[0].placeholder == "todo__a");
  CHECK(dex.bindings[0].original_value == "zebra");
  CHECK(dex.bindings[1].placeholder == "todo__b");
  CHECK(dex.bindings[1].original_value == "apple");
}

TEST_CASE("an all-retain example is left untouched with empty bindings") {
  Example e;
  e.id = "w-1";
  e.domain = "weather";
  e.query = "will it rain ?";
  e.scenario = "INFORM_1[ condition[ rain ] date_time[ weekday[ Sunday ] ] ]";
  DelexExample dex = delexicalize(e, weather_config());
  CHECK(dex.bindings.empty());
  CHECK(serialize(dex.delex_scenario) == e.scenario);
  CHECK(dex.delex_query == e.query);
}

TEST_CASE("reference leaves matching scenario bindings are replaced") {
  DelexExample dex = delexicalize(reminder_example(true), reminder_config());
  REQUIRE(dex.delex_reference.has_value());
  const std::string delex_ref = serialize(*dex.delex_reference);
  CHECK(delex_ref ==
        "INFORM[ Yes, there are amount[ amount__gr1 ] reminders . ] "
        "INFORM[ The first two are, todo[ todo__a ] at "
        "date_time[ time[ time__a ] ] ] "
        "and "
        "INFORM[ date_time[ colloquial[ tomorrow ] ] . ] "
        "INFORM[ There's amount_remaining[ amount_remaining__eq1 ] "
        "other reminder. ]");
  CHECK(dex.unmatched_reference_leaves.empty());
}

TEST_CASE("inflected reference values are left alone and flagged") {
  Example e = reminder_example(false);
  e.scenario = "INFORM_1[ todo[ buy milk ] ]";
  e.reference = "INFORM[ I will remind you to todo[ bought milk ] ]";
  e.query = "ok ?";
  DelexExample dex = delexicalize(e, reminder_config());
  REQUIRE(dex.unmatched_reference_leaves.size() == 1);
  CHECK(serialize(*dex.delex_reference) == *e.reference);
  REQUIRE(dex.bindings.size() == 1);
  for (const Occurrence& occ : dex.bindings[0].occurrences)
    CHECK(occ.field != FieldKind::Reference);
}

TEST_CASE("query replacement is word-boundary anchored") {
  Example e = reminder_example(false);
  e.scenario = "INFORM_1[ todo[ run ] ]";
  e.query = "was I running when I planned to run ?";
  DelexExample dex = delexicalize(e, reminder_config());
  CHECK(dex.delex_query == "was I running when I planned to todo__a ?");
}

TEST_CASE("query replacement is case-insensitive and restores the original") {
  Example e = reminder_example(false);
  e.scenario = "INFORM_1[ todo[ buy milk ] ]";
  e.query = "Remind me: BUY MILK today ?";
  DelexExample dex = delexicalize(e, reminder_config());
  CHECK(dex.delex_query == "Remind me: todo__a today ?");
  CHECK(restore_original(dex).query == e.query);
}

TEST_CASE("longer values win overlapping query matches") {
  Example e = reminder_example(false);
  e.scenario = "INFORM_1[ todo[ buy milk today ] date[ milk ] ]";
  e.query = "remind me to buy milk today ?";
  DelexExample dex = delexicalize(e, reminder_config());
  CHECK(dex.delex_query == "remind me to todo__a ?");
}

TEST_CASE("numeric values are not hunted in the query") {
  Example e = reminder_example(false);
  e.scenario = "INFORM_1[ amount[ 3 ] ]";
  e.query = "do I have 3 reminders ?";
  DelexExample dex = delexicalize(e, reminder_config());
  CHECK(dex.delex_query == e.query);
}

TEST_CASE("relexicalizing with the original values is the identity") {
  DelexExample dex = delexicalize(reminder_example(true), reminder_config());
  std::map<std::string, std::string> originals;
  for (const Binding& b : dex.bindings)
    originals[b.placeholder] = b.original_value;
  Example back = relexicalize(dex, originals);
  CHECK(back == reminder_example(true));
  CHECK(restore_original(dex) == reminder_example(true));
}

TEST_CASE("substituting fresh values reproduces the augmented row") {
  DelexExample dex = delexicalize(reminder_example(false), reminder_config());
  Example out = relexicalize(dex, epoch1_values);
  CHECK(out.query == fixtures::reminder_aug1_query);
  CHECK(out.scenario == fixtures::reminder_aug1_scenario);
}

TEST_CASE("fresh values flow into the reference as well") {
  DelexExample dex = delexicalize(reminder_example(true), reminder_config());
  Example out = relexicalize(dex, epoch1_values);
  CHECK(*out.reference ==
        "INFORM[ Yes, there are amount[ 8 ] reminders . ] "
        "INFORM[ The first two are, todo[ go shopping ] at "
        "date_time[ time[ 10 AM ] ] ] "
        "and "
        "INFORM[ date_time[ colloquial[ tomorrow ] ] . ] "
        "INFORM[ There's amount_remaining[ 1 ] other reminder. ]");
}

TEST_CASE("a missing placeholder value is an error") {
  DelexExample dex = delexicalize(reminder_example(false), reminder_config());
  std::map<std::string, std::string> values = epoch1_values;
  values.erase("time__a");
  CHECK_THROWS_AS(relexicalize(dex, values), MissingBinding);
}

TEST_CASE("restore_original survives grouped placeholders with mixed values") {
  Example e = reminder_example(false);
  e.scenario = "INFORM_1[ amount[ 3 ] ] INFORM_2[ amount[ 8 ] ]";
  e.query = "how many ?";
  DelexExample dex = delexicalize(e, reminder_config());
  std::size_t amount_bindings = 0;
  for (const Binding& b : dex.bindings)
    if (b.placeholder == "amount__gr1") {
      ++amount_bindings;
      CHECK(b.occurrences.size() == 2);
    }
  CHECK(amount_bindings == 1);
  CHECK(restore_original(dex) == e);
}
