#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "mrkit/augment.hpp"
#include "mrkit/bucketing.hpp"
#include "support/fixtures.hpp"
#include "support/synth.hpp"

using namespace mrkit;
using testsupport::SynthGen;

namespace {

const DomainConfig& reminder_config() {
  static DomainConfig cfg =
      load_config(std::string(MRKIT_CONFIG_DIR) + "/reminder.json");
  return cfg;
}

const DomainConfig& weather_config() {
  static DomainConfig cfg =
      load_config(std::string(MRKIT_CONFIG_DIR) + "/weather.json");
  return cfg;
}

Example reminder_example() {
  Example e;
  e.id = "rem-1";
  e.domain = "reminder";
  e.query = fixtures::reminder_query;
  e.scenario = fixtures::reminder_scenario;
  e.reference = fixtures::reminder_reference;
  return e;
}

Example weather_example() {
  Example e;
  e.id = "wea-1";
  e.domain = "weather";
  e.query = fixtures::weather_query;
  e.scenario = fixtures::weather_scenario;
  e.reference = fixtures::weather_reference;
  return e;
}

void collect_values(const MrNode& node, const std::string& label,
                    std::vector<std::string>& out) {
  if (node.kind == NodeKind::Argument && node.label == label &&
      is_value_leaf(node)) {
    out.push_back(leaf_value(node));
    return;
  }
  for (const MrNode& child : node.children) collect_values(child, label, out);
}

std::vector<std::string> values_of(const std::string& text,
                                   const std::string& label) {
  std::vector<std::string> out;
  for (const MrNode& root : parse(text, reminder_config().vocab).roots)
    collect_values(root, label, out);
  return out;
}

}  // namespace

TEST_CASE("one draw keeps shape, consistency, and retained leaves") {
  DelexExample dex = delexicalize(reminder_example(), reminder_config());
  SplitMix64 rng(2024);
  Example out = augment_once(dex, reminder_config(), rng);

  auto todos = values_of(out.scenario, "todo");
  REQUIRE(todos.size() == 2);
  CHECK(todos[0] == todos[1]);
  CHECK(out.query == "Do I have any reminder to " + todos[0] + " ?");

  CHECK(values_of(out.scenario, "colloquial") ==
        std::vector<std::string>{"tomorrow"});

  auto amounts = values_of(out.scenario, "amount");
  REQUIRE(amounts.size() == 1);
  const int amount = std::stoi(amounts[0]);
  CHECK(amount >= 2);
  CHECK(amount <= 20);

  CHECK(values_of(out.scenario, "amount_remaining") ==
        std::vector<std::string>{"1"});

  // The reference carries the same drawn values.
  REQUIRE(out.reference.has_value());
  CHECK(values_of(*out.reference, "todo") ==
        std::vector<std::string>{todos[0]});
  CHECK(values_of(*out.reference, "amount") == amounts);

  CHECK(fb_hash(out, reminder_config()) ==
        fb_hash(reminder_example(), reminder_config()));
}

TEST_CASE("examples without placeholders pass through unchanged") {
  Example e;
  e.id = "plain-1";
  e.domain = "reminder";
  e.query = "what is on my list ?";
  e.scenario = "INFORM_1[ colloquial[ tomorrow ] tense[ past ] ]";
  DelexExample dex = delexicalize(e, reminder_config());
  REQUIRE(dex.bindings.empty());
  SplitMix64 rng(7);
  CHECK(augment_once(dex, reminder_config(), rng) == e);
}

TEST_CASE("every draw preserves the FB bucket key") {
  SynthGen gen(55);
  auto data = gen.dataset(250);
  const DomainConfig& cfg = reminder_config();
  std::size_t violations = 0;
  SplitMix64 rng(99);
  for (const Example& e : data) {
    const BucketKey before = fb_hash(e, cfg);
    DelexExample dex = delexicalize(e, cfg);
    for (int i = 0; i < 4; ++i)
      if (fb_hash(augment_once(dex, cfg, rng), cfg) != before) ++violations;
  }
  CHECK(violations == 0);

  DelexExample wdex = delexicalize(weather_example(), weather_config());
  const BucketKey wkey = fb_hash(weather_example(), weather_config());
  for (int i = 0; i < 50; ++i)
    CHECK(fb_hash(augment_once(wdex, weather_config(), rng),
                  weather_config()) == wkey);
}

TEST_CASE("epochs of one example differ in lexicalization only") {
  DelexExample dex = delexicalize(reminder_example(), reminder_config());
  auto instances = augment_epochs({dex}, reminder_config(), 11, 2);
  REQUIRE(instances.size() == 2);
  CHECK(instances[0].epoch == 1);
  CHECK(instances[1].epoch == 2);
  const Example& first = instances[0].example;
  const Example& second = instances[1].example;
  CHECK(first != second);
  CHECK(fb_hash(first, reminder_config()) ==
        fb_hash(second, reminder_config()));
}

TEST_CASE("streams emit one instance per example per epoch in source order") {
  SynthGen gen(56);
  auto data = gen.dataset(3);
  std::vector<DelexExample> source;
  for (const Example& e : data)
    source.push_back(delexicalize(e, reminder_config()));

  auto instances = augment_epochs(source, reminder_config(), 5, 4);
  REQUIRE(instances.size() == 12);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    CHECK(instances[i].epoch == i / 3 + 1);
    CHECK(instances[i].example.id == data[i % 3].id);
  }
}

TEST_CASE("same arguments twice give identical streams") {
  SynthGen gen(57);
  auto data = gen.dataset(20);
  std::vector<DelexExample> source;
  for (const Example& e : data)
    source.push_back(delexicalize(e, reminder_config()));
  CHECK(augment_epochs(source, reminder_config(), 3, 3) ==
        augment_epochs(source, reminder_config(), 3, 3));
  CHECK(augment_epochs(source, reminder_config(), 3, 3) !=
        augment_epochs(source, reminder_config(), 4, 3));
}

TEST_CASE("draws depend only on seed, epoch, and example id") {
  SynthGen gen(58);
  auto data = gen.dataset(4);
  std::vector<DelexExample> all, tail;
  for (const Example& e : data) all.push_back(delexicalize(e, reminder_config()));
  tail.assign(all.begin() + 2, all.end());

  auto from_all = augment_epochs(all, reminder_config(), 21, 2);
  auto from_tail = augment_epochs(tail, reminder_config(), 21, 2);
  REQUIRE(from_tail.size() == 4);
  CHECK(from_tail[0] == from_all[2]);
  CHECK(from_tail[1] == from_all[3]);
  CHECK(from_tail[2] == from_all[6]);
  CHECK(from_tail[3] == from_all[7]);
}

TEST_CASE("repeated ids share draws unless per-instance is requested") {
  DelexExample dex = delexicalize(reminder_example(), reminder_config());
  std::vector<DelexExample> doubled{dex, dex};

  auto shared = augment_epochs(doubled, reminder_config(), 1, 1);
  REQUIRE(shared.size() == 2);
  CHECK(shared[0] == shared[1]);

  auto fresh = augment_epochs(doubled, reminder_config(), 1, 1, true);
  REQUIRE(fresh.size() == 2);
  CHECK(fresh[0].example == shared[0].example);
  CHECK(fresh[1].example != fresh[0].example);

  // Per-epoch reset of the repetition counter keeps epochs aligned.
  auto two_epochs = augment_epochs(doubled, reminder_config(), 1, 2, true);
  CHECK(two_epochs[0].example == fresh[0].example);
  CHECK(two_epochs[1].example == fresh[1].example);
}

TEST_CASE("unbounded streams keep producing epochs") {
  DelexExample dex = delexicalize(reminder_example(), reminder_config());
  AugmentStream stream({dex, dex}, reminder_config(), 3);
  std::vector<std::uint64_t> epochs;
  for (int i = 0; i < 10; ++i) {
    auto instance = stream.next();
    REQUIRE(instance.has_value());
    epochs.push_back(instance->epoch);
  }
  CHECK(epochs == std::vector<std::uint64_t>{1, 1, 2, 2, 3, 3, 4, 4, 5, 5});
  CHECK(stream.report().emitted == 10);
}

TEST_CASE("bounded streams stop after the last epoch") {
  DelexExample dex = delexicalize(reminder_example(), reminder_config());
  AugmentStream stream({dex}, reminder_config(), 3, 2);
  CHECK(stream.next().has_value());
  CHECK(stream.next().has_value());
  CHECK_FALSE(stream.next().has_value());
  CHECK_FALSE(stream.next().has_value());

  AugmentStream empty({}, reminder_config(), 3, 2);
  CHECK_FALSE(empty.next().has_value());
}

TEST_CASE("missing or drained pools are reported") {
  DelexExample dex = delexicalize(reminder_example(), reminder_config());
  SplitMix64 rng(1);

  DomainConfig no_todo = reminder_config();
  no_todo.value_pools.erase("todo");
  CHECK_THROWS_AS(augment_once(dex, no_todo, rng), EmptyPool);

  // A pool whose group slice is empty counts as missing too.
  DomainConfig tiny_amount = reminder_config();
  tiny_amount.value_pools["amount"] = ValuePool{{"1"}, {}};
  CHECK_THROWS_AS(augment_once(dex, tiny_amount, rng), EmptyPool);
}

TEST_CASE("two suffixes cannot share a one-value pool") {
  Example e;
  e.id = "two-todos";
  e.domain = "reminder";
  e.query = "list ?";
  e.scenario = "INFORM_1[ todo[ buy milk ] ] INFORM_2[ todo[ run ] ]";
  DelexExample dex = delexicalize(e, reminder_config());
  REQUIRE(dex.bindings.size() == 2);

  DomainConfig one_todo = reminder_config();
  one_todo.value_pools["todo"] = ValuePool{{"call mom"}, {}};
  SplitMix64 rng(5);
  CHECK_THROWS_AS(augment_once(dex, one_todo, rng), PoolExhausted);
}

TEST_CASE("distinct suffixes always receive distinct values") {
  Example e;
  e.id = "three-todos";
  e.domain = "reminder";
  e.query = "list ?";
  e.scenario =
      "INFORM_1[ todo[ buy milk ] ] INFORM_2[ todo[ run ] ] "
      "INFORM_3[ todo[ call mom ] ]";
  DelexExample dex = delexicalize(e, reminder_config());
  SplitMix64 rng(8);
  for (int i = 0; i < 200; ++i) {
    auto todos = values_of(augment_once(dex, reminder_config(), rng).scenario,
                           "todo");
    std::set<std::string> distinct(todos.begin(), todos.end());
    CHECK(distinct.size() == 3);
  }
}

TEST_CASE("inflected references are flagged and kept verbatim") {
  Example e;
  e.id = "inflected-1";
  e.domain = "reminder";
  e.query = "Did I buy milk ?";
  e.scenario = "INFORM_1[ todo[ buy milk ] ]";
  e.reference = "INFORM[ you already todo[ bought milk ] ]";
  DelexExample dex = delexicalize(e, reminder_config());
  REQUIRE_FALSE(dex.unmatched_reference_leaves.empty());

  AugmentStream stream({dex}, reminder_config(), 13, 1);
  auto instance = stream.next();
  REQUIRE(instance.has_value());
  CHECK(stream.report().inflected_reference_ids ==
        std::vector<std::string>{"inflected-1"});
  CHECK(values_of(*instance->example.reference, "todo") ==
        std::vector<std::string>{"bought milk"});
  CHECK(values_of(instance->example.scenario, "todo").at(0) != "buy milk");
}
