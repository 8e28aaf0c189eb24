#pragma once

// Frozen worked examples shared across the test suite: one weather example
// with a CONTRAST relation and one reminder example with aggregation in its
// reference, plus the expected bucket-hash texts and augmentation rows for
// the reminder example. Expected values are stored as the flattened texts;
// tests parse and canonicalize them rather than trusting any library hash.

namespace fixtures {

inline constexpr const char* weather_query =
    "How is the weather over the next weekend ?";

inline constexpr const char* weather_scenario =
    "INFORM_1[ temp_low[ 20 ] temp_high[ 45 ] "
    "date_time[ colloquial[ next weekend ] ] ] "
    "CONTRAST_1[ "
    "INFORM_2[ condition[ sun ] date_time[ weekday[ Saturday ] ] ] "
    "INFORM_3[ condition[ rain ] date_time[ weekday[ Sunday ] ] ] ]";

inline constexpr const char* weather_reference =
    "INFORM_1[ date_time[ colloquial[ next weekend ] ] expect a low of "
    "temp_low[ 20 ] and a high of temp_high[ 45 ] . ] "
    "CONTRAST_1[ "
    "INFORM_2[ it will be condition[ sunny ] "
    "date_time[ on weekday[ Saturday ] ] ] "
    "but "
    "INFORM_3[ it'll condition[ rain ] "
    "date_time[ on weekday[ Sunday ] ] ] . ]";

inline constexpr const char* reminder_query =
    "Do I have any reminder to buy milk ?";

inline constexpr const char* reminder_scenario =
    "INFORM_1[ amount[ 3 ] ] "
    "INFORM_2[ todo[ buy milk ] date_time[ time[ 7 pm ] ] ] "
    "INFORM_3[ todo[ buy milk ] date_time[ colloquial[ tomorrow ] ] ] "
    "INFORM_4[ amount_remaining[ 1 ] ]";

// The reference aggregates: the second mention of "buy milk" is dropped and
// the acts carry no indices.
inline constexpr const char* reminder_reference =
    "INFORM[ Yes, there are amount[ 3 ] reminders . ] "
    "INFORM[ The first two are, todo[ buy milk ] at "
    "date_time[ time[ 7 pm ] ] ] "
    "and "
    "INFORM[ date_time[ colloquial[ tomorrow ] ] . ] "
    "INFORM[ There's amount_remaining[ 1 ] other reminder. ]";

inline constexpr const char* reminder_delex_query =
    "Do I have any reminder to todo__a ?";

inline constexpr const char* reminder_cb_text =
    "INFORM_1[ amount ] "
    "INFORM_2[ todo date_time ] "
    "INFORM_3[ todo date_time ] "
    "INFORM_4[ amount_remaining ]";

inline constexpr const char* reminder_mb_text =
    "INFORM_1[ amount ] "
    "INFORM_2[ todo date_time[ time ] ] "
    "INFORM_3[ todo date_time[ colloquial[ tomorrow ] ] ] "
    "INFORM_4[ amount_remaining ]";

inline constexpr const char* reminder_fb_text =
    "INFORM_1[ amount[ amount__gr1 ] ] "
    "INFORM_2[ todo[ todo__a ] date_time[ time[ time__a ] ] ] "
    "INFORM_3[ todo[ todo__a ] date_time[ colloquial[ tomorrow ] ] ] "
    "INFORM_4[ amount_remaining[ amount_remaining__eq1 ] ]";

// One augmentation round: every placeholder gets a fresh value, repeated
// placeholders stay consistent across query and scenario, retained leaves
// ("tomorrow") and singular counts stay fixed.
inline constexpr const char* reminder_aug1_query =
    "Do I have any reminder to go shopping ?";

inline constexpr const char* reminder_aug1_scenario =
    "INFORM_1[ amount[ 8 ] ] "
    "INFORM_2[ todo[ go shopping ] date_time[ time[ 10 AM ] ] ] "
    "INFORM_3[ todo[ go shopping ] date_time[ colloquial[ tomorrow ] ] ] "
    "INFORM_4[ amount_remaining[ 1 ] ]";

inline constexpr const char* reminder_aug2_query =
    "Do I have any reminder to run ?";

inline constexpr const char* reminder_aug2_scenario =
    "INFORM_1[ amount[ 4 ] ] "
    "INFORM_2[ todo[ run ] date_time[ time[ 6 PM ] ] ] "
    "INFORM_3[ todo[ run ] date_time[ colloquial[ tomorrow ] ] ] "
    "INFORM_4[ amount_remaining[ 1 ] ]";

}  // namespace fixtures
