#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace newsframe {

/// One of the nine gun-violence news frames. Ids run 1..9 in the canonical
/// reporting order (Politics first, Society/Culture last).
struct Frame {
    int id = 0;
    std::string_view name;

    friend bool operator==(const Frame& a, const Frame& b) { return a.id == b.id; }
};

inline constexpr int kNumFrames = 9;

inline constexpr std::array<Frame, kNumFrames> kFrames{{
    {1, "Politics"},
    {2, "Public Opinion"},
    {3, "Gun Control/Regulation"},
    {4, "School/Public Space Safety"},
    {5, "Economic Consequences"},
    {6, "Race/Ethnicity"},
    {7, "Mental Health"},
    {8, "2nd Amendment/Gun Rights"},
    {9, "Society/Culture"},
}};

/// Throws DataError for ids outside 1..9.
Frame frame_from_id(int id);
std::optional<Frame> frame_from_name(std::string_view name);

// Subject / Race-Ethnicity coding scheme for lead images. Subject ids are
// 1..16, race/ethnicity ids 17..19; both index directly into the 19-slot
// SRE feature vector.
inline constexpr int kNumSubjects = 16;
inline constexpr int kFirstReId = 17;
inline constexpr int kLastReId = 19;
inline constexpr int kSreLength = 19;

inline constexpr std::array<std::string_view, kNumSubjects> kSubjectNames{{
    "People: gun shooter/suspect",
    "People: gun hobbyist/activist",
    "People: victim/affected family and friends/bystanders",
    "People: politicians",
    "People: law enforcement",
    "Object: firearm/bullets",
    "Object: gun/hunting gear stores/gun show",
    "People: demonstrators/demonstrations",
    "Object: protest signs",
    "Memorial objects and people",
    "Crime scene/police cars/people during or right after the crisis",
    "Object: legislative buildings/courthouses",
    "School/campus/students",
    "NRA objects/NRA representatives",
    "Object: company buildings/logos",
    "Other",
}};

inline constexpr std::array<std::string_view, 3> kRaceEthnicityNames{{
    "None",
    "Racial/ethnic minority groups",
    "KKK/white supremacy/hate groups",
}};

constexpr bool valid_subject_id(int id) { return id >= 1 && id <= kNumSubjects; }
constexpr bool valid_re_id(int id) { return id >= kFirstReId && id <= kLastReId; }

}  // namespace newsframe
