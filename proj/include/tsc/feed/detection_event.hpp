#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsc::feed {

enum class EventKind { enter, exit };

std::string_view to_string(EventKind kind);

// One vehicle observation on the camera-feed wire format (NDJSON, one
// object per line). Field names and the "enter"/"exit" literals are fixed.
struct DetectionEvent {
    std::int64_t t_ms = 0;
    std::string intersection_id;
    std::int64_t road_id = 0;
    std::int64_t track_id = 0;
    EventKind event = EventKind::enter;
    std::optional<double> speed_mps;

    friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

enum class FeedErrorKind {
    malformed_json,
    missing_field,
    wrong_type,
    invalid_literal,
    negative_value,
};

std::string_view to_string(FeedErrorKind kind);

class FeedError : public std::runtime_error {
public:
    FeedError(FeedErrorKind kind, std::string message, std::size_t line = 0);

    FeedErrorKind kind() const noexcept { return kind_; }
    // 1-based line number within the stream; 0 when parsing a lone line.
    std::size_t line() const noexcept { return line_; }

private:
    FeedErrorKind kind_;
    std::size_t line_;
};

DetectionEvent parse_event(std::string_view line);

// Compact single-line JSON with fields in the order t_ms, intersection_id,
// road_id, track_id, event, speed_mps (omitted when absent).
std::string serialize_event(const DetectionEvent& event);

// Reads every non-blank line; errors carry the offending line number.
std::vector<DetectionEvent> read_events(std::istream& in);

std::string to_ndjson(const std::vector<DetectionEvent>& events);

}  // namespace tsc::feed
