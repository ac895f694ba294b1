#include "tsc/feed/detection_event.hpp"

#include <json.hpp>

#include <sstream>

namespace tsc::feed {

namespace {

using json = nlohmann::json;

const json& require(const json& obj, const char* key)
{
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw FeedError(FeedErrorKind::missing_field, std::string("missing required field '") + key + "'");
    }
    return *it;
}

std::int64_t require_integer(const json& obj, const char* key)
{
    const json& v = require(obj, key);
    if (!v.is_number_integer()) {
        throw FeedError(FeedErrorKind::wrong_type, std::string("field '") + key + "' must be an integer");
    }
    if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX)) {
            throw FeedError(FeedErrorKind::wrong_type, std::string("field '") + key + "' is out of range");
        }
        return static_cast<std::int64_t>(u);
    }
    return v.get<std::int64_t>();
}

}  // namespace

std::string_view to_string(EventKind kind)
{
    return kind == EventKind::enter ? "enter" : "exit";
}

std::string_view to_string(FeedErrorKind kind)
{
    switch (kind) {
    case FeedErrorKind::malformed_json:
        return "malformed_json";
    case FeedErrorKind::missing_field:
        return "missing_field";
    case FeedErrorKind::wrong_type:
        return "wrong_type";
    case FeedErrorKind::invalid_literal:
        return "invalid_literal";
    case FeedErrorKind::negative_value:
        return "negative_value";
    }
    return "unknown";
}

FeedError::FeedError(FeedErrorKind kind, std::string message, std::size_t line)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      line_(line)
{
}

DetectionEvent parse_event(std::string_view line)
{
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw FeedError(FeedErrorKind::malformed_json, e.what());
    }
    if (!obj.is_object()) {
        throw FeedError(FeedErrorKind::malformed_json, "event must be a JSON object");
    }

    DetectionEvent ev;
    ev.t_ms = require_integer(obj, "t_ms");
    if (ev.t_ms < 0) {
        throw FeedError(FeedErrorKind::negative_value, "t_ms must be nonnegative");
    }
    const json& id = require(obj, "intersection_id");
    if (!id.is_string()) {
        throw FeedError(FeedErrorKind::wrong_type, "field 'intersection_id' must be a string");
    }
    ev.intersection_id = id.get<std::string>();
    ev.road_id = require_integer(obj, "road_id");
    if (ev.road_id < 0) {
        throw FeedError(FeedErrorKind::negative_value, "road_id must be nonnegative");
    }
    ev.track_id = require_integer(obj, "track_id");
    const json& kind = require(obj, "event");
    if (!kind.is_string()) {
        throw FeedError(FeedErrorKind::wrong_type, "field 'event' must be a string");
    }
    const auto& literal = kind.get_ref<const std::string&>();
    if (literal == "enter") {
        ev.event = EventKind::enter;
    } else if (literal == "exit") {
        ev.event = EventKind::exit;
    } else {
        throw FeedError(FeedErrorKind::invalid_literal, "event must be \"enter\" or \"exit\", got \"" + literal + "\"");
    }
    if (const auto it = obj.find("speed_mps"); it != obj.end() && !it->is_null()) {
        if (!it->is_number()) {
            throw FeedError(FeedErrorKind::wrong_type, "field 'speed_mps' must be a number");
        }
        const double speed = it->get<double>();
        if (speed < 0.0) {
            throw FeedError(FeedErrorKind::negative_value, "speed_mps must be nonnegative");
        }
        ev.speed_mps = speed;
    }
    return ev;
}

std::string serialize_event(const DetectionEvent& event)
{
    nlohmann::ordered_json obj;
    obj["t_ms"] = event.t_ms;
    obj["intersection_id"] = event.intersection_id;
    obj["road_id"] = event.road_id;
    obj["track_id"] = event.track_id;
    obj["event"] = to_string(event.event);
    if (event.speed_mps) {
        obj["speed_mps"] = *event.speed_mps;
    }
    return obj.dump();
}

std::vector<DetectionEvent> read_events(std::istream& in)
{
    std::vector<DetectionEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            events.push_back(parse_event(line));
        } catch (const FeedError& e) {
            // Re-tag with the stream position.
            std::string what = e.what();
            const std::string prefix = std::string(to_string(e.kind())) + ": ";
            if (what.rfind(prefix, 0) == 0) {
                what.erase(0, prefix.size());
            }
            throw FeedError(e.kind(), what, line_no);
        }
    }
    return events;
}

std::string to_ndjson(const std::vector<DetectionEvent>& events)
{
    std::string out;
    for (const DetectionEvent& e : events) {
        out += serialize_event(e);
        out += '\n';
    }
    return out;
}

}  // namespace tsc::feed
