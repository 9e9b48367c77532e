#include "ghl/bluetooth_id.hpp"

#include <cctype>
#include <cstdio>

#include "ghl/errors.hpp"
#include "ghl/util.hpp"

namespace ghl {

namespace {

bool has_whitespace(std::string_view s) {
    for (char c : s)
        if (std::isspace(static_cast<unsigned char>(c))) return true;
    return false;
}

std::vector<std::string_view> split_slashes(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t slash = s.find('/', pos);
        if (slash == std::string_view::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, slash - pos));
        pos = slash + 1;
    }
    return parts;
}

[[noreturn]] void fail(std::string_view text, const std::string& why) {
    throw CorpusError("invalid Bluetooth test-case ID \"" + std::string(text) + "\": " + why);
}

}  // namespace

BluetoothTestCaseId parse_bluetooth_id(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) fail(text, "empty input");

    auto parts = split_slashes(s);
    // spec, IUT role, 1..5 middle segments, behavior tail
    if (parts.size() < 4) fail(text, "fewer than 3 slash segments before the behavior tail");
    if (parts.size() > 8) fail(text, "more than 5 class/feat/func/subfunc/cap segments");

    for (std::string_view part : parts) {
        if (part.empty()) fail(text, "empty segment");
        if (has_whitespace(part)) fail(text, "segment contains whitespace");
    }

    std::string_view tail = parts.back();
    // "<XX>-<nn>-<y>"
    if (tail.size() != 7 || tail[2] != '-' || tail[5] != '-')
        fail(text, "behavior tail must look like BV-01-C");
    std::string_view code = tail.substr(0, 2);
    BluetoothTestCaseId id;
    if (code == "BV") {
        id.behavior = BluetoothTestCaseId::Behavior::BV;
    } else if (code == "BI") {
        id.behavior = BluetoothTestCaseId::Behavior::BI;
    } else {
        fail(text, "behavior must be BV or BI");
    }
    if (!std::isdigit(static_cast<unsigned char>(tail[3])) ||
        !std::isdigit(static_cast<unsigned char>(tail[4])))
        fail(text, "test number must be two digits");
    id.nn = (tail[3] - '0') * 10 + (tail[4] - '0');
    if (!std::isalpha(static_cast<unsigned char>(tail[6]))) fail(text, "final field must be a letter");
    id.y = tail[6];

    id.spec = std::string(parts[0]);
    id.iut_role = std::string(parts[1]);
    for (std::size_t i = 2; i + 1 < parts.size(); ++i) id.segments.emplace_back(parts[i]);
    return id;
}

std::optional<BluetoothTestCaseId> try_parse_bluetooth_id(std::string_view text) {
    try {
        return parse_bluetooth_id(text);
    } catch (const CorpusError&) {
        return std::nullopt;
    }
}

std::string format_bluetooth_id(const BluetoothTestCaseId& id) {
    std::string out = id.spec;
    out += '/';
    out += id.iut_role;
    for (const auto& seg : id.segments) {
        out += '/';
        out += seg;
    }
    char tail[16];
    std::snprintf(tail, sizeof(tail), "/%s-%02d-%c",
                  id.behavior == BluetoothTestCaseId::Behavior::BV ? "BV" : "BI", id.nn, id.y);
    out += tail;
    return out;
}

}  // namespace ghl
