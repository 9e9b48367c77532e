#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghl {

/// Structured Bluetooth qualification test-case identifier:
///   <spec>/<IUT role>/<class..cap (1..5 segments)>/<BV|BI>-<nn>-<y>
/// e.g. "AVRCP/CT/CON/BV-01-C".
struct BluetoothTestCaseId {
    enum class Behavior { BV, BI };

    std::string spec;
    std::string iut_role;
    std::vector<std::string> segments;  // class/feat/func/subfunc/cap, 1..5 present
    Behavior behavior = Behavior::BV;
    int nn = 0;  // 00..99
    char y = 'C';

    bool operator==(const BluetoothTestCaseId&) const = default;
};

/// Parses a slash-delimited ID ending in "<BV|BI>-<nn>-<y>".
/// Throws CorpusError on malformed input (bad tail, too few/many segments,
/// unknown behavior code, empty or whitespace-bearing segments).
BluetoothTestCaseId parse_bluetooth_id(std::string_view text);

/// Non-throwing variant; nullopt on malformed input.
std::optional<BluetoothTestCaseId> try_parse_bluetooth_id(std::string_view text);

/// Canonical slash-joined text; parse_bluetooth_id(format_bluetooth_id(id)) == id.
std::string format_bluetooth_id(const BluetoothTestCaseId& id);

}  // namespace ghl
