#pragma once

#include <cstdint>
#include <string_view>

namespace maat {

/// Binary app label. Malicious is the positive class everywhere.
enum class Label : std::uint8_t { Benign = 0, Malicious = 1 };

constexpr bool is_malicious(Label label) { return label == Label::Malicious; }

std::string_view to_string(Label label);

/// Accepts "malicious" / "benign"; throws ParseError otherwise.
Label label_from_string(std::string_view text);

}  // namespace maat
