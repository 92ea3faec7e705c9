#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ontomerge {

/// The XML Schema datatypes a datatype property may range over.
enum class XsdKind { Integer, Decimal, NCName, NMTOKEN, String };

/// Inference order: the first kind whose lexical space admits every value wins.
inline constexpr std::array<XsdKind, 5> kInferenceOrder = {
    XsdKind::Integer, XsdKind::Decimal, XsdKind::NCName, XsdKind::NMTOKEN, XsdKind::String};

std::string_view to_string(XsdKind kind);
std::optional<XsdKind> parse_xsd_kind(std::string_view text);

bool is_integer_lexeme(std::string_view s);
bool is_decimal_lexeme(std::string_view s);
bool is_ncname(std::string_view s);
bool is_nmtoken(std::string_view s);

/// Whether `lexical` lies in the lexical space of `kind`.
bool admits(XsdKind kind, std::string_view lexical);

} // namespace ontomerge
