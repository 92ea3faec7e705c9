#include "ontomerge/xsd.hpp"

namespace ontomerge {

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Bytes >= 0x80 are accepted as name characters; this admits every non-ASCII
// UTF-8 sequence rather than checking the exact Unicode name ranges.
bool is_non_ascii(char c) { return static_cast<unsigned char>(c) >= 0x80; }

bool is_name_start(char c) { return is_ascii_letter(c) || c == '_' || is_non_ascii(c); }

bool is_name_char(char c)
{
    return is_name_start(c) || is_ascii_digit(c) || c == '-' || c == '.';
}

} // namespace

std::string_view to_string(XsdKind kind)
{
    switch (kind) {
    case XsdKind::Integer: return "integer";
    case XsdKind::Decimal: return "decimal";
    case XsdKind::NCName: return "NCName";
    case XsdKind::NMTOKEN: return "NMTOKEN";
    case XsdKind::String: return "string";
    }
    return "string";
}

std::optional<XsdKind> parse_xsd_kind(std::string_view text)
{
    for (XsdKind kind : kInferenceOrder)
        if (to_string(kind) == text)
            return kind;
    return std::nullopt;
}

bool is_integer_lexeme(std::string_view s)
{
    if (!s.empty() && (s.front() == '+' || s.front() == '-'))
        s.remove_prefix(1);
    if (s.empty())
        return false;
    for (char c : s)
        if (!is_ascii_digit(c))
            return false;
    return true;
}

bool is_decimal_lexeme(std::string_view s)
{
    if (!s.empty() && (s.front() == '+' || s.front() == '-'))
        s.remove_prefix(1);
    std::size_t digits = 0;
    bool seen_point = false;
    for (char c : s) {
        if (is_ascii_digit(c))
            ++digits;
        else if (c == '.' && !seen_point)
            seen_point = true;
        else
            return false;
    }
    return digits > 0;
}

bool is_ncname(std::string_view s)
{
    if (s.empty() || !is_name_start(s.front()))
        return false;
    for (char c : s)
        if (!is_name_char(c))
            return false;
    return true;
}

bool is_nmtoken(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!is_name_char(c) && c != ':')
            return false;
    return true;
}

bool admits(XsdKind kind, std::string_view lexical)
{
    switch (kind) {
    case XsdKind::Integer: return is_integer_lexeme(lexical);
    case XsdKind::Decimal: return is_decimal_lexeme(lexical);
    case XsdKind::NCName: return is_ncname(lexical);
    case XsdKind::NMTOKEN: return is_nmtoken(lexical);
    case XsdKind::String: return true;
    }
    return false;
}

} // namespace ontomerge
