#pragma once
// Minimal namespace-aware XML DOM on top of expat.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ontomerge::xml {

struct Attribute {
    std::string ns; // namespace URI, empty if none
    std::string local;
    std::string value;
};

struct Element {
    std::string ns;
    std::string local;
    std::vector<Attribute> attributes;
    std::vector<Element> children;
    std::string text; // character data directly inside this element
    int line = 0;
    int column = 0;

    const Attribute* attribute(std::string_view ns_uri, std::string_view local_name) const;
    /// Attribute lookup by local name only, ignoring namespaces.
    const Attribute* attribute(std::string_view local_name) const;
    bool is(std::string_view ns_uri, std::string_view local_name) const
    {
        return ns == ns_uri && local == local_name;
    }
};

/// Parses a complete document and returns its root element.
/// Throws Error(malformed-xml) carrying "<source>:<line>:<column>: <reason>".
Element parse(std::string_view text, std::string_view source_name = "<memory>");
Element parse_file(const std::filesystem::path& path);

std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view text);

std::string read_file(const std::filesystem::path& path);

} // namespace ontomerge::xml
