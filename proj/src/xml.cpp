#include "ontomerge/xml.hpp"

#include "ontomerge/error.hpp"

#include <expat.h>

#include <fstream>
#include <memory>
#include <sstream>

namespace ontomerge::xml {

namespace {

constexpr char kNsSeparator = '\x1F';

void split_name(const char* raw, std::string& ns, std::string& local)
{
    std::string_view name(raw);
    auto sep = name.find(kNsSeparator);
    if (sep == std::string_view::npos) {
        ns.clear();
        local = std::string(name);
    } else {
        ns = std::string(name.substr(0, sep));
        local = std::string(name.substr(sep + 1));
    }
}

struct Builder {
    XML_Parser parser = nullptr;
    std::vector<Element*> open;
    Element root;
    bool has_root = false;

    static void on_start(void* data, const XML_Char* name, const XML_Char** attrs)
    {
        auto* self = static_cast<Builder*>(data);
        Element element;
        split_name(name, element.ns, element.local);
        element.line = static_cast<int>(XML_GetCurrentLineNumber(self->parser));
        element.column = static_cast<int>(XML_GetCurrentColumnNumber(self->parser)) + 1;
        for (int i = 0; attrs[i]; i += 2) {
            Attribute a;
            split_name(attrs[i], a.ns, a.local);
            a.value = attrs[i + 1];
            element.attributes.push_back(std::move(a));
        }
        if (self->open.empty()) {
            self->root = std::move(element);
            self->has_root = true;
            self->open.push_back(&self->root);
        } else {
            auto& children = self->open.back()->children;
            children.push_back(std::move(element));
            self->open.push_back(&children.back());
        }
    }

    static void on_end(void* data, const XML_Char*)
    {
        static_cast<Builder*>(data)->open.pop_back();
    }

    static void on_text(void* data, const XML_Char* s, int len)
    {
        auto* self = static_cast<Builder*>(data);
        if (!self->open.empty())
            self->open.back()->text.append(s, static_cast<std::size_t>(len));
    }
};

struct ParserDeleter {
    void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

} // namespace

const Attribute* Element::attribute(std::string_view ns_uri, std::string_view local_name) const
{
    for (const auto& a : attributes)
        if (a.ns == ns_uri && a.local == local_name)
            return &a;
    return nullptr;
}

const Attribute* Element::attribute(std::string_view local_name) const
{
    for (const auto& a : attributes)
        if (a.local == local_name)
            return &a;
    return nullptr;
}

Element parse(std::string_view text, std::string_view source_name)
{
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS("UTF-8", kNsSeparator));
    if (!parser)
        throw Error(ErrorCode::IoFailure, "cannot allocate XML parser");
    Builder builder;
    builder.parser = parser.get();
    XML_SetUserData(parser.get(), &builder);
    XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
    XML_SetCharacterDataHandler(parser.get(), &Builder::on_text);

    if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) == XML_STATUS_ERROR) {
        std::ostringstream msg;
        msg << source_name << ':' << XML_GetCurrentLineNumber(parser.get()) << ':'
            << XML_GetCurrentColumnNumber(parser.get()) + 1 << ": "
            << XML_ErrorString(XML_GetErrorCode(parser.get()));
        throw Error(ErrorCode::MalformedXml, msg.str());
    }
    if (!builder.has_root)
        throw Error(ErrorCode::MalformedXml, std::string(source_name) + ": no root element");
    return std::move(builder.root);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Element parse_file(const std::filesystem::path& path)
{
    return parse(read_file(path), path.string());
}

std::string escape_text(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\n': out += "&#10;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace ontomerge::xml
