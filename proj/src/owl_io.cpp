#include "ontomerge/owl_io.hpp"

#include "ontomerge/error.hpp"
#include "ontomerge/xml.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace ontomerge {

namespace {

constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
constexpr std::string_view kOm = "urn:ontomerge:annotations#";

std::string where(const xml::Element& e) { return "line " + std::to_string(e.line); }

class OwlReader {
public:
    OwlReader(std::vector<std::string>* warnings) : warnings_(warnings) {}

    Ontology read(const xml::Element& root, std::string_view fallback_name)
    {
        if (!root.is(kRdf, "RDF"))
            throw Error(ErrorCode::MalformedXml, "expected an rdf:RDF document element, found '" + root.local + "'");
        std::string name(fallback_name);
        for (const auto& e : root.children) {
            if (!e.is(kOwl, "Ontology"))
                continue;
            const auto* about = e.attribute(kRdf, "about");
            if (about && about->value.starts_with(kOntologyIriPrefix) &&
                about->value.size() > kOntologyIriPrefix.size())
                name = about->value.substr(kOntologyIriPrefix.size());
            else
                warn("ontology IRI at " + where(e) + " is not of the form urn:ontomerge:<name>; using '" + name + "'");
        }
        ontology_ = Ontology(name);
        namespace_ = std::string(kOntologyIriPrefix) + name + "#";

        for (const auto& e : root.children) {
            if (e.is(kOwl, "Ontology"))
                continue;
            if (e.is(kOwl, "Class"))
                read_class(e);
            else if (e.is(kOwl, "ObjectProperty"))
                read_slot(e, SlotKind::Object);
            else if (e.is(kOwl, "DatatypeProperty"))
                read_slot(e, SlotKind::Datatype);
            else if (e.is(kOwl, "NamedIndividual"))
                read_individual(e);
            else
                unsupported(e);
        }
        check_references();
        return std::move(ontology_);
    }

private:
    std::vector<std::string>* warnings_;
    Ontology ontology_;
    std::string namespace_;

    void warn(std::string message)
    {
        if (warnings_)
            warnings_->push_back(std::move(message));
    }

    void unsupported(const xml::Element& e)
    {
        warn("unsupported construct '" + e.local + "' at " + where(e) + " ignored");
    }

    std::string local_of(std::string_view iri, const xml::Element& at) const
    {
        if (iri.starts_with("#") && iri.size() > 1)
            return std::string(iri.substr(1));
        if (iri.starts_with(namespace_) && iri.size() > namespace_.size())
            return std::string(iri.substr(namespace_.size()));
        if (iri == std::string(kOwl) + "Thing")
            return std::string(kThing);
        throw Error(ErrorCode::UnresolvableReference, "reference '" + std::string(iri) + "' at " + where(at) +
                                                          " is outside ontology '" + ontology_.name() + "'");
    }

    std::string subject(const xml::Element& e) const
    {
        const auto* about = e.attribute(kRdf, "about");
        if (!about)
            throw Error(ErrorCode::MalformedXml, e.local + " at " + where(e) + " lacks rdf:about");
        auto name = local_of(about->value, e);
        if (name == kThing)
            throw Error(ErrorCode::MalformedXml, "owl:Thing cannot be redeclared (" + where(e) + ")");
        return name;
    }

    std::string resource(const xml::Element& e) const
    {
        const auto* r = e.attribute(kRdf, "resource");
        if (!r)
            throw Error(ErrorCode::MalformedXml, e.local + " at " + where(e) + " lacks rdf:resource");
        return r->value;
    }

    void read_class(const xml::Element& e)
    {
        ClassFrame frame{subject(e), {}};
        for (const auto& c : e.children) {
            if (c.is(kRdfs, "subClassOf")) {
                auto super = local_of(resource(c), c);
                if (super != kThing)
                    frame.superclasses.insert(super);
            } else {
                unsupported(c);
            }
        }
        if (auto* existing = ontology_.find_class(frame.name)) {
            existing->superclasses.insert(frame.superclasses.begin(), frame.superclasses.end());
            return;
        }
        ontology_.add_class(std::move(frame));
    }

    static unsigned parse_count(const xml::Element& e)
    {
        const auto& t = e.text;
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw Error(ErrorCode::MalformedXml, "cardinality '" + t + "' at " + where(e) + " is not a number");
        return static_cast<unsigned>(std::stoul(t));
    }

    void read_slot(const xml::Element& e, SlotKind kind)
    {
        SlotFrame frame;
        frame.name = subject(e);
        frame.kind = kind;
        ClassSet classes;
        std::optional<XsdKind> datatype;
        for (const auto& c : e.children) {
            if (c.is(kRdfs, "domain")) {
                frame.domain.insert(local_of(resource(c), c));
            } else if (c.is(kRdfs, "range")) {
                auto iri = resource(c);
                if (kind == SlotKind::Object) {
                    classes.insert(local_of(iri, c));
                } else if (iri.starts_with(kXsd)) {
                    datatype = parse_xsd_kind(std::string_view(iri).substr(kXsd.size()));
                    if (!datatype) {
                        warn("datatype '" + iri + "' at " + where(c) + " is outside the profile; using string");
                        datatype = XsdKind::String;
                    }
                } else {
                    throw Error(ErrorCode::UnresolvableReference,
                                "datatype range '" + iri + "' at " + where(c) + " is not an XSD type");
                }
            } else if (c.is(kOm, "minCardinality")) {
                frame.card.min = parse_count(c);
            } else if (c.is(kOm, "maxCardinality")) {
                if (c.text == "unbounded")
                    frame.card.max.reset();
                else
                    frame.card.max = parse_count(c);
            } else {
                unsupported(c);
            }
        }
        if (kind == SlotKind::Object) {
            if (classes.empty())
                classes.insert(std::string(kThing));
            frame.range = std::move(classes);
        } else {
            if (!datatype) {
                warn("datatype property '" + frame.name + "' has no range; using string");
                datatype = XsdKind::String;
            }
            frame.range = *datatype;
        }
        if (ontology_.find_slot(frame.name)) {
            warn("duplicate property '" + frame.name + "' at " + where(e) + " ignored");
            return;
        }
        ontology_.add_slot(std::move(frame));
    }

    void read_individual(const xml::Element& e)
    {
        InstanceFrame frame;
        frame.name = subject(e);
        for (const auto& c : e.children) {
            if (c.is(kRdf, "type")) {
                frame.types.insert(local_of(resource(c), c));
                continue;
            }
            if (c.ns != namespace_) {
                unsupported(c);
                continue;
            }
            auto& values = frame.values[c.local];
            if (const auto* r = c.attribute(kRdf, "resource")) {
                values.push_back(InstanceRef{local_of(r->value, c)});
                continue;
            }
            XsdKind kind = XsdKind::String;
            if (const auto* dt = c.attribute(kRdf, "datatype")) {
                std::optional<XsdKind> parsed;
                if (std::string_view(dt->value).starts_with(kXsd))
                    parsed = parse_xsd_kind(std::string_view(dt->value).substr(kXsd.size()));
                if (!parsed)
                    warn("literal datatype '" + dt->value + "' at " + where(c) + " is outside the profile; using string");
                kind = parsed.value_or(XsdKind::String);
            }
            values.push_back(Literal{c.text, kind});
        }
        if (ontology_.find_instance(frame.name)) {
            warn("duplicate individual '" + frame.name + "' at " + where(e) + " ignored");
            return;
        }
        ontology_.add_instance(std::move(frame));
    }

    void check_references() const
    {
        auto need_class = [&](const std::string& name, const std::string& user) {
            if (name != kThing && !ontology_.find_class(name))
                throw Error(ErrorCode::UnresolvableReference,
                            "'" + user + "' refers to undeclared class '" + name + "'");
        };
        for (const auto& [name, cls] : ontology_.classes())
            for (const auto& s : cls.superclasses)
                need_class(s, name);
        for (const auto& [name, slot] : ontology_.slots()) {
            for (const auto& d : slot.domain)
                need_class(d, name);
            if (slot.is_object())
                for (const auto& r : slot.range_classes())
                    need_class(r, name);
        }
        for (const auto& [name, inst] : ontology_.instances()) {
            for (const auto& t : inst.types)
                need_class(t, name);
            for (const auto& [slot, values] : inst.values) {
                if (!ontology_.find_slot(slot))
                    throw Error(ErrorCode::UnresolvableReference,
                                "'" + name + "' asserts undeclared property '" + slot + "'");
                for (const auto& v : values)
                    if (const auto* r = std::get_if<InstanceRef>(&v); r && !ontology_.find_instance(r->name))
                        throw Error(ErrorCode::UnresolvableReference,
                                    "'" + name + "' refers to undeclared individual '" + r->name + "'");
            }
        }
    }
};

std::string join(const std::set<std::string>& names)
{
    std::string out;
    for (const auto& n : names)
        out += (out.empty() ? "" : ",") + n;
    return out;
}

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

} // namespace

Ontology read_owl(std::string_view text, std::string_view fallback_name, std::vector<std::string>* warnings,
                  std::string_view source_name)
{
    auto root = xml::parse(text, source_name);
    return OwlReader(warnings).read(root, fallback_name);
}

Ontology read_owl_file(const std::filesystem::path& path, std::vector<std::string>* warnings)
{
    return read_owl(xml::read_file(path), path.stem().string(), warnings, path.string());
}

std::string write_owl(const Ontology& o)
{
    std::ostringstream out;
    auto ref = [](std::string_view name) {
        if (name == kThing)
            return std::string(kOwl) + "Thing";
        return "#" + xml::escape_attribute(name);
    };
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<rdf:RDF xmlns=\"" << xml::escape_attribute(std::string(kOntologyIriPrefix) + o.name() + "#") << "\"\n"
        << "         xml:base=\"" << xml::escape_attribute(std::string(kOntologyIriPrefix) + o.name()) << "\"\n"
        << "         xmlns:rdf=\"" << kRdf << "\"\n"
        << "         xmlns:rdfs=\"" << kRdfs << "\"\n"
        << "         xmlns:owl=\"" << kOwl << "\"\n"
        << "         xmlns:xsd=\"" << kXsd << "\"\n"
        << "         xmlns:om=\"" << kOm << "\">\n"
        << "  <owl:Ontology rdf:about=\"" << xml::escape_attribute(std::string(kOntologyIriPrefix) + o.name())
        << "\"/>\n";

    for (const auto& [name, cls] : o.classes()) {
        if (cls.superclasses.empty()) {
            out << "  <owl:Class rdf:about=\"" << ref(name) << "\"/>\n";
            continue;
        }
        out << "  <owl:Class rdf:about=\"" << ref(name) << "\">\n";
        for (const auto& s : cls.superclasses)
            out << "    <rdfs:subClassOf rdf:resource=\"" << ref(s) << "\"/>\n";
        out << "  </owl:Class>\n";
    }
    for (const auto& [name, slot] : o.slots()) {
        const char* tag = slot.is_object() ? "owl:ObjectProperty" : "owl:DatatypeProperty";
        out << "  <" << tag << " rdf:about=\"" << ref(name) << "\">\n";
        for (const auto& d : slot.domain)
            out << "    <rdfs:domain rdf:resource=\"" << ref(d) << "\"/>\n";
        if (slot.is_object())
            for (const auto& r : slot.range_classes())
                out << "    <rdfs:range rdf:resource=\"" << ref(r) << "\"/>\n";
        else
            out << "    <rdfs:range rdf:resource=\"" << kXsd << to_string(slot.range_kind()) << "\"/>\n";
        out << "    <om:minCardinality>" << slot.card.min << "</om:minCardinality>\n"
            << "    <om:maxCardinality>" << (slot.card.max ? std::to_string(*slot.card.max) : "unbounded")
            << "</om:maxCardinality>\n"
            << "  </" << tag << ">\n";
    }
    for (const auto& [name, inst] : o.instances()) {
        out << "  <owl:NamedIndividual rdf:about=\"" << ref(name) << "\">\n";
        for (const auto& t : inst.types)
            out << "    <rdf:type rdf:resource=\"" << ref(t) << "\"/>\n";
        for (const auto& [slot, values] : inst.values) {
            for (const auto& v : values) {
                if (const auto* r = std::get_if<InstanceRef>(&v)) {
                    out << "    <" << slot << " rdf:resource=\"" << ref(r->name) << "\"/>\n";
                } else {
                    const auto& lit = std::get<Literal>(v);
                    out << "    <" << slot << " rdf:datatype=\"" << kXsd << to_string(lit.kind) << "\">"
                        << xml::escape_text(lit.lexical) << "</" << slot << ">\n";
                }
            }
        }
        out << "  </owl:NamedIndividual>\n";
    }
    out << "</rdf:RDF>\n";
    return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoFailure, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error(ErrorCode::IoFailure, "failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoFailure, "cannot replace '" + path.string() + "'");
    }
}

void write_owl_file(const Ontology& ontology, const std::filesystem::path& path)
{
    write_text_file(path, write_owl(ontology));
}

std::string write_canonical(const Ontology& o)
{
    std::ostringstream out;
    out << "ontology " << o.name() << "\n";
    for (const auto& [name, cls] : o.classes())
        out << "class " << name << " super=" << (cls.superclasses.empty() ? std::string(kThing) : join(cls.superclasses))
            << "\n";
    for (const auto& [name, slot] : o.slots())
        if (slot.is_object())
            out << "objprop " << name << " domain=" << join(slot.domain) << " range=" << join(slot.range_classes())
                << "\n";
    for (const auto& [name, slot] : o.slots())
        if (!slot.is_object())
            out << "dataprop " << name << " domain=" << join(slot.domain) << " range=" << to_string(slot.range_kind())
                << "\n";
    for (const auto& [name, slot] : o.slots())
        out << "card " << name << " " << to_string(slot.card) << "\n";
    for (const auto& [name, inst] : o.instances())
        out << "instance " << name << " types=" << join(inst.types) << "\n";
    for (const auto& [name, inst] : o.instances()) {
        for (const auto& [slot, values] : inst.values) {
            std::vector<std::string> lines;
            for (const auto& v : values) {
                if (const auto* r = std::get_if<InstanceRef>(&v))
                    lines.push_back("value " + name + " " + slot + " ref " + r->name);
                else
                    lines.push_back("value " + name + " " + slot + " " +
                                    std::string(to_string(std::get<Literal>(v).kind)) + " " +
                                    quote(std::get<Literal>(v).lexical));
            }
            std::sort(lines.begin(), lines.end());
            for (const auto& l : lines)
                out << l << "\n";
        }
    }
    return out.str();
}

} // namespace ontomerge
