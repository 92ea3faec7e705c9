#pragma once
// Lifting XML data sources into local ontologies.
//
// Mapping rules:
//  - an element is complex when some occurrence has child elements or
//    attributes, or when it never carries text; complex elements become
//    classes, all other elements and every attribute become leaf fields;
//  - nesting of a complex child under a complex parent becomes the object
//    property <prefix><child> with domain {parent} and range {child};
//  - a leaf field becomes a datatype property ranging over the datatype
//    inferred from every observed value;
//  - max-card is unbounded when the child repeats under one parent instance,
//    min-card is 0 when some parent instance lacks it.
// Namespaces are stripped; only local names are used.

#include "ontomerge/model.hpp"
#include "ontomerge/xml.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ontomerge::ingest {

struct LeafField {
    std::string name;
    XsdKind kind = XsdKind::String;
    unsigned occurs_min = 1;
    std::optional<unsigned> occurs_max = 1; // nullopt = unbounded
};

struct ChildRef {
    std::string name;
    unsigned occurs_min = 1;
};

/// Schema of one complex element.
struct ElementSchema {
    std::string name;
    std::vector<ChildRef> children; // complex children, first-seen order
    std::vector<LeafField> fields;  // simple children and attributes
    bool repeatable = false;        // occurs more than once under some parent instance

    const LeafField* field(std::string_view n) const;
    const ChildRef* child(std::string_view n) const;
};

struct Schema {
    std::string root;
    std::map<std::string, ElementSchema> elements;
    bool from_xsd = false; // leaf kinds are declared rather than inferred
    std::vector<std::string> warnings;

    const ElementSchema* find(std::string_view name) const;
};

struct LiftConfig {
    std::string ontology_name;
    std::string object_property_prefix = "has";
    bool root_as_class = true;
    bool with_instances = false;
    std::optional<std::filesystem::path> synonym_table_path;
};

/// First kind in integer, decimal, NCName, NMTOKEN, string admitting every value.
/// Throws empty-input on an empty list.
XsdKind infer_datatype(std::span<const std::string> values);

/// Union schema over documents sharing one root element name.
/// Throws malformed-xml on an empty list and mixed-roots on differing roots.
Schema infer_schema(std::span<const xml::Element> documents);

/// Reads the restricted XSD profile (element / complexType / sequence / all /
/// attribute with built-in types). Unknown types map to string with a warning.
Schema read_xsd(const xml::Element& schema_root);

Ontology lift(const Schema& schema, std::span<const xml::Element> documents, const LiftConfig& config);

/// Convenience: parse files, infer (or read the XSD), lift.
Ontology lift_files(std::span<const std::filesystem::path> files, const LiftConfig& config,
                    const std::optional<std::filesystem::path>& xsd = std::nullopt,
                    std::vector<std::string>* warnings = nullptr);

} // namespace ontomerge::ingest
