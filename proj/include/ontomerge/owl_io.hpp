#pragma once
// OWL subset (RDF/XML) reader and writer, and the canonical text export.
//
// The OWL profile is documented in docs/formats.md. The canonical form is one
// fact per line, grouped by kind (class, objprop, dataprop, card, instance,
// value) and sorted by name within each group:
//
//   ontology GlobalOntology
//   class author super=Person
//   objprop hasbook domain=vendor range=book
//   dataprop year domain=book range=integer
//   card year 1..1
//   instance book_1 types=book
//   value book_1 year integer "2000"
//   value vendor_1 hasbook ref book_1

#include "ontomerge/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ontomerge {

inline constexpr std::string_view kOntologyIriPrefix = "urn:ontomerge:";

/// Parses the OWL subset. Unsupported constructs are skipped and reported in
/// `warnings`. The ontology is named after its owl:Ontology IRI, or
/// `fallback_name` when it has none.
/// Throws malformed-xml, unresolvable-reference.
Ontology read_owl(std::string_view text, std::string_view fallback_name, std::vector<std::string>* warnings = nullptr,
                  std::string_view source_name = "<memory>");
Ontology read_owl_file(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

std::string write_owl(const Ontology& ontology);
/// Throws io-failure.
void write_owl_file(const Ontology& ontology, const std::filesystem::path& path);

std::string write_canonical(const Ontology& ontology);

/// Writes `content` to `path` through a temporary file so readers never see a
/// partial file. Throws io-failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

} // namespace ontomerge
