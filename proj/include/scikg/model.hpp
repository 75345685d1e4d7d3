// model.hpp - domain types shared by the scikg toolchain: annotation kinds,
// entity links, namespace declarations, bibliographic metadata, the parsed
// document aggregate, plus the completeness validator and contribution
// grouping.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace scikg {

// ---------------------------------------------------------------------------
// Property kinds
// ---------------------------------------------------------------------------

// The five predefined contribution properties, in their fixed reporting order.
enum class MandatoryKind {
    ResearchProblem,
    Objective,
    Method,
    Result,
    Conclusion,
};

inline constexpr std::array<MandatoryKind, 5> kMandatoryKinds = {
    MandatoryKind::ResearchProblem, MandatoryKind::Objective,
    MandatoryKind::Method,          MandatoryKind::Result,
    MandatoryKind::Conclusion,
};

// Command / XML element name: "researchproblem", "objective", ...
std::string_view command_name(MandatoryKind kind);

// Human-readable label: "research problem", "objective", ...
std::string_view display_name(MandatoryKind kind);

// Reverse of command_name.
std::optional<MandatoryKind> mandatory_from_command(std::string_view name);

// A user-declared property. The prefix, when present, must resolve to a
// registered NamespaceDecl abbreviation before serialization.
struct CustomKind {
    std::optional<std::string> prefix;
    std::string name;

    bool operator==(const CustomKind&) const = default;
};

class PropertyKind {
public:
    PropertyKind(MandatoryKind kind) : value_(kind) {}

    // Throws std::invalid_argument if the name is empty or contains
    // whitespace or braces.
    static PropertyKind custom(std::optional<std::string> prefix, std::string name);

    bool is_mandatory() const { return std::holds_alternative<MandatoryKind>(value_); }
    MandatoryKind mandatory() const { return std::get<MandatoryKind>(value_); }
    const CustomKind& custom_kind() const { return std::get<CustomKind>(value_); }

    // Element-local name used in metadata packets ("researchproblem", "p-value").
    std::string xml_name() const;
    // Label used when resolving graph predicates ("research problem", "p-value").
    std::string label() const;

    bool operator==(const PropertyKind&) const = default;

private:
    explicit PropertyKind(CustomKind custom) : value_(std::move(custom)) {}

    std::variant<MandatoryKind, CustomKind> value_;
};

// True if the name is usable both as a property name and as an XML element
// local name: first char letter or '_', rest letters, digits, '_', '-', '.'.
bool is_valid_property_name(std::string_view name);

// True if the string parses as an absolute URI (has a scheme).
bool is_absolute_uri(std::string_view uri);

// ---------------------------------------------------------------------------
// Annotation pieces
// ---------------------------------------------------------------------------

struct EntityLink {
    std::string uri;                    // absolute
    std::optional<std::string> label;   // non-empty when present

    bool operator==(const EntityLink&) const = default;
};

// Byte range [begin, end) in the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
};

struct PropertyAnnotation {
    PropertyKind kind;
    std::string value;                      // braced content as plain text
    std::vector<std::string> contributions; // non-empty, ordered, deduplicated
    bool visible = true;                    // false for the starred variant
    std::optional<EntityLink> link;
    std::optional<Span> span;               // absent on documents rebuilt from metadata
};

struct NamespaceDecl {
    std::optional<std::string> abbreviation;
    std::string uri;       // absolute, non-empty
    std::string property;

    bool operator==(const NamespaceDecl&) const = default;
};

struct Bibliographic {
    std::optional<std::string> title;
    std::vector<std::string> authors;       // source order
    std::optional<std::string> research_field;

    bool empty() const { return !title && authors.empty() && !research_field; }
    bool operator==(const Bibliographic&) const = default;
};

// ---------------------------------------------------------------------------
// Warnings
// ---------------------------------------------------------------------------

enum class WarningCode {
    MissingMandatory,
    DuplicateBiblio,
    UnknownPrefix,
};

struct Warning {
    WarningCode code;
    std::string subject;  // kind label, biblio field name, or prefix
    std::string message;
    std::optional<std::size_t> position;  // source offset, for ordering

    bool operator==(const Warning&) const = default;
};

// ---------------------------------------------------------------------------
// Document
// ---------------------------------------------------------------------------

struct AnnotationDocument {
    std::vector<PropertyAnnotation> annotations;  // ordered by span start
    std::vector<NamespaceDecl> namespaces;
    Bibliographic biblio;
    std::string source_digest;
    // Issues recorded while parsing (currently duplicate biblio fields);
    // surfaced through validate().
    std::vector<Warning> parse_warnings;

    // URI registered for an abbreviation, if any.
    std::optional<std::string> namespace_uri(std::string_view abbreviation) const;
};

// FNV-1a 64-bit content hash, as 16 hex digits.
std::string content_digest(std::string_view text);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Reports completeness and consistency issues. Never fails: one
// MissingMandatory per absent mandatory kind (fixed order), then
// UnknownPrefix / DuplicateBiblio ordered by source position.
std::vector<Warning> validate(const AnnotationDocument& doc);

struct GroupedProperty {
    PropertyKind kind;
    std::string value;
    std::optional<EntityLink> link;

    bool operator==(const GroupedProperty&) const = default;
};

// Contribution id -> properties in source order. An annotation tagged with
// several contributions appears in each of its groups.
using ContributionGroups = std::map<std::string, std::vector<GroupedProperty>>;

ContributionGroups group_contributions(const AnnotationDocument& doc);

}  // namespace scikg
