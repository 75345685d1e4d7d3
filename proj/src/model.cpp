#include "scikg/model.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace scikg {

namespace {

constexpr std::array<std::string_view, 5> kCommandNames = {
    "researchproblem", "objective", "method", "result", "conclusion",
};

constexpr std::array<std::string_view, 5> kDisplayNames = {
    "research problem", "objective", "method", "result", "conclusion",
};

}  // namespace

std::string_view command_name(MandatoryKind kind) {
    return kCommandNames[static_cast<std::size_t>(kind)];
}

std::string_view display_name(MandatoryKind kind) {
    return kDisplayNames[static_cast<std::size_t>(kind)];
}

std::optional<MandatoryKind> mandatory_from_command(std::string_view name) {
    for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
        if (kCommandNames[i] == name)
            return static_cast<MandatoryKind>(i);
    }
    return std::nullopt;
}

PropertyKind PropertyKind::custom(std::optional<std::string> prefix, std::string name) {
    if (name.empty())
        throw std::invalid_argument("custom property name must not be empty");
    for (char c : name) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '{' || c == '}')
            throw std::invalid_argument("custom property name must not contain whitespace or braces");
    }
    if (prefix && prefix->empty())
        throw std::invalid_argument("custom property prefix must not be empty");
    return PropertyKind(CustomKind{std::move(prefix), std::move(name)});
}

std::string PropertyKind::xml_name() const {
    if (is_mandatory())
        return std::string(command_name(mandatory()));
    return custom_kind().name;
}

std::string PropertyKind::label() const {
    if (is_mandatory())
        return std::string(display_name(mandatory()));
    return custom_kind().name;
}

bool is_valid_property_name(std::string_view name) {
    if (name.empty())
        return false;
    const auto letter = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    };
    if (!letter(name.front()) && name.front() != '_')
        return false;
    return std::all_of(name.begin(), name.end(), [&](char c) {
        return letter(c) || (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    });
}

bool is_absolute_uri(std::string_view uri) {
    // scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":"
    auto colon = uri.find(':');
    if (colon == std::string_view::npos || colon == 0)
        return false;
    char first = uri.front();
    if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z')))
        return false;
    for (std::size_t i = 1; i < colon; ++i) {
        char c = uri[i];
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
        if (!ok)
            return false;
    }
    return colon + 1 < uri.size();
}

std::optional<std::string> AnnotationDocument::namespace_uri(std::string_view abbreviation) const {
    for (const auto& decl : namespaces) {
        if (decl.abbreviation && *decl.abbreviation == abbreviation)
            return decl.uri;
    }
    return std::nullopt;
}

std::string content_digest(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

std::vector<Warning> validate(const AnnotationDocument& doc) {
    std::vector<Warning> warnings;

    for (MandatoryKind kind : kMandatoryKinds) {
        bool present = std::any_of(doc.annotations.begin(), doc.annotations.end(),
                                   [&](const PropertyAnnotation& a) {
                                       return a.kind.is_mandatory() && a.kind.mandatory() == kind;
                                   });
        if (!present) {
            warnings.push_back(Warning{
                WarningCode::MissingMandatory,
                std::string(display_name(kind)),
                "missing mandatory property '" + std::string(display_name(kind)) + "'",
                std::nullopt,
            });
        }
    }

    // Unknown prefixes, one warning per distinct custom kind, at its first use.
    std::vector<Warning> positional;
    std::vector<CustomKind> reported;
    for (const auto& annotation : doc.annotations) {
        if (annotation.kind.is_mandatory())
            continue;
        const CustomKind& kind = annotation.kind.custom_kind();
        if (!kind.prefix || doc.namespace_uri(*kind.prefix))
            continue;
        if (std::find(reported.begin(), reported.end(), kind) != reported.end())
            continue;
        reported.push_back(kind);
        positional.push_back(Warning{
            WarningCode::UnknownPrefix,
            *kind.prefix,
            "unknown namespace prefix '" + *kind.prefix + "' in property '" +
                *kind.prefix + ":" + kind.name + "'",
            annotation.span ? std::optional<std::size_t>(annotation.span->begin) : std::nullopt,
        });
    }

    for (const auto& warning : doc.parse_warnings)
        positional.push_back(warning);

    std::stable_sort(positional.begin(), positional.end(),
                     [](const Warning& a, const Warning& b) {
                         return a.position.value_or(0) < b.position.value_or(0);
                     });
    warnings.insert(warnings.end(), positional.begin(), positional.end());
    return warnings;
}

ContributionGroups group_contributions(const AnnotationDocument& doc) {
    ContributionGroups groups;
    for (const auto& annotation : doc.annotations) {
        for (const auto& id : annotation.contributions) {
            groups[id].push_back(GroupedProperty{annotation.kind, annotation.value, annotation.link});
        }
    }
    return groups;
}

}  // namespace scikg
