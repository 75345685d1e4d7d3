// parser.hpp - turns LaTeX-like source with scikg annotation commands into an
// AnnotationDocument, and rewrites source with the annotations rendered or
// removed.
//
// Recognized commands:
//   \researchproblem, \objective, \method, \result, \conclusion
//       each:  optional *, optional [id,id,...], one braced value
//   \contribution[ids]{name}{value}, \contribution*{name}{value}
//   \uri{URI}{label}, \uri{URI}          only inside a property value
//   \metatitle{..}, \metaauthor{..}, \researchfield{..}
//   \addmetaproperty[abbrev, uri]{name}, \addmetaproperty[uri]{name}
//
// TeX comments (unescaped % to end of line) are ignored, verbatim and
// lstlisting environments are skipped, braces must balance across groups.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "scikg/model.hpp"

namespace scikg {

struct SourceDocument {
    std::string text;               // UTF-8
    std::string origin = "<stdin>"; // path, for messages only
};

enum class ParseErrorKind {
    UnbalancedBraces,
    MalformedCommand,
    DuplicateNamespaceConflict,
    SpanMismatch,
    InvalidEncoding,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t position, const std::string& message)
        : std::runtime_error(message), kind_(kind), position_(position) {}

    ParseErrorKind kind() const { return kind_; }
    std::size_t position() const { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

// Parses the source into a document. Annotations carry byte spans into
// src.text; the document records the source digest for later span checks.
AnnotationDocument parse_source(const SourceDocument& src);

// Rewrites the source for human consumption: visible annotations are
// replaced by their value (entity links become \href{uri}{label}), starred
// annotations vanish with surrounding whitespace collapsed to one space,
// biblio commands unwrap to their content, \addmetaproperty lines are
// dropped. Non-command text passes through byte for byte.
//
// Throws ParseError(SpanMismatch) when doc was not parsed from src.
std::string strip_annotations(const SourceDocument& src, const AnnotationDocument& doc);

}  // namespace scikg
