#include "scikg/parser.hpp"

#include <algorithm>
#include <cassert>

namespace scikg {

namespace {

bool is_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// One rewrite instruction for strip_annotations.
struct Edit {
    Span span;
    std::string replacement;
    bool collapse_whitespace = false;  // starred annotation: eat surrounding ws
    bool remove_line = false;          // \addmetaproperty: drop the line if blank
};

struct ParseResult {
    AnnotationDocument doc;
    std::vector<Edit> edits;
};

bool valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c & 0xe0) == 0xc0 && c >= 0xc2) extra = 1;
        else if ((c & 0xf0) == 0xe0) extra = 2;
        else if ((c & 0xf8) == 0xf0 && c <= 0xf4) extra = 3;
        else return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= text.size() || (static_cast<unsigned char>(text[i + k]) & 0xc0) != 0x80)
                return false;
        }
        i += extra + 1;
    }
    return true;
}

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    ParseResult run() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                skip_comment();
            } else if (c == '{') {
                open_braces_.push_back(pos_);
                ++pos_;
            } else if (c == '}') {
                if (open_braces_.empty())
                    throw ParseError(ParseErrorKind::UnbalancedBraces, pos_,
                                     "unmatched '}' at offset " + std::to_string(pos_));
                open_braces_.pop_back();
                ++pos_;
            } else if (c == '\\') {
                command();
            } else {
                ++pos_;
            }
        }
        if (!open_braces_.empty())
            throw ParseError(ParseErrorKind::UnbalancedBraces, open_braces_.back(),
                             "unmatched '{' at offset " + std::to_string(open_braces_.back()));
        return std::move(result_);
    }

private:
    [[noreturn]] void malformed(std::size_t position, const std::string& name,
                                const std::string& why) {
        throw ParseError(ParseErrorKind::MalformedCommand, position,
                         "\\" + name + ": " + why + " (offset " + std::to_string(position) + ")");
    }

    // pos_ is at an unescaped '%'; consume up to (not including) the newline.
    void skip_comment() {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    // Whitespace and comments between a command and its arguments.
    void skip_inter_arg() {
        while (pos_ < text_.size()) {
            if (is_space(text_[pos_])) ++pos_;
            else if (text_[pos_] == '%') skip_comment();
            else break;
        }
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    // pos_ is at '\\'.
    void command() {
        std::size_t start = pos_;
        ++pos_;
        if (pos_ >= text_.size())
            return;  // stray trailing backslash, treat as text
        if (!is_letter(text_[pos_])) {
            ++pos_;  // control symbol / escaped character
            return;
        }
        std::size_t name_begin = pos_;
        while (pos_ < text_.size() && is_letter(text_[pos_])) ++pos_;
        std::string name(text_.substr(name_begin, pos_ - name_begin));

        if (auto kind = mandatory_from_command(name)) {
            property_command(start, name, PropertyKind(*kind), /*named=*/false);
        } else if (name == "contribution") {
            property_command(start, name, PropertyKind(MandatoryKind::Method), /*named=*/true);
        } else if (name == "metatitle") {
            biblio_command(start, name);
        } else if (name == "metaauthor") {
            biblio_command(start, name);
        } else if (name == "researchfield") {
            biblio_command(start, name);
        } else if (name == "addmetaproperty") {
            decl_command(start, name);
        } else if (name == "uri") {
            malformed(start, name, "only allowed inside a property value");
        } else if (name == "begin") {
            maybe_skip_verbatim(start);
        }
        // unknown commands: leave their arguments to the main scan
    }

    // \begin{verbatim} / \begin{lstlisting}: skip to the matching \end.
    void maybe_skip_verbatim(std::size_t start) {
        std::size_t save = pos_;
        skip_inter_arg();
        if (peek() != '{') {
            pos_ = save;
            return;
        }
        std::size_t name_begin = pos_ + 1;
        std::size_t close = text_.find('}', name_begin);
        if (close == std::string_view::npos) {
            pos_ = save;
            return;
        }
        std::string env(text_.substr(name_begin, close - name_begin));
        if (env != "verbatim" && env != "lstlisting") {
            pos_ = save;
            return;
        }
        std::string end_marker = "\\end{" + env + "}";
        std::size_t end = text_.find(end_marker, close + 1);
        if (end == std::string_view::npos)
            malformed(start, "begin", "unterminated " + env + " environment");
        pos_ = end + end_marker.size();
    }

    // The five property commands and \contribution.
    void property_command(std::size_t start, const std::string& name, PropertyKind kind,
                          bool named) {
        skip_inter_arg();
        bool starred = false;
        if (peek() == '*') {
            starred = true;
            ++pos_;
        }
        skip_inter_arg();
        std::vector<std::string> contributions = optional_ids();
        if (named) {
            std::string raw = raw_group(start, name);
            std::string_view id = trim(raw);
            std::optional<std::string> prefix;
            std::string_view prop = id;
            if (auto colon = id.find(':'); colon != std::string_view::npos) {
                prefix = std::string(id.substr(0, colon));
                prop = id.substr(colon + 1);
                if (!is_valid_property_name(*prefix))
                    malformed(start, name, "invalid namespace prefix '" + *prefix + "'");
            }
            if (!is_valid_property_name(prop))
                malformed(start, name, "invalid property name '" + std::string(prop) + "'");
            kind = PropertyKind::custom(std::move(prefix), std::string(prop));
        }
        auto [value, link] = value_group(start, name, /*allow_uri=*/true);
        Span span{start, pos_};

        PropertyAnnotation annotation{std::move(kind), std::move(value), std::move(contributions),
                                      !starred, std::move(link), span};
        Edit edit;
        edit.span = span;
        if (starred) {
            edit.collapse_whitespace = true;
        } else if (annotation.link) {
            edit.replacement = "\\href{" + annotation.link->uri + "}{" +
                               annotation.link->label.value_or(annotation.link->uri) + "}";
        } else {
            edit.replacement = annotation.value;
        }
        result_.doc.annotations.push_back(std::move(annotation));
        result_.edits.push_back(std::move(edit));
    }

    void biblio_command(std::size_t start, const std::string& name) {
        auto [value, link] = value_group(start, name, /*allow_uri=*/false);
        (void)link;
        Span span{start, pos_};
        Bibliographic& biblio = result_.doc.biblio;
        if (name == "metaauthor") {
            biblio.authors.push_back(value);
        } else {
            std::optional<std::string>& slot =
                name == "metatitle" ? biblio.title : biblio.research_field;
            std::string field = name == "metatitle" ? "title" : "research field";
            if (slot) {
                result_.doc.parse_warnings.push_back(Warning{
                    WarningCode::DuplicateBiblio, field,
                    "duplicate \\" + name + "; keeping the first occurrence", start});
            } else {
                slot = value;
            }
        }
        result_.edits.push_back(Edit{span, std::move(value), false, false});
    }

    void decl_command(std::size_t start, const std::string& name) {
        skip_inter_arg();
        if (peek() != '[')
            malformed(start, name, "requires [uri] or [abbreviation, uri]");
        std::size_t close = text_.find(']', pos_ + 1);
        if (close == std::string_view::npos)
            malformed(start, name, "unterminated optional argument");
        std::string_view inside = text_.substr(pos_ + 1, close - pos_ - 1);
        pos_ = close + 1;

        std::optional<std::string> abbreviation;
        std::string_view uri = trim(inside);
        if (auto comma = inside.find(','); comma != std::string_view::npos) {
            abbreviation = std::string(trim(inside.substr(0, comma)));
            uri = trim(inside.substr(comma + 1));
            if (!is_valid_property_name(*abbreviation))
                malformed(start, name, "invalid namespace abbreviation '" + *abbreviation + "'");
        }
        if (!is_absolute_uri(uri))
            malformed(start, name, "namespace uri '" + std::string(uri) + "' is not absolute");

        std::string raw = raw_group(start, name);
        std::string_view prop = trim(raw);
        if (!is_valid_property_name(prop))
            malformed(start, name, "invalid property name '" + std::string(prop) + "'");

        NamespaceDecl decl{std::move(abbreviation), std::string(uri), std::string(prop)};
        if (decl.abbreviation) {
            if (auto existing = result_.doc.namespace_uri(*decl.abbreviation);
                existing && *existing != decl.uri) {
                throw ParseError(ParseErrorKind::DuplicateNamespaceConflict, start,
                                 "namespace abbreviation '" + *decl.abbreviation +
                                     "' already registered for " + *existing);
            }
        }
        auto& decls = result_.doc.namespaces;
        if (std::find(decls.begin(), decls.end(), decl) == decls.end())
            decls.push_back(std::move(decl));

        result_.edits.push_back(Edit{Span{start, pos_}, "", false, true});
    }

    // [id, id, ...]; absent or blank means contribution "1".
    std::vector<std::string> optional_ids() {
        std::vector<std::string> ids;
        if (peek() == '[') {
            std::size_t close = text_.find(']', pos_ + 1);
            if (close == std::string_view::npos)
                throw ParseError(ParseErrorKind::UnbalancedBraces, pos_,
                                 "unterminated '[' at offset " + std::to_string(pos_));
            std::string_view inside = text_.substr(pos_ + 1, close - pos_ - 1);
            pos_ = close + 1;
            std::size_t item_begin = 0;
            for (std::size_t i = 0; i <= inside.size(); ++i) {
                if (i == inside.size() || inside[i] == ',') {
                    std::string_view id = trim(inside.substr(item_begin, i - item_begin));
                    item_begin = i + 1;
                    if (id.empty())
                        continue;
                    if (std::find(ids.begin(), ids.end(), id) == ids.end())
                        ids.emplace_back(id);
                }
            }
            skip_inter_arg();
        }
        if (ids.empty())
            ids.emplace_back("1");
        return ids;
    }

    // A braced group taken almost verbatim: comments dropped, everything else
    // (including nested braces and commands) kept.
    std::string raw_group(std::size_t command_start, const std::string& name) {
        skip_inter_arg();
        if (peek() != '{')
            malformed(command_start, name, "expected '{'");
        std::size_t open = pos_;
        ++pos_;
        std::string out;
        int depth = 1;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                skip_comment();
                continue;
            }
            if (c == '\\' && pos_ + 1 < text_.size() && !is_letter(text_[pos_ + 1])) {
                out.append(text_.substr(pos_, 2));
                pos_ += 2;
                continue;
            }
            if (c == '{') ++depth;
            if (c == '}') {
                --depth;
                if (depth == 0) {
                    ++pos_;
                    skip_inter_arg();
                    return out;
                }
            }
            out.push_back(c);
            ++pos_;
        }
        throw ParseError(ParseErrorKind::UnbalancedBraces, open,
                         "unmatched '{' at offset " + std::to_string(open));
    }

    // A braced group resolved to plain text: escaped characters are kept
    // literally, grouping braces unwrap, unknown commands drop their name,
    // comments vanish. \uri, when allowed, must make up the whole value.
    std::pair<std::string, std::optional<EntityLink>> value_group(std::size_t command_start,
                                                                  const std::string& name,
                                                                  bool allow_uri) {
        skip_inter_arg();
        if (peek() != '{')
            malformed(command_start, name, "expected '{'");
        std::size_t open = pos_;
        ++pos_;
        std::string value;
        std::optional<EntityLink> link;
        int depth = 1;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                skip_comment();
                if (pos_ < text_.size()) ++pos_;  // the comment owns its newline
                continue;
            }
            if (c == '{') {
                ++depth;
                ++pos_;
                continue;
            }
            if (c == '}') {
                --depth;
                ++pos_;
                if (depth == 0) {
                    if (link)
                        value = link->label.value_or(link->uri);
                    return {std::move(value), std::move(link)};
                }
                continue;
            }
            if (c == '\\') {
                if (pos_ + 1 >= text_.size())
                    throw ParseError(ParseErrorKind::UnbalancedBraces, open,
                                     "unmatched '{' at offset " + std::to_string(open));
                if (!is_letter(text_[pos_ + 1])) {
                    if (link)
                        malformed(command_start, name, "content not allowed after \\uri");
                    value.append(text_.substr(pos_, 2));
                    pos_ += 2;
                    continue;
                }
                std::size_t cmd_begin = pos_;
                ++pos_;
                std::size_t name_begin = pos_;
                while (pos_ < text_.size() && is_letter(text_[pos_])) ++pos_;
                std::string inner(text_.substr(name_begin, pos_ - name_begin));
                if (inner == "uri") {
                    if (!allow_uri)
                        malformed(cmd_begin, inner, "only allowed inside a property value");
                    if (link)
                        malformed(command_start, name, "at most one \\uri per value");
                    if (!trim(value).empty())
                        malformed(command_start, name, "\\uri must be the entire value");
                    link = uri_command(cmd_begin);
                    value.clear();
                    continue;
                }
                if (mandatory_from_command(inner) || inner == "contribution" ||
                    inner == "metatitle" || inner == "metaauthor" || inner == "researchfield" ||
                    inner == "addmetaproperty") {
                    malformed(cmd_begin, inner, "not allowed inside a property value");
                }
                // unknown command: drop the name, keep (unwrapped) arguments
                continue;
            }
            if (link) {
                if (!is_space(c))
                    malformed(command_start, name, "content not allowed after \\uri");
                ++pos_;
                continue;
            }
            value.push_back(c);
            ++pos_;
        }
        throw ParseError(ParseErrorKind::UnbalancedBraces, open,
                         "unmatched '{' at offset " + std::to_string(open));
    }

    EntityLink uri_command(std::size_t start) {
        std::string uri_raw = raw_group(start, "uri");
        std::string uri(trim(uri_raw));
        if (!is_absolute_uri(uri))
            malformed(start, "uri", "'" + uri + "' is not an absolute URI");
        std::optional<std::string> label;
        if (peek() == '{') {
            auto [text, inner_link] = value_group(start, "uri", /*allow_uri=*/false);
            (void)inner_link;
            if (text.empty())
                malformed(start, "uri", "label must not be empty");
            label = std::move(text);
        }
        return EntityLink{std::move(uri), std::move(label)};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<std::size_t> open_braces_;
    ParseResult result_;
};

ParseResult parse_impl(std::string_view text) {
    if (!valid_utf8(text))
        throw ParseError(ParseErrorKind::InvalidEncoding, 0, "source text is not valid UTF-8");
    ParseResult result = Scanner(text).run();
    result.doc.source_digest = content_digest(text);
    return result;
}

}  // namespace

AnnotationDocument parse_source(const SourceDocument& src) {
    return parse_impl(src.text).doc;
}

std::string strip_annotations(const SourceDocument& src, const AnnotationDocument& doc) {
    if (content_digest(src.text) != doc.source_digest)
        throw ParseError(ParseErrorKind::SpanMismatch, 0,
                         "document was not parsed from this source text");
    ParseResult parsed = parse_impl(src.text);
    const std::string& text = src.text;

    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    for (const Edit& edit : parsed.edits) {
        out.append(text, pos, edit.span.begin - pos);
        pos = edit.span.end;
        if (edit.collapse_whitespace) {
            std::size_t removed = 0;
            while (!out.empty() && is_space(out.back())) {
                out.pop_back();
                ++removed;
            }
            while (pos < text.size() && is_space(text[pos])) {
                ++pos;
                ++removed;
            }
            if (removed > 0)
                out.push_back(' ');
        } else if (edit.remove_line) {
            std::size_t line_start = out.find_last_of('\n');
            std::size_t head = line_start == std::string::npos ? 0 : line_start + 1;
            bool head_blank = std::all_of(out.begin() + static_cast<std::ptrdiff_t>(head),
                                          out.end(), is_space);
            std::size_t scan = pos;
            while (scan < text.size() && (text[scan] == ' ' || text[scan] == '\t' || text[scan] == '\r'))
                ++scan;
            bool tail_blank = scan >= text.size() || text[scan] == '\n';
            if (head_blank && tail_blank) {
                out.erase(head);
                pos = scan < text.size() ? scan + 1 : scan;
            }
        } else {
            out += edit.replacement;
        }
    }
    out.append(text, pos, std::string::npos);
    return out;
}

}  // namespace scikg
