#pragma once

#include <string>
#include <vector>

namespace tidykg {

// Lowercase ASCII copy.
std::string to_lower(const std::string& s);

// Strip surrounding whitespace.
std::string strip(const std::string& s);

// Canonical entity / relation form used across all knowledge sources:
// lowercase, underscores to spaces, runs of whitespace collapsed, stripped.
std::string normalize_name(const std::string& raw);

// "AtLocation" -> "at location". Splits camel case before lowering; existing
// separators ('_', '/') become spaces.
std::string camel_to_words(const std::string& raw);

// Term segment of a ConceptNet concept URI: "/c/en/dirty_fork/n" -> "dirty_fork".
// Returns empty string when the URI has no term segment.
std::string conceptnet_term(const std::string& uri);

// Language code of a concept URI, e.g. "en"; empty if not a /c/ URI.
std::string conceptnet_language(const std::string& uri);

// Relation name of a relation URI: "/r/AtLocation" -> "AtLocation",
// "/r/dbpedia/genre" -> "dbpedia/genre". Empty when not a /r/ URI.
std::string conceptnet_relation(const std::string& uri);

// Whitespace/punctuation tokenizer; lowercases. "You see a fork." ->
// {"you","see","a","fork"}.
std::vector<std::string> tokenize(const std::string& text);

std::vector<std::string> split(const std::string& s, char sep);

// Split on runs of whitespace; fields are kept verbatim.
std::vector<std::string> split_whitespace(const std::string& s);

// "a" / "a and b" / "a, b and c"; empty input -> "nothing".
std::string join_names(const std::vector<std::string>& names);

// Fixed-point formatting helpers so CSV output is byte-stable.
std::string format_double(double v, int decimals);

}  // namespace tidykg
