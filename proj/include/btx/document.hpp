#pragma once

#include <cstddef>
#include <string>

namespace btx {

enum class Group { Human, AI, Manipulated, BackTranslated };

const char* to_string(Group g);
Group group_from_string(const std::string& s);

// A text unit with its authorship group and provenance metadata. Optional
// string fields use "" for absent. word_count is derived from body.
struct Document {
  std::string id;
  std::string body;
  Group group = Group::Human;
  std::string dataset;
  std::string generator;              // source LLM name, if any
  std::string intermediate_language;  // set iff group == BackTranslated
  std::string pair_id;                // links a human text with its AI counterpart
  std::string parent_id;              // for derived records (back-translations, manipulations)
  std::size_t word_count = 0;
};

// Builds a document with word_count filled in and invariants checked:
// body non-empty after whitespace normalization, intermediate_language
// present iff group == BackTranslated. Throws DomainError on violation.
Document make_document(std::string id, std::string body, Group group, std::string dataset = "");

// Re-checks the invariants of an already-populated document.
void validate_document(const Document& doc);

}  // namespace btx
