#include "btx/document.hpp"

#include "btx/errors.hpp"
#include "btx/text.hpp"
#include "btx/utf8.hpp"

namespace btx {

const char* to_string(Group group) {
  switch (group) {
    case Group::Human:
      return "human";
    case Group::AI:
      return "ai";
    case Group::Manipulated:
      return "manipulated";
    case Group::BackTranslated:
      return "backtranslated";
  }
  return "unknown";
}

Group group_from_string(const std::string& s) {
  if (s == "human") return Group::Human;
  if (s == "ai") return Group::AI;
  if (s == "manipulated") return Group::Manipulated;
  if (s == "backtranslated") return Group::BackTranslated;
  throw SchemaViolation(0, "group", "unknown group '" + s + "'");
}

void validate_document(const Document& doc) {
  if (doc.id.empty()) throw DomainError("document has empty id");
  if (utf8::normalize_whitespace(doc.body).empty()) throw EmptyInput("document '" + doc.id + "' has empty body");
  const bool needs_language = doc.group == Group::BackTranslated;
  if (needs_language && doc.intermediate_language.empty())
    throw DomainError("document '" + doc.id + "' is backtranslated but has no intermediate language");
  if (!needs_language && !doc.intermediate_language.empty())
    throw DomainError("document '" + doc.id + "' has an intermediate language but is not backtranslated");
}

Document make_document(std::string id, std::string body, Group group, std::string dataset) {
  Document doc;
  doc.id = std::move(id);
  doc.body = std::move(body);
  doc.group = group;
  doc.dataset = std::move(dataset);
  doc.word_count = tokenize_words(doc.body).size();
  validate_document(doc);
  return doc;
}

}  // namespace btx
