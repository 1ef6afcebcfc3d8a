#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ccattack::lang {

enum class Lang { java, python };

Lang lang_from_string(std::string_view name);
std::string_view to_string(Lang lang);

enum class TokenKind {
  identifier,
  keyword,
  literal,
  op,
  punct,
  comment_trivia,
  whitespace,
};

struct Token {
  std::string text;
  TokenKind kind = TokenKind::identifier;
  std::size_t begin = 0;  // byte offsets, [begin, end)
  std::size_t end = 0;
};

struct LexError : std::runtime_error {
  LexError(std::string msg, std::size_t offset)
      : std::runtime_error(std::move(msg)), offset(offset) {}
  std::size_t offset;
};

enum class RenameErrorKind { not_found, collision, invalid_identifier };

struct RenameError : std::runtime_error {
  RenameError(RenameErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind(kind) {}
  RenameErrorKind kind;
};

// Lossless token stream: concatenating the token texts reproduces the source
// byte for byte. Throws LexError on unterminated strings/comments.
std::vector<Token> tokenize(std::string_view code, Lang lang);

std::string detokenize(const std::vector<Token>& tokens);

// camelCase/snake_case splitting, lowercased, empty pieces dropped. Every
// non-alphanumeric byte separates pieces, so pieces never contain whitespace
// or quotes. "<unk>" stays whole.
std::vector<std::string> split_subtokens(std::string_view token_text);

// Lowercase subtoken stream of the whole snippet (identifier, keyword and
// literal tokens), the shared text representation used by the embedding
// trainer, the surrogate and the toy model.
std::vector<std::string> subtoken_stream(std::string_view code, Lang lang);

enum class IdentKind { method_name, variable, parameter };

std::string_view to_string(IdentKind kind);

struct IdentifierInfo {
  std::string name;
  IdentKind kind = IdentKind::variable;
  std::vector<std::pair<std::size_t, std::size_t>> occurrences;  // byte spans
  bool single_letter = false;
  // Byte offset of the declaring occurrence; orders identifiers by
  // declaration position.
  std::size_t decl_token = 0;
};

// Identifiers declared in the snippet: method/function name, parameters and
// local variables. Field accesses, type names and API calls are excluded.
// Occurrences list every identifier token whose text equals the name.
std::vector<IdentifierInfo> extract_identifiers(std::string_view code, Lang lang);

bool is_keyword(std::string_view text, Lang lang);

// True iff text lexes as exactly one identifier token (and is not a keyword).
bool lexes_as_identifier(std::string_view text, Lang lang);

// Renames every identifier-token occurrence of old_name to new_name. String
// literals and comments are untouched. Throws RenameError if old_name is not
// a declared identifier, new_name is not a legal fresh identifier, or
// new_name already occurs in the snippet.
std::string rename(std::string_view code, std::string_view old_name,
                   std::string_view new_name, Lang lang);

// Unchecked variant used by the random baseline and by identifier masking:
// replaces identifier tokens without any collision or well-formedness checks.
// Returns code unchanged when old_name does not occur.
std::string rename_unchecked(std::string_view code, std::string_view old_name,
                             std::string_view new_name, Lang lang);

// Syntactic-validity proxy (the stand-in for "passes compilation"): the code
// lexes, brackets balance, declarations are well formed, keywords do not
// occupy identifier positions, and (java) locals are declared before use /
// (python) indentation is consistent. Never throws.
bool validate(std::string_view code, Lang lang) noexcept;

}  // namespace ccattack::lang
