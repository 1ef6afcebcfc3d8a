#include "ccattack/lang.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <unordered_set>

namespace ccattack::lang {

namespace {

const std::unordered_set<std::string_view> kJavaKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch",
    "char", "class", "const", "continue", "default", "do", "double",
    "else", "enum", "extends", "final", "finally", "float", "for", "goto",
    "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return",
    "short", "static", "strictfp", "super", "switch", "synchronized",
    "this", "throw", "throws", "transient", "try", "void", "volatile",
    "while", "true", "false", "null",
};

// true/false/null lex as literals but still count as reserved words.
const std::unordered_set<std::string_view> kJavaWordLiterals = {"true", "false", "null"};

const std::unordered_set<std::string_view> kPythonKeywords = {
    "False", "None", "True", "and", "as", "assert", "async", "await",
    "break", "class", "continue", "def", "del", "elif", "else", "except",
    "finally", "for", "from", "global", "if", "import", "in", "is",
    "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
    "while", "with", "yield",
};

const std::unordered_set<std::string_view> kPythonWordLiterals = {"False", "None", "True"};

const std::unordered_set<std::string_view> kJavaPrimitiveTypes = {
    "byte", "short", "int", "long", "float", "double", "char", "boolean", "void",
};

// Keywords that begin (or belong to) statements and cannot appear inside an
// expression; used by the validity proxy to spot keyword-for-identifier
// substitutions.
const std::unordered_set<std::string_view> kJavaStatementKeywords = {
    "return", "if", "else", "while", "switch", "case", "do", "try",
    "catch", "finally", "for", "break", "continue", "throw",
};

const std::unordered_set<std::string_view> kPythonStatementKeywords = {
    "return", "pass", "break", "continue", "import", "def", "class",
    "while", "elif", "try", "except", "finally", "raise", "global",
    "nonlocal", "del", "assert",
};

constexpr std::string_view kUnkToken = "<unk>";

bool is_ident_start(char c, Lang lang) {
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return true;
  return lang == Lang::java && c == '$';
}

bool is_ident_cont(char c, Lang lang) {
  if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return true;
  return lang == Lang::java && c == '$';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool starts_with(std::string_view s, std::size_t pos, std::string_view what) {
  return s.size() - pos >= what.size() && s.compare(pos, what.size(), what) == 0;
}

const std::array<std::string_view, 32> kJavaOps = {
    ">>>=", ">>>", ">>=", "<<=", "==", "!=", "<=", ">=", "&&", "||",
    "++",   "--",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=",
    "<<",   ">>",  "->",  "::",  "+",  "-",  "*",  "/",  "%",  "=",
    "<",    ">",
};
const std::string_view kJavaSingleOps = "!~&|^?:@";
const std::string_view kJavaPunct = "(){}[];,.";

const std::array<std::string_view, 30> kPythonOps = {
    "**=", "//=", "<<=", ">>=", "==", "!=", "<=", ">=", "->", ":=",
    "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "@=", "**",
    "//",  "<<",  ">>",  "+",   "-",  "*",  "/",  "%",  "=",  "@",
};
const std::string_view kPythonSingleOps = "<>&|^~";
const std::string_view kPythonPunct = "()[]{},:;.";

std::size_t scan_number(std::string_view code, std::size_t i, Lang lang) {
  std::size_t j = i;
  if (code[j] == '0' && j + 1 < code.size() &&
      (code[j + 1] == 'x' || code[j + 1] == 'X' || code[j + 1] == 'b' ||
       code[j + 1] == 'B' || code[j + 1] == 'o' || code[j + 1] == 'O')) {
    j += 2;
    while (j < code.size() &&
           (std::isxdigit(static_cast<unsigned char>(code[j])) || code[j] == '_'))
      ++j;
    return j;
  }
  while (j < code.size() && (is_digit(code[j]) || code[j] == '_')) ++j;
  if (j < code.size() && code[j] == '.' && j + 1 < code.size() && is_digit(code[j + 1])) {
    ++j;
    while (j < code.size() && (is_digit(code[j]) || code[j] == '_')) ++j;
  }
  if (j < code.size() && (code[j] == 'e' || code[j] == 'E')) {
    std::size_t k = j + 1;
    if (k < code.size() && (code[k] == '+' || code[k] == '-')) ++k;
    if (k < code.size() && is_digit(code[k])) {
      j = k;
      while (j < code.size() && is_digit(code[j])) ++j;
    }
  }
  const std::string_view suffixes = lang == Lang::java ? "lLfFdD" : "jJ";
  while (j < code.size() && suffixes.find(code[j]) != std::string_view::npos) ++j;
  return j;
}

std::size_t scan_quoted(std::string_view code, std::size_t i, char quote, bool allow_newline) {
  // i points at the opening quote; returns one past the closing quote.
  std::size_t j = i + 1;
  while (j < code.size()) {
    char c = code[j];
    if (c == '\\') {
      j += 2;
      continue;
    }
    if (c == quote) return j + 1;
    if (c == '\n' && !allow_newline)
      throw LexError("unterminated string literal", i);
    ++j;
  }
  throw LexError("unterminated string literal", i);
}

std::size_t scan_triple(std::string_view code, std::size_t i, char quote) {
  const char q3[4] = {quote, quote, quote, 0};
  std::size_t j = i + 3;
  while (j < code.size()) {
    if (code[j] == '\\') {
      j += 2;
      continue;
    }
    if (starts_with(code, j, q3)) return j + 3;
    ++j;
  }
  throw LexError("unterminated string literal", i);
}

template <typename Ops>
std::size_t match_op(std::string_view code, std::size_t i, const Ops& ops,
                     std::string_view single_ops) {
  for (std::string_view op : ops)
    if (starts_with(code, i, op)) return op.size();
  if (single_ops.find(code[i]) != std::string_view::npos) return 1;
  return 0;
}

std::vector<Token> tokenize_java(std::string_view code) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = code.size();
  auto push = [&](std::size_t end, TokenKind kind) {
    out.push_back({std::string(code.substr(i, end - i)), kind, i, end});
    i = end;
  };
  while (i < n) {
    char c = code[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      std::size_t j = i;
      while (j < n && (code[j] == ' ' || code[j] == '\t' || code[j] == '\r' ||
                       code[j] == '\n'))
        ++j;
      push(j, TokenKind::whitespace);
      continue;
    }
    if (starts_with(code, i, "//")) {
      std::size_t j = i;
      while (j < n && code[j] != '\n') ++j;
      push(j, TokenKind::comment_trivia);
      continue;
    }
    if (starts_with(code, i, "/*")) {
      std::size_t j = code.find("*/", i + 2);
      if (j == std::string_view::npos) throw LexError("unterminated comment", i);
      push(j + 2, TokenKind::comment_trivia);
      continue;
    }
    if (c == '"') {
      push(scan_quoted(code, i, '"', false), TokenKind::literal);
      continue;
    }
    if (c == '\'') {
      push(scan_quoted(code, i, '\'', false), TokenKind::literal);
      continue;
    }
    if (starts_with(code, i, kUnkToken)) {
      push(i + kUnkToken.size(), TokenKind::identifier);
      continue;
    }
    if (is_digit(c)) {
      push(scan_number(code, i, Lang::java), TokenKind::literal);
      continue;
    }
    if (is_ident_start(c, Lang::java)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_cont(code[j], Lang::java)) ++j;
      std::string_view word = code.substr(i, j - i);
      TokenKind kind = TokenKind::identifier;
      if (kJavaWordLiterals.count(word))
        kind = TokenKind::literal;
      else if (kJavaKeywords.count(word))
        kind = TokenKind::keyword;
      push(j, kind);
      continue;
    }
    if (starts_with(code, i, "...")) {
      push(i + 3, TokenKind::punct);
      continue;
    }
    if (kJavaPunct.find(c) != std::string_view::npos) {
      push(i + 1, TokenKind::punct);
      continue;
    }
    if (std::size_t len = match_op(code, i, kJavaOps, kJavaSingleOps)) {
      push(i + len, TokenKind::op);
      continue;
    }
    throw LexError("unexpected character", i);
  }
  return out;
}

bool is_python_string_prefix(std::string_view code, std::size_t i, std::size_t& prefix_len) {
  std::size_t j = i;
  while (j < code.size() && j - i < 2) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(code[j])));
    if (c == 'r' || c == 'b' || c == 'u' || c == 'f')
      ++j;
    else
      break;
  }
  if (j > i && j < code.size() && (code[j] == '"' || code[j] == '\'')) {
    prefix_len = j - i;
    return true;
  }
  return false;
}

std::vector<Token> tokenize_python(std::string_view code) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = code.size();
  auto push = [&](std::size_t end, TokenKind kind) {
    out.push_back({std::string(code.substr(i, end - i)), kind, i, end});
    i = end;
  };
  while (i < n) {
    char c = code[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      std::size_t j = i;
      while (j < n && (code[j] == ' ' || code[j] == '\t' || code[j] == '\r' ||
                       code[j] == '\n'))
        ++j;
      push(j, TokenKind::whitespace);
      continue;
    }
    if (c == '\\' && i + 1 < n && (code[i + 1] == '\n' || starts_with(code, i + 1, "\r\n"))) {
      push(i + (code[i + 1] == '\n' ? 2 : 3), TokenKind::whitespace);
      continue;
    }
    if (c == '#') {
      std::size_t j = i;
      while (j < n && code[j] != '\n') ++j;
      push(j, TokenKind::comment_trivia);
      continue;
    }
    std::size_t prefix_len = 0;
    if (c == '"' || c == '\'' || is_python_string_prefix(code, i, prefix_len)) {
      std::size_t q = i + prefix_len;
      char quote = code[q];
      const char triple[4] = {quote, quote, quote, 0};
      std::size_t end = starts_with(code, q, triple) ? scan_triple(code, q, quote)
                                                     : scan_quoted(code, q, quote, false);
      push(end, TokenKind::literal);
      continue;
    }
    if (starts_with(code, i, kUnkToken)) {
      push(i + kUnkToken.size(), TokenKind::identifier);
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(code[i + 1]))) {
      if (c == '.') {
        std::size_t j = i + 1;
        while (j < n && is_digit(code[j])) ++j;
        if (j < n && (code[j] == 'e' || code[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < n && (code[k] == '+' || code[k] == '-')) ++k;
          if (k < n && is_digit(code[k])) {
            j = k;
            while (j < n && is_digit(code[j])) ++j;
          }
        }
        push(j, TokenKind::literal);
      } else {
        push(scan_number(code, i, Lang::python), TokenKind::literal);
      }
      continue;
    }
    if (is_ident_start(c, Lang::python)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_cont(code[j], Lang::python)) ++j;
      std::string_view word = code.substr(i, j - i);
      TokenKind kind = TokenKind::identifier;
      if (kPythonWordLiterals.count(word))
        kind = TokenKind::literal;
      else if (kPythonKeywords.count(word))
        kind = TokenKind::keyword;
      push(j, kind);
      continue;
    }
    if (std::size_t len = match_op(code, i, kPythonOps, kPythonSingleOps)) {
      // ':' and '.' are punctuation; ":=" was already matched above.
      push(i + len, TokenKind::op);
      continue;
    }
    if (kPythonPunct.find(c) != std::string_view::npos) {
      push(i + 1, TokenKind::punct);
      continue;
    }
    if (c == '!' && starts_with(code, i, "!=")) {
      push(i + 2, TokenKind::op);
      continue;
    }
    throw LexError("unexpected character", i);
  }
  return out;
}

bool is_significant(const Token& t) {
  return t.kind != TokenKind::whitespace && t.kind != TokenKind::comment_trivia;
}

std::vector<std::size_t> significant_indices(const std::vector<Token>& toks) {
  std::vector<std::size_t> sig;
  sig.reserve(toks.size());
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (is_significant(toks[i])) sig.push_back(i);
  return sig;
}

bool text_is(const Token& t, std::string_view s) { return t.text == s; }

struct Declaration {
  std::string name;
  IdentKind kind;
  std::size_t token_index;
};

// --- Java identifier extraction -------------------------------------------

// Consumes a balanced generic-argument run starting at sig[k] == '<'.
// Returns the sig index one past the closing '>' or k on failure. Only
// type-argument-shaped contents are accepted so comparison chains like
// "a < b && c > d" do not match.
std::size_t consume_generic_args(const std::vector<Token>& toks,
                                 const std::vector<std::size_t>& sig, std::size_t k) {
  if (k >= sig.size() || !text_is(toks[sig[k]], "<")) return k;
  int depth = 0;
  std::size_t j = k;
  while (j < sig.size()) {
    const Token& t = toks[sig[j]];
    if (text_is(t, "<")) {
      ++depth;
    } else if (text_is(t, ">")) {
      --depth;
      if (depth == 0) return j + 1;
    } else if (text_is(t, ">>")) {
      depth -= 2;
      if (depth == 0) return j + 1;
      if (depth < 0) return k;
    } else if (t.kind == TokenKind::identifier || text_is(t, ",") || text_is(t, "?") ||
               text_is(t, ".") || text_is(t, "[") || text_is(t, "]") ||
               text_is(t, "extends") || text_is(t, "super") ||
               kJavaPrimitiveTypes.count(t.text)) {
      // acceptable type-argument content
    } else {
      return k;
    }
    ++j;
  }
  return k;
}

std::size_t consume_array_brackets(const std::vector<Token>& toks,
                                   const std::vector<std::size_t>& sig, std::size_t k) {
  while (k + 1 < sig.size() && text_is(toks[sig[k]], "[") && text_is(toks[sig[k + 1]], "]"))
    k += 2;
  return k;
}

void extract_java(const std::vector<Token>& toks, std::vector<Declaration>& decls) {
  const std::vector<std::size_t> sig = significant_indices(toks);
  const std::size_t m = sig.size();
  auto tok = [&](std::size_t k) -> const Token& { return toks[sig[k]]; };

  // Method name: first "ident (" preceded by a type-ish token, before the body.
  std::size_t sig_open = m, sig_close = m;
  {
    int paren = 0, brace = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const Token& t = tok(k);
      if (text_is(t, "(")) ++paren;
      if (text_is(t, ")")) --paren;
      if (text_is(t, "{")) ++brace;
      if (text_is(t, "}")) --brace;
      if (brace > 0) break;
      if (paren == 0 && t.kind == TokenKind::identifier && k + 1 < m &&
          text_is(tok(k + 1), "(") && k > 0) {
        const Token& prev = tok(k - 1);
        bool type_ish = prev.kind == TokenKind::identifier ||
                        kJavaPrimitiveTypes.count(prev.text) || text_is(prev, ">") ||
                        text_is(prev, "]");
        if (type_ish) {
          decls.push_back({t.text, IdentKind::method_name, sig[k]});
          sig_open = k + 1;
          break;
        }
      }
    }
  }

  // Parameters: last identifier (outside generic args / array brackets) of
  // each comma-separated group in the signature.
  if (sig_open < m) {
    int paren = 0, angle = 0, bracket = 0;
    std::size_t last_ident = m;
    for (std::size_t k = sig_open; k < m; ++k) {
      const Token& t = tok(k);
      if (text_is(t, "(")) {
        ++paren;
        continue;
      }
      if (text_is(t, ")")) {
        --paren;
        if (paren == 0) {
          if (last_ident < m)
            decls.push_back({tok(last_ident).text, IdentKind::parameter, sig[last_ident]});
          sig_close = k;
          break;
        }
        continue;
      }
      if (text_is(t, "<")) ++angle;
      if (text_is(t, ">")) angle = std::max(0, angle - 1);
      if (text_is(t, ">>")) angle = std::max(0, angle - 2);
      if (text_is(t, "[")) ++bracket;
      if (text_is(t, "]")) bracket = std::max(0, bracket - 1);
      if (paren == 1 && angle == 0 && bracket == 0) {
        if (text_is(t, ",")) {
          if (last_ident < m)
            decls.push_back({tok(last_ident).text, IdentKind::parameter, sig[last_ident]});
          last_ident = m;
        } else if (t.kind == TokenKind::identifier) {
          last_ident = k;
        }
      }
    }
  }

  // Local variables: TYPE NAME at statement position, with declarator chains.
  auto at_statement_start = [&](std::size_t k) {
    std::size_t p = k;
    while (p > 0 && (text_is(tok(p - 1), "final") || text_is(tok(p - 1), "static")))
      --p;
    if (p == 0) return sig_close == m;  // snippets without a signature
    const Token& prev = tok(p - 1);
    if (text_is(prev, "{") || text_is(prev, "}") || text_is(prev, ";") ||
        text_is(prev, ":"))
      return true;
    if (text_is(prev, "(") && p >= 2) {
      const Token& before = tok(p - 2);
      return text_is(before, "for") || text_is(before, "catch") || text_is(before, "try");
    }
    return false;
  };

  std::size_t body_start = sig_close == m ? 0 : sig_close + 1;
  for (std::size_t k = body_start; k < m; ++k) {
    const Token& head = tok(k);
    bool type_head = head.kind == TokenKind::identifier || kJavaPrimitiveTypes.count(head.text);
    if (!type_head || !at_statement_start(k)) continue;
    std::size_t j = k + 1;
    j = consume_generic_args(toks, sig, j);
    j = consume_array_brackets(toks, sig, j);
    if (j >= m || tok(j).kind != TokenKind::identifier) continue;

    // Declarator chain: NAME (= expr)? (, NAME (= expr)?)* terminated by ; : )
    std::size_t name_k = j;
    bool matched_any = false;
    while (name_k < m && tok(name_k).kind == TokenKind::identifier) {
      std::size_t after = consume_array_brackets(toks, sig, name_k + 1);
      if (after >= m) break;
      const Token& follow = tok(after);
      bool terminator = text_is(follow, ";") || text_is(follow, ":") || text_is(follow, ")");
      bool more = text_is(follow, ",");
      bool init = text_is(follow, "=");
      if (!terminator && !more && !init) break;
      decls.push_back({tok(name_k).text, IdentKind::variable, sig[name_k]});
      matched_any = true;
      if (terminator) break;
      if (init) {
        // Skip the initializer expression to the chain comma or terminator.
        int paren = 0, bracket = 0, brace = 0;
        std::size_t e = after + 1;
        for (; e < m; ++e) {
          const Token& t = tok(e);
          if (text_is(t, "(")) ++paren;
          if (text_is(t, ")")) {
            if (paren == 0) break;
            --paren;
          }
          if (text_is(t, "[")) ++bracket;
          if (text_is(t, "]")) --bracket;
          if (text_is(t, "{")) ++brace;
          if (text_is(t, "}")) {
            if (brace == 0) break;
            --brace;
          }
          if (paren == 0 && bracket == 0 && brace == 0 &&
              (text_is(t, ",") || text_is(t, ";")))
            break;
        }
        if (e >= m || !text_is(tok(e), ",")) break;
        after = e;
      }
      name_k = after + 1;
    }
    (void)matched_any;
  }
}

// --- Python identifier extraction ------------------------------------------

void extract_python(const std::vector<Token>& toks, std::vector<Declaration>& decls) {
  const std::vector<std::size_t> sig = significant_indices(toks);
  const std::size_t m = sig.size();
  auto tok = [&](std::size_t k) -> const Token& { return toks[sig[k]]; };

  // Bracket depth per significant token and logical-line-start flags.
  std::vector<int> depth(m, 0);
  std::vector<bool> line_start(m, false);
  {
    int d = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const Token& t = tok(k);
      if (text_is(t, "(") || text_is(t, "[") || text_is(t, "{")) {
        depth[k] = d;
        ++d;
        continue;
      }
      if (text_is(t, ")") || text_is(t, "]") || text_is(t, "}")) d = std::max(0, d - 1);
      depth[k] = d;
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (depth[k] != 0) continue;
      if (k == 0) {
        line_start[k] = true;
        continue;
      }
      const Token& prev = tok(k - 1);
      if (text_is(prev, ";") || (prev.kind == TokenKind::punct && text_is(prev, ":"))) {
        line_start[k] = true;
        continue;
      }
      // Newline (outside brackets, not a backslash continuation) between
      // the previous significant token and this one.
      for (std::size_t r = sig[k - 1] + 1; r < sig[k]; ++r) {
        const Token& ws = toks[r];
        if (ws.kind == TokenKind::whitespace && ws.text[0] != '\\' &&
            ws.text.find('\n') != std::string::npos) {
          line_start[k] = true;
          break;
        }
      }
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    const Token& t = tok(k);
    if (text_is(t, "def") && t.kind == TokenKind::keyword) {
      if (k + 2 < m && tok(k + 1).kind == TokenKind::identifier && text_is(tok(k + 2), "(")) {
        decls.push_back({tok(k + 1).text, IdentKind::method_name, sig[k + 1]});
        // Parameters: first identifier of each comma group, skipping
        // annotations and default expressions.
        int paren = 0;
        bool want_name = true;
        for (std::size_t j = k + 2; j < m; ++j) {
          const Token& pt = tok(j);
          if (text_is(pt, "(") || text_is(pt, "[") || text_is(pt, "{")) {
            ++paren;
            continue;
          }
          if (text_is(pt, ")") || text_is(pt, "]") || text_is(pt, "}")) {
            --paren;
            if (paren == 0) break;
            continue;
          }
          if (paren != 1) continue;
          if (text_is(pt, ",")) {
            want_name = true;
          } else if (want_name && pt.kind == TokenKind::identifier) {
            decls.push_back({pt.text, IdentKind::parameter, sig[j]});
            want_name = false;
          } else if (want_name && (text_is(pt, "*") || text_is(pt, "**"))) {
            // *args / **kwargs: the following identifier is the parameter
          } else {
            want_name = false;  // inside annotation or default value
          }
        }
      }
      continue;
    }
    if (text_is(t, "for") && t.kind == TokenKind::keyword) {
      // for NAME (, NAME)* in ...
      std::size_t j = k + 1;
      while (j < m) {
        if (tok(j).kind != TokenKind::identifier) break;
        decls.push_back({tok(j).text, IdentKind::variable, sig[j]});
        if (j + 1 < m && text_is(tok(j + 1), ",")) {
          j += 2;
          continue;
        }
        break;
      }
      continue;
    }
    if (text_is(t, "as") && t.kind == TokenKind::keyword) {
      if (k + 1 < m && tok(k + 1).kind == TokenKind::identifier)
        decls.push_back({tok(k + 1).text, IdentKind::variable, sig[k + 1]});
      continue;
    }
    if (line_start[k] && tok(k).kind == TokenKind::identifier) {
      // Target lists: NAME (, NAME)* = (NAME (, NAME)* =)* expr. Every list
      // followed by `=` binds its plain names; elements with trailers like
      // a.b or a[i] bind nothing, and the final list is the value expression.
      std::size_t j = k;
      while (j < m && tok(j).kind == TokenKind::identifier) {
        std::vector<std::size_t> names;
        bool ended_with_assign = false;
        while (j < m) {
          if (tok(j).kind != TokenKind::identifier) break;
          std::size_t name_at = j;
          ++j;
          bool plain = true;
          while (j < m && (text_is(tok(j), ".") || text_is(tok(j), "["))) {
            plain = false;
            if (text_is(tok(j), ".")) {
              j += 2;
            } else {
              int b = 0;
              for (; j < m; ++j) {
                if (text_is(tok(j), "[")) ++b;
                if (text_is(tok(j), "]")) {
                  --b;
                  if (b == 0) {
                    ++j;
                    break;
                  }
                }
              }
            }
          }
          if (plain) names.push_back(name_at);
          if (j < m && text_is(tok(j), ",")) {
            ++j;
            continue;
          }
          if (j < m && text_is(tok(j), "=") && tok(j).kind == TokenKind::op) {
            ended_with_assign = true;
            ++j;  // a chained target list may follow
          }
          break;
        }
        if (!ended_with_assign) break;
        for (std::size_t name_at : names)
          decls.push_back({tok(name_at).text, IdentKind::variable, sig[name_at]});
      }
    }
  }
}

}  // namespace

Lang lang_from_string(std::string_view name) {
  if (name == "java") return Lang::java;
  if (name == "python") return Lang::python;
  throw std::invalid_argument("unknown language: " + std::string(name));
}

std::string_view to_string(Lang lang) {
  return lang == Lang::java ? "java" : "python";
}

std::string_view to_string(IdentKind kind) {
  switch (kind) {
    case IdentKind::method_name: return "method_name";
    case IdentKind::parameter: return "parameter";
    default: return "variable";
  }
}

std::vector<Token> tokenize(std::string_view code, Lang lang) {
  return lang == Lang::java ? tokenize_java(code) : tokenize_python(code);
}

std::string detokenize(const std::vector<Token>& tokens) {
  std::string out;
  std::size_t total = 0;
  for (const Token& t : tokens) total += t.text.size();
  out.reserve(total);
  for (const Token& t : tokens) out += t.text;
  return out;
}

std::vector<std::string> split_subtokens(std::string_view token_text) {
  if (token_text == kUnkToken) return {std::string(kUnkToken)};
  std::vector<std::string> pieces;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      pieces.push_back(cur);
      cur.clear();
    }
  };
  const std::size_t n = token_text.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = token_text[i];
    // Any non-alphanumeric byte separates pieces: '_' and '$' in identifiers,
    // quotes and escapes in literals.
    if (!std::isalnum(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      bool prev_lower_or_digit =
          i > 0 && (std::islower(static_cast<unsigned char>(token_text[i - 1])) ||
                    is_digit(token_text[i - 1]));
      bool next_lower = i + 1 < n && std::islower(static_cast<unsigned char>(token_text[i + 1]));
      bool prev_upper = i > 0 && std::isupper(static_cast<unsigned char>(token_text[i - 1]));
      if (prev_lower_or_digit || (prev_upper && next_lower)) flush();
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      continue;
    }
    cur += c;
  }
  flush();
  return pieces;
}

std::vector<std::string> subtoken_stream(std::string_view code, Lang lang) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(code, lang)) {
    if (t.kind != TokenKind::identifier && t.kind != TokenKind::keyword &&
        t.kind != TokenKind::literal)
      continue;
    if (t.text == kUnkToken) {
      out.emplace_back(kUnkToken);
      continue;
    }
    for (auto& piece : split_subtokens(t.text)) out.push_back(std::move(piece));
  }
  return out;
}

std::vector<IdentifierInfo> extract_identifiers(std::string_view code, Lang lang) {
  std::vector<Token> toks = tokenize(code, lang);
  std::vector<Declaration> decls;
  if (lang == Lang::java)
    extract_java(toks, decls);
  else
    extract_python(toks, decls);

  std::map<std::string, IdentifierInfo> by_name;
  for (const Declaration& d : decls) {
    if (is_keyword(d.name, lang)) continue;
    auto it = by_name.find(d.name);
    if (it != by_name.end()) continue;  // first declaration wins
    IdentifierInfo info;
    info.name = d.name;
    info.kind = d.kind;
    info.single_letter = d.name.size() == 1;
    info.decl_token = toks[d.token_index].begin;
    by_name.emplace(d.name, std::move(info));
  }

  for (const Token& t : toks) {
    if (t.kind != TokenKind::identifier) continue;
    auto it = by_name.find(t.text);
    if (it != by_name.end()) it->second.occurrences.emplace_back(t.begin, t.end);
  }

  std::vector<IdentifierInfo> out;
  out.reserve(by_name.size());
  for (auto& [name, info] : by_name) out.push_back(std::move(info));
  std::sort(out.begin(), out.end(),
            [](const IdentifierInfo& a, const IdentifierInfo& b) {
              return a.decl_token < b.decl_token;
            });
  return out;
}

bool is_keyword(std::string_view text, Lang lang) {
  return lang == Lang::java ? kJavaKeywords.count(text) > 0
                            : kPythonKeywords.count(text) > 0;
}

bool lexes_as_identifier(std::string_view text, Lang lang) {
  if (text.empty() || is_keyword(text, lang)) return false;
  try {
    auto toks = tokenize(text, lang);
    return toks.size() == 1 && toks[0].kind == TokenKind::identifier;
  } catch (const LexError&) {
    return false;
  }
}

std::string rename(std::string_view code, std::string_view old_name,
                   std::string_view new_name, Lang lang) {
  if (old_name == new_name) return std::string(code);
  if (!lexes_as_identifier(new_name, lang))
    throw RenameError(RenameErrorKind::invalid_identifier,
                      "replacement is not a legal identifier: " + std::string(new_name));

  auto declared = extract_identifiers(code, lang);
  bool found = false;
  for (const auto& info : declared)
    if (info.name == old_name) found = true;
  if (!found)
    throw RenameError(RenameErrorKind::not_found,
                      "identifier not declared in snippet: " + std::string(old_name));

  std::vector<Token> toks = tokenize(code, lang);
  for (const Token& t : toks)
    if (t.kind == TokenKind::identifier && t.text == new_name)
      throw RenameError(RenameErrorKind::collision,
                        "replacement collides with existing identifier: " +
                            std::string(new_name));

  for (Token& t : toks)
    if (t.kind == TokenKind::identifier && t.text == old_name)
      t.text = std::string(new_name);
  return detokenize(toks);
}

std::string rename_unchecked(std::string_view code, std::string_view old_name,
                             std::string_view new_name, Lang lang) {
  std::vector<Token> toks = tokenize(code, lang);
  for (Token& t : toks)
    if (t.kind == TokenKind::identifier && t.text == old_name)
      t.text = std::string(new_name);
  return detokenize(toks);
}

namespace {

bool brackets_balanced(const std::vector<Token>& toks) {
  std::vector<char> stack;
  for (const Token& t : toks) {
    if (t.kind != TokenKind::punct || t.text.size() != 1) continue;
    char c = t.text[0];
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(c);
    } else if (c == ')' || c == ']' || c == '}') {
      char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (stack.empty() || stack.back() != open) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

bool is_assignment_op(const Token& t) {
  if (t.kind != TokenKind::op) return false;
  const std::string& s = t.text;
  return s.size() >= 1 && s.back() == '=' && s != "==" && s != "!=" && s != "<=" &&
         s != ">=";
}

bool validate_java(const std::vector<Token>& toks, std::string_view code) {
  const std::vector<std::size_t> sig = significant_indices(toks);
  const std::size_t m = sig.size();
  auto tok = [&](std::size_t k) -> const Token& { return toks[sig[k]]; };

  for (std::size_t k = 0; k < m; ++k) {
    const Token& t = tok(k);
    if (t.kind == TokenKind::keyword && kJavaPrimitiveTypes.count(t.text)) {
      if (k + 1 >= m) return false;
      const Token& next = tok(k + 1);
      bool ok = next.kind == TokenKind::identifier || text_is(next, "[") ||
                text_is(next, ")") || text_is(next, "...");
      if (!ok) return false;
    }
    if (t.kind == TokenKind::keyword && kJavaStatementKeywords.count(t.text)) {
      if (k > 0) {
        const Token& prev = tok(k - 1);
        if (text_is(prev, "(") || text_is(prev, ",") ||
            prev.kind == TokenKind::identifier || prev.kind == TokenKind::literal)
          return false;
      }
    }
    if (t.kind == TokenKind::keyword && k + 1 < m) {
      const Token& next = tok(k + 1);
      if ((next.kind == TokenKind::op &&
           (text_is(next, "=") || text_is(next, "++") || text_is(next, "--"))))
        return false;
    }
    if (t.kind == TokenKind::op && !text_is(t, "++") && !text_is(t, "--")) {
      if (k + 1 < m && text_is(tok(k + 1), ";")) return false;
    }
    if (is_assignment_op(t)) {
      if (k + 1 >= m) return false;
      const Token& next = tok(k + 1);
      if (text_is(next, ")") || text_is(next, ",") || text_is(next, "}") ||
          text_is(next, "]"))
        return false;
    }
  }

  // Declaration-before-use for locals.
  for (const IdentifierInfo& info : extract_identifiers(code, Lang::java)) {
    if (info.kind != IdentKind::variable) continue;
    if (!info.occurrences.empty() && info.occurrences.front().first < info.decl_token)
      return false;
  }
  return true;
}

// Keywords that may legitimately appear inside a python expression.
const std::unordered_set<std::string_view> kPythonExprKeywords = {
    "if", "else", "for", "in", "not", "and", "or", "is", "lambda",
    "None", "True", "False", "await", "yield",
};

bool validate_python(const std::vector<Token>& toks) {
  const std::vector<std::size_t> sig = significant_indices(toks);
  const std::size_t m = sig.size();
  auto tok = [&](std::size_t k) -> const Token& { return toks[sig[k]]; };

  for (std::size_t k = 0; k < m; ++k) {
    const Token& t = tok(k);
    if (t.kind == TokenKind::keyword) {
      if (k + 1 < m && is_assignment_op(tok(k + 1))) return false;
      if (kPythonStatementKeywords.count(t.text) && k > 0) {
        const Token& prev = tok(k - 1);
        if (text_is(prev, "(") || text_is(prev, ",") || is_assignment_op(prev))
          return false;
      }
      if (text_is(t, "def")) {
        if (k + 2 >= m || tok(k + 1).kind != TokenKind::identifier ||
            !text_is(tok(k + 2), "("))
          return false;
      }
    }
    if (t.kind == TokenKind::op && !text_is(t, "++") && !text_is(t, "--")) {
      if (k + 1 < m && text_is(tok(k + 1), ";")) return false;
    }
    if (is_assignment_op(t)) {
      if (k + 1 >= m) return false;
      const Token& next = tok(k + 1);
      if (text_is(next, ")") || text_is(next, ",") || text_is(next, "}") ||
          text_is(next, "]"))
        return false;
      // Expression must continue on the same logical line.
      for (std::size_t r = sig[k] + 1; r < sig[k + 1]; ++r) {
        const Token& ws = toks[r];
        if (ws.kind == TokenKind::whitespace && ws.text[0] != '\\' &&
            ws.text.find('\n') != std::string::npos)
          return false;
      }
    }
  }

  // Indentation: logical lines at bracket depth 0 must follow a consistent
  // indent stack; a deeper line is only legal after a line ending in ':'.
  struct Line {
    std::size_t indent;
    bool opens_block;
    bool mixed;
  };
  std::vector<Line> lines;
  {
    int depth = 0;
    bool at_line_start = true;
    std::size_t cur_indent = 0;
    bool cur_mixed = false;
    bool has_space = false, has_tab = false;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (t.kind == TokenKind::whitespace) {
        if (t.text[0] == '\\') continue;  // explicit continuation
        if (depth == 0 && (i == 0 || t.text.find('\n') != std::string::npos)) {
          at_line_start = true;
          cur_indent = 0;
          has_space = has_tab = false;
          // Count indentation after the final newline in this run.
          std::size_t last_nl = t.text.rfind('\n');
          for (std::size_t p = last_nl + 1; p < t.text.size(); ++p) {
            ++cur_indent;
            if (t.text[p] == ' ') has_space = true;
            if (t.text[p] == '\t') has_tab = true;
          }
          cur_mixed = has_space && has_tab;
        }
        continue;
      }
      if (t.kind == TokenKind::comment_trivia) continue;
      if (at_line_start && depth == 0) {
        lines.push_back({cur_indent, false, cur_mixed});
        at_line_start = false;
      }
      if (text_is(t, "(") || text_is(t, "[") || text_is(t, "{")) ++depth;
      if (text_is(t, ")") || text_is(t, "]") || text_is(t, "}"))
        depth = std::max(0, depth - 1);
      if (!lines.empty() && depth == 0 && t.kind == TokenKind::punct && text_is(t, ":"))
        lines.back().opens_block = true;
      else if (!lines.empty() && depth == 0 && is_significant(t))
        lines.back().opens_block = false;
    }
  }
  std::vector<std::size_t> stack = {0};
  bool expect_deeper = false;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const Line& line = lines[li];
    if (line.mixed) return false;
    if (li == 0 && line.indent != 0) return false;
    if (expect_deeper) {
      if (line.indent <= stack.back()) return false;
      stack.push_back(line.indent);
    } else if (line.indent > stack.back()) {
      return false;
    } else {
      while (!stack.empty() && line.indent < stack.back()) stack.pop_back();
      if (stack.empty() || stack.back() != line.indent) return false;
    }
    expect_deeper = line.opens_block;
  }
  if (expect_deeper) return false;
  return true;
}

}  // namespace

bool validate(std::string_view code, Lang lang) noexcept {
  try {
    std::vector<Token> toks = tokenize(code, lang);
    if (!brackets_balanced(toks)) return false;
    return lang == Lang::java ? validate_java(toks, code) : validate_python(toks);
  } catch (...) {
    return false;
  }
}

}  // namespace ccattack::lang
