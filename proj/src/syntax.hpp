// Lexer and expression parser shared by the formula, theory and sequent readers.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "theoria/parser.hpp"

namespace theoria::syntax {

enum class TokenKind { Ident, Int, Symbol, String, End };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t start;  // byte offsets into the parsed text
  std::size_t end;
};

// Location bookkeeping so errors report code-point offsets into the whole file.
struct Source {
  std::string_view whole;  // full file text
  std::size_t base = 0;    // byte offset of the parsed fragment within `whole`
  std::string file;

  SourceSpan span(std::size_t start, std::size_t end) const;
};

std::vector<Token> tokenize(std::string_view text, const FormulaFactory& factory,
                            const Source& source);

// Non-blank lines of a line-oriented file with `//` comments removed.
struct Line {
  std::string_view text;  // without indentation and comment
  std::size_t offset;     // byte offset of `text` in the file
  std::size_t number;     // 1-based
  bool indented;
};
std::vector<Line> split_lines(std::string_view file);

class Parser {
 public:
  Parser(std::string_view text, FactoryPtr factory, TypeScope scope, Source source);

  // Datatype being declared: visible to type parsing before it is registered.
  void set_pending_datatype(std::string name, std::size_t arity) {
    pending_name_ = std::move(name);
    pending_arity_ = arity;
  }

  Formula formula();  // a whole formula at the loosest level
  Type type();
  std::string identifier(const char* what);

  const Token& peek(std::size_t ahead = 0) const;
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool accept(std::string_view symbol);
  bool accept_word(std::string_view word);
  void expect(std::string_view symbol);
  void expect_end();
  Token next();

  [[noreturn]] void fail(ErrorKind kind, const Token& at, const std::string& message) const;

 private:
  struct Infix;
  std::optional<Infix> infix(const Token& t) const;

  Formula parse(int min_level);
  Formula prefix();
  Formula atom_name(const Token& name);
  std::vector<Formula> arguments();
  Formula maybe_ascription(Formula f);
  Formula make(Tag tag, std::vector<Formula> children, Payload payload, const Token& at,
               bool extension = false);
  Type type_product();
  Type type_atom();

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  FactoryPtr factory_;
  TypeScope scope_;
  Source source_;
  std::string pending_name_;
  std::size_t pending_arity_ = 0;
};

}  // namespace theoria::syntax
