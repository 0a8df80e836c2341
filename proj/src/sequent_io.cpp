#include <set>

#include "syntax.hpp"
#include "theoria/parser.hpp"
#include "theoria/printer.hpp"

namespace theoria {

using syntax::Line;
using syntax::Parser;
using syntax::Source;
using syntax::Token;

namespace {

std::vector<std::string> theories_line(const std::vector<Line>& lines, std::string_view text,
                                       const std::string& file, std::size_t& next) {
  std::vector<std::string> out;
  next = 0;
  if (lines.empty()) return out;
  Parser p(lines[0].text, FormulaFactory::core(), {}, Source{text, lines[0].offset, file});
  if (!p.accept_word("theories")) return out;
  while (!p.at_end()) {
    out.push_back(p.identifier("a theory name"));
    p.accept(",");
  }
  next = 1;
  return out;
}

}  // namespace

std::vector<std::string> read_sequent_theories(std::string_view text, const std::string& file) {
  std::size_t next = 0;
  return theories_line(syntax::split_lines(text), text, file, next);
}

SequentFile parse_sequent_file(std::string_view text, const FactoryPtr& factory,
                               const std::string& file) {
  const auto lines = syntax::split_lines(text);
  SequentFile out;
  std::size_t i = 0;
  out.theories = theories_line(lines, text, file, i);
  std::set<std::string> names;
  while (i < lines.size()) {
    const Line& line = lines[i];
    Parser p(line.text, factory, {}, Source{text, line.offset, file});
    if (line.indented || !p.accept_word("sequent"))
      p.fail(ErrorKind::SyntaxError, p.peek(), "expected 'sequent NAME'");
    const Token at = p.peek();
    SequentEntry entry;
    entry.name = p.identifier("a sequent name");
    if (!names.insert(entry.name).second)
      p.fail(ErrorKind::DuplicateName, at, "sequent '" + entry.name + "' declared twice");
    p.expect_end();
    ++i;

    TypeScope scope;
    std::set<std::string> hyp_names;
    for (; i < lines.size() && lines[i].indented; ++i) {
      Parser q(lines[i].text, factory, scope, Source{text, lines[i].offset, file});
      const Token kw = q.peek();
      if (entry.goal) q.fail(ErrorKind::SyntaxError, kw, "'goal' must be the last line of a sequent");
      if (q.accept_word("sets")) {
        if (!entry.hypotheses.empty())
          q.fail(ErrorKind::SyntaxError, kw, "'sets' must precede the hypotheses");
        do {
          const Token s = q.peek();
          std::string name = q.identifier("a carrier set name");
          if (!scope.given_sets.insert(name).second || factory->find(name))
            q.fail(ErrorKind::DuplicateName, s, "carrier set '" + name + "' already declared");
          entry.given_sets.push_back(name);
        } while (q.accept(","));
      } else if (q.accept_word("hyp")) {
        const Token h = q.peek();
        NamedFormula nf;
        nf.name = q.identifier("a hypothesis name");
        if (!hyp_names.insert(nf.name).second)
          q.fail(ErrorKind::DuplicateName, h, "hypothesis '" + nf.name + "' declared twice");
        q.expect(":");
        nf.formula = q.formula();
        entry.hypotheses.push_back(std::move(nf));
      } else if (q.accept_word("goal")) {
        entry.goal = q.formula();
      } else {
        q.fail(ErrorKind::SyntaxError, kw, "expected 'sets', 'hyp' or 'goal'");
      }
      q.expect_end();
    }
    if (!entry.goal) p.fail(ErrorKind::SyntaxError, at, "sequent '" + entry.name + "' has no goal");
    out.entries.push_back(std::move(entry));
  }
  return out;
}

std::string print_sequent_file(const SequentFile& file) {
  std::string out;
  if (!file.theories.empty()) {
    out += "theories";
    for (const auto& t : file.theories) out += " " + t;
    out += "\n";
  }
  for (const auto& e : file.entries) {
    out += "\nsequent " + e.name + "\n";
    if (!e.given_sets.empty()) {
      out += "  sets ";
      for (std::size_t i = 0; i < e.given_sets.size(); ++i) out += (i ? ", " : "") + e.given_sets[i];
      out += "\n";
    }
    for (const auto& h : e.hypotheses)
      out += "  hyp " + h.name + ": " + print_formula(h.formula, PrintMode::Unicode) + "\n";
    out += "  goal " + print_formula(e.goal, PrintMode::Unicode) + "\n";
  }
  return out;
}

}  // namespace theoria
