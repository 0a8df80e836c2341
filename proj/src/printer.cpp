#include "theoria/printer.hpp"

namespace theoria {

namespace {

// Binding strength, loosest first. Must agree with the parser's table.
enum Level : int {
  kIff = 1,
  kImplies,
  kOr,
  kAnd,
  kNot,
  kQuantifier,
  kCompare,
  kSetOp,
  kUserInfix,
  kCompose,
  kMaplet,
  kRange,
  kAdditive,
  kMultiplicative,
  kUnaryMinus,
  kAtom,
};

const OperatorSig* operator_sig(const Formula& f) {
  return f.tag() == Tag::ExtOp ? f.factory()->find_operator(f.name()) : nullptr;
}

bool is_not_equal(const Formula& f) {
  return f.tag() == Tag::Not && f.child(0).tag() == Tag::Equal;
}

int level(const Formula& f) {
  switch (f.tag()) {
    case Tag::Iff: return kIff;
    case Tag::Implies: return kImplies;
    case Tag::Or: return kOr;
    case Tag::And: return kAnd;
    case Tag::Not: return is_not_equal(f) ? kCompare : kNot;
    case Tag::Forall:
    case Tag::Exists: return kQuantifier;
    case Tag::Equal:
    case Tag::In:
    case Tag::Subset: return kCompare;
    case Tag::Union:
    case Tag::Inter:
    case Tag::CProd: return kSetOp;
    case Tag::FComp: return kCompose;
    case Tag::Maplet: return kMaplet;
    case Tag::Range: return kRange;
    case Tag::Plus:
    case Tag::Minus: return kAdditive;
    case Tag::Mul:
    case Tag::Div: return kMultiplicative;
    case Tag::Neg: return kUnaryMinus;
    case Tag::IntLit: return f.value() < 0 ? kUnaryMinus : kAtom;
    case Tag::ExtOp: {
      const auto* op = operator_sig(f);
      if (op && op->notation == Notation::Infix) return op->is_predicate() ? kCompare : kUserInfix;
      return kAtom;
    }
    default: return kAtom;
  }
}

class Printer {
 public:
  explicit Printer(PrintMode mode) : mode_(mode) {}

  void print(const Formula& f, std::string& out) const {
    switch (f.tag()) {
      case Tag::True: out += "⊤"; return;
      case Tag::False: out += "⊥"; return;
      case Tag::Not:
        if (is_not_equal(f)) {
          binary(f.child(0), " ≠ ", kCompare + 1, kCompare + 1, out);
          return;
        }
        out += "¬ ";
        child(f.child(0), kNot, out);
        return;
      case Tag::And: nary(f, " ∧ ", kAnd + 1, out); return;
      case Tag::Or: nary(f, " ∨ ", kOr + 1, out); return;
      case Tag::Implies: binary(f, " ⇒ ", kImplies + 1, kImplies + 1, out); return;
      case Tag::Iff: binary(f, " ⇔ ", kIff + 1, kIff + 1, out); return;
      case Tag::Forall:
      case Tag::Exists:
        out += f.tag() == Tag::Forall ? "∀" : "∃";
        for (std::size_t i = 0; i < f.bound().size(); ++i) {
          if (i) out += ", ";
          out += f.bound()[i].name;
        }
        out += "· ";
        print(f.child(0), out);
        return;
      case Tag::Equal: binary(f, " = ", kCompare + 1, kCompare + 1, out); return;
      case Tag::In: binary(f, " ∈ ", kCompare + 1, kCompare + 1, out); return;
      case Tag::Subset: binary(f, " ⊆ ", kCompare + 1, kCompare + 1, out); return;
      case Tag::Ident: out += f.name(); break;
      case Tag::IntLit:
        if (f.value() < 0) {
          out += "−" + std::to_string(0ULL - static_cast<unsigned long long>(f.value()));
        } else {
          out += std::to_string(f.value());
        }
        return;
      case Tag::BoolLit: out += f.value() ? "TRUE" : "FALSE"; return;
      case Tag::IntegerSet: out += "ℤ"; return;
      case Tag::BoolSet: out += "BOOL"; return;
      case Tag::EmptySet: out += "∅"; break;
      case Tag::SetExt:
        out += "{";
        args(f, out);
        out += "}";
        break;
      case Tag::Plus: binary(f, " + ", kAdditive, kAdditive + 1, out); return;
      case Tag::Minus: binary(f, " − ", kAdditive, kAdditive + 1, out); return;
      case Tag::Mul: binary(f, " * ", kMultiplicative, kMultiplicative + 1, out); return;
      case Tag::Div: binary(f, " ÷ ", kMultiplicative, kMultiplicative + 1, out); return;
      case Tag::Neg:
        out += "−";
        // −5 would read back as a literal
        if (f.child(0).tag() == Tag::IntLit && f.child(0).value() >= 0) {
          out += "(";
          print(f.child(0), out);
          out += ")";
        } else {
          child(f.child(0), kUnaryMinus, out);
        }
        return;
      case Tag::Range: binary(f, "‥", kRange + 1, kRange + 1, out); return;
      case Tag::Maplet: binary(f, " ↦ ", kMaplet, kMaplet + 1, out); return;
      case Tag::Pow:
        out += "ℙ(";
        print(f.child(0), out);
        out += ")";
        return;
      case Tag::CProd: binary(f, " × ", kSetOp, kSetOp + 1, out); return;
      case Tag::Union: binary(f, " ∪ ", kSetOp, kSetOp + 1, out); return;
      case Tag::Inter: binary(f, " ∩ ", kSetOp, kSetOp + 1, out); return;
      case Tag::FComp: nary(f, ";", kCompose + 1, out); return;
      case Tag::ExtOp: {
        const auto* op = operator_sig(f);
        if (op && op->notation == Notation::Infix) {
          std::string token = mode_ == PrintMode::Unicode && op->symbol ? *op->symbol : f.name();
          nary(f, " " + token + " ", level(f) + 1, out);
          return;
        }
        out += f.name();
        if (f.arity() > 0) {
          out += "(";
          args(f, out);
          out += ")";
        }
        break;
      }
      case Tag::Constructor:
      case Tag::Destructor:
      case Tag::ExtSet:
        out += f.name();
        if (f.arity() > 0) {
          out += "(";
          args(f, out);
          out += ")";
        }
        break;
    }
    if (f.payload().ascribed && f.type()) {
      const bool product = f.type()->kind() == Type::Kind::Product;
      out += product ? "⦂(" + f.type()->to_string() + ")" : "⦂" + f.type()->to_string();
    }
  }

 private:
  void child(const Formula& c, int min_level, std::string& out) const {
    // A quantifier's body extends as far right as possible, so it is
    // parenthesised wherever it is not the whole formula.
    const bool parens = is_binder(c.tag()) || level(c) < min_level;
    if (parens) out += "(";
    print(c, out);
    if (parens) out += ")";
  }

  void binary(const Formula& f, const char* op, int left_min, int right_min,
              std::string& out) const {
    child(f.child(0), left_min, out);
    out += op;
    child(f.child(1), right_min, out);
  }

  void nary(const Formula& f, const std::string& op, int min_level, std::string& out) const {
    for (std::size_t i = 0; i < f.arity(); ++i) {
      if (i) out += op;
      child(f.child(i), min_level, out);
    }
  }

  void args(const Formula& f, std::string& out) const {
    for (std::size_t i = 0; i < f.arity(); ++i) {
      if (i) out += ", ";
      const bool parens = is_binder(f.child(i).tag());
      if (parens) out += "(";
      print(f.child(i), out);
      if (parens) out += ")";
    }
  }

  PrintMode mode_;
};

}  // namespace

std::string print_formula(const Formula& f, PrintMode mode) {
  std::string out;
  Printer(mode).print(f, out);
  return out;
}

}  // namespace theoria
