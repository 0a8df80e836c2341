#include "theoria/signature.hpp"

#include "theoria/error.hpp"

namespace theoria {

Type DatatypeSig::instance_type() const {
  std::vector<Type> args;
  for (const auto& p : type_params) args.push_back(Type::param(p));
  return Type::datatype(name, std::move(args));
}

const std::string& signature_name(const ExtensionSignature& sig) {
  return std::visit([](const auto& s) -> const std::string& { return s.name; }, sig);
}

namespace {

bool equal(const DatatypeSig& a, const DatatypeSig& b) {
  return a.name == b.name && a.type_params == b.type_params && a.constructors == b.constructors;
}

bool equal(const AxiomaticTypeSig& a, const AxiomaticTypeSig& b) { return a.name == b.name; }

bool equal(const OperatorSig& a, const OperatorSig& b) {
  return a.name == b.name && a.args == b.args && a.notation == b.notation &&
         a.formula_kind == b.formula_kind && a.result == b.result &&
         a.associative == b.associative && a.commutative == b.commutative &&
         a.symbol == b.symbol;
}

}  // namespace

bool signature_equal(const ExtensionSignature& a, const ExtensionSignature& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& lhs) {
        using T = std::decay_t<decltype(lhs)>;
        return equal(lhs, std::get<T>(b));
      },
      a);
}

void check_signature(const ExtensionSignature& sig) {
  const auto* op = std::get_if<OperatorSig>(&sig);
  if (!op) return;
  if (op->is_predicate() == op->result.has_value())
    throw Error(ErrorKind::InvalidSignature, op->name,
                "operator '" + op->name + "': predicates have no result type, expressions need one");
  if (op->notation == Notation::Infix && op->args.size() < 2)
    throw Error(ErrorKind::InvalidNotation, op->name,
                "INFIX operator '" + op->name + "' needs two or more arguments");
  if (op->commutative && op->args.size() != 2)
    throw Error(ErrorKind::InvalidSignature, op->name,
                "commutative operator '" + op->name + "' must be binary");
  if (op->associative) {
    if (op->notation != Notation::Infix || op->args.size() != 2 ||
        op->args[0].type != op->args[1].type || !op->result || *op->result != op->args[0].type)
      throw Error(ErrorKind::InvalidSignature, op->name,
                  "associative operator '" + op->name +
                      "' must be infix with two arguments and result of one shared type");
  }
}

std::string canonical_text(const ExtensionSignature& sig) {
  std::string out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DatatypeSig>) {
          out = "datatype " + s.name + "(";
          for (std::size_t i = 0; i < s.type_params.size(); ++i)
            out += (i ? "," : "") + s.type_params[i];
          out += ")";
          for (const auto& c : s.constructors) {
            out += " |" + c.name + "(";
            for (std::size_t i = 0; i < c.destructors.size(); ++i)
              out += (i ? "," : "") + c.destructors[i].name + ":" + c.destructors[i].type.to_string();
            out += ")";
          }
        } else if constexpr (std::is_same_v<T, AxiomaticTypeSig>) {
          out = "type " + s.name;
        } else {
          out = "operator " + s.name + "(";
          for (std::size_t i = 0; i < s.args.size(); ++i)
            out += (i ? "," : "") + s.args[i].name + ":" + s.args[i].type.to_string();
          out += ")";
          out += s.result ? ":" + s.result->to_string() : ":pred";
          out += s.notation == Notation::Infix ? " infix" : " prefix";
          if (s.associative) out += " assoc";
          if (s.commutative) out += " comm";
          if (s.symbol) out += " symbol " + *s.symbol;
        }
      },
      sig);
  return out;
}

}  // namespace theoria
