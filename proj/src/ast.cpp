#include "fcc/ast.hpp"

#include <algorithm>
#include <sstream>

#include "fcc/error.hpp"

namespace fcc {

AgentPtr make_success() { return std::make_shared<const Agent>(Success{}); }
AgentPtr make_fail() { return std::make_shared<const Agent>(Fail{}); }

AgentPtr make_tell(ConstraintRef c, Threshold threshold, AgentPtr next) {
  return std::make_shared<const Agent>(
      Tell{std::move(c), std::move(threshold), std::move(next)});
}

AgentPtr make_choice(std::vector<AskBranch> branches) {
  if (branches.empty()) throw InvalidArgument("choice needs at least one branch");
  return std::make_shared<const Agent>(Choice{std::move(branches)});
}

AgentPtr make_par(AgentPtr left, AgentPtr right) {
  return std::make_shared<const Agent>(Par{std::move(left), std::move(right)});
}

AgentPtr make_fair_par(std::vector<AgentPtr> agents) {
  if (agents.empty()) throw InvalidArgument("par() needs at least one agent");
  return std::make_shared<const Agent>(FairPar{std::move(agents)});
}

AgentPtr make_exists(VarId var, AgentPtr body) {
  return std::make_shared<const Agent>(Exists{var, std::move(body)});
}

AgentPtr make_call(std::string name, std::vector<VarId> args) {
  return std::make_shared<const Agent>(Call{std::move(name), std::move(args)});
}

namespace {

bool same_system(const ConstraintSystem& a, const ConstraintSystem& b) {
  return &a.semiring() == &b.semiring() && a.domain() == b.domain() &&
         a.variables() == b.variables();
}

// Content equality; two parses of one text yield distinct system objects.
bool same_ref(const ConstraintRef& a, const ConstraintRef& b) {
  return a.name == b.name && a.constraint.scope() == b.constraint.scope() &&
         a.constraint.table() == b.constraint.table() &&
         same_system(*a.constraint.system(), *b.constraint.system());
}

bool same_threshold(const Threshold& a, const Threshold& b) {
  if (a.index() != b.index()) return false;
  if (auto* la = std::get_if<LevelThreshold>(&a)) {
    return la->level == std::get<LevelThreshold>(b).level;
  }
  if (auto* ca = std::get_if<CutThreshold>(&a)) {
    return same_ref(ca->phi, std::get<CutThreshold>(b).phi);
  }
  return true;
}

struct SameVisitor {
  const Agent::Node& other;

  bool operator()(const Success&) const { return true; }
  bool operator()(const Fail&) const { return true; }
  bool operator()(const Tell& t) const {
    const auto& o = std::get<Tell>(other);
    return same_ref(t.c, o.c) && same_threshold(t.threshold, o.threshold) &&
           same_agent(*t.next, *o.next);
  }
  bool operator()(const Choice& c) const {
    const auto& o = std::get<Choice>(other);
    if (c.branches.size() != o.branches.size()) return false;
    for (std::size_t i = 0; i < c.branches.size(); ++i) {
      const auto& x = c.branches[i];
      const auto& y = o.branches[i];
      if (!same_ref(x.c, y.c) || !same_threshold(x.threshold, y.threshold) ||
          !same_agent(*x.next, *y.next)) {
        return false;
      }
    }
    return true;
  }
  bool operator()(const Par& p) const {
    const auto& o = std::get<Par>(other);
    return same_agent(*p.left, *o.left) && same_agent(*p.right, *o.right);
  }
  bool operator()(const FairPar& f) const {
    const auto& o = std::get<FairPar>(other);
    return std::equal(f.agents.begin(), f.agents.end(), o.agents.begin(),
                      o.agents.end(), [](const AgentPtr& x, const AgentPtr& y) {
                        return same_agent(*x, *y);
                      });
  }
  bool operator()(const Exists& e) const {
    const auto& o = std::get<Exists>(other);
    return e.var == o.var && same_agent(*e.body, *o.body);
  }
  bool operator()(const Call& c) const {
    const auto& o = std::get<Call>(other);
    return c.name == o.name && c.args == o.args;
  }
};

}  // namespace

bool same_agent(const Agent& a, const Agent& b) {
  if (&a == &b) return true;
  if (a.node().index() != b.node().index()) return false;
  return std::visit(SameVisitor{b.node()}, a.node());
}

std::vector<std::string> node_kinds(const Agent& a) {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, const Agent& n) -> void {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Success>) {
            out.push_back("success");
          } else if constexpr (std::is_same_v<T, Fail>) {
            out.push_back("fail");
          } else if constexpr (std::is_same_v<T, Tell>) {
            out.push_back("tell");
            self(self, *node.next);
          } else if constexpr (std::is_same_v<T, Choice>) {
            out.push_back("choice");
            for (const auto& b : node.branches) {
              out.push_back("ask");
              self(self, *b.next);
            }
          } else if constexpr (std::is_same_v<T, Par>) {
            out.push_back("par");
            self(self, *node.left);
            self(self, *node.right);
          } else if constexpr (std::is_same_v<T, FairPar>) {
            out.push_back("fair-par");
            for (const auto& child : node.agents) self(self, *child);
          } else if constexpr (std::is_same_v<T, Exists>) {
            out.push_back("exists");
            self(self, *node.body);
          } else {
            out.push_back("call");
          }
        },
        n.node());
  };
  walk(walk, a);
  return out;
}

VarId VariableTable::fresh(VarId base) {
  names_.push_back(name(base) + "'" + std::to_string(++counter_));
  return static_cast<VarId>(names_.size() - 1);
}

const std::string& VariableTable::name(VarId id) const {
  if (id >= names_.size()) throw InvalidArgument("unknown variable id " + std::to_string(id));
  return names_[id];
}

const Declaration* Program::find_declaration(std::string_view name) const {
  for (const auto& d : declarations) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const ConstraintRef* Program::find_constraint(std::string_view name) const {
  for (const auto& c : constraints) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

void add_scope(std::set<VarId>& out, const SoftConstraint& c) {
  out.insert(c.scope().begin(), c.scope().end());
}

void add_threshold(std::set<VarId>& out, const Threshold& t) {
  if (auto* cut = std::get_if<CutThreshold>(&t)) add_scope(out, cut->phi.constraint);
}

}  // namespace

std::set<VarId> free_variables(const Agent& a) {
  std::set<VarId> out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Tell>) {
          add_scope(out, node.c.constraint);
          add_threshold(out, node.threshold);
          out.merge(free_variables(*node.next));
        } else if constexpr (std::is_same_v<T, Choice>) {
          for (const auto& b : node.branches) {
            add_scope(out, b.c.constraint);
            add_threshold(out, b.threshold);
            out.merge(free_variables(*b.next));
          }
        } else if constexpr (std::is_same_v<T, Par>) {
          out.merge(free_variables(*node.left));
          out.merge(free_variables(*node.right));
        } else if constexpr (std::is_same_v<T, FairPar>) {
          for (const auto& child : node.agents) out.merge(free_variables(*child));
        } else if constexpr (std::is_same_v<T, Exists>) {
          out = free_variables(*node.body);
          out.erase(node.var);
        } else if constexpr (std::is_same_v<T, Call>) {
          out.insert(node.args.begin(), node.args.end());
        }
      },
      a.node());
  return out;
}

namespace {

using Renaming = std::map<VarId, VarId>;

ConstraintRef rename_ref(const ConstraintRef& ref, const Renaming& map) {
  return ConstraintRef{ref.name, ref.constraint.rename(map)};
}

Threshold rename_threshold(const Threshold& t, const Renaming& map) {
  if (auto* cut = std::get_if<CutThreshold>(&t)) {
    return CutThreshold{rename_ref(cut->phi, map)};
  }
  return t;
}

AgentPtr apply(const AgentPtr& a, const Renaming& map, VariableTable& vars) {
  if (map.empty()) return a;
  return std::visit(
      [&](const auto& node) -> AgentPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Success> || std::is_same_v<T, Fail>) {
          return a;
        } else if constexpr (std::is_same_v<T, Tell>) {
          return make_tell(rename_ref(node.c, map),
                           rename_threshold(node.threshold, map),
                           apply(node.next, map, vars));
        } else if constexpr (std::is_same_v<T, Choice>) {
          std::vector<AskBranch> branches;
          for (const auto& b : node.branches) {
            branches.push_back(AskBranch{rename_ref(b.c, map),
                                         rename_threshold(b.threshold, map),
                                         apply(b.next, map, vars)});
          }
          return make_choice(std::move(branches));
        } else if constexpr (std::is_same_v<T, Par>) {
          return make_par(apply(node.left, map, vars), apply(node.right, map, vars));
        } else if constexpr (std::is_same_v<T, FairPar>) {
          std::vector<AgentPtr> agents;
          for (const auto& child : node.agents) agents.push_back(apply(child, map, vars));
          return make_fair_par(std::move(agents));
        } else if constexpr (std::is_same_v<T, Exists>) {
          Renaming inner = map;
          inner.erase(node.var);
          if (inner.empty()) return a;
          bool captures = std::any_of(inner.begin(), inner.end(), [&](const auto& kv) {
            return kv.second == node.var;
          });
          if (!captures) return make_exists(node.var, apply(node.body, inner, vars));
          VarId renamed = vars.fresh(node.var);
          AgentPtr body = apply(node.body, Renaming{{node.var, renamed}}, vars);
          return make_exists(renamed, apply(body, inner, vars));
        } else {
          std::vector<VarId> args = node.args;
          for (VarId& v : args) {
            if (auto it = map.find(v); it != map.end()) v = it->second;
          }
          return make_call(node.name, std::move(args));
        }
      },
      a->node());
}

}  // namespace

AgentPtr substitute(const AgentPtr& a, const std::vector<VarId>& formals,
                    const std::vector<VarId>& actuals, VariableTable& vars) {
  if (formals.size() != actuals.size()) {
    throw InvalidArgument("substitution arity mismatch: " +
                          std::to_string(formals.size()) + " formals, " +
                          std::to_string(actuals.size()) + " actuals");
  }
  Renaming map;
  for (std::size_t i = 0; i < formals.size(); ++i) {
    if (formals[i] != actuals[i]) map[formals[i]] = actuals[i];
  }
  return apply(a, map, vars);
}

std::string print_threshold(const Threshold& t, const CSemiring& s) {
  if (auto* level = std::get_if<LevelThreshold>(&t)) {
    return "->[" + s.format(level->level) + "]";
  }
  if (auto* cut = std::get_if<CutThreshold>(&t)) return "->{" + cut->phi.name + "}";
  return "->";
}

namespace {

void print(std::ostream& out, const Agent& a, const VariableTable& vars);

// Continuations of arrows and exists bind tighter than + and ||.
void print_continuation(std::ostream& out, const Agent& a, const VariableTable& vars) {
  bool wrap = a.is<Par>() || a.is<Choice>();
  if (wrap) out << '(';
  print(out, a, vars);
  if (wrap) out << ')';
}

void print(std::ostream& out, const Agent& a, const VariableTable& vars) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Success>) {
          out << "success";
        } else if constexpr (std::is_same_v<T, Fail>) {
          out << "fail";
        } else if constexpr (std::is_same_v<T, Tell>) {
          out << "tell(" << node.c.name << ") "
              << print_threshold(node.threshold, node.c.constraint.semiring()) << ' ';
          print_continuation(out, *node.next, vars);
        } else if constexpr (std::is_same_v<T, Choice>) {
          for (std::size_t i = 0; i < node.branches.size(); ++i) {
            const auto& b = node.branches[i];
            if (i > 0) out << " + ";
            out << "ask(" << b.c.name << ") "
                << print_threshold(b.threshold, b.c.constraint.semiring()) << ' ';
            print_continuation(out, *b.next, vars);
          }
        } else if constexpr (std::is_same_v<T, Par>) {
          print(out, *node.left, vars);
          out << " || ";
          if (node.right->template is<Par>()) {
            out << '(';
            print(out, *node.right, vars);
            out << ')';
          } else {
            print(out, *node.right, vars);
          }
        } else if constexpr (std::is_same_v<T, FairPar>) {
          out << "par(";
          for (std::size_t i = 0; i < node.agents.size(); ++i) {
            if (i > 0) out << ", ";
            print(out, *node.agents[i], vars);
          }
          out << ')';
        } else if constexpr (std::is_same_v<T, Exists>) {
          out << "exists " << vars.name(node.var) << " . ";
          print_continuation(out, *node.body, vars);
        } else {
          out << node.name << '(';
          for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i > 0) out << ", ";
            out << vars.name(node.args[i]);
          }
          out << ')';
        }
      },
      a.node());
}

void print_constraint(std::ostream& out, const ConstraintRef& ref,
                      const VariableTable& vars) {
  const SoftConstraint& c = ref.constraint;
  const ConstraintSystem& sys = *c.system();
  out << "constraint " << ref.name << " on (";
  for (std::size_t i = 0; i < c.scope().size(); ++i) {
    if (i > 0) out << ", ";
    out << vars.name(c.scope()[i]);
  }
  out << ") {";
  std::vector<std::size_t> tuple(c.scope().size(), 0);
  for (std::size_t row = 0; row < c.table().size(); ++row) {
    std::size_t rest = row;
    for (std::size_t i = tuple.size(); i-- > 0;) {
      tuple[i] = rest % sys.domain_size();
      rest /= sys.domain_size();
    }
    out << (row == 0 ? "\n  (" : ",\n  (");
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i > 0) out << ' ';
      out << sys.domain()[tuple[i]];
    }
    out << ") -> " << sys.semiring().format(c.table()[row]);
  }
  out << "\n};\n";
}

}  // namespace

std::string print_agent(const Agent& a, const VariableTable& vars) {
  std::ostringstream out;
  print(out, a, vars);
  return out.str();
}

std::string print_program(const Program& p) {
  const ConstraintSystem& sys = *p.system;
  VariableTable vars(sys.variables());
  std::ostringstream out;
  out << "semiring " << sys.semiring().name() << ";\n";
  out << "domain {";
  for (std::size_t i = 0; i < sys.domain().size(); ++i) {
    out << (i > 0 ? ", " : "") << sys.domain()[i];
  }
  out << "};\nvars {";
  for (std::size_t i = 0; i < sys.variables().size(); ++i) {
    out << (i > 0 ? ", " : "") << sys.variables()[i];
  }
  out << "};\n";
  for (const auto& c : p.constraints) print_constraint(out, c, vars);
  for (const auto& d : p.declarations) {
    out << "proc " << d.name << '(';
    for (std::size_t i = 0; i < d.formals.size(); ++i) {
      out << (i > 0 ? ", " : "") << vars.name(d.formals[i]);
    }
    out << ") = ";
    print(out, *d.body, vars);
    out << ";\n";
  }
  out << "init ";
  print(out, *p.main, vars);
  out << '\n';
  return out.str();
}

bool same_program(const Program& a, const Program& b) {
  if (!same_system(*a.system, *b.system)) return false;
  if (a.constraints.size() != b.constraints.size() ||
      a.declarations.size() != b.declarations.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    if (!same_ref(a.constraints[i], b.constraints[i])) return false;
  }
  for (std::size_t i = 0; i < a.declarations.size(); ++i) {
    const auto& x = a.declarations[i];
    const auto& y = b.declarations[i];
    if (x.name != y.name || x.formals != y.formals || !same_agent(*x.body, *y.body)) {
      return false;
    }
  }
  return same_agent(*a.main, *b.main);
}

}  // namespace fcc
