#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fcc/constraints.hpp"

namespace fcc {

/// A named constraint as it appears inside an agent. After procedure
/// substitution the table is re-scoped but keeps its declared name.
struct ConstraintRef {
  std::string name;
  SoftConstraint constraint;

  friend bool operator==(const ConstraintRef&, const ConstraintRef&) = default;
};

/// Eventual behaviour: behaves as the level threshold zero.
struct NoThreshold {
  friend bool operator==(const NoThreshold&, const NoThreshold&) = default;
};
/// ->[a]: fails when the consistency level drops strictly below a.
struct LevelThreshold {
  Level level;
  friend bool operator==(const LevelThreshold&, const LevelThreshold&) = default;
};
/// ->{phi}: fails when the store is pointwise strictly below phi.
struct CutThreshold {
  ConstraintRef phi;
  friend bool operator==(const CutThreshold&, const CutThreshold&) = default;
};
using Threshold = std::variant<NoThreshold, LevelThreshold, CutThreshold>;

class Agent;
using AgentPtr = std::shared_ptr<const Agent>;

struct Success {};
struct Fail {};
struct Tell {
  ConstraintRef c;
  Threshold threshold;
  AgentPtr next;
};
struct AskBranch {
  ConstraintRef c;
  Threshold threshold;
  AgentPtr next;
};
struct Choice {
  std::vector<AskBranch> branches;
};
/// Binary interleaving without fairness bookkeeping.
struct Par {
  AgentPtr left;
  AgentPtr right;
};
/// par(A1, ..., Am): fair m-ary parallel composition.
struct FairPar {
  std::vector<AgentPtr> agents;
};
struct Exists {
  VarId var;
  AgentPtr body;
};
struct Call {
  std::string name;
  std::vector<VarId> args;
};

class Agent {
 public:
  using Node = std::variant<Success, Fail, Tell, Choice, Par, FairPar, Exists, Call>;

  explicit Agent(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node_);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node_);
  }

 private:
  Node node_;
};

AgentPtr make_success();
AgentPtr make_fail();
AgentPtr make_tell(ConstraintRef c, Threshold threshold, AgentPtr next);
AgentPtr make_choice(std::vector<AskBranch> branches);
AgentPtr make_par(AgentPtr left, AgentPtr right);
AgentPtr make_fair_par(std::vector<AgentPtr> agents);
AgentPtr make_exists(VarId var, AgentPtr body);
AgentPtr make_call(std::string name, std::vector<VarId> args);

/// Deep structural equality.
bool same_agent(const Agent& a, const Agent& b);

/// Node kind names in preorder, e.g. {"tell", "success"}.
std::vector<std::string> node_kinds(const Agent& a);

struct Declaration {
  std::string name;
  std::vector<VarId> formals;
  AgentPtr body;
};

/// Names for every variable id in use: the declared variables followed by
/// fresh ones. Fresh names contain a quote, which source identifiers cannot.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(std::vector<std::string> declared)
      : names_(std::move(declared)) {}

  VarId fresh(VarId base);
  const std::string& name(VarId id) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::size_t counter_ = 0;
};

struct Program {
  SystemPtr system;
  /// Declared constraints in declaration order.
  std::vector<ConstraintRef> constraints;
  std::vector<Declaration> declarations;
  AgentPtr main;

  const Declaration* find_declaration(std::string_view name) const;
  const ConstraintRef* find_constraint(std::string_view name) const;
};

/// Variables occurring free in a; Exists binds its variable.
std::set<VarId> free_variables(const Agent& a);

/// a[actuals/formals], capture-avoiding: an Exists binder that would capture
/// an actual is renamed to a fresh variable drawn from vars.
AgentPtr substitute(const AgentPtr& a, const std::vector<VarId>& formals,
                    const std::vector<VarId>& actuals, VariableTable& vars);

/// Source text for an agent; parses back to the same tree.
std::string print_agent(const Agent& a, const VariableTable& vars);
std::string print_threshold(const Threshold& t, const CSemiring& s);

/// Complete program text, tables written out row by row.
std::string print_program(const Program& p);

bool same_program(const Program& a, const Program& b);

}  // namespace fcc
