#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fcc/ast.hpp"
#include "fcc/constraints.hpp"
#include "fcc/scheduler.hpp"

namespace fcc {

enum class Mode { Cc, Scc };
enum class FairMode { None, Crisp, Soft };
enum class ChoicePolicy { Leftmost, Seeded };

struct RunOptions {
  Mode mode = Mode::Scc;
  FairMode fair = FairMode::Crisp;
  SoftPolicy soft_policy = SoftPolicy::Min;
  ChoicePolicy choice = ChoicePolicy::Leftmost;
  std::uint64_t seed = 0;
  std::size_t max_steps = 10000;
  /// Re-verify store caches and carpool zero-sum after every step.
  bool check_invariants = false;
};

// Live process tree. Parallel compositions are unfolded into LivePar and
// LiveFair nodes as soon as they appear; everything else stays an AST leaf.
struct LiveNode;
using LiveNodePtr = std::shared_ptr<const LiveNode>;

/// A process slot. id identifies the agent for traces and store sections.
struct LiveChild {
  AgentId id;
  LiveNodePtr node;
};

struct LiveLeaf {
  AgentPtr agent;
};

struct LivePar {
  LiveChild left;
  LiveChild right;
};

/// par(A1..Am) with m >= 2. keys[i] is the score key of children[i]; it is
/// fixed when the node is created even if the child later collapses into a
/// grandchild with another id.
struct LiveFair {
  std::vector<AgentId> keys;
  std::vector<LiveChild> children;
  std::optional<CrispScoreVector> crisp;
  std::optional<SoftScoreVector> soft;
};

struct LiveNode {
  std::variant<LiveLeaf, LivePar, LiveFair> node;
};

inline constexpr AgentId kNoAgent = std::numeric_limits<AgentId>::max();

struct Failure {
  AgentId agent;
  std::string rule;
};

struct Configuration {
  /// Empty once the program has finished (or failed outside a fair node).
  std::optional<LiveChild> root;
  Store store;
  FairnessLedger ledger;
  VariableTable vars;
  AgentId next_id = 0;
  std::size_t step = 0;
  std::mt19937_64 rng;
  /// First agent that failed, if any.
  std::optional<Failure> failure;
  std::vector<ScoreView> last_scores;
  std::vector<std::vector<ScoreView>> score_history;
};

/// One fair-parallel selection made during a step, outermost first.
struct Selection {
  std::vector<AgentId> enabled;
  AgentId chosen;
  std::vector<ScoreView> before;
  std::vector<ScoreView> after;
};

struct TraceEvent {
  std::size_t step = 0;
  /// tell, valued-tell, cut-tell, ask, valued-ask, cut-ask, exists, call,
  /// stop or fail.
  std::string rule;
  AgentId agent = kNoAgent;
  std::optional<std::string> constraint;
  /// Index of the ask branch taken by a choice.
  std::optional<std::size_t> branch;
  /// Innermost parallel rule: par-1, par-2, fair-par-1, fair-par-2 or empty.
  std::string parallel;
  bool failed = false;
  Level blevel;
  const CSemiring* semiring = nullptr;
  std::vector<Selection> selections;
  /// Constraint added to the store by this step (not serialized).
  std::optional<SoftConstraint> told;
};

nlohmann::json to_json(const TraceEvent& event);
std::string pretty(const TraceEvent& event);

struct OutcomeSuccess {};
struct OutcomeFail {
  AgentId agent;
  std::string rule;
};
struct OutcomeDeadlock {
  std::vector<AgentId> suspended;
};
struct OutcomeStepLimit {};
using Outcome = std::variant<OutcomeSuccess, OutcomeFail, OutcomeDeadlock, OutcomeStepLimit>;

std::string outcome_name(const Outcome& outcome);

struct RunResult {
  Outcome outcome;
  std::vector<TraceEvent> trace;
  FairnessReport report;
  Configuration final;
};

enum class Readiness { Ready, Failing, Suspended };

/// Small-step interpreter for one program under fixed options.
class Engine {
 public:
  /// Throws InvalidArgument when cc mode is asked to run a program with
  /// non-zero thresholds.
  Engine(Program program, RunOptions options);

  const Program& program() const { return program_; }
  const RunOptions& options() const { return options_; }

  Configuration initial() const;

  bool finished(const Configuration& cfg) const { return !cfg.root.has_value(); }
  /// No rule applies although the program has not finished.
  bool deadlocked(const Configuration& cfg) const;

  /// Fires exactly one rule instance. Throws InvalidArgument on a finished
  /// or deadlocked configuration.
  std::pair<Configuration, TraceEvent> step(Configuration cfg) const;

  RunResult run() const;

  Readiness readiness(const Configuration& cfg, const LiveChild& slot) const;

  /// Score keys of the children of node that can make progress now.
  std::vector<AgentId> enabled_set(const Configuration& cfg, const LiveFair& node) const;
  /// Children whose next move is a failure.
  std::vector<AgentId> failing_set(const Configuration& cfg, const LiveFair& node) const;

  /// Ids of the leaves currently suspended.
  std::vector<AgentId> suspended_agents(const Configuration& cfg) const;

 private:
  struct StepContext;
  enum class FireKind { Continue, Succeeded, Failed };
  struct Fired {
    FireKind kind;
    std::optional<LiveChild> replacement;
  };

  LiveChild spawn(const AgentPtr& agent, AgentId id, Configuration& cfg) const;
  Fired fire(const LiveChild& slot, StepContext& ctx) const;
  Fired fire_leaf(const LiveChild& slot, const Agent& agent, StepContext& ctx) const;
  Fired fire_par(const LiveChild& slot, const LivePar& par, StepContext& ctx) const;
  Fired fire_fair(const LiveChild& slot, const LiveFair& fair, StepContext& ctx) const;
  Fired continue_with(const AgentPtr& next, AgentId owner, StepContext& ctx) const;

  Program program_;
  RunOptions options_;
};

RunResult run(const Program& program, const RunOptions& options);

/// Leftmost fair-parallel node in the tree, if any.
const LiveFair* first_fair_node(const Configuration& cfg);

/// Every threshold is absent or trivially satisfied (level zero, all-zero cut).
bool thresholds_trivial(const Program& program);

/// Runs the program in cc and scc mode (other options as given) and compares
/// the traces event by event, with threshold rule names folded onto their
/// eventual versions. Throws InvalidArgument unless thresholds_trivial.
bool equivalence_check(const Program& program, RunOptions options = {});

/// Re-tells every recorded constraint into an empty store.
Store rebuild_store(const SystemPtr& system, const std::vector<TraceEvent>& trace);

/// Re-executes the program and checks that it yields the recorded events, the
/// same final store and the same final scores.
bool replay_matches(const Program& program, const RunOptions& options,
                    const RunResult& recorded);

}  // namespace fcc
