#include "fcc/engine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fcc/error.hpp"

namespace fcc {

namespace {

enum class Verdict { Fire, Fail, Suspend };

struct ActionEval {
  Verdict verdict;
  std::string rule;
};

bool trivial(const Threshold& t, const CSemiring& s) {
  if (auto* level = std::get_if<LevelThreshold>(&t)) return level->level == s.zero();
  if (auto* cut = std::get_if<CutThreshold>(&t)) {
    const auto& table = cut->phi.constraint.table();
    return std::all_of(table.begin(), table.end(),
                       [&](const Level& l) { return l == s.zero(); });
  }
  return true;
}

std::string rule_name(const char* base, const Threshold& t) {
  if (std::holds_alternative<LevelThreshold>(t)) return std::string("valued-") + base;
  if (std::holds_alternative<CutThreshold>(t)) return std::string("cut-") + base;
  return base;
}

// Whether the cut check on `info` rejects the action.
bool threshold_violated(const Threshold& t, const SoftConstraint& info) {
  if (auto* level = std::get_if<LevelThreshold>(&t)) {
    return info.semiring().less(blevel(info).level(), level->level);
  }
  if (auto* cut = std::get_if<CutThreshold>(&t)) {
    return strictly_below_on_scope(info, cut->phi.constraint);
  }
  return false;
}

ActionEval eval_tell(const Tell& tell, const Store& store, Mode mode) {
  std::string rule = rule_name("tell", tell.threshold);
  SoftConstraint next = combine(store.combination(), tell.c.constraint);
  const CSemiring& s = next.semiring();
  if (std::holds_alternative<NoThreshold>(tell.threshold)) {
    // cc: the resulting store must be consistent
    bool inconsistent = mode == Mode::Cc && s.kind() == SemiringKind::Boolean &&
                        blevel(next).level() == s.zero();
    return {inconsistent ? Verdict::Fail : Verdict::Fire, rule};
  }
  return {threshold_violated(tell.threshold, next) ? Verdict::Fail : Verdict::Fire, rule};
}

ActionEval eval_ask(const AskBranch& ask, const Store& store) {
  std::string rule = rule_name("ask", ask.threshold);
  const SoftConstraint& sigma = store.combination();
  if (threshold_violated(ask.threshold, sigma)) return {Verdict::Fail, rule};
  if (entails(store, ask.c.constraint)) return {Verdict::Fire, rule};
  const CSemiring& s = sigma.semiring();
  if (blevel(combine(sigma, ask.c.constraint)).level() == s.zero()) {
    return {Verdict::Fail, rule};
  }
  return {Verdict::Suspend, rule};
}

struct LeafEval {
  Readiness readiness;
  std::string rule;
  std::vector<std::size_t> fireable;  // choice branches
};

LeafEval eval_leaf(const Agent& agent, const Store& store, Mode mode) {
  return std::visit(
      [&](const auto& node) -> LeafEval {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Success>) {
          return {Readiness::Ready, "stop", {}};
        } else if constexpr (std::is_same_v<T, Fail>) {
          return {Readiness::Failing, "fail", {}};
        } else if constexpr (std::is_same_v<T, Tell>) {
          ActionEval e = eval_tell(node, store, mode);
          return {e.verdict == Verdict::Fire ? Readiness::Ready : Readiness::Failing, e.rule, {}};
        } else if constexpr (std::is_same_v<T, Choice>) {
          LeafEval out{Readiness::Failing, "", {}};
          bool all_fail = true;
          for (std::size_t i = 0; i < node.branches.size(); ++i) {
            ActionEval e = eval_ask(node.branches[i], store);
            if (i == 0) out.rule = e.rule;
            if (e.verdict == Verdict::Fire) out.fireable.push_back(i);
            if (e.verdict != Verdict::Fail) all_fail = false;
          }
          if (!out.fireable.empty()) {
            out.readiness = Readiness::Ready;
          } else {
            out.readiness = all_fail ? Readiness::Failing : Readiness::Suspended;
          }
          return out;
        } else if constexpr (std::is_same_v<T, Exists>) {
          return {Readiness::Ready, "exists", {}};
        } else if constexpr (std::is_same_v<T, Call>) {
          return {Readiness::Ready, "call", {}};
        } else {
          throw InternalError("parallel composition left unexpanded in a leaf");
        }
      },
      agent.node());
}

Readiness combine_fair(const std::vector<Readiness>& children) {
  bool ready = false;
  for (Readiness r : children) {
    if (r == Readiness::Failing) return Readiness::Failing;
    if (r == Readiness::Ready) ready = true;
  }
  return ready ? Readiness::Ready : Readiness::Suspended;
}

std::int64_t score_sum(const CrispScoreVector& k) {
  std::int64_t sum = 0;
  for (const auto& [a, v] : k.entries) sum += v;
  return sum;
}

std::vector<ScoreView> scores_of(const LiveFair& fair) {
  if (fair.crisp) return snapshot(*fair.crisp);
  if (fair.soft) return snapshot(*fair.soft);
  return {};
}

void set_parallel(TraceEvent& event, const char* rule) {
  if (event.parallel.empty()) event.parallel = rule;
}

}  // namespace

struct Engine::StepContext {
  Configuration& cfg;
  TraceEvent& event;
};

bool thresholds_trivial(const Program& program) {
  const CSemiring& s = program.system->semiring();
  bool ok = true;
  auto walk = [&](auto&& self, const Agent& a) -> void {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Tell>) {
            ok = ok && trivial(node.threshold, s);
            self(self, *node.next);
          } else if constexpr (std::is_same_v<T, Choice>) {
            for (const auto& b : node.branches) {
              ok = ok && trivial(b.threshold, s);
              self(self, *b.next);
            }
          } else if constexpr (std::is_same_v<T, Par>) {
            self(self, *node.left);
            self(self, *node.right);
          } else if constexpr (std::is_same_v<T, FairPar>) {
            for (const auto& c : node.agents) self(self, *c);
          } else if constexpr (std::is_same_v<T, Exists>) {
            self(self, *node.body);
          }
        },
        a.node());
  };
  walk(walk, *program.main);
  for (const auto& d : program.declarations) walk(walk, *d.body);
  return ok;
}

namespace {

// cc has no thresholds: zero-level and all-zero cuts are dropped, anything
// else is rejected.
AgentPtr strip_thresholds(const AgentPtr& a) {
  return std::visit(
      [&](const auto& node) -> AgentPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Tell>) {
          return make_tell(node.c, NoThreshold{}, strip_thresholds(node.next));
        } else if constexpr (std::is_same_v<T, Choice>) {
          std::vector<AskBranch> branches;
          for (const auto& b : node.branches) {
            branches.push_back({b.c, NoThreshold{}, strip_thresholds(b.next)});
          }
          return make_choice(std::move(branches));
        } else if constexpr (std::is_same_v<T, Par>) {
          return make_par(strip_thresholds(node.left), strip_thresholds(node.right));
        } else if constexpr (std::is_same_v<T, FairPar>) {
          std::vector<AgentPtr> agents;
          for (const auto& c : node.agents) agents.push_back(strip_thresholds(c));
          return make_fair_par(std::move(agents));
        } else if constexpr (std::is_same_v<T, Exists>) {
          return make_exists(node.var, strip_thresholds(node.body));
        } else {
          return a;
        }
      },
      a->node());
}

}  // namespace

Engine::Engine(Program program, RunOptions options)
    : program_(std::move(program)), options_(options) {
  if (!program_.system || !program_.main) throw InvalidArgument("incomplete program");
  if (options_.mode == Mode::Cc) {
    if (!thresholds_trivial(program_)) {
      throw InvalidArgument("thresholds ->[a] and ->{phi} need scc mode");
    }
    program_.main = strip_thresholds(program_.main);
    for (auto& d : program_.declarations) d.body = strip_thresholds(d.body);
  }
}

Configuration Engine::initial() const {
  Configuration cfg{std::nullopt,
                    Store(program_.system),
                    FairnessLedger{},
                    VariableTable(program_.system->variables()),
                    0,
                    0,
                    std::mt19937_64(options_.seed),
                    std::nullopt,
                    {},
                    {}};
  bool parallel = program_.main->is<Par>() ||
                  (program_.main->is<FairPar>() && program_.main->as<FairPar>()->agents.size() > 1);
  AgentId root_id = parallel ? kNoAgent : cfg.next_id++;
  cfg.root = spawn(program_.main, root_id, cfg);
  return cfg;
}

LiveChild Engine::spawn(const AgentPtr& agent, AgentId id, Configuration& cfg) const {
  if (const auto* par = agent->as<Par>()) {
    AgentId left_id = cfg.next_id++;
    AgentId right_id = cfg.next_id++;
    LiveChild left = spawn(par->left, left_id, cfg);
    LiveChild right = spawn(par->right, right_id, cfg);
    return {id, std::make_shared<const LiveNode>(LiveNode{LivePar{left, right}})};
  }
  if (const auto* fair = agent->as<FairPar>()) {
    if (fair->agents.size() == 1) return spawn(fair->agents.front(), id, cfg);
    LiveFair node;
    for (std::size_t i = 0; i < fair->agents.size(); ++i) node.keys.push_back(cfg.next_id++);
    for (std::size_t i = 0; i < fair->agents.size(); ++i) {
      node.children.push_back(spawn(fair->agents[i], node.keys[i], cfg));
    }
    if (options_.fair == FairMode::Crisp) node.crisp = CrispScoreVector::initial(node.keys);
    if (options_.fair == FairMode::Soft) {
      node.soft = SoftScoreVector::initial(program_.system, node.keys);
    }
    return {id, std::make_shared<const LiveNode>(LiveNode{std::move(node)})};
  }
  return {id, std::make_shared<const LiveNode>(LiveNode{LiveLeaf{agent}})};
}

Readiness Engine::readiness(const Configuration& cfg, const LiveChild& slot) const {
  return std::visit(
      [&](const auto& node) -> Readiness {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, LiveLeaf>) {
          return eval_leaf(*node.agent, cfg.store, options_.mode).readiness;
        } else if constexpr (std::is_same_v<T, LivePar>) {
          Readiness left = readiness(cfg, node.left);
          return left != Readiness::Suspended ? left : readiness(cfg, node.right);
        } else {
          std::vector<Readiness> rs;
          for (const auto& c : node.children) rs.push_back(readiness(cfg, c));
          return combine_fair(rs);
        }
      },
      slot.node->node);
}

std::vector<AgentId> Engine::enabled_set(const Configuration& cfg, const LiveFair& node) const {
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (readiness(cfg, node.children[i]) == Readiness::Ready) out.push_back(node.keys[i]);
  }
  return out;
}

std::vector<AgentId> Engine::failing_set(const Configuration& cfg, const LiveFair& node) const {
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (readiness(cfg, node.children[i]) == Readiness::Failing) out.push_back(node.keys[i]);
  }
  return out;
}

bool Engine::deadlocked(const Configuration& cfg) const {
  return cfg.root && readiness(cfg, *cfg.root) == Readiness::Suspended;
}

std::vector<AgentId> Engine::suspended_agents(const Configuration& cfg) const {
  std::vector<AgentId> out;
  auto walk = [&](auto&& self, const LiveChild& slot) -> void {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, LiveLeaf>) {
            if (eval_leaf(*node.agent, cfg.store, options_.mode).readiness ==
                Readiness::Suspended) {
              out.push_back(slot.id);
            }
          } else if constexpr (std::is_same_v<T, LivePar>) {
            self(self, node.left);
            self(self, node.right);
          } else {
            for (const auto& c : node.children) self(self, c);
          }
        },
        slot.node->node);
  };
  if (cfg.root) walk(walk, *cfg.root);
  std::sort(out.begin(), out.end());
  return out;
}

Engine::Fired Engine::continue_with(const AgentPtr& next, AgentId owner,
                                    StepContext& ctx) const {
  if (next->is<Success>()) return {FireKind::Succeeded, std::nullopt};
  return {FireKind::Continue, spawn(next, owner, ctx.cfg)};
}

Engine::Fired Engine::fire(const LiveChild& slot, StepContext& ctx) const {
  return std::visit(
      [&](const auto& node) -> Fired {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, LiveLeaf>) {
          return fire_leaf(slot, *node.agent, ctx);
        } else if constexpr (std::is_same_v<T, LivePar>) {
          return fire_par(slot, node, ctx);
        } else {
          return fire_fair(slot, node, ctx);
        }
      },
      slot.node->node);
}

Engine::Fired Engine::fire_leaf(const LiveChild& slot, const Agent& agent,
                                StepContext& ctx) const {
  Configuration& cfg = ctx.cfg;
  TraceEvent& event = ctx.event;
  LeafEval eval = eval_leaf(agent, cfg.store, options_.mode);
  event.agent = slot.id;
  event.rule = eval.rule;
  if (eval.readiness == Readiness::Suspended) {
    throw InternalError("fired a suspended agent");
  }
  if (eval.readiness == Readiness::Failing) {
    event.failed = true;
    if (const auto* tell = agent.as<Tell>()) event.constraint = tell->c.name;
    if (const auto* choice = agent.as<Choice>()) {
      event.constraint = choice->branches.front().c.name;
    }
    return {FireKind::Failed, std::nullopt};
  }
  return std::visit(
      [&](const auto& node) -> Fired {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Success>) {
          return {FireKind::Succeeded, std::nullopt};
        } else if constexpr (std::is_same_v<T, Tell>) {
          event.constraint = node.c.name;
          event.told = node.c.constraint;
          cfg.store = cfg.store.tell(slot.id, node.c.constraint);
          return continue_with(node.next, slot.id, ctx);
        } else if constexpr (std::is_same_v<T, Choice>) {
          std::size_t pick = eval.fireable.front();
          if (options_.choice == ChoicePolicy::Seeded) {
            pick = eval.fireable[cfg.rng() % eval.fireable.size()];
          }
          const AskBranch& branch = node.branches[pick];
          event.rule = rule_name("ask", branch.threshold);
          event.constraint = branch.c.name;
          event.branch = pick;
          return continue_with(branch.next, slot.id, ctx);
        } else if constexpr (std::is_same_v<T, Exists>) {
          VarId fresh = cfg.vars.fresh(node.var);
          return continue_with(substitute(node.body, {node.var}, {fresh}, cfg.vars),
                               slot.id, ctx);
        } else if constexpr (std::is_same_v<T, Call>) {
          const Declaration* decl = program_.find_declaration(node.name);
          if (!decl) throw InternalError("unresolved procedure '" + node.name + "'");
          return continue_with(substitute(decl->body, decl->formals, node.args, cfg.vars),
                               slot.id, ctx);
        } else {
          throw InternalError("unexpected leaf");
        }
      },
      agent.node());
}

Engine::Fired Engine::fire_par(const LiveChild& slot, const LivePar& par,
                               StepContext& ctx) const {
  bool left_moves = readiness(ctx.cfg, par.left) != Readiness::Suspended;
  const LiveChild& mover = left_moves ? par.left : par.right;
  const LiveChild& other = left_moves ? par.right : par.left;
  Fired r = fire(mover, ctx);
  switch (r.kind) {
    case FireKind::Failed:
      return r;
    case FireKind::Succeeded:
      set_parallel(ctx.event, "par-2");
      return {FireKind::Continue, other};
    case FireKind::Continue:
      break;
  }
  set_parallel(ctx.event, "par-1");
  LivePar next = left_moves ? LivePar{*r.replacement, other} : LivePar{other, *r.replacement};
  return {FireKind::Continue,
          LiveChild{slot.id, std::make_shared<const LiveNode>(LiveNode{std::move(next)})}};
}

Engine::Fired Engine::fire_fair(const LiveChild& slot, const LiveFair& fair,
                                StepContext& ctx) const {
  Configuration& cfg = ctx.cfg;
  LiveFair next = fair;

  auto remove_child = [&](std::size_t index) {
    AgentId key = next.keys[index];
    next.keys.erase(next.keys.begin() + static_cast<std::ptrdiff_t>(index));
    next.children.erase(next.children.begin() + static_cast<std::ptrdiff_t>(index));
    if (next.crisp) next.crisp = remove_agent(*next.crisp, key);
    if (next.soft) next.soft = remove_agent(*next.soft, key);
  };
  auto result = [&]() -> Fired {
    if (next.children.size() == 1) return {FireKind::Continue, next.children.front()};
    return {FireKind::Continue,
            LiveChild{slot.id, std::make_shared<const LiveNode>(LiveNode{std::move(next)})}};
  };

  std::vector<Readiness> rs;
  for (const auto& c : fair.children) rs.push_back(readiness(cfg, c));

  // A failing child is removed before any selection takes place.
  auto failing = std::find(rs.begin(), rs.end(), Readiness::Failing);
  if (failing != rs.end()) {
    auto index = static_cast<std::size_t>(failing - rs.begin());
    Fired r = fire(fair.children[index], ctx);
    if (r.kind == FireKind::Continue) {
      // a nested fair node absorbed the failure itself
      next.children[index] = *r.replacement;
      return result();
    }
    if (r.kind == FireKind::Failed && !cfg.failure) {
      cfg.failure = Failure{ctx.event.agent, ctx.event.rule};
    }
    set_parallel(ctx.event, "fair-par-2");
    remove_child(index);
    return result();
  }

  std::vector<AgentId> enabled;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs[i] == Readiness::Ready) enabled.push_back(fair.keys[i]);
  }
  if (enabled.empty()) throw InternalError("fair node fired with no enabled child");

  AgentId chosen = enabled.front();
  if (fair.crisp) chosen = select_crisp(enabled, *fair.crisp);
  if (fair.soft) chosen = select_soft(enabled, *fair.soft, options_.soft_policy, cfg.ledger);
  std::size_t index = static_cast<std::size_t>(
      std::find(fair.keys.begin(), fair.keys.end(), chosen) - fair.keys.begin());

  std::size_t selection_slot = ctx.event.selections.size();
  ctx.event.selections.push_back(Selection{enabled, chosen, scores_of(fair), {}});

  Fired r = fire(fair.children[index], ctx);
  if (r.kind == FireKind::Failed) throw InternalError("enabled child failed");
  cfg.ledger = ledger_record(cfg.ledger, enabled, chosen);

  if (next.crisp && r.kind == FireKind::Continue) {
    std::int64_t before = score_sum(*next.crisp);
    next.crisp = update_crisp(*next.crisp, chosen, enabled);
    if (options_.check_invariants && score_sum(*next.crisp) != before) {
      throw InternalError("carpool update is not zero-sum");
    }
  }
  if (next.soft && ctx.event.told) next.soft = update_soft(*next.soft, chosen, *ctx.event.told);

  if (r.kind == FireKind::Succeeded) {
    set_parallel(ctx.event, "fair-par-2");
    remove_child(index);
  } else {
    set_parallel(ctx.event, "fair-par-1");
    next.children[index] = *r.replacement;
  }
  ctx.event.selections[selection_slot].after = scores_of(next);
  if (fair.crisp || fair.soft) {
    cfg.last_scores = ctx.event.selections[selection_slot].after;
    cfg.score_history.push_back(cfg.last_scores);
  }
  return result();
}

std::pair<Configuration, TraceEvent> Engine::step(Configuration cfg) const {
  if (!cfg.root) throw InvalidArgument("step on a finished configuration");
  if (deadlocked(cfg)) throw InvalidArgument("step on a deadlocked configuration");
  TraceEvent event;
  event.step = cfg.step + 1;
  StepContext ctx{cfg, event};
  Fired r = fire(*cfg.root, ctx);
  switch (r.kind) {
    case FireKind::Continue:
      cfg.root = r.replacement;
      break;
    case FireKind::Succeeded:
      cfg.root.reset();
      break;
    case FireKind::Failed:
      if (!cfg.failure) cfg.failure = Failure{event.agent, event.rule};
      cfg.root.reset();
      break;
  }
  cfg.step = event.step;
  event.blevel = cfg.store.blevel().level();
  event.semiring = &program_.system->semiring();
  if (options_.check_invariants && !(cfg.store.recompute() == cfg.store.combination())) {
    throw InternalError("store combination cache is stale");
  }
  return {std::move(cfg), std::move(event)};
}

RunResult Engine::run() const {
  Configuration cfg = initial();
  std::vector<TraceEvent> trace;
  std::optional<Outcome> outcome;
  while (!outcome) {
    if (finished(cfg)) {
      outcome = OutcomeSuccess{};
    } else if (deadlocked(cfg)) {
      outcome = OutcomeDeadlock{suspended_agents(cfg)};
    } else if (cfg.step >= options_.max_steps) {
      outcome = OutcomeStepLimit{};
    } else {
      auto [next, event] = step(std::move(cfg));
      cfg = std::move(next);
      trace.push_back(std::move(event));
    }
  }
  if (cfg.failure) outcome = OutcomeFail{cfg.failure->agent, cfg.failure->rule};
  FairnessReport report = fairness_report(cfg.ledger, cfg.last_scores, cfg.score_history);
  return RunResult{*outcome, std::move(trace), std::move(report), std::move(cfg)};
}

RunResult run(const Program& program, const RunOptions& options) {
  return Engine(program, options).run();
}

const LiveFair* first_fair_node(const Configuration& cfg) {
  const LiveFair* found = nullptr;
  auto walk = [&](auto&& self, const LiveChild& slot) -> void {
    if (found) return;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, LiveFair>) {
            found = &node;
          } else if constexpr (std::is_same_v<T, LivePar>) {
            self(self, node.left);
            self(self, node.right);
          }
        },
        slot.node->node);
  };
  if (cfg.root) walk(walk, *cfg.root);
  return found;
}

std::string outcome_name(const Outcome& outcome) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, OutcomeSuccess>) return "success";
        if constexpr (std::is_same_v<T, OutcomeFail>) return "fail";
        if constexpr (std::is_same_v<T, OutcomeDeadlock>) return "deadlock";
        return "step-limit";
      },
      outcome);
}

nlohmann::json to_json(const TraceEvent& event) {
  nlohmann::json selections = nlohmann::json::array();
  for (const auto& s : event.selections) {
    selections.push_back({{"enabled", s.enabled},
                          {"chosen", s.chosen},
                          {"before", to_json(s.before)},
                          {"after", to_json(s.after)}});
  }
  nlohmann::json out{
      {"step", event.step},
      {"rule", event.rule},
      {"agent", event.agent},
      {"constraint", event.constraint ? nlohmann::json(*event.constraint) : nlohmann::json()},
      {"blevel", to_rational_string(event.blevel)},
      {"parallel", event.parallel.empty() ? nlohmann::json() : nlohmann::json(event.parallel)},
      {"failed", event.failed},
      {"scores", event.selections.empty() ? nlohmann::json()
                                          : to_json(event.selections.back().after)},
      {"selections", std::move(selections)}};
  if (event.branch) out["branch"] = *event.branch;
  return out;
}

namespace {

std::string pretty_scores(const std::vector<ScoreView>& scores) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i > 0) out << ", ";
    out << scores[i].agent << ':';
    if (auto* crisp = std::get_if<std::int64_t>(&scores[i].value)) {
      out << *crisp;
    } else {
      out << to_string(std::get<SemiringValue>(scores[i].value));
    }
  }
  out << '}';
  return out.str();
}

}  // namespace

std::string pretty(const TraceEvent& event) {
  std::ostringstream out;
  out << '#' << event.step << ' ' << event.rule;
  if (event.constraint) out << '(' << *event.constraint << ')';
  out << " by agent " << event.agent;
  if (event.failed) out << " FAILED";
  out << "  blevel="
      << (event.semiring ? event.semiring->format(event.blevel)
                         : to_rational_string(event.blevel));
  if (!event.parallel.empty()) out << "  [" << event.parallel << ']';
  for (const auto& s : event.selections) {
    out << "  enabled={";
    for (std::size_t i = 0; i < s.enabled.size(); ++i) out << (i ? "," : "") << s.enabled[i];
    out << "} chose " << s.chosen;
    if (!s.after.empty() || !s.before.empty()) out << " scores " << pretty_scores(s.after);
  }
  return out.str();
}

namespace {

std::string normalized_rule(const std::string& rule) {
  for (const char* prefix : {"valued-", "cut-"}) {
    if (rule.rfind(prefix, 0) == 0) return rule.substr(std::string(prefix).size());
  }
  return rule;
}

bool same_scores(const std::vector<ScoreView>& a, const std::vector<ScoreView>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].agent != b[i].agent || a[i].value.index() != b[i].value.index()) return false;
    if (auto* x = std::get_if<std::int64_t>(&a[i].value)) {
      if (*x != std::get<std::int64_t>(b[i].value)) return false;
    } else if (!(std::get<SemiringValue>(a[i].value) ==
                 std::get<SemiringValue>(b[i].value))) {
      return false;
    }
  }
  return true;
}

bool same_event(const TraceEvent& a, const TraceEvent& b, bool normalize) {
  auto rule = [&](const std::string& r) { return normalize ? normalized_rule(r) : r; };
  if (a.step != b.step || rule(a.rule) != rule(b.rule) || a.agent != b.agent ||
      a.constraint != b.constraint || a.branch != b.branch || a.parallel != b.parallel ||
      a.failed != b.failed || !(a.blevel == b.blevel) ||
      a.selections.size() != b.selections.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.selections.size(); ++i) {
    const auto& x = a.selections[i];
    const auto& y = b.selections[i];
    if (x.enabled != y.enabled || x.chosen != y.chosen || !same_scores(x.before, y.before) ||
        !same_scores(x.after, y.after)) {
      return false;
    }
  }
  return true;
}

bool same_trace(const std::vector<TraceEvent>& a, const std::vector<TraceEvent>& b,
                bool normalize) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [&](const TraceEvent& x, const TraceEvent& y) {
                      return same_event(x, y, normalize);
                    });
}

}  // namespace

bool equivalence_check(const Program& program, RunOptions options) {
  if (!thresholds_trivial(program)) {
    throw InvalidArgument("equivalence check needs a program without active thresholds");
  }
  options.mode = Mode::Cc;
  RunResult cc = run(program, options);
  options.mode = Mode::Scc;
  RunResult scc = run(program, options);
  return outcome_name(cc.outcome) == outcome_name(scc.outcome) &&
         same_trace(cc.trace, scc.trace, true);
}

Store rebuild_store(const SystemPtr& system, const std::vector<TraceEvent>& trace) {
  Store store(system);
  for (const auto& e : trace) {
    if (e.told) store = store.tell(e.agent, *e.told);
  }
  return store;
}

bool replay_matches(const Program& program, const RunOptions& options,
                    const RunResult& recorded) {
  RunResult again = run(program, options);
  if (!same_trace(recorded.trace, again.trace, false)) return false;
  if (outcome_name(recorded.outcome) != outcome_name(again.outcome)) return false;
  Store rebuilt = rebuild_store(program.system, recorded.trace);
  return rebuilt.combination() == again.final.store.combination() &&
         rebuilt.sections() == again.final.store.sections() &&
         same_scores(recorded.final.last_scores, again.final.last_scores);
}

}  // namespace fcc
