#include "avatar/systems.hpp"

#include <algorithm>
#include <memory>

#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/random.hpp"

namespace avatar {

void SystemSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidInput(std::string("system spec: ") + what);
  };
  require(depth >= 0 && depth <= 6, "depth must lie in [0, 6]");
  for (double w : {weight_sequence, weight_xor, weight_and, weight_loop}) {
    require(w >= 0.0 && std::isfinite(w), "operator weights must be non-negative");
  }
  require(weight_sequence + weight_xor + weight_and + weight_loop > 0.0, "at least one operator weight must be positive");
  require(alphabet_budget >= 1, "alphabet budget must be >= 1");
  require(loop_bound >= 1 && loop_bound <= 3, "loop bound must lie in [1, 3]");
  require(min_fanout >= 2 && max_fanout >= min_fanout && max_fanout <= 8, "fan-out must satisfy 2 <= min <= max <= 8");
  require(leaf_probability >= 0.0 && leaf_probability < 1.0, "leaf probability must lie in [0, 1)");
}

nlohmann::json SystemSpec::to_json() const {
  return {{"seed", seed},
          {"depth", depth},
          {"weights", {{"sequence", weight_sequence}, {"xor", weight_xor}, {"and", weight_and}, {"loop", weight_loop}}},
          {"alphabet_budget", alphabet_budget},
          {"loop_bound", loop_bound},
          {"min_fanout", min_fanout},
          {"max_fanout", max_fanout},
          {"leaf_probability", leaf_probability},
          {"silent_skip", silent_skip},
          {"duplicate_label", duplicate_label}};
}

SystemSpec SystemSpec::from_json(const nlohmann::json& doc) {
  SystemSpec s;
  auto read = [](const nlohmann::json& j, const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    read(doc, "seed", s.seed);
    read(doc, "depth", s.depth);
    if (doc.contains("weights")) {
      const auto& w = doc.at("weights");
      read(w, "sequence", s.weight_sequence);
      read(w, "xor", s.weight_xor);
      read(w, "and", s.weight_and);
      read(w, "loop", s.weight_loop);
    }
    read(doc, "alphabet_budget", s.alphabet_budget);
    read(doc, "loop_bound", s.loop_bound);
    read(doc, "min_fanout", s.min_fanout);
    read(doc, "max_fanout", s.max_fanout);
    read(doc, "leaf_probability", s.leaf_probability);
    read(doc, "silent_skip", s.silent_skip);
    read(doc, "duplicate_label", s.duplicate_label);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("system spec: ") + e.what());
  }
  s.validate();
  return s;
}

namespace {

enum class Op { leaf, sequence, exclusive, parallel, loop };

struct Block {
  Op op = Op::leaf;
  std::size_t activity = 0;
  std::vector<std::unique_ptr<Block>> children;
};

class TreeGenerator {
 public:
  explicit TreeGenerator(const SystemSpec& spec) : spec_(spec), rng_(spec.seed) {}

  std::unique_ptr<Block> generate(int depth, bool root) {
    auto block = std::make_unique<Block>();
    if (depth == 0 || (!root && rng_.uniform() < spec_.leaf_probability)) {
      block->activity = activities_++;
      return block;
    }
    block->op = choose_operator();
    const std::size_t fanout =
        block->op == Op::loop ? 2 : spec_.min_fanout + rng_.below(spec_.max_fanout - spec_.min_fanout + 1);
    for (std::size_t i = 0; i < fanout; ++i) block->children.push_back(generate(depth - 1, false));
    return block;
  }

  std::size_t activities() const noexcept { return activities_; }

 private:
  Op choose_operator() {
    const double weights[] = {spec_.weight_sequence, spec_.weight_xor, spec_.weight_and, spec_.weight_loop};
    const Op ops[] = {Op::sequence, Op::exclusive, Op::parallel, Op::loop};
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng_.uniform() * total;
    for (int i = 0; i < 4; ++i) {
      if (weights[i] <= 0.0) continue;
      if (u < weights[i]) return ops[i];
      u -= weights[i];
    }
    for (int i = 3; i >= 0; --i) {
      if (weights[i] > 0.0) return ops[i];
    }
    return Op::sequence;
  }

  const SystemSpec& spec_;
  Rng rng_;
  std::size_t activities_ = 0;
};

class NetBuilder {
 public:
  NetBuilder(const SystemSpec& spec, std::size_t activities) : spec_(spec), activities_(activities) {
    places_ = {"start", "end"};
  }

  void build(const Block& b, const std::string& in, const std::string& out, bool in_sequence) {
    switch (b.op) {
      case Op::leaf: {
        const std::string t = visible(label_of(b.activity));
        connect(in, t, out);
        if (spec_.silent_skip && in_sequence && !skip_added_) {
          skip_added_ = true;
          connect(in, silent(), out);
        }
        break;
      }
      case Op::sequence: {
        std::string from = in;
        for (std::size_t i = 0; i < b.children.size(); ++i) {
          const std::string to = i + 1 == b.children.size() ? out : place();
          build(*b.children[i], from, to, true);
          from = to;
        }
        break;
      }
      case Op::exclusive:
        for (const auto& c : b.children) build(*c, in, out, false);
        break;
      case Op::parallel: {
        const std::string split = silent();
        const std::string join = silent();
        arcs_.push_back({in, split});
        arcs_.push_back({join, out});
        for (const auto& c : b.children) {
          const std::string branch_in = place();
          const std::string branch_out = place();
          arcs_.push_back({split, branch_in});
          arcs_.push_back({branch_out, join});
          build(*c, branch_in, branch_out, false);
        }
        break;
      }
      case Op::loop: {
        const std::string head = place();
        const std::string tail = place();
        const std::string redo_start = place();
        const std::string budget = "budget" + std::to_string(budgets_.size() + 1);
        places_.push_back(budget);
        budgets_.push_back(budget);
        connect(in, silent(), head);
        build(*b.children[0], head, tail, false);
        connect(tail, silent(), out);
        const std::string redo = silent();
        arcs_.push_back({tail, redo});
        arcs_.push_back({budget, redo});
        arcs_.push_back({redo, redo_start});
        build(*b.children[1], redo_start, head, false);
        break;
      }
    }
  }

  PetriNet finish() {
    PlaceTokens initial{{"start", 1}};
    for (const auto& budget : budgets_) {
      initial[budget] = spec_.loop_bound;
      const std::string drain = silent();
      arcs_.push_back({"end", drain});
      arcs_.push_back({budget, drain});
      arcs_.push_back({drain, "end"});
    }
    return PetriNet(places_, transitions_, arcs_, initial, {{{"end", 1}}});
  }

 private:
  Label label_of(std::size_t activity) const {
    if (spec_.duplicate_label && activities_ >= 2 && activity + 1 == activities_) activity = 0;
    return "a" + std::to_string(activity + 1);
  }

  std::string place() {
    places_.push_back("p" + std::to_string(++place_counter_));
    return places_.back();
  }
  std::string visible(const Label& label) {
    transitions_.push_back({"t" + std::to_string(++visible_counter_), label});
    return transitions_.back().id;
  }
  std::string silent() {
    transitions_.push_back({"tau" + std::to_string(++silent_counter_), std::nullopt});
    return transitions_.back().id;
  }
  void connect(const std::string& from, const std::string& t, const std::string& to) {
    arcs_.push_back({from, t});
    arcs_.push_back({t, to});
  }

  const SystemSpec& spec_;
  std::size_t activities_;
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
  std::vector<Arc> arcs_;
  std::vector<std::string> budgets_;
  std::size_t place_counter_ = 0;
  std::size_t visible_counter_ = 0;
  std::size_t silent_counter_ = 0;
  bool skip_added_ = false;
};

}  // namespace

PetriNet build_system(const SystemSpec& spec) {
  spec.validate();
  TreeGenerator gen(spec);
  const auto root = gen.generate(spec.depth, true);
  if (gen.activities() > spec.alphabet_budget) {
    throw BuildError("system needs " + std::to_string(gen.activities()) + " activities but the alphabet budget is " +
                     std::to_string(spec.alphabet_budget));
  }
  NetBuilder builder(spec, gen.activities());
  builder.build(*root, "start", "end", false);
  return builder.finish();
}

std::size_t system_length_bound(const PetriNet& net, const SystemSpec& spec) {
  std::size_t visible = 0;
  for (const auto& t : net.transitions()) visible += t.silent() ? 0 : 1;
  // A transition nested in L loops fires at most L * bound + 1 times.
  return std::max<std::size_t>(1, visible * (static_cast<std::size_t>(spec.depth) * spec.loop_bound + 1));
}

ComplexityProfile complexity_profile(const PetriNet& net, TokenCount token_cap, std::size_t max_len) {
  PlayoutOptions options;
  options.max_len = max_len;
  options.token_cap = token_cap;
  const auto playout = playout_enumerate(net, options);
  ComplexityProfile p;
  p.alphabet_size = net.alphabet().size();
  p.variant_count = playout.variants.size();
  p.mu = playout.variants.empty() ? 0 : max_variant_len(playout.variants);
  return p;
}

}  // namespace avatar
