#include <map>

#include "avatar/error.hpp"
#include "avatar/petri.hpp"

namespace avatar {

PetriNet trace_model(const UniqueVariantLog& lplus) {
  if (lplus.empty()) throw InvalidInput("trace_model: empty variant log");
  std::vector<std::string> places{"root", "end"};
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
  // Trie over the variants: node 0 is the root place.
  std::map<std::pair<std::size_t, Label>, std::size_t> children;
  std::vector<std::string> node_place{"root"};
  std::vector<bool> ends_variant{false};

  for (const auto& v : lplus) {
    std::size_t node = 0;
    for (const auto& label : v) {
      auto [it, inserted] = children.try_emplace({node, label}, node_place.size());
      if (inserted) {
        const std::size_t child = it->second;
        node_place.push_back("n" + std::to_string(child));
        ends_variant.push_back(false);
        places.push_back(node_place.back());
        const std::string tid = "t" + std::to_string(child);
        transitions.push_back({tid, label});
        arcs.push_back({node_place[node], tid});
        arcs.push_back({tid, node_place[child]});
      }
      node = it->second;
    }
    ends_variant[node] = true;
  }
  for (std::size_t node = 1; node < node_place.size(); ++node) {
    if (!ends_variant[node]) continue;
    const std::string tid = "tau_end" + std::to_string(node);
    transitions.push_back({tid, std::nullopt});
    arcs.push_back({node_place[node], tid});
    arcs.push_back({tid, "end"});
  }
  return PetriNet(std::move(places), std::move(transitions), std::move(arcs), {{"root", 1}}, {{{"end", 1}}});
}

PetriNet flower_model(const std::set<Label>& alphabet) {
  if (alphabet.empty()) throw InvalidInput("flower_model: empty alphabet");
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
  std::size_t i = 0;
  for (const auto& label : alphabet) {
    const std::string tid = "t" + std::to_string(i++);
    transitions.push_back({tid, label});
    arcs.push_back({"hub", tid});
    arcs.push_back({tid, "hub"});
  }
  return PetriNet({"hub"}, std::move(transitions), std::move(arcs), {{"hub", 1}}, {{{"hub", 1}}});
}

PetriNet dfg_discover(const VariantLog& lstar) {
  if (lstar.empty()) throw InvalidInput("dfg_discover: empty variant log");
  const std::set<Label> alphabet = alphabet_of(lstar);
  std::map<Label, std::size_t> index;
  for (const auto& a : alphabet) index.emplace(a, index.size());

  std::set<std::size_t> starts, ends;
  std::set<std::pair<std::size_t, std::size_t>> follows;
  for (const auto& v : lstar) {
    if (v.empty()) throw InvalidInput("dfg_discover: empty variant");
    starts.insert(index.at(v[0]));
    ends.insert(index.at(v[v.size() - 1]));
    for (std::size_t i = 1; i < v.size(); ++i) follows.emplace(index.at(v[i - 1]), index.at(v[i]));
  }

  std::vector<Label> labels(alphabet.begin(), alphabet.end());
  auto after = [](std::size_t a) { return "after" + std::to_string(a); };
  std::vector<std::string> places{"start", "end"};
  for (std::size_t a = 0; a < labels.size(); ++a) places.push_back(after(a));

  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
  for (auto s : starts) {
    const std::string tid = "start_" + std::to_string(s);
    transitions.push_back({tid, labels[s]});
    arcs.push_back({"start", tid});
    arcs.push_back({tid, after(s)});
  }
  for (const auto& [a, b] : follows) {
    const std::string tid = "df_" + std::to_string(a) + "_" + std::to_string(b);
    transitions.push_back({tid, labels[b]});
    arcs.push_back({after(a), tid});
    arcs.push_back({tid, after(b)});
  }
  for (auto e : ends) {
    const std::string tid = "tau_end_" + std::to_string(e);
    transitions.push_back({tid, std::nullopt});
    arcs.push_back({after(e), tid});
    arcs.push_back({tid, "end"});
  }
  return PetriNet(std::move(places), std::move(transitions), std::move(arcs), {{"start", 1}}, {{{"end", 1}}});
}

}  // namespace avatar
