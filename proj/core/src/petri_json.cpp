#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/petri.hpp"

namespace avatar {
namespace {

using nlohmann::json;

PlaceTokens tokens_from_json(const json& j, const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string("PN JSON: ") + what + " must be an object");
  PlaceTokens out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_unsigned() && !(it.value().is_number_integer() && it.value().get<long long>() >= 0)) {
      throw InvalidInput(std::string("PN JSON: ") + what + " counts must be non-negative integers");
    }
    out[it.key()] = it.value().get<TokenCount>();
  }
  return out;
}

json tokens_to_json(const PlaceTokens& tokens) {
  json out = json::object();
  for (const auto& [place, count] : tokens) out[place] = count;
  return out;
}

}  // namespace

json petri_to_json(const PetriNet& net) {
  json doc;
  doc["places"] = net.places();
  json transitions = json::array();
  for (const auto& t : net.transitions()) {
    transitions.push_back({{"id", t.id}, {"label", t.label ? json(*t.label) : json(nullptr)}});
  }
  doc["transitions"] = std::move(transitions);
  json arcs = json::array();
  for (const auto& a : net.arcs()) arcs.push_back({{"from", a.from}, {"to", a.to}});
  doc["arcs"] = std::move(arcs);
  doc["initial_marking"] = tokens_to_json(net.to_place_tokens(net.initial_marking()));
  json finals = json::array();
  for (const auto& f : net.final_markings()) finals.push_back(tokens_to_json(net.to_place_tokens(f)));
  doc["final_markings"] = std::move(finals);
  return doc;
}

PetriNet petri_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw InvalidInput("PN JSON: document must be an object");
    std::vector<std::string> places = doc.at("places").get<std::vector<std::string>>();
    std::vector<Transition> transitions;
    for (const auto& t : doc.at("transitions")) {
      Transition tr;
      tr.id = t.at("id").get<std::string>();
      if (t.contains("label") && !t.at("label").is_null()) tr.label = t.at("label").get<std::string>();
      transitions.push_back(std::move(tr));
    }
    std::vector<Arc> arcs;
    for (const auto& a : doc.at("arcs")) {
      arcs.push_back({a.at("from").get<std::string>(), a.at("to").get<std::string>()});
    }
    PlaceTokens initial = tokens_from_json(doc.at("initial_marking"), "initial_marking");
    std::vector<PlaceTokens> finals;
    if (doc.contains("final_markings")) {
      for (const auto& f : doc.at("final_markings")) finals.push_back(tokens_from_json(f, "final_markings"));
    }
    return PetriNet(std::move(places), std::move(transitions), std::move(arcs), std::move(initial),
                    std::move(finals));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("PN JSON: ") + e.what());
  }
}

}  // namespace avatar
