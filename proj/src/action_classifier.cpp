#include "mea/action_classifier.hpp"

#include "mea/text.hpp"

namespace mea {

std::string_view to_string(ActionClass c) {
  switch (c) {
    case ActionClass::Mental: return "Mental";
    case ActionClass::Physical: return "Physical";
    case ActionClass::Social: return "Social";
  }
  return "?";
}

std::optional<ActionClass> action_class_from_string(std::string_view s) {
  auto folded = text::to_lower(text::trim(s));
  if (folded == "mental") return ActionClass::Mental;
  if (folded == "physical") return ActionClass::Physical;
  if (folded == "social") return ActionClass::Social;
  return std::nullopt;
}

NodeId action_node(ActionClass c) {
  switch (c) {
    case ActionClass::Mental: return NodeId::mental_action;
    case ActionClass::Physical: return NodeId::physical_action;
    case ActionClass::Social: return NodeId::social_action;
  }
  return NodeId::physical_action;
}

}  // namespace mea
