#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mea/error.hpp"
#include "mea/nature_graph.hpp"

namespace mea {

enum class ActionClass { Mental, Physical, Social };

std::string_view to_string(ActionClass c);
// Exact match after trimming and case folding.
std::optional<ActionClass> action_class_from_string(std::string_view s);
NodeId action_node(ActionClass c);

// Raised when a classifier answer is not one of the expected labels.
class ResponseParseError : public Error {
 public:
  ResponseParseError(const std::string& what, std::string raw_response)
      : Error(what), raw_response_(std::move(raw_response)) {}
  const std::string& raw_response() const noexcept { return raw_response_; }

 private:
  std::string raw_response_;
};

// Network or replay lookup failure.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Maps a first-person, non-past action event to its subtype. Implementations
// must be safe to call from several threads at once.
class ActionClassifier {
 public:
  virtual ~ActionClassifier() = default;
  virtual ActionClass classify(std::string_view event_text) = 0;
};

}  // namespace mea
