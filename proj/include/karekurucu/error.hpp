#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "json.hpp"

namespace karekurucu {

// Stable error codes. The string form is what crosses process boundaries
// (HTTP error bodies, CLI diagnostics), so never rename an existing entry.
enum class Errc {
  NonAlphabetCharacter,
  UnreadableSource,
  MalformedInput,
  InvalidTemplate,
  MissingField,
  ProviderUnavailable,
  NoCluesFound,
  AnswerNotInText,
  InvalidRequest,
  IllegalPlacement,
  WordNotPresent,
  NoWordFits,
  MissingClue,
  EmptyEvaluationSet,
  SessionNotFound,
  ValidationFailed,
  AllProvidersFailed,
  UnknownCandidate,
  InvalidTransition,
  Conflict,
  Internal,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonAlphabetCharacter: return "NonAlphabetCharacter";
    case Errc::UnreadableSource: return "UnreadableSource";
    case Errc::MalformedInput: return "MalformedInput";
    case Errc::InvalidTemplate: return "InvalidTemplate";
    case Errc::MissingField: return "MissingField";
    case Errc::ProviderUnavailable: return "ProviderUnavailable";
    case Errc::NoCluesFound: return "NoCluesFound";
    case Errc::AnswerNotInText: return "AnswerNotInText";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::IllegalPlacement: return "IllegalPlacement";
    case Errc::WordNotPresent: return "WordNotPresent";
    case Errc::NoWordFits: return "NoWordFits";
    case Errc::MissingClue: return "MissingClue";
    case Errc::EmptyEvaluationSet: return "EmptyEvaluationSet";
    case Errc::SessionNotFound: return "SessionNotFound";
    case Errc::ValidationFailed: return "ValidationFailed";
    case Errc::AllProvidersFailed: return "AllProvidersFailed";
    case Errc::UnknownCandidate: return "UnknownCandidate";
    case Errc::InvalidTransition: return "InvalidTransition";
    case Errc::Conflict: return "Conflict";
    case Errc::Internal: return "Internal";
  }
  return "Internal";
}

/// Exception carrying a stable code and structured details.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message),
        details_(std::move(details)) {}

  Errc code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const nlohmann::json& details() const noexcept { return details_; }

  nlohmann::json to_json() const {
    return {{"code", std::string(to_string(code_))}, {"message", message_}, {"details", details_}};
  }

 private:
  Errc code_;
  std::string message_;
  nlohmann::json details_;
};

}  // namespace karekurucu
