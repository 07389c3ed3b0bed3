#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "castl/error.hpp"

namespace castl::llm {

enum class ProviderMode { Live, Record, Replay };

std::string to_string(ProviderMode m);
ProviderMode parse_provider_mode(const std::string& s);

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_retries = 3;
  double request_timeout = 120.0;  // seconds per HTTP request
  ProviderMode mode = ProviderMode::Live;
  std::string fixture_dir;  // record and replay
};

struct ChatMessage {
  std::string role;  // system, user, assistant
  std::string content;
};

struct ChatRequest {
  std::string stage;
  std::vector<ChatMessage> messages;
};

struct ChatResponse {
  std::string text;
  int input_tokens = 0;
  int output_tokens = 0;
  bool tokens_estimated = false;  // no usage block available (replay, scripted)
  double seconds = 0;
  std::string request_hash;
};

/// Transport failure, HTTP error after retries, or a missing replay fixture.
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Stage name plus the prompt with line endings and trailing whitespace normalised.
std::string canonical_request(const ChatRequest& req);
/// "<stage>-<first 16 hex digits of SHA-256(canonical_request)>"; the fixture file name
/// is this plus ".txt".
std::string request_hash(const ChatRequest& req);
/// Rough token count (one token per four bytes, rounded up).
int estimate_tokens(const std::string& text);
int estimate_tokens(const ChatRequest& req);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

/// OpenAI-compatible chat-completion endpoint over HTTP(S). Retries network errors,
/// 429 and 5xx with exponential backoff.
class HttpProvider : public Provider {
 public:
  /// Throws ConfigError naming the env var when the API key is not set.
  explicit HttpProvider(ProviderConfig config);
  ChatResponse complete(const ChatRequest& req) override;

 private:
  ProviderConfig config_;
  std::string key_;
  std::string host_;  // scheme://host[:port]
  std::string path_;
};

/// Reads responses from `dir/<hash>.txt`; never touches the network.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(std::string dir) : dir_(std::move(dir)) {}
  ChatResponse complete(const ChatRequest& req) override;

 private:
  std::string dir_;
};

/// Forwards to `inner` and stores each response under `dir/<hash>.txt`.
class RecordingProvider : public Provider {
 public:
  RecordingProvider(std::unique_ptr<Provider> inner, std::string dir);
  ChatResponse complete(const ChatRequest& req) override;

 private:
  std::unique_ptr<Provider> inner_;
  std::string dir_;
};

/// Answers from per-stage queues (tests and fixture authoring). An exhausted or unknown
/// stage raises ProviderError.
class ScriptedProvider : public Provider {
 public:
  ScriptedProvider() = default;
  explicit ScriptedProvider(std::map<std::string, std::deque<std::string>> responses)
      : responses_(std::move(responses)) {}

  void push(const std::string& stage, std::string text) { responses_[stage].push_back(std::move(text)); }
  ChatResponse complete(const ChatRequest& req) override;

  const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  std::map<std::string, std::deque<std::string>> responses_;
  std::vector<ChatRequest> requests_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

}  // namespace castl::llm
