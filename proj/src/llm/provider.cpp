#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "castl/llm/provider.hpp"

#include <openssl/sha.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "castl/util/strings.hpp"
#include "httplib.h"
#include "json.hpp"

namespace castl::llm {

using nlohmann::json;

namespace {

std::string normalise(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  std::string out;
  for (std::size_t i = first; i < lines.size(); ++i) {
    out += lines[i];
    out += '\n';
  }
  return out;
}

std::string hex(const unsigned char* data, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    s += digits[data[i] >> 4];
    s += digits[data[i] & 15];
  }
  return s;
}

std::string fixture_path(const std::string& dir, const std::string& hash) {
  return (std::filesystem::path(dir) / (hash + ".txt")).string();
}

}  // namespace

std::string to_string(ProviderMode m) {
  switch (m) {
    case ProviderMode::Live: return "live";
    case ProviderMode::Record: return "record";
    case ProviderMode::Replay: return "replay";
  }
  return "?";
}

ProviderMode parse_provider_mode(const std::string& s) {
  const std::string m = util::to_lower(s);
  if (m == "live") return ProviderMode::Live;
  if (m == "record") return ProviderMode::Record;
  if (m == "replay") return ProviderMode::Replay;
  throw ConfigError("unknown provider mode '" + s + "' (expected live, record or replay)");
}

std::string canonical_request(const ChatRequest& req) {
  std::string out = "stage: " + req.stage + "\n";
  for (const auto& m : req.messages) out += "[" + m.role + "]\n" + normalise(m.content);
  return out;
}

std::string request_hash(const ChatRequest& req) {
  const std::string text = canonical_request(req);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  return req.stage + "-" + hex(digest, 8);
}

int estimate_tokens(const std::string& text) { return static_cast<int>((text.size() + 3) / 4); }

int estimate_tokens(const ChatRequest& req) {
  int n = 0;
  for (const auto& m : req.messages) n += estimate_tokens(m.content) + 4;  // per-message overhead
  return n;
}

// ------------------------------------------------------------------ live

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("live provider needs an API key in the environment variable " + config_.api_key_env);
  }
  key_ = key;
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("provider endpoint must be an http(s) URL: " + config_.endpoint);
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  host_ = config_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

ChatResponse HttpProvider::complete(const ChatRequest& req) {
  json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["messages"] = json::array();
  for (const auto& m : req.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();

  httplib::Client client(host_);
  const auto timeout = std::chrono::milliseconds(static_cast<long>(config_.request_timeout * 1000));
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
  const httplib::Headers headers{{"Authorization", "Bearer " + key_}};

  std::string last_error;
  const auto t0 = std::chrono::steady_clock::now();
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500L << (attempt - 1)));
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
    }
    try {
      const json j = json::parse(res->body);
      ChatResponse out;
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage")) {
        out.input_tokens = j["usage"].value("prompt_tokens", 0);
        out.output_tokens = j["usage"].value("completion_tokens", 0);
      } else {
        out.input_tokens = estimate_tokens(req);
        out.output_tokens = estimate_tokens(out.text);
        out.tokens_estimated = true;
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.request_hash = request_hash(req);
      return out;
    } catch (const json::exception& e) {
      throw ProviderError(std::string("malformed provider response: ") + e.what());
    }
  }
  throw ProviderError("provider failed after " + std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

// ------------------------------------------------------------------ replay / record

ChatResponse ReplayProvider::complete(const ChatRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string hash = request_hash(req);
  const std::string path = fixture_path(dir_, hash);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProviderError("missing replay fixture " + hash + ".txt for stage '" + req.stage + "' in " + dir_);
  std::ostringstream ss;
  ss << in.rdbuf();
  ChatResponse out;
  out.text = ss.str();
  out.input_tokens = estimate_tokens(req);
  out.output_tokens = estimate_tokens(out.text);
  out.tokens_estimated = true;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.request_hash = hash;
  return out;
}

RecordingProvider::RecordingProvider(std::unique_ptr<Provider> inner, std::string dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

ChatResponse RecordingProvider::complete(const ChatRequest& req) {
  ChatResponse out = inner_->complete(req);
  out.request_hash = request_hash(req);
  std::ofstream f(fixture_path(dir_, out.request_hash), std::ios::binary);
  if (!f) throw ProviderError("cannot write fixture into " + dir_);
  f << out.text;
  return out;
}

ChatResponse ScriptedProvider::complete(const ChatRequest& req) {
  requests_.push_back(req);
  auto it = responses_.find(req.stage);
  if (it == responses_.end() || it->second.empty()) {
    throw ProviderError("scripted provider has no response left for stage '" + req.stage + "'");
  }
  ChatResponse out;
  out.text = std::move(it->second.front());
  it->second.pop_front();
  out.input_tokens = estimate_tokens(req);
  out.output_tokens = estimate_tokens(out.text);
  out.tokens_estimated = true;
  out.request_hash = request_hash(req);
  return out;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
  switch (config.mode) {
    case ProviderMode::Live: return std::make_unique<HttpProvider>(config);
    case ProviderMode::Record:
      if (config.fixture_dir.empty()) throw ConfigError("record mode needs a fixture directory");
      return std::make_unique<RecordingProvider>(std::make_unique<HttpProvider>(config), config.fixture_dir);
    case ProviderMode::Replay:
      if (config.fixture_dir.empty()) throw ConfigError("replay mode needs a fixture directory");
      return std::make_unique<ReplayProvider>(config.fixture_dir);
  }
  throw ConfigError("bad provider mode");
}

}  // namespace castl::llm
