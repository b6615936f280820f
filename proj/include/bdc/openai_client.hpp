#pragma once
// HTTP backend for OpenAI-compatible /v1/completions endpoints. Logprob
// queries use echo mode and slice the prompt tokens off by character
// offset, so continuation scores cover exactly the continuation text.

#include <chrono>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bdc/backend.hpp"
#include "bdc/errors.hpp"

namespace bdc {

class OpenAIClient : public InferenceBackend {
 public:
  explicit OpenAIClient(GenerationClient config) : config_(std::move(config)) {
    config_.validate();
    http_ = std::make_unique<httplib::Client>(config_.endpoint);
    http_->set_connection_timeout(30);
    http_->set_read_timeout(120);
    if (!config_.api_key.empty())
      http_->set_default_headers({{"Authorization", "Bearer " + config_.api_key}});
  }

  std::string model_name() const override { return config_.model_name; }
  bool supports_logprobs() const override { return true; }

  std::string complete(const GenerationRequest& req) override {
    nlohmann::json body = {{"model", config_.model_name},
                           {"prompt", req.prompt},
                           {"max_tokens", req.max_tokens},
                           {"temperature", req.temperature}};
    auto reply = post_json(body);
    try {
      return reply.at("choices").at(0).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw EndpointError(std::string("malformed completion reply: ") + e.what());
    }
  }

  std::vector<double> continuation_logprobs(const std::string& context,
                                            const std::string& continuation) override {
    return echo_logprobs(context + continuation, context.size());
  }

  std::vector<double> sequence_logprobs(const std::string& text) override {
    return echo_logprobs(text, 0);
  }

 private:
  // Scores `text` with echo=true and returns the logprobs of the tokens
  // that start at or after `from_offset` characters into the text.
  std::vector<double> echo_logprobs(const std::string& text, std::size_t from_offset) {
    nlohmann::json body = {{"model", config_.model_name}, {"prompt", text},
                           {"max_tokens", 0},            {"temperature", 0.0},
                           {"echo", true},               {"logprobs", 0}};
    auto reply = post_json(body);
    try {
      const auto& lp = reply.at("choices").at(0).at("logprobs");
      const auto& values = lp.at("token_logprobs");
      const auto& offsets = lp.at("text_offset");
      std::vector<double> out;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (offsets.at(i).get<std::size_t>() < from_offset) continue;
        if (values.at(i).is_null()) continue;  // first token has no score
        out.push_back(values.at(i).get<double>());
      }
      if (out.empty()) throw MissingLogprobs("endpoint returned no usable logprobs");
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw EndpointError(std::string("malformed logprobs reply: ") + e.what());
    }
  }

  // POST with bounded exponential backoff on transport errors, 429, and
  // 5xx. Anything else non-200 fails immediately; retries exhausted fail
  // with the last error.
  nlohmann::json post_json(const nlohmann::json& body) {
    std::string payload = body.dump();
    std::string last_error;
    int delay_ms = config_.retry.base_delay_ms;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
      auto res = http_->Post("/v1/completions", payload, "application/json");
      if (res && res->status == 200) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
          throw EndpointError(std::string("endpoint returned invalid json: ") + e.what());
        }
      }
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
      } else if (res->status == 429 || res->status >= 500) {
        last_error = "http " + std::to_string(res->status);
      } else {
        throw EndpointError("http " + std::to_string(res->status) + ": " + res->body);
      }
      if (attempt < config_.retry.max_attempts) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
        delay_ms = std::min(delay_ms * 2, config_.retry.max_delay_ms);
      }
    }
    throw EndpointError("endpoint unavailable after " +
                        std::to_string(config_.retry.max_attempts) + " attempts (" + last_error +
                        ")");
  }

  GenerationClient config_;
  std::unique_ptr<httplib::Client> http_;
};

}  // namespace bdc
