#pragma once
// Text-generation backend interface plus the endpoint client configuration.
// The HTTP implementation lives in openai_client.hpp; tests substitute
// scripted backends.

#include <string>
#include <vector>

#include "bdc/errors.hpp"

namespace bdc {

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 256;
  double temperature = 0.0;
};

class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;

  virtual std::string model_name() const = 0;
  virtual bool supports_logprobs() const { return false; }

  // Completion text for a prompt.
  virtual std::string complete(const GenerationRequest& req) = 0;

  // Per-token log-probabilities of `continuation` given `context`.
  virtual std::vector<double> continuation_logprobs(const std::string& context,
                                                    const std::string& continuation) {
    (void)context;
    (void)continuation;
    throw MissingLogprobs("backend does not expose logprobs");
  }

  // Per-token log-probabilities of a standalone text.
  virtual std::vector<double> sequence_logprobs(const std::string& text) {
    (void)text;
    throw MissingLogprobs("backend does not expose logprobs");
  }
};

struct RetryPolicy {
  int max_attempts = 4;
  int base_delay_ms = 250;
  int max_delay_ms = 4000;
};

// Connection settings for an OpenAI-compatible completions endpoint.
struct GenerationClient {
  std::string endpoint;  // e.g. http://127.0.0.1:8000
  std::string model_name;
  std::string api_key;  // empty = no Authorization header
  int max_tokens = 256;
  double temperature = 0.0;
  int concurrency = 4;
  RetryPolicy retry;

  void validate() const {
    if (endpoint.empty()) throw ConfigError("endpoint url is empty");
    if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0)
      throw ConfigError("endpoint must start with http:// or https://");
    if (model_name.empty()) throw ConfigError("model name is empty");
    if (max_tokens < 1) throw ConfigError("max_tokens must be positive");
    if (concurrency < 1) throw ConfigError("concurrency must be positive");
    if (retry.max_attempts < 1) throw ConfigError("retry attempts must be positive");
  }
};

}  // namespace bdc
