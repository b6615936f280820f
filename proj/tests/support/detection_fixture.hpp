#pragma once
// Reference detection scores for 14 public models, used to pin the verdict
// and gate rules against a known screening outcome. Token-probability
// scores use per-model thresholds (WikiMIA for the multiple-choice
// benchmarks, LiveBench for GSM8K); rank-test cells hold p-values; guessing
// cells hold mean Rouge-L F1.

#include <set>
#include <string>
#include <vector>

namespace fixture {

struct MinKRow {
  const char* model;
  double arc_c, mmlu, truthful_qa;
  double wikimia;  // threshold for the three multiple-choice benchmarks
  double gsm8k;
  double livebench;  // threshold for gsm8k
};

inline const std::vector<MinKRow>& min_k_rows() {
  static const std::vector<MinKRow> rows = {
      {"Llama-3.2-1B", -7.97, -8.99, -9.06, -8.72, -7.19, -5.29},
      {"Qwen2.5-3B", -8.45, -8.91, -8.79, -6.68, -8.00, -4.07},
      {"Llama-3.2-3B", -7.91, -8.61, -8.56, -6.92, -6.95, -5.35},
      {"Yi-1.5-6B", -7.19, -8.08, -8.41, -6.59, -7.90, -7.60},
      {"vicuna-7b-v1.5", -8.11, -8.72, -9.12, -7.54, -7.31, -6.09},
      {"gemma-7b", -14.11, -15.39, -17.24, -14.22, -12.29, -10.62},
      {"OLMo-7B", -8.27, -9.34, -8.68, -8.27, -7.50, -5.75},
      {"Llama-3.1-8B", -7.43, -8.43, -8.13, -5.65, -6.76, -5.24},
      {"Falcon3-10B", -8.45, -8.81, -10.84, -7.83, -7.71, -5.28},
      {"Qwen2.5-14B", -7.66, -8.42, -8.62, -7.09, -7.36, -3.47},
      {"Phi-3-medium", -6.41, -7.06, -7.51, -5.81, -5.90, -4.83},
      {"DeepSeek-V2-Lite", -8.38, -9.14, -8.60, -7.56, -6.90, -5.43},
      {"Qwen2.5-32B", -7.12, -8.21, -8.73, -6.93, -7.54, -3.37},
      {"Yi-1.5-34B", -7.37, -8.15, -8.33, -5.79, -7.10, -6.84},
  };
  return rows;
}

struct ShardedRow {
  const char* model;
  double arc_c, mmlu, truthful_qa, gsm8k;  // p-values
};

inline const std::vector<ShardedRow>& sharded_rows() {
  static const std::vector<ShardedRow> rows = {
      {"Llama-3.2-1B", 0.493, 0.222, 0.266, 0.202},
      {"Qwen2.5-3B", 0.178, 0.388, 0.210, 0.099},
      {"Llama-3.2-3B", 0.985, 0.302, 0.221, 0.196},
      {"Yi-1.5-6B", 0.457, 0.861, 0.192, 0.390},
      {"vicuna-7b-v1.5", 0.557, 0.897, 0.764, 0.120},
      {"gemma-7b", 0.946, 0.614, 0.343, 0.912},
      {"OLMo-7B", 0.633, 0.846, 0.044, 0.495},
      {"Llama-3.1-8B", 0.860, 0.075, 0.166, 0.318},
      {"Falcon3-10B", 0.800, 0.077, 0.550, 0.614},
      {"Qwen2.5-14B", 0.072, 0.639, 0.053, 0.057},
      {"Phi-3-medium", 0.799, 0.050, 0.158, 0.129},
      {"DeepSeek-V2-Lite", 0.603, 0.819, 0.095, 0.518},
      {"Qwen2.5-32B", 0.655, 0.806, 0.185, 0.137},
      {"Yi-1.5-34B", 0.358, 0.173, 0.064, 0.989},
  };
  return rows;
}

struct GuessRow {
  const char* model;
  double arc_c, mmlu, truthful_qa;  // mean Rouge-L F1
};

inline const std::vector<GuessRow>& guess_rows() {
  static const std::vector<GuessRow> rows = {
      {"Llama-3.2-1B", 0.02, 0.04, 0.03},
      {"Qwen2.5-3B", 0.67, 0.41, 0.22},
      {"Llama-3.2-3B", 0.08, 0.07, 0.16},
      {"Yi-1.5-6B", 0.15, 0.10, 0.18},
      {"vicuna-7b-v1.5", 0.12, 0.12, 0.27},
      {"gemma-7b", 0.22, 0.18, 0.44},
      {"OLMo-7B", 0.14, 0.15, 0.25},
      {"Llama-3.1-8B", 0.08, 0.07, 0.11},
      {"Falcon3-10B", 0.26, 0.16, 0.25},
      {"Qwen2.5-14B", 0.27, 0.20, 0.26},
      {"Phi-3-medium", 0.19, 0.17, 0.29},
      {"DeepSeek-V2-Lite", 0.05, 0.02, 0.03},
      {"Qwen2.5-32B", 0.22, 0.19, 0.31},
      {"Yi-1.5-34B", 0.18, 0.14, 0.31},
  };
  return rows;
}

// Expected screening outcome over all three methods combined.
inline const std::set<std::string>& expected_rejected() {
  static const std::set<std::string> s = {"Llama-3.2-1B", "Qwen2.5-3B", "gemma-7b", "OLMo-7B"};
  return s;
}

inline const std::vector<std::string>& all_models() {
  static std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& r : min_k_rows()) out.push_back(r.model);
    return out;
  }();
  return v;
}

}  // namespace fixture
