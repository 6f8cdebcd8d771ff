#pragma once

#include <string>
#include <vector>

#include "docbias/util.hpp"

namespace docbias {

struct LlmConfig {
  std::string endpoint;  // full chat-completions URL, e.g. http://host:1234/v1/chat/completions
  std::string model;
  std::string api_key;   // empty = no Authorization header
  std::vector<std::string> labels;  // scheme classes, canonical order
  int timeout_s = 30;
  int workers = 4;       // bounded in-flight requests
  std::string cache_path;  // empty = no cache
};

struct LlmArticle {
  std::string id;
  std::string title;
  std::string body;
  std::string true_label;
};

struct LlmPrediction {
  std::string id;
  std::string true_label;
  std::string pred_label;  // matched label, or "unparseable"
  std::string raw_response;
  std::string error;       // nonempty when the request itself failed
  bool from_cache = false;
};

// the zero-shot prompt sent for every article
std::string build_llm_prompt(const std::string& title,
                             const std::string& article,
                             const std::vector<std::string>& labels);

// case-insensitive exact match after trimming whitespace and surrounding
// punctuation; "" when nothing matches
std::string parse_llm_label(const std::string& response,
                            const std::vector<std::string>& labels);

// classifies every article via the chat-completions endpoint; an unmatched
// response is retried once and then recorded as "unparseable"; HTTP failures
// are recorded per article; 401/403 aborts with UserError
std::vector<LlmPrediction> llm_classify(const LlmConfig& cfg,
                                        const std::vector<LlmArticle>& articles);

}  // namespace docbias
